//! The random arrival rate Λ, its standardized form X = (Λ − λ)/√λ, and
//! numerical expectation over it.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::ArrivalError;
use crate::quadrature::{gauss_jacobi, gauss_legendre};
use crate::scalar::brent_root;

/// Default number of quadrature nodes.
pub const DEFAULT_NODES: usize = 64;

/// Distribution of the arrival rate, known only in law when staffing.
///
/// Deserializes from the config literals
/// `{"kind":"uniform","lo":90,"hi":110}`, `{"kind":"degenerate","value":100}`
/// and `{"kind":"beta","alpha1":1.5,"alpha2":0.5,"lo":a,"hi":b}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawDistribution")]
pub enum ArrivalDistribution {
    Degenerate { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Beta { alpha1: f64, alpha2: f64, lo: f64, hi: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawDistribution {
    Degenerate { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Beta { alpha1: f64, alpha2: f64, lo: f64, hi: f64 },
}

impl TryFrom<RawDistribution> for ArrivalDistribution {
    type Error = ArrivalError;

    fn try_from(raw: RawDistribution) -> Result<Self, Self::Error> {
        match raw {
            RawDistribution::Degenerate { value } => Self::degenerate(value),
            RawDistribution::Uniform { lo, hi } => Self::uniform(lo, hi),
            RawDistribution::Beta { alpha1, alpha2, lo, hi } => Self::beta(alpha1, alpha2, lo, hi),
        }
    }
}

fn check_support(lo: f64, hi: f64) -> Result<(), ArrivalError> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(ArrivalError::InvalidParameter(format!(
            "support [{lo}, {hi}] is not finite"
        )));
    }
    if lo < 0.0 {
        return Err(ArrivalError::NegativeSupport(lo));
    }
    if lo > hi {
        return Err(ArrivalError::InvalidParameter(format!(
            "lower bound {lo} exceeds upper bound {hi}"
        )));
    }
    Ok(())
}

impl ArrivalDistribution {
    pub fn degenerate(value: f64) -> Result<Self, ArrivalError> {
        check_support(value, value)?;
        Ok(Self::Degenerate { value })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, ArrivalError> {
        check_support(lo, hi)?;
        Ok(Self::Uniform { lo, hi })
    }

    /// Beta(alpha1, alpha2) rescaled to `[lo, hi]`.
    pub fn beta(alpha1: f64, alpha2: f64, lo: f64, hi: f64) -> Result<Self, ArrivalError> {
        check_support(lo, hi)?;
        if !(alpha1 > 0.0 && alpha2 > 0.0 && alpha1.is_finite() && alpha2.is_finite()) {
            return Err(ArrivalError::InvalidParameter(format!(
                "beta shapes must be positive, got ({alpha1}, {alpha2})"
            )));
        }
        Ok(Self::Beta { alpha1, alpha2, lo, hi })
    }

    /// Beta law with the given shapes, mean `mean` and variance `sd²`.
    ///
    /// With E[X] = 0 the bounds satisfy upper/lower = −α2/α1, and the variance
    /// pins the lower offset: lower² = σ²·α1(α1 + α2 + 1)/α2.
    pub fn beta_with_moments(alpha1: f64, alpha2: f64, mean: f64, sd: f64) -> Result<Self, ArrivalError> {
        let below = sd * (alpha1 * (alpha1 + alpha2 + 1.0) / alpha2).sqrt();
        let above = below * alpha2 / alpha1;
        Self::beta(alpha1, alpha2, mean - below, mean + above)
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Degenerate { value } => (value, value),
            Self::Uniform { lo, hi } | Self::Beta { lo, hi, .. } => (lo, hi),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Degenerate { value } => value,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Beta { alpha1, alpha2, lo, hi } => lo + (hi - lo) * alpha1 / (alpha1 + alpha2),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Degenerate { .. } => 0.0,
            Self::Uniform { lo, hi } => (hi - lo).powi(2) / 12.0,
            Self::Beta { alpha1, alpha2, lo, hi } => {
                let s = alpha1 + alpha2;
                (hi - lo).powi(2) * alpha1 * alpha2 / (s * s * (s + 1.0))
            }
        }
    }

    /// √Var[Λ] / E[Λ].
    pub fn coefficient_of_variation(&self) -> Result<f64, ArrivalError> {
        let m = self.mean();
        if m == 0.0 {
            return Err(ArrivalError::ZeroMean);
        }
        Ok(self.variance().sqrt() / m)
    }

    pub fn skewness(&self) -> f64 {
        match *self {
            Self::Degenerate { .. } | Self::Uniform { .. } => 0.0,
            Self::Beta { alpha1, alpha2, lo, hi } => {
                if hi == lo {
                    return 0.0;
                }
                let s = alpha1 + alpha2;
                2.0 * (alpha2 - alpha1) * (s + 1.0).sqrt() / ((s + 2.0) * (alpha1 * alpha2).sqrt())
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Degenerate { value } => {
                if x >= value {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Uniform { lo, hi } => {
                if x < lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            Self::Beta { alpha1, alpha2, lo, hi } => {
                if x <= lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    beta_reg(alpha1, alpha2, (x - lo) / (hi - lo))
                }
            }
        }
    }

    /// Smallest x with F(x) ≥ q; `q = 0` maps to the lower support bound.
    pub fn inverse_cdf(&self, q: f64) -> Result<f64, ArrivalError> {
        if !(0.0..=1.0).contains(&q) {
            return Err(ArrivalError::InvalidQuantile(q));
        }
        let (lo, hi) = self.support();
        if q == 0.0 || hi == lo {
            return Ok(lo);
        }
        if q == 1.0 {
            return Ok(hi);
        }
        Ok(match *self {
            Self::Degenerate { value } => value,
            Self::Uniform { lo, hi } => lo + q * (hi - lo),
            Self::Beta { alpha1, alpha2, lo, hi } => {
                let u = brent_root(|u| beta_reg(alpha1, alpha2, u) - q, 0.0, 1.0, 1e-15, 0.0, 200)
                    .expect("regularized incomplete beta spans [0, 1]");
                lo + u * (hi - lo)
            }
        })
    }

    /// Quadrature rule with `n` nodes on the support; a degenerate law always
    /// gets a single node.
    pub fn rule(&self, n: usize) -> QuadratureRule {
        let n = n.max(1);
        let (lo, hi) = self.support();
        let unit = match *self {
            Self::Degenerate { .. } => None,
            _ if hi == lo => None,
            Self::Uniform { .. } => Some(gauss_legendre(n)),
            Self::Beta { alpha1, alpha2, .. } => Some(gauss_jacobi(n, alpha2 - 1.0, alpha1 - 1.0)),
        };
        match unit {
            None => QuadratureRule {
                nodes: vec![lo],
                weights: vec![1.0],
            },
            Some(u) => QuadratureRule {
                nodes: u.nodes.iter().map(|t| lo + 0.5 * (t + 1.0) * (hi - lo)).collect(),
                weights: u.weights,
            },
        }
    }

    /// E[f(Λ)] under `rule`, which must have been built for this law.
    pub fn expect<F>(&self, rule: &QuadratureRule, f: F) -> Result<f64, ArrivalError>
    where
        F: FnMut(f64) -> f64,
    {
        rule.integrate(f)
    }

    /// X = (Λ − λ)/√λ.
    pub fn standardize(&self) -> Result<StandardizedDistribution, ArrivalError> {
        let center = self.mean();
        if center <= 0.0 {
            return Err(ArrivalError::ZeroMean);
        }
        Ok(StandardizedDistribution {
            base: *self,
            center,
            scale: center.sqrt(),
        })
    }
}

/// Nodes and probability weights for an expectation over one distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F>(&self, mut f: F) -> Result<f64, ArrivalError>
    where
        F: FnMut(f64) -> f64,
    {
        let mut acc = 0.0;
        for (x, w) in self.iter() {
            let v = f(x);
            if !v.is_finite() {
                return Err(ArrivalError::NonFiniteIntegrand { node: x, value: v });
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

/// The law of X = (Λ − λ)/√λ for λ = E[Λ].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardizedDistribution {
    pub base: ArrivalDistribution,
    pub center: f64,
    pub scale: f64,
}

impl StandardizedDistribution {
    pub fn to_rate(&self, x: f64) -> f64 {
        self.center + x * self.scale
    }

    pub fn to_standard(&self, l: f64) -> f64 {
        (l - self.center) / self.scale
    }

    /// Rule over x-values, mapped from the base rule.
    pub fn rule(&self, n: usize) -> QuadratureRule {
        let base = self.base.rule(n);
        QuadratureRule {
            nodes: base.nodes.iter().map(|&l| self.to_standard(l)).collect(),
            weights: base.weights,
        }
    }

    /// The point mass at zero with the same center, which is what a
    /// deterministic-rate planner assumes.
    pub fn collapsed(&self) -> StandardizedDistribution {
        StandardizedDistribution {
            base: ArrivalDistribution::Degenerate { value: self.center },
            center: self.center,
            scale: self.scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(lo: f64, hi: f64) -> ArrivalDistribution {
        ArrivalDistribution::uniform(lo, hi).unwrap()
    }

    #[test]
    fn means() {
        assert_eq!(u(90.0, 110.0).mean(), 100.0);
        assert_eq!(ArrivalDistribution::degenerate(100.0).unwrap().mean(), 100.0);
        let b = ArrivalDistribution::beta(1.0, 1.0, 10.0, 190.0).unwrap();
        assert!((b.mean() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn coefficient_of_variation_values() {
        let cv = u(90.0, 110.0).coefficient_of_variation().unwrap();
        assert!((cv - 1.0 / (10.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((cv - 0.0577).abs() < 5e-5);
        // (1/√3)(b − a)/(a + b)
        let cv = u(50.0, 150.0).coefficient_of_variation().unwrap();
        assert!((cv - 100.0 / (200.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((cv - 0.2887).abs() < 5e-5);
        assert_eq!(
            ArrivalDistribution::degenerate(7.0)
                .unwrap()
                .coefficient_of_variation()
                .unwrap(),
            0.0
        );
        assert!(matches!(
            ArrivalDistribution::degenerate(0.0).unwrap().coefficient_of_variation(),
            Err(ArrivalError::ZeroMean)
        ));
    }

    #[test]
    fn inverse_cdf_values() {
        assert!((u(90.0, 110.0).inverse_cdf(0.9).unwrap() - 108.0).abs() < 1e-9);
        assert!((u(10.0, 190.0).inverse_cdf(0.9).unwrap() - 172.0).abs() < 1e-9);
        assert_eq!(u(10.0, 190.0).inverse_cdf(0.0).unwrap(), 10.0);
        let b = ArrivalDistribution::beta(1.5, 0.5, 3.0, 40.0).unwrap();
        assert_eq!(b.inverse_cdf(0.0).unwrap(), 3.0);
        assert!(matches!(b.inverse_cdf(1.2), Err(ArrivalError::InvalidQuantile(_))));
        assert!(matches!(b.inverse_cdf(-0.1), Err(ArrivalError::InvalidQuantile(_))));
    }

    #[test]
    fn beta_inverse_cdf_round_trips() {
        let b = ArrivalDistribution::beta(0.7, 1.3, 20.0, 180.0).unwrap();
        for i in 1..40 {
            let x = 20.0 + 160.0 * i as f64 / 40.0;
            let back = b.inverse_cdf(b.cdf(x)).unwrap();
            assert!((back - x).abs() < 1e-9, "x={x} back={back}");
        }
    }

    #[test]
    fn expectations() {
        let d = u(90.0, 110.0);
        let r = d.rule(DEFAULT_NODES);
        assert!((d.expect(&r, |l| l).unwrap() - 100.0).abs() < 1e-10);
        assert!((d.expect(&r, |_| 1.0).unwrap() - 1.0).abs() < 1e-12);
        // E[Λ²] = Var + mean² = 400/12 + 10000
        let m2 = d.expect(&r, |l| l * l).unwrap();
        assert!((m2 - (10000.0 + 400.0 / 12.0)).abs() < 1e-6);
        assert!((m2 - 10033.33).abs() < 5e-3);
        assert!(matches!(
            d.expect(&r, |l| if l > 105.0 { f64::NAN } else { l }),
            Err(ArrivalError::NonFiniteIntegrand { .. })
        ));
    }

    #[test]
    fn standardize_maps_supports() {
        let x = u(90.0, 110.0).standardize().unwrap();
        let r = x.rule(DEFAULT_NODES);
        assert!(r.nodes.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert!(r.integrate(|v| v).unwrap().abs() < 1e-9);
        let x = u(10.0, 190.0).standardize().unwrap();
        assert_eq!(x.to_standard(10.0), -9.0);
        assert_eq!(x.to_standard(190.0), 9.0);
        let x = ArrivalDistribution::degenerate(100.0).unwrap().standardize().unwrap();
        let r = x.rule(DEFAULT_NODES);
        assert_eq!(r.nodes, vec![0.0]);
        assert!(matches!(
            ArrivalDistribution::degenerate(0.0).unwrap().standardize(),
            Err(ArrivalError::ZeroMean)
        ));
    }

    #[test]
    fn skewness_values() {
        assert_eq!(ArrivalDistribution::beta(1.0, 1.0, 0.0, 1.0).unwrap().skewness(), 0.0);
        assert!((ArrivalDistribution::beta(1.5, 0.5, 0.0, 1.0).unwrap().skewness() + 1.0).abs() < 1e-12);
        assert!((ArrivalDistribution::beta(0.5, 1.5, 0.0, 1.0).unwrap().skewness() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beta_with_moments_hits_targets() {
        let sd = (400.0f64 / 12.0).sqrt();
        for (a1, a2) in [(1.5, 0.5), (1.0, 1.0), (0.6, 1.4)] {
            let b = ArrivalDistribution::beta_with_moments(a1, a2, 100.0, sd).unwrap();
            assert!((b.mean() - 100.0).abs() < 1e-10);
            assert!((b.variance() - sd * sd).abs() < 1e-9);
        }
        // symmetric shape recovers U[90, 110]
        let b = ArrivalDistribution::beta_with_moments(1.0, 1.0, 100.0, sd).unwrap();
        let (lo, hi) = b.support();
        assert!((lo - 90.0).abs() < 1e-9 && (hi - 110.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_negative_support() {
        assert!(matches!(
            ArrivalDistribution::uniform(-1.0, 3.0),
            Err(ArrivalError::NegativeSupport(_))
        ));
        assert!(ArrivalDistribution::beta(0.0, 1.0, 0.0, 1.0).is_err());
        let parsed: Result<ArrivalDistribution, _> = serde_json::from_str(r#"{"kind":"uniform","lo":-2,"hi":3}"#);
        assert!(parsed.is_err());
    }

    #[test]
    fn parses_config_literals() {
        let d: ArrivalDistribution = serde_json::from_str(r#"{"kind":"uniform","lo":90,"hi":110}"#).unwrap();
        assert_eq!(d, u(90.0, 110.0));
        let d: ArrivalDistribution = serde_json::from_str(r#"{"kind":"degenerate","value":100}"#).unwrap();
        assert_eq!(d.mean(), 100.0);
        let d: ArrivalDistribution =
            serde_json::from_str(r#"{"kind":"beta","alpha1":1.5,"alpha2":0.5,"lo":80,"hi":120}"#).unwrap();
        assert!(matches!(d, ArrivalDistribution::Beta { .. }));
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains(r#""kind":"beta""#));
    }
}
