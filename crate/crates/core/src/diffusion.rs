//! Diffusion limit of the scaled operating cost, the optimal scaled
//! threshold T̂*, and the safety parameter β* of the square-root policy.
//!
//! With s = √γ, u = m/s and v = s·T̂ + u the limiting cost is ẑ = A/B where
//!
//! ```text
//! A = p·φ(v) + a′·[φ(u) − φ(v) − u·(Φ(v) − Φ(u))]
//! B = (φ(u)/φ(m))·Φ(m) + (Φ(v) − Φ(u))/s
//! ```
//!
//! Both A and B are divided by φ(w) for a reference point w chosen inside or
//! next to [u, v], so nothing underflows when |m| is large. The difference
//! Φ(v) − Φ(u) is taken from whichever tail keeps it free of cancellation.

use serde::Serialize;

use crate::arrival::{QuadratureRule, StandardizedDistribution};
use crate::error::DiffusionError;
use crate::normal::{ln_mills_lower, mills_lower, mills_upper, sf};
use crate::queue::CostParams;
use crate::scalar::{brent_root, golden_section_min};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Scaled threshold T̂*, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ScaledThreshold {
    Finite(f64),
    Infinite,
}

/// exp((w² − x²)/2) = φ(x)/φ(w).
fn rel_pdf(w: f64, x: f64) -> f64 {
    (0.5 * (w - x) * (w + x)).exp()
}

/// Φ(x)/φ(x) scaled by φ(u)/φ(w), via logs when the ratio would overflow.
fn scaled_lower_mills(m: f64, u: f64, w: f64) -> f64 {
    if m < 30.0 {
        rel_pdf(w, u) * mills_lower(m)
    } else {
        (0.5 * (w - u) * (w + u) + ln_mills_lower(m)).exp()
    }
}

/// (Φ(v) − Φ(u))/φ(w) and the reference point w, for u ≤ v ≤ +∞.
fn scaled_mass(u: f64, v: f64) -> (f64, f64) {
    if v < 0.0 {
        (mills_lower(v) - mills_lower(u) * rel_pdf(v, u), v)
    } else if u > 0.0 {
        let upper = if v.is_finite() {
            mills_upper(v) * rel_pdf(u, v)
        } else {
            0.0
        };
        (mills_upper(u) - upper, u)
    } else {
        let upper = if v.is_finite() { sf(v) } else { 0.0 };
        // Φ(v) − Φ(u) = (1 − Φ(u)) − (1 − Φ(v)) with u ≤ 0, so the first term
        // is at least 1/2 and the difference is well conditioned.
        ((sf(u) - upper) * SQRT_2PI, 0.0)
    }
}

/// ẑ(m, T̂) for finite T̂ ≥ 0.
pub fn zhat(m: f64, t_hat: f64, p: f64, a_eff: f64, gamma: f64) -> f64 {
    let s = gamma.sqrt();
    let u = m / s;
    let v = s * t_hat + u;
    let (mass, w) = scaled_mass(u, v);
    let eu = rel_pdf(w, u);
    let ev = rel_pdf(w, v);
    let partial = (eu - ev - u * mass).max(0.0);
    let a = p * ev + a_eff * partial;
    let b = scaled_lower_mills(m, u, w) + mass / s;
    if b.is_infinite() {
        return 0.0;
    }
    (a / b).max(0.0)
}

/// lim ẑ(m, T̂) as T̂ → ∞; the outsourcing cost drops out.
pub fn zhat_inf(m: f64, a_eff: f64, gamma: f64) -> f64 {
    let s = gamma.sqrt();
    let u = m / s;
    let (mass, w) = scaled_mass(u, f64::INFINITY);
    let eu = rel_pdf(w, u);
    let partial = (eu - u * mass).max(0.0);
    let b = scaled_lower_mills(m, u, w) + mass / s;
    if b.is_infinite() {
        return 0.0;
    }
    (a_eff * partial / b).max(0.0)
}

/// g(T̂) = (a′ − p)γT̂ − ẑ(m, T̂) − p·m, whose root is T̂*.
pub fn threshold_equation(m: f64, t_hat: f64, p: f64, a_eff: f64, gamma: f64) -> f64 {
    (a_eff - p) * gamma * t_hat - zhat(m, t_hat, p, a_eff, gamma) - p * m
}

const ROOT_FTOL: f64 = 1e-11;
const BRACKET_LIMIT: f64 = 1e3;

/// Optimal scaled threshold at drift m.
///
/// Infinite when a′ ≤ p. Otherwise g(0) = −p(φ(m)/Φ(m) + m) < 0 and g grows
/// linearly, so [0, 1] is widened by doubling until it brackets the root.
pub fn that_star(m: f64, p: f64, a_eff: f64, gamma: f64) -> Result<ScaledThreshold, DiffusionError> {
    if a_eff <= p {
        return Ok(ScaledThreshold::Infinite);
    }
    let g = |t: f64| threshold_equation(m, t, p, a_eff, gamma);
    if g(0.0) >= 0.0 {
        return Ok(ScaledThreshold::Finite(0.0));
    }
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > BRACKET_LIMIT {
            return Err(DiffusionError::BracketFailure { m });
        }
    }
    let root = brent_root(g, 0.0, hi, 0.0, ROOT_FTOL, 500).ok_or(DiffusionError::BracketFailure { m })?;
    Ok(ScaledThreshold::Finite(root))
}

/// ẑ(m, T̂*(m)): the diffusion cost under the best threshold.
pub fn optimal_zhat(m: f64, costs: &CostParams) -> Result<f64, DiffusionError> {
    let a_eff = costs.a_eff();
    Ok(match that_star(m, costs.p, a_eff, costs.gamma)? {
        ScaledThreshold::Finite(t) => zhat(m, t, costs.p, a_eff, costs.gamma),
        ScaledThreshold::Infinite => zhat_inf(m, a_eff, costs.gamma),
    })
}

/// cβ + E[ẑ(β − X, T̂*(β − X))].
pub fn diffusion_objective(beta: f64, rule: &QuadratureRule, costs: &CostParams) -> Result<f64, DiffusionError> {
    let mut acc = 0.0;
    for (x, w) in rule.iter() {
        acc += w * optimal_zhat(beta - x, costs)?;
    }
    Ok(costs.c * beta + acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaSolution {
    pub beta_star: f64,
    /// Objective value at `beta_star`.
    pub value: f64,
    /// Scan interval that contained the minimizer.
    pub bracket: (f64, f64),
}

const SCAN_STEP: f64 = 0.25;
const REFINE_TOL: f64 = 1e-6;

/// Global minimizer of [`diffusion_objective`] over β.
///
/// A 0.25-step scan of [−5, 5] is widened by 5 on either side until both ends
/// sit at least c above the best interior value; golden-section search then
/// refines around the best scan point.
pub fn beta_star(rule: &QuadratureRule, costs: &CostParams) -> Result<BetaSolution, DiffusionError> {
    let f = |b: f64| diffusion_objective(b, rule, costs);
    let (mut lo, mut hi) = (-5.0f64, 5.0f64);
    let mut grid: Vec<(f64, f64)> = Vec::new();
    let push_range = |grid: &mut Vec<(f64, f64)>, from: f64, to: f64| -> Result<(), DiffusionError> {
        let steps = ((to - from) / SCAN_STEP).round() as i64;
        for i in 0..=steps {
            let b = from + i as f64 * SCAN_STEP;
            if !grid.iter().any(|(g, _)| (g - b).abs() < 1e-9) {
                grid.push((b, f(b)?));
            }
        }
        Ok(())
    };
    push_range(&mut grid, lo, hi)?;
    loop {
        grid.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (_, best) = grid.iter().copied().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
        let left_ok = grid.first().unwrap().1 >= best + costs.c;
        let right_ok = grid.last().unwrap().1 >= best + costs.c;
        if left_ok && right_ok {
            break;
        }
        if !left_ok {
            push_range(&mut grid, lo - 5.0, lo)?;
            lo -= 5.0;
        }
        if !right_ok {
            push_range(&mut grid, hi, hi + 5.0)?;
            hi += 5.0;
        }
    }
    let (b0, _) = grid.iter().copied().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
    let (a, b) = (b0 - SCAN_STEP, b0 + SCAN_STEP);
    let mut err = None;
    let (beta, value) = golden_section_min(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                f64::INFINITY
            }
        },
        a,
        b,
        REFINE_TOL,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(BetaSolution {
        beta_star: beta,
        value,
        bracket: (lo, hi),
    })
}

/// cN + √λ·E[ẑ(β − X, T̂*(β − X))] with β = (N − λ)/√λ.
pub fn approx_total_cost(
    servers: usize,
    dist: &StandardizedDistribution,
    rule: &QuadratureRule,
    costs: &CostParams,
) -> Result<f64, DiffusionError> {
    let beta = (servers as f64 - dist.center) / dist.scale;
    let mut acc = 0.0;
    for (x, w) in rule.iter() {
        acc += w * optimal_zhat(beta - x, costs)?;
    }
    Ok(costs.c * servers as f64 + dist.scale * acc)
}
