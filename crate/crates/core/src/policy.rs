//! Staffing policies: the universal square-root policy U, the
//! deterministic-rate policy D, the newsvendor policy NV, and their
//! comparison against the exact optimum.

use serde::Serialize;

use crate::arrival::{ArrivalDistribution, QuadratureRule, StandardizedDistribution};
use crate::diffusion::{beta_star, that_star, ScaledThreshold};
use crate::error::PolicyError;
use crate::exact::{expected_cost_for_staffing, optimal_staffing, ExactSolution};
use crate::queue::{threshold_cost, CostParams, Threshold};

/// a′ = a + w/γ.
pub fn effective_abandon_cost(costs: &CostParams) -> f64 {
    costs.a_eff()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// c < min(a′, p) and p < a′: staff and outsource some calls.
    CoSourcing,
    /// c < min(a′, p) and a′ ≤ p: staff and never outsource.
    NoOutsourcing,
    /// c ≥ min(a′, p) and a′ > p: no staff, every call goes to the vendor.
    CompleteOutsourcing,
    /// c ≥ min(a′, p) and a′ ≤ p: no staff, every call abandons.
    NoOperation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Routing {
    /// N plus the rounded, rescaled diffusion threshold T̂*.
    DiffusionThreshold,
    /// Best threshold for every realized rate.
    OptimalPerRealization,
    NeverOutsource,
    OutsourceAll,
    AbandonAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeDecision {
    pub regime: Regime,
    /// `Some(0)` when staffing is ruled out, `None` when it is free.
    pub mandated_servers: Option<usize>,
    /// `None` when routing is free.
    pub mandated_routing: Option<Routing>,
}

/// Which of the four cost regimes applies.
pub fn regime_guard(costs: &CostParams) -> RegimeDecision {
    let a_eff = costs.a_eff();
    let bound = a_eff.min(costs.p);
    let (regime, servers, routing) = if costs.c >= bound {
        if a_eff > costs.p {
            (Regime::CompleteOutsourcing, Some(0), Some(Routing::OutsourceAll))
        } else {
            (Regime::NoOperation, Some(0), Some(Routing::AbandonAll))
        }
    } else if a_eff <= costs.p {
        (Regime::NoOutsourcing, None, Some(Routing::NeverOutsource))
    } else {
        (Regime::CoSourcing, None, None)
    };
    RegimeDecision {
        regime,
        mandated_servers: servers,
        mandated_routing: routing,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    U,
    D,
    NV,
    Opt,
    Custom,
}

/// How U turns T̂* into an integer threshold at a realized rate l.
///
/// `T = N + [T̂*(b − x)·s]` with x = (l − λ)/√λ, where the scale s is √λ or
/// √l and the drift b is the realized (N − λ)/√λ or the unrounded β*.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdRule {
    /// s = √λ, b = (N − λ)/√λ.
    #[default]
    MeanRate,
    /// s = √l, b = β*.
    RealizedRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaffingPolicy {
    pub kind: PolicyKind,
    #[serde(rename = "N")]
    pub servers: usize,
    /// Safety parameter behind `servers`, for U and D.
    pub beta: Option<f64>,
    pub routing: Routing,
    /// λ = E[Λ] the policy was built for.
    pub lambda: f64,
    pub threshold_rule: ThresholdRule,
}

fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

fn to_servers(x: f64) -> usize {
    round_half_up(x).max(0.0) as usize
}

fn mandated(kind: PolicyKind, decision: &RegimeDecision, lambda: f64) -> Option<StaffingPolicy> {
    let servers = decision.mandated_servers?;
    Some(StaffingPolicy {
        kind,
        servers,
        beta: None,
        routing: decision.mandated_routing?,
        lambda,
        threshold_rule: ThresholdRule::default(),
    })
}

fn square_root_policy(
    kind: PolicyKind,
    x: &StandardizedDistribution,
    rule: &QuadratureRule,
    costs: &CostParams,
) -> Result<StaffingPolicy, PolicyError> {
    let decision = regime_guard(costs);
    if let Some(p) = mandated(kind, &decision, x.center) {
        return Ok(p);
    }
    let sol = beta_star(rule, costs)?;
    let routing = match decision.regime {
        Regime::NoOutsourcing => Routing::NeverOutsource,
        _ if kind == PolicyKind::U => Routing::DiffusionThreshold,
        _ => Routing::OptimalPerRealization,
    };
    Ok(StaffingPolicy {
        kind,
        servers: to_servers(x.center + sol.beta_star * x.scale),
        beta: Some(sol.beta_star),
        routing,
        lambda: x.center,
        threshold_rule: ThresholdRule::default(),
    })
}

/// N_U = [λ + β*√λ] with β* taken against the law of X; routed by the
/// diffusion threshold.
pub fn make_policy_u(
    dist: &ArrivalDistribution,
    costs: &CostParams,
    nodes: usize,
) -> Result<StaffingPolicy, PolicyError> {
    let x = dist.standardize()?;
    square_root_policy(PolicyKind::U, &x, &x.rule(nodes), costs)
}

/// N_D = [λ + β₁*√λ], where β₁* treats the rate as fixed at λ.
pub fn make_policy_d(dist: &ArrivalDistribution, costs: &CostParams) -> Result<StaffingPolicy, PolicyError> {
    let x = dist.standardize()?.collapsed();
    square_root_policy(PolicyKind::D, &x, &x.rule(1), costs)
}

/// N_NV = [F⁻¹((min(a′, p) − c)/min(a′, p))].
pub fn make_policy_nv(dist: &ArrivalDistribution, costs: &CostParams) -> Result<StaffingPolicy, PolicyError> {
    let under = costs.a_eff().min(costs.p);
    if costs.c >= under {
        return Err(PolicyError::InvalidRegime {
            c: costs.c,
            bound: under,
        });
    }
    let q = (under - costs.c) / under;
    let routing = match regime_guard(costs).regime {
        Regime::NoOutsourcing => Routing::NeverOutsource,
        _ => Routing::OptimalPerRealization,
    };
    Ok(StaffingPolicy {
        kind: PolicyKind::NV,
        servers: to_servers(dist.inverse_cdf(q)?),
        beta: None,
        routing,
        lambda: dist.mean(),
        threshold_rule: ThresholdRule::default(),
    })
}

/// T_U = N_U + [T̂*(b − x)·s] for x = (l − λ)/√λ; see [`ThresholdRule`].
pub fn realize_threshold_u(policy: &StaffingPolicy, l: f64, costs: &CostParams) -> Result<Threshold, PolicyError> {
    let root = policy.lambda.sqrt();
    let staffed = (policy.servers as f64 - policy.lambda) / root;
    let (beta, scale) = match policy.threshold_rule {
        ThresholdRule::MeanRate => (staffed, root),
        ThresholdRule::RealizedRate => (policy.beta.unwrap_or(staffed), l.sqrt()),
    };
    let x = (l - policy.lambda) / root;
    Ok(match that_star(beta - x, costs.p, costs.a_eff(), costs.gamma)? {
        ScaledThreshold::Infinite => Threshold::Infinite,
        ScaledThreshold::Finite(t) => Threshold::Finite(policy.servers + round_half_up(t * scale) as usize),
    })
}

/// cN + E[stage-two cost] under the policy's routing rule.
pub fn evaluate_policy(policy: &StaffingPolicy, rule: &QuadratureRule, costs: &CostParams) -> Result<f64, PolicyError> {
    let n = policy.servers;
    let staff = costs.c * n as f64;
    let mut acc = 0.0;
    match policy.routing {
        Routing::OptimalPerRealization => return Ok(expected_cost_for_staffing(n, rule, costs).cost),
        Routing::DiffusionThreshold => {
            for (l, w) in rule.iter() {
                let t = realize_threshold_u(policy, l, costs)?;
                acc += w * threshold_cost(n, l, t, costs);
            }
        }
        Routing::NeverOutsource => {
            for (l, w) in rule.iter() {
                acc += w * threshold_cost(n, l, Threshold::Infinite, costs);
            }
        }
        Routing::OutsourceAll => {
            for (l, w) in rule.iter() {
                acc += w * threshold_cost(n, l, Threshold::Finite(n), costs);
            }
        }
        Routing::AbandonAll => {
            for (l, w) in rule.iter() {
                acc += w * l * costs.a_eff();
            }
        }
    }
    Ok(staff + acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyOutcome {
    pub policy: StaffingPolicy,
    pub cost: f64,
    /// N^opt − N.
    pub staffing_error: i64,
    /// 100·(C(N) − C^opt)/C^opt.
    pub percent_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub regime: Regime,
    pub exact: ExactSolution,
    pub u: PolicyOutcome,
    pub d: PolicyOutcome,
    pub nv: PolicyOutcome,
}

/// Percent excess of `cost` over `optimum`.
pub fn percent_error(cost: f64, optimum: f64) -> f64 {
    if optimum == 0.0 {
        0.0
    } else {
        100.0 * (cost - optimum) / optimum
    }
}

/// Exact optimum plus U, D and NV evaluated on the same quadrature rule.
pub fn compare_policies(
    dist: &ArrivalDistribution,
    costs: &CostParams,
    nodes: usize,
    n_max: usize,
    fast: bool,
) -> Result<ComparisonReport, PolicyError> {
    let rule = dist.rule(nodes);
    let exact = optimal_staffing(&rule, costs, n_max, fast);
    let decision = regime_guard(costs);
    let lambda = dist.mean();
    let u = make_policy_u(dist, costs, nodes)?;
    let d = make_policy_d(dist, costs)?;
    let nv = match mandated(PolicyKind::NV, &decision, lambda) {
        Some(p) => p,
        None => make_policy_nv(dist, costs)?,
    };
    let outcome = |policy: StaffingPolicy| -> Result<PolicyOutcome, PolicyError> {
        let cost = match (policy.routing, exact.curve.get(policy.servers)) {
            (Routing::OptimalPerRealization, Some(point)) if point.servers == policy.servers => point.cost,
            _ => evaluate_policy(&policy, &rule, costs)?,
        };
        Ok(PolicyOutcome {
            policy,
            cost,
            staffing_error: exact.n_opt as i64 - policy.servers as i64,
            percent_error: percent_error(cost, exact.c_opt),
        })
    };
    Ok(ComparisonReport {
        regime: decision.regime,
        u: outcome(u)?,
        d: outcome(d)?,
        nv: outcome(nv)?,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queue::threshold_search;

    fn uni(lo: f64, hi: f64) -> ArrivalDistribution {
        ArrivalDistribution::uniform(lo, hi).unwrap()
    }

    #[test]
    fn effective_cost() {
        assert_eq!(effective_abandon_cost(&CostParams::default()), 5.0);
        let c = CostParams {
            w: 2.0,
            ..CostParams::default()
        };
        assert_eq!(effective_abandon_cost(&c), 7.0);
        let c = CostParams {
            w: 1.0,
            gamma: 2.0,
            ..CostParams::default()
        };
        assert_eq!(effective_abandon_cost(&c), 5.5);
    }

    #[test]
    fn regimes() {
        let r = regime_guard(&CostParams::new(2.0, 1.0, 5.0));
        assert_eq!(r.regime, Regime::CompleteOutsourcing);
        assert_eq!(r.mandated_servers, Some(0));
        assert_eq!(r.mandated_routing, Some(Routing::OutsourceAll));
        assert_eq!(
            regime_guard(&CostParams::new(0.1, 5.0, 1.0)).regime,
            Regime::NoOutsourcing
        );
        assert_eq!(regime_guard(&CostParams::new(0.1, 1.0, 5.0)).regime, Regime::CoSourcing);
        assert_eq!(
            regime_guard(&CostParams::new(2.0, 5.0, 1.0)).regime,
            Regime::NoOperation
        );
    }

    #[test]
    fn policy_u_low_cv() {
        let p = make_policy_u(&uni(90.0, 110.0), &CostParams::default(), 64).unwrap();
        assert_eq!(p.servers, 121);
        assert_eq!(p.routing, Routing::DiffusionThreshold);
        assert!((p.beta.unwrap() - 2.1109).abs() < 1e-3);
    }

    #[test]
    fn policy_d_and_nv() {
        let costs = CostParams::default();
        assert_eq!(make_policy_d(&uni(10.0, 190.0), &costs).unwrap().servers, 119);
        assert_eq!(make_policy_nv(&uni(90.0, 110.0), &costs).unwrap().servers, 108);
        assert_eq!(make_policy_nv(&uni(10.0, 190.0), &costs).unwrap().servers, 172);
        let high = CostParams::new(0.95, 1.0, 5.0);
        assert_eq!(
            make_policy_d(&ArrivalDistribution::degenerate(100.0).unwrap(), &high)
                .unwrap()
                .servers,
            64
        );
        assert!(matches!(
            make_policy_nv(&uni(90.0, 110.0), &CostParams::new(1.0, 1.0, 5.0)),
            Err(PolicyError::InvalidRegime { .. })
        ));
    }

    #[test]
    fn degenerate_u_equals_d() {
        let d = ArrivalDistribution::degenerate(100.0).unwrap();
        let costs = CostParams::default();
        let u = make_policy_u(&d, &costs, 64).unwrap();
        let dd = make_policy_d(&d, &costs).unwrap();
        assert_eq!(u.servers, dd.servers);
    }

    #[test]
    fn realized_threshold_is_near_optimal() {
        let costs = CostParams::default();
        let u = make_policy_u(&uni(90.0, 110.0), &costs, 64).unwrap();
        let t = realize_threshold_u(&u, 100.0, &costs).unwrap();
        let z = threshold_cost(u.servers, 100.0, t, &costs);
        let best = threshold_search(u.servers, 100.0, &costs).unwrap().cost;
        assert!((z - best) / best < 1e-3);
        let never = CostParams::new(0.1, 5.0, 1.0);
        let u = make_policy_u(&uni(90.0, 110.0), &never, 64).unwrap();
        assert_eq!(realize_threshold_u(&u, 100.0, &never).unwrap(), Threshold::Infinite);
    }

    #[test]
    fn table_two_spot_value() {
        let rep = compare_policies(&uni(90.0, 110.0), &CostParams::default(), 64, 200, false).unwrap();
        assert_eq!(rep.exact.n_opt, 121);
        assert_eq!(rep.u.policy.servers, 121);
        assert!((rep.u.cost - 12.7149).abs() / 12.7149 < 1e-3, "{}", rep.u.cost);
        assert!((rep.u.percent_error - 0.0142).abs() < 0.005, "{}", rep.u.percent_error);
    }
}
