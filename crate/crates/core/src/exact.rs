//! Exhaustive staffing search: N^opt and C^opt under arrival-rate
//! uncertainty, with the best threshold chosen for every realized rate.

use serde::Serialize;

use crate::arrival::{ArrivalDistribution, QuadratureRule};
use crate::error::QueueError;
use crate::queue::{threshold_search, CostParams};

/// Expected cost at one staffing level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaffingCost {
    pub servers: usize,
    pub cost: f64,
    /// Quadrature nodes at which the threshold search hit its cap; the
    /// best-so-far cost was used there.
    pub capped_nodes: usize,
}

/// cN + E[z^opt(N, Λ)].
pub fn expected_cost_for_staffing(servers: usize, rule: &QuadratureRule, costs: &CostParams) -> StaffingCost {
    let mut acc = 0.0;
    let mut capped = 0;
    for (l, w) in rule.iter() {
        let z = match threshold_search(servers, l, costs) {
            Ok(choice) => choice.cost,
            Err(QueueError::CapReached { best_cost, .. }) => {
                capped += 1;
                best_cost
            }
            Err(e) => panic!("threshold search on a valid model failed: {e}"),
        };
        acc += w * z;
    }
    StaffingCost {
        servers,
        cost: costs.c * servers as f64 + acc,
        capped_nodes: capped,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactSolution {
    pub n_opt: usize,
    pub c_opt: f64,
    /// Expected cost for each scanned staffing level, in order.
    pub curve: Vec<StaffingCost>,
    pub n_max: usize,
    pub nodes: usize,
    /// The minimum sits at `n_max`, so the scan range was probably too short.
    pub at_boundary: bool,
}

/// ceil(hi + 5√hi) + 10 for the upper support bound hi.
pub fn default_n_max(dist: &ArrivalDistribution) -> usize {
    let hi = dist.support().1;
    (hi + 5.0 * hi.sqrt()).ceil() as usize + 10
}

/// Consecutive cost increases after which a `fast` scan stops.
pub const FAST_STOP_RUN: usize = 25;

/// Scan N = 0..=n_max and keep the cheapest level, smallest N on ties.
///
/// The full range is scanned unless `fast` is set, in which case the scan
/// stops after [`FAST_STOP_RUN`] consecutive increases.
pub fn optimal_staffing(rule: &QuadratureRule, costs: &CostParams, n_max: usize, fast: bool) -> ExactSolution {
    let curve = if fast {
        let mut curve: Vec<StaffingCost> = Vec::new();
        let mut rising = 0;
        for n in 0..=n_max {
            let point = expected_cost_for_staffing(n, rule, costs);
            if let Some(prev) = curve.last() {
                rising = if point.cost > prev.cost { rising + 1 } else { 0 };
            }
            curve.push(point);
            if rising >= FAST_STOP_RUN {
                break;
            }
        }
        curve
    } else {
        scan(0..=n_max, rule, costs)
    };
    let mut best = 0;
    for (i, p) in curve.iter().enumerate() {
        if p.cost < curve[best].cost {
            best = i;
        }
    }
    ExactSolution {
        n_opt: curve[best].servers,
        c_opt: curve[best].cost,
        at_boundary: curve[best].servers == n_max && n_max > 0,
        curve,
        n_max,
        nodes: rule.len(),
    }
}

/// Expected costs for every N in `levels`, in the order given.
pub fn scan(levels: impl IntoIterator<Item = usize>, rule: &QuadratureRule, costs: &CostParams) -> Vec<StaffingCost> {
    let levels: Vec<usize> = levels.into_iter().collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        levels
            .par_iter()
            .map(|&n| expected_cost_for_staffing(n, rule, costs))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        levels
            .iter()
            .map(|&n| expected_cost_for_staffing(n, rule, costs))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_rule(lo: f64, hi: f64) -> (ArrivalDistribution, QuadratureRule) {
        let d = ArrivalDistribution::uniform(lo, hi).unwrap();
        let r = d.rule(64);
        (d, r)
    }

    #[test]
    fn unstaffed_cost_is_the_cheaper_of_abandon_and_outsource() {
        let (_, r) = uniform_rule(2.0, 6.0);
        let out = expected_cost_for_staffing(0, &r, &CostParams::default());
        assert!((out.cost - 4.0).abs() < 1e-9);
        let ab = expected_cost_for_staffing(0, &r, &CostParams::new(0.1, 5.0, 1.0));
        assert!((ab.cost - 4.0).abs() < 1e-9);
        let ab = expected_cost_for_staffing(0, &r, &CostParams::new(0.1, 5.0, 2.0));
        assert!((ab.cost - 8.0).abs() < 1e-9);
    }

    #[test]
    fn zero_rate_costs_staffing_only() {
        let d = ArrivalDistribution::degenerate(0.0).unwrap();
        let r = d.rule(64);
        assert!((expected_cost_for_staffing(7, &r, &CostParams::default()).cost - 0.7).abs() < 1e-15);
    }

    #[test]
    fn small_system_optimum() {
        let (d, r) = uniform_rule(0.0, 2.0);
        let sol = optimal_staffing(&r, &CostParams::default(), default_n_max(&d), false);
        assert_eq!(sol.n_opt, 3);
        assert!((sol.c_opt - 0.4149).abs() / 0.4149 < 1e-3, "{}", sol.c_opt);
        assert!(!sol.at_boundary);
    }

    #[test]
    fn expensive_staff_means_no_staff() {
        let (d, r) = uniform_rule(1.0, 4.0);
        let costs = CostParams::new(2.0, 1.0, 5.0);
        let sol = optimal_staffing(&r, &costs, default_n_max(&d), false);
        assert_eq!(sol.n_opt, 0);
        assert!((sol.c_opt - 2.5).abs() < 1e-9);
    }

    #[test]
    fn fast_scan_agrees() {
        let (d, r) = uniform_rule(6.0, 12.0);
        let full = optimal_staffing(&r, &CostParams::default(), default_n_max(&d), false);
        let fast = optimal_staffing(&r, &CostParams::default(), default_n_max(&d), true);
        assert_eq!(full.n_opt, fast.n_opt);
        assert_eq!(full.c_opt, fast.c_opt);
    }
}
