//! Relative value iteration on the uniformized admission-control MDP. Only
//! used to check [`super::threshold_search`].

use super::{death_rate, CostParams};
use crate::error::QueueError;

#[derive(Debug, Clone, PartialEq)]
pub struct MdpSolution {
    /// `admit[n]` for states 0..=cap; admission is impossible at the cap.
    pub admit: Vec<bool>,
    /// Long-run average cost rate.
    pub cost: f64,
    pub iterations: usize,
}

impl MdpSolution {
    /// `Some(T)` when the admit set is exactly {0, …, T − 1}.
    pub fn as_threshold(&self) -> Option<usize> {
        let t = self.admit.iter().take_while(|a| **a).count();
        if self.admit[t..].iter().any(|a| *a) {
            None
        } else {
            Some(t)
        }
    }
}

const MAX_ITER: usize = 2_000_000;
const SPAN_TOL: f64 = 1e-13;

/// Average-cost optimal admission policy over states 0..=`state_cap`.
///
/// Holding cost is a′γ(n − N)⁺ per unit time and every rejected call costs p.
pub fn mdp_oracle(servers: usize, l: f64, costs: &CostParams, state_cap: usize) -> Result<MdpSolution, QueueError> {
    let size = state_cap + 1;
    if l == 0.0 {
        return Ok(MdpSolution {
            admit: (0..size).map(|n| n < state_cap).collect(),
            cost: 0.0,
            iterations: 0,
        });
    }
    let holding = costs.a_eff() * costs.gamma;
    let rate = l + servers as f64 * costs.mu + costs.gamma * state_cap.saturating_sub(servers) as f64 + 1.0;
    let deaths: Vec<f64> = (0..size)
        .map(|n| death_rate(n, servers, costs.gamma, costs.mu))
        .collect();
    let mut h = vec![0.0; size];
    let mut next = vec![0.0; size];
    let mut span = f64::INFINITY;
    for it in 1..=MAX_ITER {
        for n in 0..size {
            let hold = holding * n.saturating_sub(servers) as f64;
            let reject = costs.p * l + l * h[n];
            let arrival = if n < state_cap {
                (l * h[n + 1]).min(reject)
            } else {
                reject
            };
            let down = if n > 0 { deaths[n] * h[n - 1] } else { 0.0 };
            let stay = (rate - l - deaths[n]) * h[n];
            next[n] = (hold + arrival + down + stay) / rate;
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for n in 0..size {
            let d = next[n] - h[n];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        span = hi - lo;
        let base = next[0];
        for n in 0..size {
            h[n] = next[n] - base;
        }
        if span < SPAN_TOL {
            let admit = (0..size).map(|n| n < state_cap && h[n + 1] <= costs.p + h[n]).collect();
            return Ok(MdpSolution {
                admit,
                cost: 0.5 * (lo + hi) * rate,
                iterations: it,
            });
        }
    }
    Err(QueueError::NoConvergence {
        iterations: MAX_ITER,
        span,
    })
}
