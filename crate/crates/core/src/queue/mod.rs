//! Stationary analysis of the realized M/M/N/T+M chain and the search for the
//! best admission threshold at a fixed staffing level and arrival rate.
//!
//! State k is the number of calls in the system. Arrivals at rate l join
//! while k < T and are routed to the vendor otherwise; the death rate in
//! state k is min(k, N)·μ + γ·(k − N)⁺.

mod mdp;

pub use mdp::{mdp_oracle, MdpSolution};

use serde::{Deserialize, Serialize};

use crate::error::QueueError;

/// Cost and rate data. `a_eff` folds the waiting cost into abandonment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostParams {
    /// Staffing cost per server per unit time.
    pub c: f64,
    /// Outsourcing cost per call.
    pub p: f64,
    /// Abandonment cost per call.
    pub a: f64,
    /// Waiting cost per customer per unit time.
    pub w: f64,
    /// Patience rate.
    pub gamma: f64,
    /// Service rate.
    pub mu: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            c: 0.1,
            p: 1.0,
            a: 5.0,
            w: 0.0,
            gamma: 1.0,
            mu: 1.0,
        }
    }
}

impl CostParams {
    pub fn new(c: f64, p: f64, a: f64) -> Self {
        Self {
            c,
            p,
            a,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), QueueError> {
        let fields = [("c", self.c), ("p", self.p), ("a", self.a), ("w", self.w)];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(QueueError::InvalidModel(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(QueueError::InvalidModel(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(QueueError::InvalidModel(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        Ok(())
    }

    /// a′ = a + w/γ.
    pub fn a_eff(&self) -> f64 {
        self.a + self.w / self.gamma
    }
}

/// Admission threshold: the system holds at most T calls, or never turns
/// calls away.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Threshold {
    Finite(usize),
    Infinite,
}

impl Threshold {
    pub fn finite(self) -> Option<usize> {
        match self {
            Threshold::Finite(t) => Some(t),
            Threshold::Infinite => None,
        }
    }
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threshold::Finite(t) => write!(f, "{t}"),
            Threshold::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryModel {
    pub l: f64,
    pub servers: usize,
    pub threshold: Threshold,
    pub gamma: f64,
    pub mu: f64,
}

impl StationaryModel {
    pub fn new(l: f64, servers: usize, threshold: Threshold, gamma: f64, mu: f64) -> Result<Self, QueueError> {
        if !(l.is_finite() && l >= 0.0) {
            return Err(QueueError::InvalidModel(format!(
                "arrival rate must be non-negative, got {l}"
            )));
        }
        if !(gamma.is_finite() && gamma > 0.0 && mu.is_finite() && mu > 0.0) {
            return Err(QueueError::InvalidModel(format!(
                "rates must be positive, got gamma={gamma}, mu={mu}"
            )));
        }
        if let Threshold::Finite(t) = threshold {
            if t < servers {
                return Err(QueueError::InvalidModel(format!(
                    "threshold {t} is below the staffing level {servers}"
                )));
            }
        }
        Ok(Self {
            l,
            servers,
            threshold,
            gamma,
            mu,
        })
    }

    pub fn with_costs(l: f64, servers: usize, threshold: Threshold, costs: &CostParams) -> Result<Self, QueueError> {
        Self::new(l, servers, threshold, costs.gamma, costs.mu)
    }

    pub fn death_rate(&self, n: usize) -> f64 {
        death_rate(n, self.servers, self.gamma, self.mu)
    }
}

/// Stationary law over 0..=truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub theta: Vec<f64>,
    /// Last state kept; equals T for a finite threshold.
    pub truncation: usize,
    /// Upper bound on the probability mass dropped beyond `truncation`.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerformanceMeasures {
    pub p_out: f64,
    pub p_ab: f64,
    pub q_bar: f64,
    pub s_bar: f64,
    pub z: f64,
}

/// min(n, N)·μ + γ·(n − N)⁺.
pub fn death_rate(n: usize, servers: usize, gamma: f64, mu: f64) -> f64 {
    n.min(servers) as f64 * mu + n.saturating_sub(servers) as f64 * gamma
}

const TAIL_TOL: f64 = 1e-12;

/// Stationary distribution, built from cumulative log(l/μ_i) and normalized
/// with log-sum-exp.
pub fn steady_state(model: &StationaryModel) -> SteadyState {
    if model.l == 0.0 {
        return SteadyState {
            theta: vec![1.0],
            truncation: 0,
            tail_bound: 0.0,
        };
    }
    let ln_l = model.l.ln();
    let mut logw = vec![0.0];
    let mut tail_bound = 0.0;
    match model.threshold {
        Threshold::Finite(t) => {
            for k in 1..=t {
                let prev = logw[k - 1];
                logw.push(prev + ln_l - model.death_rate(k).ln());
            }
        }
        Threshold::Infinite => {
            let n = model.servers as f64;
            let min_states = (n + 20.0 * n.sqrt() + 50.0).ceil() as usize;
            let mut max_lw = 0.0f64;
            let mut k = 0usize;
            loop {
                k += 1;
                let prev = logw[k - 1];
                let lw = prev + ln_l - model.death_rate(k).ln();
                logw.push(lw);
                max_lw = max_lw.max(lw);
                if k < min_states {
                    continue;
                }
                // Ratios w_{j+1}/w_j only shrink beyond k, so the tail is
                // dominated by a geometric series with ratio r.
                let r = model.l / model.death_rate(k + 1);
                if r < 1.0 {
                    let bound = (lw - max_lw).exp() * r / (1.0 - r);
                    if bound < TAIL_TOL {
                        tail_bound = bound;
                        break;
                    }
                }
            }
        }
    }
    let max_lw = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut theta: Vec<f64> = logw.iter().map(|lw| (lw - max_lw).exp()).collect();
    let total: f64 = theta.iter().sum();
    for t in &mut theta {
        *t /= total;
    }
    let truncation = theta.len() - 1;
    SteadyState {
        theta,
        truncation,
        tail_bound,
    }
}

/// P(out), P(ab), Q̄, S̄ and z = p·l·P(out) + a′·γ·Q̄.
///
/// P(ab) is computed from the arrival's view: a call that finds k ≥ N in the
/// system waits at position k − N + 1 and abandons with probability
/// (k − N + 1)γ / (Nμ + (k − N + 1)γ). It is not derived from Q̄, so the
/// identity l·P(ab) = γ·Q̄ is a genuine check.
pub fn perf_measures(model: &StationaryModel, ss: &SteadyState, costs: &CostParams) -> PerformanceMeasures {
    let l = model.l;
    if l == 0.0 {
        return PerformanceMeasures {
            p_out: 0.0,
            p_ab: 0.0,
            q_bar: 0.0,
            s_bar: 0.0,
            z: 0.0,
        };
    }
    let n = model.servers;
    let service = n as f64 * model.mu;
    let p_out = match model.threshold {
        Threshold::Finite(t) => ss.theta[t],
        Threshold::Infinite => 0.0,
    };
    let admit_limit = match model.threshold {
        Threshold::Finite(t) => t,
        Threshold::Infinite => ss.truncation + 1,
    };
    let (mut q_bar, mut s_bar, mut p_ab) = (0.0, 0.0, 0.0);
    for (k, &th) in ss.theta.iter().enumerate() {
        let waiting = k.saturating_sub(n) as f64;
        q_bar += waiting * th;
        s_bar += k.min(n) as f64 * th;
        if k >= n && k < admit_limit {
            let pos_rate = (waiting + 1.0) * model.gamma;
            p_ab += th * pos_rate / (service + pos_rate);
        }
    }
    let z = costs.p * l * p_out + costs.a_eff() * model.gamma * q_bar;
    PerformanceMeasures {
        p_out,
        p_ab,
        q_bar,
        s_bar,
        z,
    }
}

/// Operating cost rate of one realized system.
pub fn threshold_cost(servers: usize, l: f64, threshold: Threshold, costs: &CostParams) -> f64 {
    let model = StationaryModel::new(l, servers, threshold, costs.gamma, costs.mu).expect("valid realized model");
    let ss = steady_state(&model);
    perf_measures(&model, &ss, costs).z
}

/// Result of [`threshold_search`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdChoice {
    pub threshold: Threshold,
    pub cost: f64,
}

/// Largest threshold the search will try.
pub fn threshold_cap(servers: usize, l: f64) -> usize {
    servers + (20.0 * l.max(1.0).sqrt()).ceil() as usize + 100
}

/// Best admission threshold for fixed (N, l).
///
/// When a′ ≤ p the vendor is never cheaper than abandonment and the answer
/// is `Infinite`. Otherwise T runs upward from N and the first T with
/// z(T + 1) ≥ z(T) is returned. The costs are accumulated incrementally so
/// each extra T costs O(1).
pub fn threshold_search(servers: usize, l: f64, costs: &CostParams) -> Result<ThresholdChoice, QueueError> {
    if l == 0.0 {
        return Ok(ThresholdChoice {
            threshold: Threshold::Finite(servers),
            cost: 0.0,
        });
    }
    let a_eff = costs.a_eff();
    if a_eff <= costs.p {
        let cost = threshold_cost(servers, l, Threshold::Infinite, costs);
        return Ok(ThresholdChoice {
            threshold: Threshold::Infinite,
            cost,
        });
    }
    let cap = threshold_cap(servers, l);
    let mut scan = ThresholdScan::new(servers, l, costs);
    let mut best_t = servers;
    let mut best_z = scan.cost();
    while scan.t < cap {
        scan.advance();
        let z = scan.cost();
        if z >= best_z {
            return Ok(ThresholdChoice {
                threshold: Threshold::Finite(best_t),
                cost: best_z,
            });
        }
        best_t = scan.t;
        best_z = z;
    }
    Err(QueueError::CapReached {
        cap,
        best_threshold: best_t,
        best_cost: best_z,
    })
}

/// Running sums of the unnormalized weights w_k = ∏ l/μ_i, rescaled to stay
/// in range.
pub(crate) struct ThresholdScan {
    servers: usize,
    l: f64,
    gamma: f64,
    mu: f64,
    p_l: f64,
    abandon: f64,
    pub(crate) t: usize,
    w: f64,
    total: f64,
    queue: f64,
}

const RESCALE_ABOVE: f64 = 1e250;

impl ThresholdScan {
    /// Positioned at T = N.
    pub(crate) fn new(servers: usize, l: f64, costs: &CostParams) -> Self {
        let mut s = Self {
            servers,
            l,
            gamma: costs.gamma,
            mu: costs.mu,
            p_l: costs.p * l,
            abandon: costs.a_eff() * costs.gamma,
            t: 0,
            w: 1.0,
            total: 1.0,
            queue: 0.0,
        };
        while s.t < servers {
            s.advance();
        }
        s
    }

    pub(crate) fn advance(&mut self) {
        self.t += 1;
        self.w *= self.l / death_rate(self.t, self.servers, self.gamma, self.mu);
        self.total += self.w;
        self.queue += self.t.saturating_sub(self.servers) as f64 * self.w;
        if self.total > RESCALE_ABOVE {
            self.w /= RESCALE_ABOVE;
            self.total /= RESCALE_ABOVE;
            self.queue /= RESCALE_ABOVE;
        }
    }

    pub(crate) fn cost(&self) -> f64 {
        (self.p_l * self.w + self.abandon * self.queue) / self.total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn model(l: f64, n: usize, t: Threshold) -> StationaryModel {
        StationaryModel::new(l, n, t, 1.0, 1.0).unwrap()
    }

    /// Solve πQ = 0, Σπ = 1 for the finite generator directly.
    fn dense_stationary(m: &StationaryModel, t: usize) -> Vec<f64> {
        let size = t + 1;
        let mut q = DMatrix::<f64>::zeros(size, size);
        for k in 0..size {
            if k < t {
                q[(k, k + 1)] = m.l;
            }
            if k > 0 {
                q[(k, k - 1)] = m.death_rate(k);
            }
            let out: f64 = (0..size).filter(|&j| j != k).map(|j| q[(k, j)]).sum();
            q[(k, k)] = -out;
        }
        let mut a = q.transpose();
        for j in 0..size {
            a[(size - 1, j)] = 1.0;
        }
        let mut b = DVector::<f64>::zeros(size);
        b[size - 1] = 1.0;
        let x = a.lu().solve(&b).unwrap();
        x.iter().copied().collect()
    }

    #[test]
    fn death_rates() {
        assert_eq!(death_rate(0, 3, 1.0, 1.0), 0.0);
        assert_eq!(death_rate(3, 3, 1.0, 1.0), 3.0);
        assert_eq!(death_rate(5, 2, 1.0, 1.0), 5.0);
        assert_eq!(death_rate(5, 2, 0.5, 2.0), 5.5);
    }

    #[test]
    fn empty_system() {
        let m = model(0.0, 4, Threshold::Finite(6));
        let ss = steady_state(&m);
        assert_eq!(ss.theta[0], 1.0);
        let pm = perf_measures(&m, &ss, &CostParams::default());
        assert_eq!(
            pm,
            PerformanceMeasures {
                p_out: 0.0,
                p_ab: 0.0,
                q_bar: 0.0,
                s_bar: 0.0,
                z: 0.0
            }
        );
    }

    #[test]
    fn two_state_chain() {
        let m = model(1.0, 1, Threshold::Finite(1));
        let ss = steady_state(&m);
        assert!((ss.theta[0] - 0.5).abs() < 1e-15 && (ss.theta[1] - 0.5).abs() < 1e-15);
        let pm = perf_measures(&m, &ss, &CostParams::default());
        assert!((pm.p_out - 0.5).abs() < 1e-15);
        assert!((pm.z - 0.5).abs() < 1e-15);
    }

    #[test]
    fn matches_dense_solve() {
        let m = model(3.0, 2, Threshold::Finite(4));
        let ss = steady_state(&m);
        let dense = dense_stationary(&m, 4);
        for (a, b) in ss.theta.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-12);
        }
        for (l, n, t) in [(40.0, 50, 70), (7.5, 10, 10), (55.0, 30, 60)] {
            let m = StationaryModel::new(l, n, Threshold::Finite(t), 0.7, 1.3).unwrap();
            let ss = steady_state(&m);
            let dense = dense_stationary(&m, t);
            for (a, b) in ss.theta.iter().zip(&dense) {
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300) || (a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn survives_large_loads() {
        let m = model(1600.0, 1685, Threshold::Finite(1760));
        let ss = steady_state(&m);
        let s: f64 = ss.theta.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(ss.theta.iter().all(|t| t.is_finite() && *t >= 0.0));
    }

    #[test]
    fn infinite_threshold_truncates_small_tail() {
        let m = model(100.0, 90, Threshold::Infinite);
        let ss = steady_state(&m);
        assert!(ss.tail_bound < 1e-12);
        assert!(ss.truncation as f64 >= 90.0 + 20.0 * 90f64.sqrt() + 50.0);
        let pm = perf_measures(&m, &ss, &CostParams::default());
        assert_eq!(pm.p_out, 0.0);
        assert!((100.0 * pm.p_ab - pm.q_bar).abs() < 1e-9);
    }

    #[test]
    fn identities_hold() {
        let costs = CostParams {
            gamma: 0.6,
            mu: 1.4,
            w: 0.3,
            ..CostParams::default()
        };
        let m = StationaryModel::with_costs(23.0, 12, Threshold::Finite(30), &costs).unwrap();
        let ss = steady_state(&m);
        let pm = perf_measures(&m, &ss, &costs);
        assert!((m.l * pm.p_ab - costs.gamma * pm.q_bar).abs() < 1e-9);
        assert!((m.l * (1.0 - pm.p_out) - costs.mu * pm.s_bar - m.l * pm.p_ab).abs() < 1e-9);
    }

    #[test]
    fn never_outsource_when_abandoning_is_cheaper() {
        let costs = CostParams::new(0.1, 5.0, 1.0);
        let r = threshold_search(10, 12.0, &costs).unwrap();
        assert_eq!(r.threshold, Threshold::Infinite);
        let direct = threshold_cost(10, 12.0, Threshold::Infinite, &costs);
        assert_eq!(r.cost, direct);
        let zero = threshold_search(0, 3.0, &costs).unwrap();
        assert!((zero.cost - 3.0).abs() < 1e-9);
    }

    #[test]
    fn search_matches_grid() {
        let costs = CostParams::default();
        let r = threshold_search(121, 100.0, &costs).unwrap();
        let cap = threshold_cap(121, 100.0);
        let (mut bt, mut bz) = (0, f64::INFINITY);
        for t in 121..=cap {
            let z = threshold_cost(121, 100.0, Threshold::Finite(t), &costs);
            if z < bz {
                bt = t;
                bz = z;
            }
        }
        assert_eq!(r.threshold, Threshold::Finite(bt));
        assert!((r.cost - bz).abs() <= 1e-12 * bz);
    }

    #[test]
    fn empty_and_unstaffed_search() {
        let costs = CostParams::default();
        assert_eq!(
            threshold_search(7, 0.0, &costs).unwrap(),
            ThresholdChoice {
                threshold: Threshold::Finite(7),
                cost: 0.0
            }
        );
        let r = threshold_search(0, 4.0, &costs).unwrap();
        assert_eq!(r.threshold, Threshold::Finite(0));
        assert!((r.cost - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_threshold_below_staffing() {
        assert!(StationaryModel::new(1.0, 5, Threshold::Finite(4), 1.0, 1.0).is_err());
        assert!(StationaryModel::new(1.0, 5, Threshold::Finite(5), 0.0, 1.0).is_err());
    }
}
