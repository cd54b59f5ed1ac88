//! WebAssembly entry points for the static page in `www/`.
//!
//! Every function takes JSON strings and returns a JSON string. Failures come
//! back as `{"error": "..."}` so the page never has to catch exceptions.

use cosource::arrival::{ArrivalDistribution, DEFAULT_NODES};
use cosource::diffusion::{that_star, zhat, zhat_inf, ScaledThreshold};
use cosource::exact::default_n_max;
use cosource::policy::compare_policies;
use cosource::queue::CostParams;
use cosource::report::{self, Figure7Section, ResolvedScenario, RunOptions};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn parse_inputs(distribution: &str, costs: &str) -> Result<(ArrivalDistribution, CostParams), String> {
    let d: ArrivalDistribution = serde_json::from_str(distribution).map_err(|e| format!("distribution: {e}"))?;
    let c = parse_costs(costs)?;
    Ok((d, c))
}

fn parse_costs(costs: &str) -> Result<CostParams, String> {
    let c: CostParams = if costs.trim().is_empty() {
        CostParams::default()
    } else {
        serde_json::from_str(costs).map_err(|e| format!("costs: {e}"))?
    };
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}

fn finish(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Exact expected cost and its diffusion approximation for N in
/// `n_from..=n_to`.
#[wasm_bindgen]
pub fn cost_curves(distribution: &str, costs: &str, n_from: u32, n_to: u32) -> String {
    finish((|| {
        let (d, c) = parse_inputs(distribution, costs)?;
        let s = ResolvedScenario {
            label: report::distribution_label(&d),
            distribution: d,
            costs: c,
        };
        let grid = Figure7Section {
            n_from: n_from as usize,
            n_to: n_to as usize,
            n_step: 1,
        };
        let (_, points) = report::figure7(&s, &grid, &RunOptions::default()).map_err(|e| e.to_string())?;
        Ok(json!({
            "label": s.label,
            "N": points.iter().map(|p| p.servers).collect::<Vec<_>>(),
            "exact": points.iter().map(|p| p.exact).collect::<Vec<_>>(),
            "approx": points.iter().map(|p| p.approx).collect::<Vec<_>>(),
        }))
    })())
}

/// ẑ(m, T̂*(m)) and T̂*(m) on an even grid of `points` values of m.
#[wasm_bindgen]
pub fn zhat_curve(costs: &str, m_from: f64, m_to: f64, points: u32) -> String {
    finish((|| {
        let c = parse_costs(costs)?;
        if points < 2 || m_from.is_nan() || m_to.is_nan() || m_from >= m_to {
            return Err("need at least two points on an increasing range".into());
        }
        let (p, a, g) = (c.p, c.a_eff(), c.gamma);
        let mut ms = Vec::new();
        let mut ts = Vec::new();
        let mut zs = Vec::new();
        for i in 0..points {
            let m = m_from + (m_to - m_from) * i as f64 / (points - 1) as f64;
            let (t, z) = match that_star(m, p, a, g).map_err(|e| e.to_string())? {
                ScaledThreshold::Finite(t) => (Some(t), zhat(m, t, p, a, g)),
                ScaledThreshold::Infinite => (None, zhat_inf(m, a, g)),
            };
            ms.push(m);
            ts.push(t);
            zs.push(z);
        }
        Ok(json!({ "m": ms, "t_hat": ts, "zhat": zs }))
    })())
}

/// U, D and NV next to the exact optimum.
#[wasm_bindgen]
pub fn policies(distribution: &str, costs: &str) -> String {
    finish((|| {
        let (d, c) = parse_inputs(distribution, costs)?;
        let rep = compare_policies(&d, &c, DEFAULT_NODES, default_n_max(&d), true).map_err(|e| e.to_string())?;
        serde_json::to_value(&rep).map_err(|e| e.to_string())
    })())
}
