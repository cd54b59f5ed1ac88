//! Run configuration, built-in table scenarios, and CSV/JSON emission for the
//! `cosource` binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::arrival::{ArrivalDistribution, DEFAULT_NODES};
use crate::diffusion::{approx_total_cost, beta_star};
use crate::error::{CommandError, ConfigError};
use crate::exact::{default_n_max, expected_cost_for_staffing, optimal_staffing, ExactSolution};
use crate::policy::{
    compare_policies, evaluate_policy, make_policy_d, make_policy_nv, make_policy_u, percent_error, regime_guard,
    ComparisonReport, PolicyOutcome, Regime, StaffingPolicy, ThresholdRule,
};
use crate::queue::{
    perf_measures, steady_state, threshold_search, CostParams, PerformanceMeasures, StationaryModel, Threshold,
};
use crate::sim::{simulate, SimConfig, SimEstimate};

/// One arrival law with its own label and, optionally, its own costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub label: Option<String>,
    pub distribution: ArrivalDistribution,
    pub costs: Option<CostParams>,
}

/// Threshold given in a config: a state count, `"inf"`, or absent for the
/// optimal one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThresholdSpec {
    Finite(usize),
    Named(NamedThreshold),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedThreshold {
    Inf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub servers: usize,
    pub rate: f64,
    #[serde(default)]
    pub threshold: Option<ThresholdSpec>,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Defaults to 10% of the horizon.
    #[serde(default)]
    pub warmup: Option<f64>,
    #[serde(default = "default_batches")]
    pub batches: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
}

fn default_horizon() -> f64 {
    1e5
}

fn default_batches() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure7Section {
    pub n_from: usize,
    pub n_to: usize,
    #[serde(default = "one")]
    pub n_step: usize,
}

fn one() -> usize {
    1
}

/// The JSON document accepted by `--config`; see `schemas/run_config.schema.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub distribution: Option<ArrivalDistribution>,
    #[serde(default)]
    pub scenarios: Vec<Scenario>,
    #[serde(default)]
    pub costs: CostParams,
    #[serde(default)]
    pub nodes: Option<usize>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub fast: bool,
    #[serde(default)]
    pub threshold_rule: ThresholdRule,
    #[serde(default)]
    pub simulate: Option<SimulateSection>,
    #[serde(default)]
    pub figure7: Option<Figure7Section>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.costs.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        for s in &self.scenarios {
            if let Some(c) = &s.costs {
                c.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
            }
        }
        if self.nodes == Some(0) {
            return Err(ConfigError::Invalid("nodes must be at least 1".into()));
        }
        Ok(())
    }

    pub fn nodes(&self) -> usize {
        self.nodes.unwrap_or(DEFAULT_NODES)
    }

    /// The scenario list, or the single top-level distribution.
    pub fn resolved_scenarios(&self) -> Result<Vec<ResolvedScenario>, ConfigError> {
        let mut out = Vec::new();
        if let Some(d) = self.distribution {
            out.push(ResolvedScenario {
                label: distribution_label(&d),
                distribution: d,
                costs: self.costs,
            });
        }
        for s in &self.scenarios {
            out.push(ResolvedScenario {
                label: s.label.clone().unwrap_or_else(|| distribution_label(&s.distribution)),
                distribution: s.distribution,
                costs: s.costs.unwrap_or(self.costs),
            });
        }
        if out.is_empty() {
            return Err(ConfigError::Invalid("no distribution or scenarios given".into()));
        }
        Ok(out)
    }

    pub fn single_scenario(&self) -> Result<ResolvedScenario, ConfigError> {
        let mut all = self.resolved_scenarios()?;
        if all.len() != 1 {
            return Err(ConfigError::Invalid(format!(
                "this command takes one distribution, got {}",
                all.len()
            )));
        }
        Ok(all.remove(0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub label: String,
    pub distribution: ArrivalDistribution,
    pub costs: CostParams,
}

fn trim_num(x: f64) -> String {
    format!("{x}")
}

/// Short name such as `U[90,110]`, `Degenerate(100)` or `Beta(1.5,0.5)`.
pub fn distribution_label(d: &ArrivalDistribution) -> String {
    match *d {
        ArrivalDistribution::Degenerate { value } => format!("Degenerate({})", trim_num(value)),
        ArrivalDistribution::Uniform { lo, hi } => format!("U[{},{}]", trim_num(lo), trim_num(hi)),
        ArrivalDistribution::Beta { alpha1, alpha2, .. } => format!("Beta({},{})", trim_num(alpha1), trim_num(alpha2)),
    }
}

/// Six significant digits.
pub fn format_cost(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // Round first so 99.99995 is sized as 100.000, not 100.0000.
    let rounded: f64 = format!("{x:.5e}").parse().expect("scientific form parses");
    let digits = 5 - rounded.abs().log10().floor() as i32;
    format!("{:.*}", digits.max(0) as usize, x)
}

/// Cost as printed, so derived columns recompute from the CSV exactly.
fn printed(x: f64) -> f64 {
    format_cost(x).parse().expect("formatted cost parses")
}

/// Percent error recomputed from the printed costs.
pub fn printed_percent(cost: f64, optimum: f64) -> f64 {
    percent_error(printed(cost), printed(optimum))
}

pub const TABLE2_HEADER: [&str; 8] = [
    "lambda",
    "distribution",
    "n_opt",
    "c_opt",
    "n_u",
    "c_u",
    "staff_err",
    "pct_err",
];

pub const COMPARE_HEADER: [&str; 15] = [
    "label",
    "n_opt",
    "c_opt",
    "n_u",
    "c_u",
    "staff_err_u",
    "pct_err_u",
    "n_d",
    "c_d",
    "staff_err_d",
    "pct_err_d",
    "n_nv",
    "c_nv",
    "staff_err_nv",
    "pct_err_nv",
];

pub const BETA_HEADER: [&str; 4] = ["c", "beta_low", "beta_mid", "beta_high"];
pub const CURVE_HEADER: [&str; 2] = ["N", "expected_cost"];
pub const FIGURE7_HEADER: [&str; 4] = ["N", "exact", "approx", "difference"];
pub const SOLVE_HEADER: [&str; 7] = ["label", "lambda", "n_opt", "c_opt", "n_max", "regime", "boundary_flag"];

/// A CSV table ready to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// Write to `path`, or to stdout when there is none.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CommandError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CommandError::Output(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| CommandError::Output(e.to_string()))
        }
    }
}

fn outcome_cells(o: &PolicyOutcome, c_opt: f64) -> [String; 4] {
    [
        o.policy.servers.to_string(),
        format_cost(o.cost),
        o.staffing_error.to_string(),
        format!("{:.4}", printed_percent(o.cost, c_opt)),
    ]
}

/// One row of the comparison CSV.
pub fn compare_row(label: &str, report: &ComparisonReport) -> Vec<String> {
    let c_opt = report.exact.c_opt;
    let mut row = vec![label.to_string(), report.exact.n_opt.to_string(), format_cost(c_opt)];
    for o in [&report.u, &report.d, &report.nv] {
        row.extend(outcome_cells(o, c_opt));
    }
    row
}

/// Options shared by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub nodes: usize,
    pub n_max: Option<usize>,
    pub fast: bool,
    pub threshold_rule: ThresholdRule,
}

impl RunOptions {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            nodes: cfg.nodes(),
            n_max: cfg.n_max,
            fast: cfg.fast,
            threshold_rule: cfg.threshold_rule,
        }
    }

    fn n_max_for(&self, d: &ArrivalDistribution) -> usize {
        self.n_max.unwrap_or_else(|| default_n_max(d))
    }
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            n_max: None,
            fast: false,
            threshold_rule: ThresholdRule::default(),
        }
    }
}

fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// U, D and NV against the exact optimum, with the chosen U threshold rule.
pub fn compare_scenario(s: &ResolvedScenario, opts: &RunOptions) -> Result<ComparisonReport, CommandError> {
    let mut rep = compare_policies(
        &s.distribution,
        &s.costs,
        opts.nodes,
        opts.n_max_for(&s.distribution),
        opts.fast,
    )?;
    if opts.threshold_rule != ThresholdRule::default()
        && rep.u.policy.routing == crate::policy::Routing::DiffusionThreshold
    {
        let policy = StaffingPolicy {
            threshold_rule: opts.threshold_rule,
            ..rep.u.policy
        };
        let cost = evaluate_policy(&policy, &s.distribution.rule(opts.nodes), &s.costs)?;
        rep.u = PolicyOutcome {
            policy,
            cost,
            percent_error: percent_error(cost, rep.exact.c_opt),
            ..rep.u
        };
    }
    Ok(rep)
}

/// Comparison CSV over several scenarios, in input order.
pub fn compare_table(
    scenarios: &[ResolvedScenario],
    opts: &RunOptions,
) -> Result<(Table, Vec<ComparisonReport>), CommandError> {
    let reports = map_ordered(scenarios, |s| compare_scenario(s, opts));
    let mut table = Table::new(&COMPARE_HEADER);
    let mut out = Vec::new();
    for (s, r) in scenarios.iter().zip(reports) {
        let r = r?;
        table.rows.push(compare_row(&s.label, &r));
        out.push(r);
    }
    Ok((table, out))
}

/// Exact optimum and the U policy cost for each scenario.
pub fn table2(
    scenarios: &[ResolvedScenario],
    opts: &RunOptions,
) -> Result<(Table, Vec<(ExactSolution, PolicyOutcome)>), CommandError> {
    let results = map_ordered(scenarios, |s| -> Result<_, CommandError> {
        let rule = s.distribution.rule(opts.nodes);
        let exact = optimal_staffing(&rule, &s.costs, opts.n_max_for(&s.distribution), opts.fast);
        let mut policy = make_policy_u(&s.distribution, &s.costs, opts.nodes)?;
        policy.threshold_rule = opts.threshold_rule;
        let cost = evaluate_policy(&policy, &rule, &s.costs)?;
        let outcome = PolicyOutcome {
            policy,
            cost,
            staffing_error: exact.n_opt as i64 - policy.servers as i64,
            percent_error: percent_error(cost, exact.c_opt),
        };
        Ok((exact, outcome))
    });
    let mut table = Table::new(&TABLE2_HEADER);
    let mut out = Vec::new();
    for (s, r) in scenarios.iter().zip(results) {
        let (exact, u) = r?;
        table.rows.push(vec![
            trim_num(s.distribution.mean()),
            distribution_label(&s.distribution),
            exact.n_opt.to_string(),
            format_cost(exact.c_opt),
            u.policy.servers.to_string(),
            format_cost(u.cost),
            u.staffing_error.to_string(),
            format!("{:.4}", printed_percent(u.cost, exact.c_opt)),
        ]);
        out.push((exact, u));
    }
    Ok((table, out))
}

/// Staffing costs swept by the cost and β* tables.
pub const COST_SWEEP: [f64; 13] = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];

/// Arrival laws with mean 100 whose standardized forms are U[−1,1],
/// U[−5,5] and U[−9,9].
pub fn variability_levels() -> [ArrivalDistribution; 3] {
    [
        ArrivalDistribution::Uniform { lo: 90.0, hi: 110.0 },
        ArrivalDistribution::Uniform { lo: 50.0, hi: 150.0 },
        ArrivalDistribution::Uniform { lo: 10.0, hi: 190.0 },
    ]
}

/// β* for every swept staffing cost at the three variability levels.
pub fn beta_table(base: &CostParams, opts: &RunOptions) -> Result<(Table, Vec<[f64; 3]>), CommandError> {
    let rows = map_ordered(&COST_SWEEP, |&c| -> Result<[f64; 3], CommandError> {
        let costs = CostParams { c, ..*base };
        let mut out = [0.0; 3];
        for (slot, d) in out.iter_mut().zip(variability_levels()) {
            let x = d.standardize().map_err(crate::error::PolicyError::from)?;
            *slot = beta_star(&x.rule(opts.nodes), &costs)?.beta_star;
        }
        Ok(out)
    });
    let mut table = Table::new(&BETA_HEADER);
    let mut values = Vec::new();
    for (c, r) in COST_SWEEP.iter().zip(rows) {
        let r = r?;
        table.rows.push(vec![
            trim_num(*c),
            format!("{:.4}", r[0]),
            format!("{:.4}", r[1]),
            format!("{:.4}", r[2]),
        ]);
        values.push(r);
    }
    Ok((table, values))
}

/// Built-in scenario sets for `reproduce-table`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableId {
    Table2,
    EcCv,
    EcCostLow,
    EcCostMid,
    EcCostHigh,
    EcSkewLow,
    EcSkewMid,
    EcSkewHigh,
    EcBeta,
}

impl TableId {
    pub const ALL: [TableId; 9] = [
        TableId::Table2,
        TableId::EcCv,
        TableId::EcCostLow,
        TableId::EcCostMid,
        TableId::EcCostHigh,
        TableId::EcSkewLow,
        TableId::EcSkewMid,
        TableId::EcSkewHigh,
        TableId::EcBeta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::Table2 => "table2",
            TableId::EcCv => "ec-cv",
            TableId::EcCostLow => "ec-cost-low",
            TableId::EcCostMid => "ec-cost-mid",
            TableId::EcCostHigh => "ec-cost-high",
            TableId::EcSkewLow => "ec-skew-low",
            TableId::EcSkewMid => "ec-skew-mid",
            TableId::EcSkewHigh => "ec-skew-high",
            TableId::EcBeta => "ec-beta",
        }
    }

    pub fn parse(s: &str) -> Option<TableId> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

fn scenario(label: String, distribution: ArrivalDistribution, costs: CostParams) -> ResolvedScenario {
    ResolvedScenario {
        label,
        distribution,
        costs,
    }
}

/// Scenarios behind a table id; empty for `ec-beta`, which has no
/// distributions of its own.
pub fn table_scenarios(id: TableId, base: &CostParams) -> Vec<ResolvedScenario> {
    let uni = |lo: f64, hi: f64| ArrivalDistribution::Uniform { lo, hi };
    match id {
        TableId::Table2 => [
            (0.0, 2.0),
            (6.0, 12.0),
            (20.0, 30.0),
            (90.0, 110.0),
            (210.0, 240.0),
            (380.0, 420.0),
            (600.0, 650.0),
            (870.0, 930.0),
            (1560.0, 1640.0),
        ]
        .into_iter()
        .map(|(lo, hi)| {
            let d = uni(lo, hi);
            scenario(distribution_label(&d), d, *base)
        })
        .collect(),
        TableId::EcCv => {
            let mut v = vec![ArrivalDistribution::Degenerate { value: 100.0 }];
            v.push(uni(99.0, 101.0));
            for half in (10..=90).step_by(10) {
                v.push(uni(100.0 - half as f64, 100.0 + half as f64));
            }
            v.into_iter()
                .map(|d| scenario(distribution_label(&d), d, *base))
                .collect()
        }
        TableId::EcCostLow | TableId::EcCostMid | TableId::EcCostHigh => {
            let d = variability_levels()[match id {
                TableId::EcCostLow => 0,
                TableId::EcCostMid => 1,
                _ => 2,
            }];
            COST_SWEEP
                .iter()
                .map(|&c| scenario(trim_num(c), d, CostParams { c, ..*base }))
                .collect()
        }
        TableId::EcSkewLow | TableId::EcSkewMid | TableId::EcSkewHigh => {
            let level = match id {
                TableId::EcSkewLow => 0,
                TableId::EcSkewMid => 1,
                _ => 2,
            };
            let sd = variability_levels()[level].variance().sqrt();
            (0..=10)
                .filter_map(|i| {
                    let a1 = (15 - i) as f64 / 10.0;
                    let a2 = (5 + i) as f64 / 10.0;
                    // Shapes whose support would dip below zero are skipped.
                    ArrivalDistribution::beta_with_moments(a1, a2, 100.0, sd).ok()
                })
                .map(|d| scenario(distribution_label(&d), d, *base))
                .collect()
        }
        TableId::EcBeta => Vec::new(),
    }
}

/// Output of `reproduce-table`.
pub fn reproduce_table(id: TableId, base: &CostParams, opts: &RunOptions) -> Result<Table, CommandError> {
    match id {
        TableId::Table2 => Ok(table2(&table_scenarios(id, base), opts)?.0),
        TableId::EcBeta => Ok(beta_table(base, opts)?.0),
        _ => Ok(compare_table(&table_scenarios(id, base), opts)?.0),
    }
}

/// Summary row per scenario plus, for a single scenario, the cost curve.
pub fn solve_exact(scenarios: &[ResolvedScenario], opts: &RunOptions) -> (Table, Vec<ExactSolution>) {
    let sols = map_ordered(scenarios, |s| {
        let rule = s.distribution.rule(opts.nodes);
        optimal_staffing(&rule, &s.costs, opts.n_max_for(&s.distribution), opts.fast)
    });
    let mut table = Table::new(&SOLVE_HEADER);
    for (s, sol) in scenarios.iter().zip(&sols) {
        let regime = regime_guard(&s.costs).regime;
        table.rows.push(vec![
            s.label.clone(),
            trim_num(s.distribution.mean()),
            sol.n_opt.to_string(),
            format_cost(sol.c_opt),
            sol.n_max.to_string(),
            regime_name(regime).to_string(),
            sol.at_boundary.to_string(),
        ]);
    }
    (table, sols)
}

pub fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::CoSourcing => "co-sourcing",
        Regime::NoOutsourcing => "no-outsourcing",
        Regime::CompleteOutsourcing => "complete-outsourcing",
        Regime::NoOperation => "no-operation",
    }
}

pub fn curve_table(sol: &ExactSolution) -> Table {
    let mut t = Table::new(&CURVE_HEADER);
    for p in &sol.curve {
        t.rows.push(vec![p.servers.to_string(), format_cost(p.cost)]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyChoice {
    U,
    D,
    Nv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyReport {
    pub label: String,
    #[serde(flatten)]
    pub policy: StaffingPolicy,
    pub expected_cost: f64,
}

pub fn policy_report(
    s: &ResolvedScenario,
    kind: PolicyChoice,
    opts: &RunOptions,
) -> Result<PolicyReport, CommandError> {
    let mut policy = match kind {
        PolicyChoice::U => make_policy_u(&s.distribution, &s.costs, opts.nodes)?,
        PolicyChoice::D => make_policy_d(&s.distribution, &s.costs)?,
        PolicyChoice::Nv => make_policy_nv(&s.distribution, &s.costs)?,
    };
    policy.threshold_rule = opts.threshold_rule;
    let expected_cost = evaluate_policy(&policy, &s.distribution.rule(opts.nodes), &s.costs)?;
    Ok(PolicyReport {
        label: s.label.clone(),
        policy,
        expected_cost,
    })
}

/// Default grid λ − 2√λ ..= λ + 8√λ.
pub fn default_figure7_grid(d: &ArrivalDistribution) -> Figure7Section {
    let lam = d.mean();
    let r = lam.sqrt();
    Figure7Section {
        n_from: (lam - 2.0 * r).max(0.0).round() as usize,
        n_to: (lam + 8.0 * r).round() as usize,
        n_step: 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Figure7Point {
    pub servers: usize,
    pub exact: f64,
    pub approx: f64,
}

impl Figure7Point {
    pub fn difference(&self) -> f64 {
        self.exact - self.approx
    }
}

/// Exact expected cost next to the rescaled diffusion approximation.
pub fn figure7(
    s: &ResolvedScenario,
    grid: &Figure7Section,
    opts: &RunOptions,
) -> Result<(Table, Vec<Figure7Point>), CommandError> {
    if grid.n_step == 0 || grid.n_from > grid.n_to {
        return Err(ConfigError::Invalid(format!(
            "empty staffing grid {}..={} step {}",
            grid.n_from, grid.n_to, grid.n_step
        ))
        .into());
    }
    let levels: Vec<usize> = (grid.n_from..=grid.n_to).step_by(grid.n_step).collect();
    let rule = s.distribution.rule(opts.nodes);
    let x = s.distribution.standardize().map_err(crate::error::PolicyError::from)?;
    let xrule = x.rule(opts.nodes);
    let points = map_ordered(&levels, |&n| -> Result<Figure7Point, CommandError> {
        Ok(Figure7Point {
            servers: n,
            exact: expected_cost_for_staffing(n, &rule, &s.costs).cost,
            approx: approx_total_cost(n, &x, &xrule, &s.costs)?,
        })
    });
    let mut table = Table::new(&FIGURE7_HEADER);
    let mut out = Vec::new();
    for p in points {
        let p = p?;
        table.rows.push(vec![
            p.servers.to_string(),
            format_cost(p.exact),
            format_cost(p.approx),
            format_cost(p.difference()),
        ]);
        out.push(p);
    }
    Ok((table, out))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: SimConfig,
    pub estimate: SimEstimate,
    pub analytic: PerformanceMeasures,
}

/// Simulate the configured system and attach the stationary values.
pub fn simulation_report(
    section: &SimulateSection,
    costs: &CostParams,
    seed: Option<u64>,
) -> Result<SimulationReport, CommandError> {
    let threshold = match section.threshold {
        Some(ThresholdSpec::Finite(t)) => Threshold::Finite(t),
        Some(ThresholdSpec::Named(NamedThreshold::Inf)) => Threshold::Infinite,
        None => match threshold_search(section.servers, section.rate, costs) {
            Ok(c) => c.threshold,
            Err(crate::error::QueueError::CapReached { best_threshold, .. }) => Threshold::Finite(best_threshold),
            Err(e) => return Err(e.into()),
        },
    };
    let config = SimConfig {
        servers: section.servers,
        threshold,
        l: section.rate,
        costs: *costs,
        horizon: section.horizon,
        warmup: section.warmup.unwrap_or(0.1 * section.horizon),
        batches: section.batches,
        seed: seed.unwrap_or(section.seed),
        stream: section.stream,
    };
    let model = StationaryModel::with_costs(section.rate, section.servers, threshold, costs)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let analytic = perf_measures(&model, &steady_state(&model), costs);
    let estimate = simulate(&config).map_err(|e| match e {
        crate::error::SimError::InvalidConfig(m) => CommandError::Config(ConfigError::Invalid(m)),
        other => other.into(),
    })?;
    Ok(SimulationReport {
        config,
        estimate,
        analytic,
    })
}
