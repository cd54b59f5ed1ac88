use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cosource::arrival::ArrivalDistribution;
use cosource::error::{CommandError, ConfigError};
use cosource::policy::ThresholdRule;
use cosource::report::{self, curve_table, default_figure7_grid, emit, PolicyChoice, RunConfig, RunOptions, TableId};

#[derive(Parser, Debug)]
#[command(
    name = "cosource",
    version,
    about = "Staffing and outsourcing under arrival-rate uncertainty"
)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Arrival law as JSON, e.g. '{"kind":"uniform","lo":90,"hi":110}'.
    #[arg(long, global = true)]
    distribution: Option<String>,
    /// Quadrature nodes over the arrival law.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Largest staffing level scanned.
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Stop the staffing scan once the cost has risen for a while.
    #[arg(long, global = true)]
    fast: bool,
    #[arg(long, global = true)]
    c: Option<f64>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    w: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    #[arg(long, global = true, value_enum)]
    threshold_rule: Option<RuleArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum RuleArg {
    MeanRate,
    RealizedRate,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    U,
    D,
    Nv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact optimal staffing level and expected cost.
    SolveExact {
        /// Emit the full N, cost curve instead of the summary.
        #[arg(long)]
        curve: bool,
    },
    /// Staffing level and expected cost of one heuristic, as JSON.
    Policy {
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// U, D and NV against the exact optimum.
    Compare,
    /// Exact cost curve next to the diffusion approximation.
    Figure7 {
        #[arg(long)]
        n_from: Option<usize>,
        #[arg(long)]
        n_to: Option<usize>,
        #[arg(long)]
        n_step: Option<usize>,
    },
    /// Discrete-event simulation of the `simulate` section, as JSON.
    Simulate {
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rebuild a built-in table.
    ReproduceTable {
        /// table2, ec-cv, ec-cost-low, ec-cost-mid, ec-cost-high,
        /// ec-skew-low, ec-skew-mid, ec-skew-high or ec-beta.
        id: String,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(text) = &cli.distribution {
        let d: ArrivalDistribution = serde_json::from_str(text)?;
        cfg.distribution = Some(d);
        cfg.scenarios.clear();
    }
    let costs = &mut cfg.costs;
    for (slot, v) in [
        (&mut costs.c, cli.c),
        (&mut costs.p, cli.p),
        (&mut costs.a, cli.a),
        (&mut costs.w, cli.w),
        (&mut costs.gamma, cli.gamma),
        (&mut costs.mu, cli.mu),
    ] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    if cli.nodes.is_some() {
        cfg.nodes = cli.nodes;
    }
    if cli.n_max.is_some() {
        cfg.n_max = cli.n_max;
    }
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    cfg.fast |= cli.fast;
    if let Some(r) = cli.threshold_rule {
        cfg.threshold_rule = match r {
            RuleArg::MeanRate => ThresholdRule::MeanRate,
            RuleArg::RealizedRate => ThresholdRule::RealizedRate,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn json(value: &impl serde::Serialize) -> Result<String, CommandError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CommandError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn run(cli: &Cli) -> Result<(), CommandError> {
    let cfg = load_config(cli)?;
    let opts = RunOptions::from_config(&cfg);
    let out = cfg.output.as_deref();
    match &cli.command {
        Command::SolveExact { curve } => {
            let scenarios = cfg.resolved_scenarios()?;
            let (table, sols) = report::solve_exact(&scenarios, &opts);
            if *curve {
                if sols.len() != 1 {
                    return Err(ConfigError::Invalid("--curve takes one distribution".into()).into());
                }
                emit(&curve_table(&sols[0]).to_csv(), out)
            } else {
                emit(&table.to_csv(), out)
            }
        }
        Command::Policy { kind } => {
            let s = cfg.single_scenario()?;
            let kind = match kind {
                KindArg::U => PolicyChoice::U,
                KindArg::D => PolicyChoice::D,
                KindArg::Nv => PolicyChoice::Nv,
            };
            emit(&json(&report::policy_report(&s, kind, &opts)?)?, out)
        }
        Command::Compare => {
            let (table, _) = report::compare_table(&cfg.resolved_scenarios()?, &opts)?;
            emit(&table.to_csv(), out)
        }
        Command::Figure7 { n_from, n_to, n_step } => {
            let s = cfg.single_scenario()?;
            let mut grid = cfg.figure7.unwrap_or_else(|| default_figure7_grid(&s.distribution));
            grid.n_from = n_from.unwrap_or(grid.n_from);
            grid.n_to = n_to.unwrap_or(grid.n_to);
            grid.n_step = n_step.unwrap_or(grid.n_step);
            let (table, _) = report::figure7(&s, &grid, &opts)?;
            emit(&table.to_csv(), out)
        }
        Command::Simulate { seed } => {
            let section = cfg
                .simulate
                .as_ref()
                .ok_or_else(|| ConfigError::Invalid("the config has no simulate section".into()))?;
            emit(&json(&report::simulation_report(section, &cfg.costs, *seed)?)?, out)
        }
        Command::ReproduceTable { id } => {
            let id = TableId::parse(id).ok_or_else(|| ConfigError::Invalid(format!("unknown table id {id}")))?;
            emit(&report::reproduce_table(id, &cfg.costs, &opts)?.to_csv(), out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
