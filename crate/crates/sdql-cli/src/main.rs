//! `sdql` — seedable downlink C-RAN power-management experiments.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sdql_sim::baselines::Algorithm;
use sdql_sim::config::ExperimentConfig;
use sdql_sim::experiment::{replay_trial, run_experiment, summarize, RunOptions};
use sdql_sim::metrics::TrialReport;

#[derive(Parser)]
#[command(
    name = "sdql",
    version,
    about = "Monte Carlo simulator of downlink C-RAN power management",
    long_about = "Runs seeded trials of a static deep Q-learning power reducer against \
                  activation and sleep-mode baselines on randomly drawn hexagonal \
                  deployments, and writes per-trial and aggregate artifacts."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sweep and write artifacts.
    Run(RunArgs),
    /// Recompute a stored trial from its seed and verify it matches.
    Replay(ReplayArgs),
    /// Rebuild aggregate.json and the summary CSVs of a run directory.
    Summarize(SummarizeArgs),
    /// Print the default configuration as TOML.
    Config,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config TOML; all defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory to write artifacts into (default: the config's
    /// run.output_dir, which itself defaults to "out").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the number of trials per sweep cell.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the base seed (trial i uses base seed + i).
    #[arg(long)]
    seed: Option<u64>,
    /// Schemes to evaluate.
    #[arg(long, value_enum, default_value_t = AlgoArg::All)]
    algo: AlgoArg,
    /// Write one episode CSV per learner trial.
    #[arg(long)]
    traces: bool,
    /// Write each drawn scenario as JSON.
    #[arg(long)]
    scenarios: bool,
    /// Carry Q-tables across a cell's trials (sequential) and dump them.
    #[arg(long)]
    warm_start: bool,
    /// Worker threads (default: SDQL_SIM_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ReplayInput {
    /// Stored per-trial report JSON to recompute and verify.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Stored scenario JSON to rerun the learner on.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    #[command(flatten)]
    input: ReplayInput,
    /// Config the run used; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the recomputed episode trace CSV here (learner runs only).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Run directory containing config.toml and trials/.
    #[arg(long, default_value = "out")]
    dir: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AlgoArg {
    All,
    Sdql,
    Activation,
    Sleep,
}

impl AlgoArg {
    fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgoArg::All => Algorithm::ALL.to_vec(),
            AlgoArg::Sdql => vec![Algorithm::Sdql],
            AlgoArg::Activation => vec![Algorithm::Activation],
            AlgoArg::Sleep => vec![Algorithm::Sleep],
        }
    }
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Replay(args) => replay(args),
        Command::Summarize(args) => do_summarize(args),
        Command::Config => {
            print!("{}", ExperimentConfig::default().to_toml_string()?);
            Ok(())
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> anyhow::Result<ExperimentConfig> {
    ExperimentConfig::load(path.map(|p| p.as_path())).with_context(|| match path {
        Some(p) => format!("loading config {}", p.display()),
        None => "building default config".to_string(),
    })
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let mut config = load_config(args.config.as_ref())?;
    if let Some(trials) = args.trials {
        config.run.trials = trials;
    }
    if let Some(seed) = args.seed {
        config.run.base_seed = seed;
    }

    let out_dir = args.out.unwrap_or_else(|| config.run.output_dir.clone());
    let mut options = RunOptions::new(out_dir);
    options.algorithms = args.algo.algorithms();
    options.write_traces = args.traces;
    options.write_scenarios = args.scenarios;
    options.warm_start = args.warm_start;
    options.threads = args.threads;

    let output = run_experiment(&config, &options).context("running experiment")?;
    for failure in &output.manifest.failures {
        eprintln!(
            "warning: cell w={} a={} trial {} failed and was skipped: {}",
            failure.power_weight, failure.activated_count, failure.trial, failure.error
        );
    }
    println!(
        "wrote {} files to {}",
        output.manifest.outputs.len(),
        output.out_dir.display()
    );
    for cell in &output.aggregate.cells {
        let mut line = format!(
            "w={} a={:<3} {:<10} reduction {} dB, offset {} dB, satisfied {:.3}",
            cell.power_weight,
            cell.activated_count,
            cell.algorithm.to_string(),
            fmt_db(cell.mean_power_reduction.db),
            fmt_db(cell.mean_power_offset.db),
            cell.mean_satisfied_fraction,
        );
        if let (Some(iters), Some(early)) = (cell.mean_iterations, cell.early_termination_fraction)
        {
            line.push_str(&format!(", iterations {iters:.1}, early {early:.2}"));
        }
        println!("{line}");
    }
    Ok(())
}

fn fmt_db(db: Option<f64>) -> String {
    db.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-inf".to_string())
}

fn replay(args: ReplayArgs) -> anyhow::Result<()> {
    let config = load_config(args.config.as_ref())?;
    match (&args.input.report, &args.input.scenario) {
        (Some(report_path), None) => replay_report(&config, report_path, args.trace.as_ref()),
        (None, Some(scenario_path)) => replay_scenario(&config, scenario_path, args.trace.as_ref()),
        _ => unreachable!("clap enforces exactly one input"),
    }
}

/// Verifies that a stored trial report is reproduced bit-for-bit from its
/// seed.
fn replay_report(
    config: &ExperimentConfig,
    report_path: &PathBuf,
    trace_path: Option<&PathBuf>,
) -> anyhow::Result<()> {
    let text = fs::read_to_string(report_path)
        .with_context(|| format!("reading report {}", report_path.display()))?;
    let stored = TrialReport::from_json(&text).context("parsing report")?;
    let check = replay_trial(config, &stored).context("recomputing trial")?;

    if let Some(path) = trace_path {
        match &check.trace {
            Some(trace) => write_trace(trace, path)?,
            None => bail!("{} trials have no episode trace", stored.algorithm),
        }
    }

    if !check.matches {
        bail!(
            "replay mismatch: trial {} (seed {}, {}) does not reproduce the stored report",
            stored.trial,
            stored.seed,
            stored.algorithm
        );
    }
    println!(
        "replay ok: trial {} (seed {}, {}) reproduced exactly",
        stored.trial, stored.seed, stored.algorithm
    );
    Ok(())
}

/// Reruns the learner on a stored scenario draw and reports the outcome.
fn replay_scenario(
    config: &ExperimentConfig,
    scenario_path: &PathBuf,
    trace_path: Option<&PathBuf>,
) -> anyhow::Result<()> {
    use sdql_sim::metrics::avg_power_reduction;
    use sdql_sim::scenario::{episode_rng, Scenario};
    use sdql_sim::sdql::{run_episode, DeepQTable};

    let text = fs::read_to_string(scenario_path)
        .with_context(|| format!("reading scenario {}", scenario_path.display()))?;
    let scenario = Scenario::from_json(&text).context("parsing scenario")?;
    let hyper = config.hyperparams_for(config.run.weights[0]);
    let mut tables = DeepQTable::zeroed(scenario.ue_count(), &hyper);
    let mut rng = episode_rng(scenario.seed);
    let (state, trace) = run_episode(&scenario, &config.radio, &hyper, &mut tables, &mut rng)
        .context("running episode")?;

    if let Some(path) = trace_path {
        write_trace(&trace, path)?;
    }
    let reduction = avg_power_reduction(&state.powers, config.radio.p_max_dbw)?;
    println!(
        "episode on seed {}: {} iterations ({}), power reduction {}",
        scenario.seed,
        trace.iterations,
        if trace.terminated_early { "converged" } else { "hit the cap" },
        fmt_db(reduction.db),
    );
    Ok(())
}

fn write_trace(trace: &sdql_sim::sdql::EpisodeTrace, path: &PathBuf) -> anyhow::Result<()> {
    let file =
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    trace.write_csv(file)?;
    println!("wrote episode trace to {}", path.display());
    Ok(())
}

fn do_summarize(args: SummarizeArgs) -> anyhow::Result<()> {
    let aggregate = summarize(&args.dir)
        .with_context(|| format!("summarizing {}", args.dir.display()))?;
    println!(
        "rebuilt aggregate.json and summary CSVs for {} cells in {}",
        aggregate.cells.len(),
        args.dir.display()
    );
    Ok(())
}
