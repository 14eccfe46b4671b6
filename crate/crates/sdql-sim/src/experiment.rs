//! Sweep orchestration: runs trials over weights × activated counts ×
//! schemes, writes per-trial and aggregate artifacts, and recomputes or
//! replays them later.
//!
//! Determinism contract: trial `i` of every sweep cell uses seed
//! `base_seed + i`, schemes within a trial share the scenario draw, and all
//! aggregate files are written from trial-ordered data — so two runs of the
//! same config and seed produce byte-identical aggregates regardless of
//! thread count. The only intentionally non-deterministic byte is the
//! timestamp inside `manifest.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{activation_scheme, sleep_scheme, Algorithm};
use crate::config::ExperimentConfig;
use crate::error::{Result, SimError};
use crate::metrics::{evaluate_trial, DbMetric, TrialReport};
use crate::scenario::{episode_rng, Scenario};
use crate::sdql::{run_episode, DeepQTable, EpisodeTrace};

/// Environment variable that overrides the worker-thread count.
pub const THREADS_ENV: &str = "SDQL_SIM_THREADS";

/// What to execute and where to put the artifacts.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Schemes to evaluate, normalised to canonical order.
    pub algorithms: Vec<Algorithm>,
    /// Write one episode CSV per learner trial.
    pub write_traces: bool,
    /// Write each drawn scenario as JSON (shared across schemes and weights).
    pub write_scenarios: bool,
    /// Carry Q-tables across the trials of a cell (sequentially) and dump
    /// the trained tables per cell.
    pub warm_start: bool,
    /// Worker threads; `None` falls back to `SDQL_SIM_THREADS`, then to all
    /// cores.
    pub threads: Option<usize>,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> RunOptions {
        RunOptions {
            out_dir: out_dir.into(),
            algorithms: Algorithm::ALL.to_vec(),
            write_traces: false,
            write_scenarios: false,
            warm_start: false,
            threads: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(SimError::Domain("no schemes selected".into()));
        }
        if self.warm_start && !self.algorithms.contains(&Algorithm::Sdql) {
            return Err(SimError::Domain(
                "warm start only applies when the learner is among the selected schemes".into(),
            ));
        }
        Ok(())
    }

    /// Requested schemes in canonical order, without duplicates.
    fn canonical_algorithms(&self) -> Vec<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .filter(|a| self.algorithms.contains(a))
            .collect()
    }
}

/// Per-cell aggregate over trials. Decibel metrics are averaged in the
/// linear-watt domain, matching how the per-trial metrics average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub power_weight: f64,
    pub throughput_weight: f64,
    pub activated_count: usize,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub mean_power_reduction: DbMetric,
    pub mean_power_offset: DbMetric,
    pub mean_interference: DbMetric,
    pub mean_interference_reduction: DbMetric,
    pub mean_throughput_loss_mbps: f64,
    pub mean_satisfied_fraction: f64,
    pub weak_to_central_total: usize,
    pub central_to_weak_total: usize,
    /// Learner only; `None` for schemes without episodes.
    pub mean_iterations: Option<f64>,
    pub early_termination_fraction: Option<f64>,
    pub mean_floor_clamps: Option<f64>,
}

/// Every cell of the sweep, in weights → counts → schemes order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub cells: Vec<CellAggregate>,
}

impl Aggregate {
    /// Cells for one weight pair and scheme, in activated-count order.
    pub fn curve(&self, power_weight: f64, algorithm: Algorithm) -> Vec<&CellAggregate> {
        self.cells
            .iter()
            .filter(|c| c.power_weight == power_weight && c.algorithm == algorithm)
            .collect()
    }
}

/// One trial that could not be completed; the sweep continues without it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub power_weight: f64,
    pub activated_count: usize,
    pub trial: usize,
    pub error: String,
}

/// Run provenance; the timestamp is the only byte of a run that is not a
/// pure function of config and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub created_unix_s: u64,
    /// SHA-256 of the `config.toml` echo written next to this manifest.
    pub config_sha256: String,
    pub trials_per_cell: usize,
    pub algorithms: Vec<Algorithm>,
    /// Trials that failed and were skipped (aggregates cover the rest).
    pub failures: Vec<TrialFailure>,
    /// Relative paths of every artifact written, sorted.
    pub outputs: Vec<String>,
}

/// Everything a run produced, for programmatic callers.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub out_dir: PathBuf,
    pub aggregate: Aggregate,
    pub manifest: Manifest,
}

/// Outcome of recomputing a stored trial from its seed.
#[derive(Debug, Clone)]
pub struct ReplayCheck {
    /// Whether the recomputed report equals the stored one field-for-field.
    pub matches: bool,
    pub recomputed: TrialReport,
    /// Episode trace of the recomputation (learner trials only).
    pub trace: Option<EpisodeTrace>,
}

// --- single-trial execution ------------------------------------------------------

/// Everything produced by one scheme on one scenario draw.
struct SchemeOutcome {
    report: TrialReport,
    trace: Option<EpisodeTrace>,
}

fn run_scheme(
    config: &ExperimentConfig,
    scenario: &Scenario,
    algorithm: Algorithm,
    weights: [f64; 2],
    trial: usize,
    qtables: &mut DeepQTable,
) -> Result<SchemeOutcome> {
    let radio = &config.radio;
    let weight_pair = (weights[0], weights[1]);
    match algorithm {
        Algorithm::Sdql => {
            let hyper = config.hyperparams_for(weights);
            let mut rng = episode_rng(scenario.seed);
            let (state, trace) = run_episode(scenario, radio, &hyper, qtables, &mut rng)?;
            let report = evaluate_trial(
                scenario,
                radio,
                algorithm,
                weight_pair,
                trial,
                &state.powers,
                &state,
                Some(&trace),
            )?;
            Ok(SchemeOutcome {
                report,
                trace: Some(trace),
            })
        }
        Algorithm::Activation => {
            let outcome = activation_scheme(scenario, radio);
            let report = evaluate_trial(
                scenario,
                radio,
                algorithm,
                weight_pair,
                trial,
                &outcome.consumption,
                &outcome.radiated,
                None,
            )?;
            Ok(SchemeOutcome {
                report,
                trace: None,
            })
        }
        Algorithm::Sleep => {
            let outcome = sleep_scheme(scenario, radio, config.sleep_power_dbw())?;
            let report = evaluate_trial(
                scenario,
                radio,
                algorithm,
                weight_pair,
                trial,
                &outcome.consumption,
                &outcome.radiated,
                None,
            )?;
            Ok(SchemeOutcome {
                report,
                trace: None,
            })
        }
    }
}

/// One trial of one cell: shared scenario draw, then every scheme on it.
struct TrialBundle {
    trial: usize,
    scenario_json: Option<String>,
    outcomes: Vec<SchemeOutcome>,
}

fn run_trial(
    config: &ExperimentConfig,
    weights: [f64; 2],
    activated_count: usize,
    trial: usize,
    algorithms: &[Algorithm],
    keep_scenario: bool,
    warm_tables: Option<&mut DeepQTable>,
) -> Result<TrialBundle> {
    let seed = config.run.base_seed + trial as u64;
    let params = config.scenario.params_for(activated_count);
    let scenario = Scenario::generate(&params, &config.radio, seed)?;
    let hyper = config.hyperparams_for(weights);

    let mut fresh_tables = DeepQTable::zeroed(scenario.ue_count(), &hyper);
    let qtables = match warm_tables {
        Some(t) => t,
        None => &mut fresh_tables,
    };

    let mut outcomes = Vec::with_capacity(algorithms.len());
    for &algorithm in algorithms {
        outcomes.push(run_scheme(
            config, &scenario, algorithm, weights, trial, qtables,
        )?);
    }
    Ok(TrialBundle {
        trial,
        scenario_json: if keep_scenario {
            Some(scenario.to_json()?)
        } else {
            None
        },
        outcomes,
    })
}

// --- aggregation ------------------------------------------------------------------

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let values: Vec<f64> = values.collect();
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Aggregates the trial-ordered reports of one (weights, count, scheme) cell.
fn aggregate_cell(reports: &[&TrialReport]) -> Result<CellAggregate> {
    let first = reports
        .first()
        .ok_or(SimError::EmptySamples)?;
    let mean_db = |values: Vec<f64>| -> Result<DbMetric> {
        DbMetric::from_linear_watts(values.iter().sum::<f64>() / values.len() as f64)
    };
    let episodes: Vec<_> = reports.iter().filter_map(|r| r.episode.as_ref()).collect();
    Ok(CellAggregate {
        power_weight: first.power_weight,
        throughput_weight: first.throughput_weight,
        activated_count: first.activated_count,
        algorithm: first.algorithm,
        trials: reports.len(),
        mean_power_reduction: mean_db(
            reports.iter().map(|r| r.avg_power_reduction.linear_watts).collect(),
        )?,
        mean_power_offset: mean_db(
            reports.iter().map(|r| r.avg_power_offset.linear_watts).collect(),
        )?,
        mean_interference: mean_db(
            reports.iter().map(|r| r.avg_interference.linear_watts).collect(),
        )?,
        mean_interference_reduction: mean_db(
            reports
                .iter()
                .map(|r| r.avg_interference_reduction.linear_watts)
                .collect(),
        )?,
        mean_throughput_loss_mbps: mean(
            reports.iter().map(|r| r.throughput_loss_total_bps / 1.0e6),
        )
        .unwrap_or(0.0),
        mean_satisfied_fraction: mean(
            reports.iter().map(|r| r.satisfied_ues as f64 / r.ue_count as f64),
        )
        .unwrap_or(0.0),
        weak_to_central_total: reports.iter().map(|r| r.weak_to_central).sum(),
        central_to_weak_total: reports.iter().map(|r| r.central_to_weak).sum(),
        mean_iterations: mean(episodes.iter().map(|e| e.iterations as f64)),
        early_termination_fraction: mean(
            episodes
                .iter()
                .map(|e| if e.terminated_early { 1.0 } else { 0.0 }),
        ),
        mean_floor_clamps: mean(episodes.iter().map(|e| e.floor_clamps as f64)),
    })
}

// --- summary table ------------------------------------------------------------------

/// Row labels of the per-weight summary table, in output order.
const SUMMARY_METRICS: [&str; 11] = [
    "avg_power_reduction_db",
    "avg_power_offset_db",
    "avg_interference_db",
    "avg_interference_reduction_db",
    "throughput_loss_mbps",
    "satisfied_fraction",
    "weak_to_central",
    "central_to_weak",
    "iterations",
    "early_termination_fraction",
    "floor_clamps",
];

fn format_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn summary_value(cell: &CellAggregate, metric: &str) -> String {
    match metric {
        "avg_power_reduction_db" => format_opt(cell.mean_power_reduction.db),
        "avg_power_offset_db" => format_opt(cell.mean_power_offset.db),
        "avg_interference_db" => format_opt(cell.mean_interference.db),
        "avg_interference_reduction_db" => format_opt(cell.mean_interference_reduction.db),
        "throughput_loss_mbps" => cell.mean_throughput_loss_mbps.to_string(),
        "satisfied_fraction" => cell.mean_satisfied_fraction.to_string(),
        "weak_to_central" => cell.weak_to_central_total.to_string(),
        "central_to_weak" => cell.central_to_weak_total.to_string(),
        "iterations" => format_opt(cell.mean_iterations),
        "early_termination_fraction" => format_opt(cell.early_termination_fraction),
        "floor_clamps" => format_opt(cell.mean_floor_clamps),
        _ => unreachable!("unknown summary metric {metric}"),
    }
}

/// Renders one weight pair's cells as a metric × count table with one row
/// per (metric, scheme).
fn summary_csv(
    cells: &[CellAggregate],
    counts: &[usize],
    algorithms: &[Algorithm],
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["metric".to_string(), "algorithm".to_string()];
    header.extend(counts.iter().map(|c| c.to_string()));
    w.write_record(&header)?;
    for metric in SUMMARY_METRICS {
        for &algorithm in algorithms {
            let mut row = vec![metric.to_string(), algorithm.to_string()];
            for &count in counts {
                let cell = cells
                    .iter()
                    .find(|c| c.activated_count == count && c.algorithm == algorithm)
                    .ok_or_else(|| {
                        SimError::InvalidArtifact(format!(
                            "missing aggregate cell for count {count} / {algorithm}"
                        ))
                    })?;
                row.push(summary_value(cell, metric));
            }
            w.write_record(&row)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| SimError::InvalidArtifact(format!("summary buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| SimError::InvalidArtifact(format!("summary utf8: {e}")))
}

fn cdf_csv(samples: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["value", "cdf"])?;
    for (value, fraction) in crate::metrics::empirical_cdf(samples)? {
        w.write_record(&[value.to_string(), fraction.to_string()])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| SimError::InvalidArtifact(format!("cdf buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| SimError::InvalidArtifact(format!("cdf utf8: {e}")))
}

// --- artifact layout ------------------------------------------------------------------

/// Weight-pair label used in file names, e.g. `0.5`.
fn weight_label(power_weight: f64) -> String {
    power_weight.to_string()
}

fn cell_dir(power_weight: f64, count: usize) -> String {
    format!("w{}_a{}", weight_label(power_weight), count)
}

fn trial_file(trial: usize, algorithm: Algorithm) -> String {
    format!("t{trial:04}_{algorithm}.json")
}

struct ArtifactWriter {
    root: PathBuf,
    outputs: Vec<String>,
}

impl ArtifactWriter {
    fn new(root: &Path) -> ArtifactWriter {
        ArtifactWriter {
            root: root.to_path_buf(),
            outputs: Vec::new(),
        }
    }

    fn write(&mut self, relative: &str, contents: &str) -> Result<()> {
        let path = self.root.join(relative);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, contents)?;
        self.outputs.push(relative.to_string());
        Ok(())
    }
}

// --- the run ------------------------------------------------------------------

/// Executes the full sweep and writes all artifacts under `options.out_dir`.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<RunOutput> {
    config.validate()?;
    options.validate()?;
    let algorithms = options.canonical_algorithms();

    let threads = options.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| SimError::Domain(format!("thread pool: {e}")))?;

    let mut writer = ArtifactWriter::new(&options.out_dir);
    let config_text = config.to_toml_string()?;
    writer.write("config.toml", &config_text)?;

    let mut cells: Vec<CellAggregate> = Vec::new();
    let mut failures: Vec<TrialFailure> = Vec::new();
    for &weights in &config.run.weights {
        let mut weight_cells: Vec<CellAggregate> = Vec::new();
        for &count in &config.scenario.activated_counts {
            let keep_scenario = options.write_scenarios && weights == config.run.weights[0];
            let results: Vec<(usize, Result<TrialBundle>)> = if options.warm_start {
                run_cell_warm(config, weights, count, &algorithms, keep_scenario, &mut writer)?
            } else {
                pool.install(|| {
                    (0..config.run.trials)
                        .into_par_iter()
                        .map(|trial| {
                            (
                                trial,
                                run_trial(
                                    config, weights, count, trial, &algorithms, keep_scenario,
                                    None,
                                ),
                            )
                        })
                        .collect()
                })
            };

            // A failing trial is recorded and skipped; the sweep goes on.
            let mut bundles: Vec<TrialBundle> = Vec::with_capacity(results.len());
            for (trial, result) in results {
                match result {
                    Ok(bundle) => bundles.push(bundle),
                    Err(error) => failures.push(TrialFailure {
                        power_weight: weights[0],
                        activated_count: count,
                        trial,
                        error: error.to_string(),
                    }),
                }
            }

            write_cell_artifacts(&bundles, weights, count, options, &mut writer)?;

            let cell_aggregates = aggregate_cell_reports(&bundles, &algorithms, weights, count)?;
            weight_cells.extend(cell_aggregates);
        }

        let csv_text = summary_csv(&weight_cells, &config.scenario.activated_counts, &algorithms)?;
        writer.write(&format!("summary_w{}.csv", weight_label(weights[0])), &csv_text)?;
        cells.extend(weight_cells);
    }

    let aggregate = Aggregate { cells };
    writer.write("aggregate.json", &serde_json::to_string_pretty(&aggregate)?)?;

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix_s: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config_sha256: hex_sha256(config_text.as_bytes()),
        trials_per_cell: config.run.trials,
        algorithms: algorithms.clone(),
        failures,
        outputs: {
            let mut outputs = writer.outputs.clone();
            outputs.push("manifest.json".to_string());
            outputs.sort();
            outputs
        },
    };
    writer.write("manifest.json", &serde_json::to_string_pretty(&manifest)?)?;

    Ok(RunOutput {
        out_dir: options.out_dir.clone(),
        aggregate,
        manifest,
    })
}

/// Sequential warm-start variant: Q-tables persist across the trials of a
/// cell and are dumped next to the cell's reports.
fn run_cell_warm(
    config: &ExperimentConfig,
    weights: [f64; 2],
    count: usize,
    algorithms: &[Algorithm],
    keep_scenario: bool,
    writer: &mut ArtifactWriter,
) -> Result<Vec<(usize, Result<TrialBundle>)>> {
    let hyper = config.hyperparams_for(weights);
    let mut tables = DeepQTable::zeroed(count, &hyper);
    let mut results = Vec::with_capacity(config.run.trials);
    for trial in 0..config.run.trials {
        results.push((
            trial,
            run_trial(config, weights, count, trial, algorithms, keep_scenario, Some(&mut tables)),
        ));
    }
    writer.write(
        &format!("qtables/{}.json", cell_dir(weights[0], count)),
        &tables.to_json()?,
    )?;
    Ok(results)
}

/// Writes per-trial reports, optional traces/scenarios, and pooled CDFs for
/// one cell, in trial order.
fn write_cell_artifacts(
    bundles: &[TrialBundle],
    weights: [f64; 2],
    count: usize,
    options: &RunOptions,
    writer: &mut ArtifactWriter,
) -> Result<()> {
    let dir = cell_dir(weights[0], count);
    for bundle in bundles {
        for outcome in &bundle.outcomes {
            writer.write(
                &format!("trials/{dir}/{}", trial_file(bundle.trial, outcome.report.algorithm)),
                &outcome.report.to_json()?,
            )?;
            if options.write_traces {
                if let Some(trace) = &outcome.trace {
                    let mut buf = Vec::new();
                    trace.write_csv(&mut buf)?;
                    let text = String::from_utf8(buf).map_err(|e| {
                        SimError::InvalidArtifact(format!("trace utf8: {e}"))
                    })?;
                    writer.write(&format!("traces/{dir}/t{:04}.csv", bundle.trial), &text)?;
                }
            }
        }
        if let Some(json) = &bundle.scenario_json {
            writer.write(&format!("scenarios/a{count}/t{:04}.json", bundle.trial), json)?;
        }
    }

    // Pooled distribution files for the learner's cells.
    let learner_reports: Vec<&TrialReport> = bundles
        .iter()
        .flat_map(|b| b.outcomes.iter())
        .filter(|o| o.report.algorithm == Algorithm::Sdql)
        .map(|o| &o.report)
        .collect();
    if !learner_reports.is_empty() {
        let offsets: Vec<f64> = learner_reports
            .iter()
            .flat_map(|r| r.per_ue_offset_db.iter().copied())
            .collect();
        let rates_mbps: Vec<f64> = learner_reports
            .iter()
            .flat_map(|r| r.per_ue_rate_bps.iter().map(|bps| bps / 1.0e6))
            .collect();
        writer.write(&format!("cdf_offset_db_{dir}.csv"), &cdf_csv(&offsets)?)?;
        writer.write(&format!("cdf_rate_mbps_{dir}.csv"), &cdf_csv(&rates_mbps)?)?;
    }
    Ok(())
}

/// Groups one cell's bundles per scheme (trial order preserved) and
/// aggregates each group. A cell with no surviving trials is fatal: the
/// summary table would have an undefined column.
fn aggregate_cell_reports(
    bundles: &[TrialBundle],
    algorithms: &[Algorithm],
    weights: [f64; 2],
    count: usize,
) -> Result<Vec<CellAggregate>> {
    let mut out = Vec::with_capacity(algorithms.len());
    for &algorithm in algorithms {
        let reports: Vec<&TrialReport> = bundles
            .iter()
            .flat_map(|b| b.outcomes.iter())
            .filter(|o| o.report.algorithm == algorithm)
            .map(|o| &o.report)
            .collect();
        if reports.is_empty() {
            return Err(SimError::Domain(format!(
                "every trial of cell w={} a={count} failed; see the recorded failures",
                weights[0]
            )));
        }
        out.push(aggregate_cell(&reports)?);
    }
    Ok(out)
}

fn hex_sha256(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

// --- summarize ------------------------------------------------------------------

/// Rebuilds `aggregate.json` and the per-weight summary CSVs of a finished
/// run directory from its stored per-trial reports. Produces byte-identical
/// files to the original run.
pub fn summarize(dir: &Path) -> Result<Aggregate> {
    let config = ExperimentConfig::from_toml_str(&std::fs::read_to_string(dir.join("config.toml"))?)?;
    let reports = read_all_reports(&dir.join("trials"))?;
    if reports.is_empty() {
        return Err(SimError::InvalidArtifact(format!(
            "no trial reports under {}",
            dir.join("trials").display()
        )));
    }

    // Schemes actually present, in canonical order.
    let algorithms: Vec<Algorithm> = Algorithm::ALL
        .into_iter()
        .filter(|a| reports.iter().any(|r| r.algorithm == *a))
        .collect();

    let mut writer = ArtifactWriter::new(dir);
    let mut cells: Vec<CellAggregate> = Vec::new();
    for &weights in &config.run.weights {
        let mut weight_cells: Vec<CellAggregate> = Vec::new();
        for &count in &config.scenario.activated_counts {
            for &algorithm in &algorithms {
                let mut group: Vec<&TrialReport> = reports
                    .iter()
                    .filter(|r| {
                        r.power_weight == weights[0]
                            && r.activated_count == count
                            && r.algorithm == algorithm
                    })
                    .collect();
                group.sort_by_key(|r| r.trial);
                if group.is_empty() {
                    return Err(SimError::InvalidArtifact(format!(
                        "no reports for cell w={} a={count} {algorithm}",
                        weights[0]
                    )));
                }
                weight_cells.push(aggregate_cell(&group)?);
            }
        }
        let csv_text = summary_csv(&weight_cells, &config.scenario.activated_counts, &algorithms)?;
        writer.write(&format!("summary_w{}.csv", weight_label(weights[0])), &csv_text)?;
        cells.extend(weight_cells);
    }

    let aggregate = Aggregate { cells };
    writer.write("aggregate.json", &serde_json::to_string_pretty(&aggregate)?)?;
    Ok(aggregate)
}

/// Reads every per-trial report under `trials/`, in sorted path order.
fn read_all_reports(trials_dir: &Path) -> Result<Vec<TrialReport>> {
    let mut paths: Vec<PathBuf> = Vec::new();
    if trials_dir.is_dir() {
        for entry in std::fs::read_dir(trials_dir)? {
            let cell = entry?.path();
            if !cell.is_dir() {
                continue;
            }
            for file in std::fs::read_dir(&cell)? {
                let path = file?.path();
                if path.extension().is_some_and(|e| e == "json") {
                    paths.push(path);
                }
            }
        }
    }
    paths.sort();
    paths
        .iter()
        .map(|p| TrialReport::from_json(&std::fs::read_to_string(p)?))
        .collect()
}

// --- replay ------------------------------------------------------------------

/// Recomputes a stored trial from its seed under the given config and
/// compares the result field-for-field.
pub fn replay_trial(config: &ExperimentConfig, stored: &TrialReport) -> Result<ReplayCheck> {
    config.validate()?;
    if stored.rrh_count != config.scenario.rrh_count {
        return Err(SimError::InvalidArtifact(format!(
            "report was produced with {} RRHs but the config defines {}",
            stored.rrh_count, config.scenario.rrh_count
        )));
    }
    let params = config.scenario.params_for(stored.activated_count);
    let scenario = Scenario::generate(&params, &config.radio, stored.seed)?;
    let weights = [stored.power_weight, stored.throughput_weight];
    let hyper = config.hyperparams_for(weights);
    let mut qtables = DeepQTable::zeroed(scenario.ue_count(), &hyper);
    let outcome = run_scheme(config, &scenario, stored.algorithm, weights, stored.trial, &mut qtables)?;
    Ok(ReplayCheck {
        matches: outcome.report == *stored,
        recomputed: outcome.report,
        trace: outcome.trace,
    })
}

/// Convenience used by tests and tooling: collects the reports of one cell
/// from a run directory, keyed and ordered by trial.
pub fn read_cell_reports(
    dir: &Path,
    power_weight: f64,
    count: usize,
    algorithm: Algorithm,
) -> Result<Vec<TrialReport>> {
    let cell = dir.join("trials").join(cell_dir(power_weight, count));
    let mut by_trial: BTreeMap<usize, TrialReport> = BTreeMap::new();
    for entry in std::fs::read_dir(&cell)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.ends_with(&format!("_{algorithm}.json")) {
            let report = TrialReport::from_json(&std::fs::read_to_string(&path)?)?;
            by_trial.insert(report.trial, report);
        }
    }
    Ok(by_trial.into_values().collect())
}
