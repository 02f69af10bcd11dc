//! Experiment orchestration: validated configs, seeded parallel trial
//! execution, aggregation, and deterministic persistence.
//!
//! A run is a pure function of its configuration: trial `i` always uses
//! the rng substream `seed ^ i`, aggregation happens after all trials
//! join, and record files are rendered with stable formatting, so the
//! same config produces byte-identical `trials.jsonl` and CSV outputs on
//! any worker count. Wall-clock timings are returned in memory only.
//!
//! Outputs per experiment kind, written under the configured directory:
//!
//! * `tomo`, `overlap` — `trials.jsonl` (header + one record per trial)
//!   and `summary.csv`; optional per-trial `shots-<i>.txt` streams.
//! * `lowerbound` — `trials.jsonl` (header + one record per table row)
//!   and `scaling.csv`.
//! * `oracle` — `oracle.json` with exact expectations, marginals, and
//!   outcome distributions.

pub mod config;
pub mod records;

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    ConfigBuilder, ExperimentConfig, ExperimentKind, LowerboundConfig, OracleConfig,
    OverlapConfig, TomoConfig,
};
pub use records::{
    empirical_distribution, scaling_csv, wilson_interval, HeaderRecord, RecordLine,
    ScalingRecord, Summary, TrialRecord,
};

use crate::error::{Error, Result};
use crate::estimator::{
    project_to_physical, run_full_tomography, run_full_tomography_recording, TomographyPlan,
};
use crate::lowerbound::scaling_experiment;
use crate::measurement::{outcome_distribution, write_shots, MeasurementBasis, Shot};
use crate::overlap::{run_overlap, run_overlap_recording, OverlapPlan};
use crate::qstate::{make_state, one_norm_distance, DensityMatrix, PauliString, StateSpec, Subset};

/// Everything a run produced, alongside what was written to disk.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub config_hash: String,
    pub out_dir: PathBuf,
    /// Aggregate for trial-based kinds (`tomo`, `overlap`).
    pub summary: Option<Summary>,
    pub records: Vec<TrialRecord>,
    /// Table for the `lowerbound` kind.
    pub scaling: Option<Vec<ScalingRecord>>,
    /// Exact report for the `oracle` kind.
    pub oracle: Option<OracleReport>,
}

impl ExperimentOutput {
    fn new(config_hash: String, out_dir: PathBuf) -> Self {
        Self {
            config_hash,
            out_dir,
            summary: None,
            records: Vec::new(),
            scaling: None,
            oracle: None,
        }
    }
}

/// Runs a trial closure set inside a dedicated pool of `workers` threads,
/// or the process-default pool when `workers` is 0. Worker count never
/// affects results, only wall time.
fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(f)
}

fn shot_stream_path(out_dir: &Path, trial: u64) -> PathBuf {
    out_dir.join(format!("shots-{trial}.txt"))
}

fn save_shot_stream(out_dir: &Path, trial: u64, shots: &[Shot]) -> Result<()> {
    let mut writer = BufWriter::new(fs::File::create(shot_stream_path(out_dir, trial))?);
    write_shots(&mut writer, shots)?;
    writer.flush()?;
    Ok(())
}

fn write_jsonl(
    path: &Path,
    header: HeaderRecord,
    body: impl IntoIterator<Item = RecordLine>,
) -> Result<()> {
    let mut writer = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer(&mut writer, &RecordLine::Header(header))?;
    writer.write_all(b"\n")?;
    for line in body {
        serde_json::to_writer(&mut writer, &line)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// Executes a validated experiment and writes its outputs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let hash = config.hash();
    fs::create_dir_all(config.out_dir())?;
    match config {
        ExperimentConfig::Tomo(cfg) => run_tomo(cfg, &hash),
        ExperimentConfig::Overlap(cfg) => run_overlap_kind(cfg, &hash),
        ExperimentConfig::Lowerbound(cfg) => run_lowerbound(cfg, &hash),
        ExperimentConfig::Oracle(cfg) => run_oracle(cfg, &hash),
    }
}

fn finish_trials(
    kind: ExperimentKind,
    hash: &str,
    seed: u64,
    out_dir: &Path,
    shots_per_trial: u64,
    records: Vec<TrialRecord>,
) -> Result<ExperimentOutput> {
    let summary = Summary::from_records(&records, shots_per_trial);
    let header = HeaderRecord {
        kind: kind.to_string(),
        config_hash: hash.to_string(),
        seed,
        trials: records.len() as u64,
        shots_per_trial: Some(shots_per_trial),
    };
    write_jsonl(
        &out_dir.join("trials.jsonl"),
        header,
        records.iter().cloned().map(RecordLine::Trial),
    )?;
    fs::write(out_dir.join("summary.csv"), summary.to_csv(hash, seed))?;
    let mut output = ExperimentOutput::new(hash.to_string(), out_dir.to_path_buf());
    output.summary = Some(summary);
    output.records = records;
    Ok(output)
}

fn run_tomo(cfg: &TomoConfig, hash: &str) -> Result<ExperimentOutput> {
    let rho = make_state(cfg.n, &cfg.state)?;
    let plan = match cfg.shots_override {
        Some(m) => TomographyPlan::with_shots(cfg.n, cfg.epsilon, cfg.delta, m)?,
        None => TomographyPlan::new(cfg.n, cfg.epsilon, cfg.delta)?,
    };
    let records = with_pool(cfg.workers, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let start = Instant::now();
                let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed ^ trial);
                let sigma = if cfg.save_shots {
                    let (sigma, _, shots) = run_full_tomography_recording(&rho, &plan, &mut rng)?;
                    save_shot_stream(&cfg.out, trial, &shots)?;
                    sigma
                } else {
                    run_full_tomography(&rho, &plan, &mut rng)?.0
                };
                let sigma = if cfg.project {
                    project_to_physical(&sigma)?
                } else {
                    sigma
                };
                let trace_error = one_norm_distance(rho.matrix(), &sigma)?;
                let frobenius_error = rho.matrix().sub(&sigma)?.frobenius_norm();
                Ok(TrialRecord {
                    trial,
                    trace_error,
                    frobenius_error,
                    success: trace_error < cfg.epsilon,
                    shots: plan.total_shots(),
                    wall_seconds: start.elapsed().as_secs_f64(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    finish_trials(
        ExperimentKind::Tomo,
        hash,
        cfg.seed,
        &cfg.out,
        plan.total_shots(),
        records,
    )
}

fn run_overlap_kind(cfg: &OverlapConfig, hash: &str) -> Result<ExperimentOutput> {
    let rho = make_state(cfg.n, &cfg.state)?;
    let mut plan = match (cfg.k, &cfg.subsets) {
        (Some(k), None) => OverlapPlan::all_subsets(cfg.n, k, cfg.epsilon, cfg.delta)?,
        (None, Some(subsets)) => {
            OverlapPlan::partial(cfg.n, cfg.epsilon, cfg.delta, subsets.clone())?
        }
        _ => {
            return Err(Error::Config(
                "overlap needs exactly one of k and subsets".into(),
            ))
        }
    };
    if let Some(shots) = cfg.shots_override {
        plan = plan.with_shots(shots)?;
    }
    if cfg.include_smaller {
        plan = plan.include_smaller();
    }
    let targets = plan.resolve_targets()?;
    // Exact reduced states, shared read-only across trials for the
    // 2-norm metric.
    let reduced: Vec<DensityMatrix> = targets
        .iter()
        .map(|s| rho.partial_trace(s))
        .collect::<Result<_>>()?;
    let records = with_pool(cfg.workers, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let start = Instant::now();
                let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed ^ trial);
                let estimates = if cfg.save_shots {
                    let (estimates, shots) = run_overlap_recording(&rho, &plan, &mut rng)?;
                    save_shot_stream(&cfg.out, trial, &shots)?;
                    estimates
                } else {
                    run_overlap(&rho, &plan, &mut rng)?
                };
                let mut trace_error = 0.0f64;
                let mut frobenius_error = 0.0f64;
                for (est, exact) in estimates.iter().zip(&reduced) {
                    let te = est
                        .trace_error
                        .expect("known input state fills subset errors");
                    trace_error = trace_error.max(te);
                    let fe = exact.matrix().sub(&est.sigma)?.frobenius_norm();
                    frobenius_error = frobenius_error.max(fe);
                }
                Ok(TrialRecord {
                    trial,
                    trace_error,
                    frobenius_error,
                    success: trace_error < cfg.epsilon,
                    shots: plan.shots(),
                    wall_seconds: start.elapsed().as_secs_f64(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    finish_trials(
        ExperimentKind::Overlap,
        hash,
        cfg.seed,
        &cfg.out,
        plan.shots(),
        records,
    )
}

fn run_lowerbound(cfg: &LowerboundConfig, hash: &str) -> Result<ExperimentOutput> {
    let rows = with_pool(cfg.workers, || {
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        scaling_experiment(&cfg.n_list, cfg.epsilon, cfg.delta, cfg.trials, &mut rng)
    })?;
    let scaling: Vec<ScalingRecord> = rows.iter().map(ScalingRecord::from).collect();
    let header = HeaderRecord {
        kind: ExperimentKind::Lowerbound.to_string(),
        config_hash: hash.to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        shots_per_trial: None,
    };
    write_jsonl(
        &cfg.out.join("trials.jsonl"),
        header,
        scaling.iter().cloned().map(RecordLine::ScalingRow),
    )?;
    fs::write(
        cfg.out.join("scaling.csv"),
        scaling_csv(&scaling, hash, cfg.seed),
    )?;
    let mut output = ExperimentOutput::new(hash.to_string(), cfg.out.clone());
    output.scaling = Some(scaling);
    Ok(output)
}

fn run_oracle(cfg: &OracleConfig, hash: &str) -> Result<ExperimentOutput> {
    let report = oracle_report(&cfg.state, cfg.n, &cfg.subsets, &cfg.bases)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    fs::write(cfg.out.join("oracle.json"), json)?;
    let mut output = ExperimentOutput::new(hash.to_string(), cfg.out.clone());
    output.oracle = Some(report);
    Ok(output)
}

/// Exact expectation tables are emitted only up to this size (`4^n`
/// entries); marginals and distributions have no such cap.
pub const ORACLE_EXPECTATION_MAX_QUBITS: usize = 6;

/// One exact Pauli expectation value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PauliExpectation {
    pub pauli: String,
    pub value: f64,
}

/// One exact reduced state, split into real and imaginary parts for
/// JSON readability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginalReport {
    pub subset: String,
    pub dim: usize,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

/// One exact measurement outcome distribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionReport {
    pub basis: String,
    pub probabilities: Vec<f64>,
}

/// Ground truth for a state spec: the oracle side of every statistical
/// check in this crate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub state: String,
    pub n: usize,
    /// All `4^n` Pauli expectations in lexicographic order; empty when
    /// `n` exceeds [`ORACLE_EXPECTATION_MAX_QUBITS`].
    pub expectations: Vec<PauliExpectation>,
    pub marginals: Vec<MarginalReport>,
    pub distributions: Vec<DistributionReport>,
}

/// Computes exact Pauli expectations, exact reduced states for the
/// requested subsets, and exact outcome distributions for the requested
/// bases.
pub fn oracle_report(
    spec: &StateSpec,
    n: usize,
    subsets: &[Subset],
    bases: &[MeasurementBasis],
) -> Result<OracleReport> {
    let rho = make_state(n, spec)?;
    let expectations = if n <= ORACLE_EXPECTATION_MAX_QUBITS {
        let values = rho.pauli_decompose()?;
        values
            .iter()
            .enumerate()
            .map(|(code, &value)| {
                Ok(PauliExpectation {
                    pauli: PauliString::from_code(n, code as u32)?.to_string(),
                    value,
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let marginals = subsets
        .iter()
        .map(|subset| {
            let reduced = rho.partial_trace(subset)?;
            let mat = reduced.matrix();
            let dim = mat.dim();
            let row = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
                (0..dim)
                    .map(|i| (0..dim).map(|j| f(&mat.get(i, j))).collect())
                    .collect()
            };
            Ok(MarginalReport {
                subset: subset.to_string(),
                dim,
                real: row(|c| c.re),
                imag: row(|c| c.im),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let distributions = bases
        .iter()
        .map(|basis| {
            Ok(DistributionReport {
                basis: basis.to_string(),
                probabilities: outcome_distribution(&rho, basis)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleReport {
        state: spec.to_string(),
        n,
        expectations,
        marginals,
        distributions,
    })
}

/// Reads a record file back: one JSON record per line, header first.
pub fn read_record_lines(path: &Path) -> Result<Vec<RecordLine>> {
    let reader = BufReader::new(fs::File::open(path)?);
    reader
        .lines()
        .map(|line| Ok(serde_json::from_str(&line?)?))
        .collect()
}

/// Regenerates the aggregate CSV from a saved record file, writing
/// `summary.csv` (trial records) or `scaling.csv` (scaling rows) into
/// `out_dir`. The output is byte-identical to what the original run
/// wrote, because both derive from the same records and provenance.
pub fn regenerate_summary(lines: &[RecordLine], out_dir: &Path) -> Result<PathBuf> {
    let Some(RecordLine::Header(header)) = lines.first() else {
        return Err(Error::Parse(
            "record file must start with a header record".into(),
        ));
    };
    let mut trials: Vec<TrialRecord> = Vec::new();
    let mut scaling: Vec<ScalingRecord> = Vec::new();
    for line in &lines[1..] {
        match line {
            RecordLine::Trial(t) => trials.push(t.clone()),
            RecordLine::ScalingRow(s) => scaling.push(s.clone()),
            RecordLine::Header(_) => {
                return Err(Error::Parse("unexpected second header record".into()))
            }
        }
    }
    fs::create_dir_all(out_dir)?;
    if !scaling.is_empty() {
        if !trials.is_empty() {
            return Err(Error::Parse(
                "record file mixes trial and scaling records".into(),
            ));
        }
        let path = out_dir.join("scaling.csv");
        fs::write(&path, scaling_csv(&scaling, &header.config_hash, header.seed))?;
        return Ok(path);
    }
    if header.trials != trials.len() as u64 {
        return Err(Error::Parse(format!(
            "header declares {} trials but file holds {}",
            header.trials,
            trials.len()
        )));
    }
    let summary = Summary::from_records(&trials, header.shots_per_trial.unwrap_or(0));
    let path = out_dir.join("summary.csv");
    fs::write(&path, summary.to_csv(&header.config_hash, header.seed))?;
    Ok(path)
}
