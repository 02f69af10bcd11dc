//! Command-line surface for the tomography toolkit.
//!
//! Subcommands mirror the experiment kinds (`tomo`, `overlap`,
//! `lowerbound`, `oracle`) plus `report`, which rebuilds the aggregate
//! CSV from a saved `trials.jsonl`. Every experiment flag mirrors a
//! config-file key; `--config` loads the file first and explicit flags
//! override it.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use pauli_tomo::harness::{
    read_record_lines, regenerate_summary, run_experiment, ConfigBuilder, ExperimentKind,
};
use pauli_tomo::Result;

#[derive(Parser)]
#[command(
    name = "pauli-tomo",
    version,
    about = "Pauli-measurement tomography simulator and verification toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full-state tomography: m shots in each of the 3^n Pauli bases.
    Tomo(RunArgs),
    /// Overlapping tomography: reduced states of qubit subsets from one
    /// random-basis shot stream.
    Overlap(RunArgs),
    /// Hidden-bit decoding game: minimal sample count as the string
    /// length grows.
    Lowerbound(RunArgs),
    /// Exact ground truth (expectations, marginals, distributions) for a
    /// state spec.
    Oracle(RunArgs),
    /// Rebuild summary.csv / scaling.csv from a saved trials.jsonl.
    Report(ReportArgs),
}

/// Experiment parameters. Every flag mirrors a config-file key; flags
/// override values loaded via --config.
#[derive(Args)]
struct RunArgs {
    /// Key-value config file (one `key = value` per line, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// State spec: maximally_mixed | basis:BITS | ghz | random_pure:SEED
    /// | random_mixed:RANK:SEED.
    #[arg(long)]
    state: Option<String>,
    /// Number of qubits.
    #[arg(long)]
    n: Option<usize>,
    /// Subset size for overlapping tomography (all-subsets mode).
    #[arg(long)]
    k: Option<usize>,
    /// Target accuracy in trace norm.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Allowed failure probability.
    #[arg(long)]
    delta: Option<f64>,
    /// Number of independent trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Base seed; trial i uses substream seed XOR i.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the per-basis shot count of a tomo run.
    #[arg(long)]
    m: Option<u64>,
    /// Override the total shot count of an overlap run.
    #[arg(long)]
    shots: Option<u64>,
    /// Explicit target subsets, e.g. "0,1;2,3".
    #[arg(long)]
    subsets: Option<String>,
    /// String lengths for the lowerbound scan, e.g. "1,2,4,8,16".
    #[arg(long)]
    n_list: Option<String>,
    /// Bases for oracle distributions, e.g. "XY;ZZ".
    #[arg(long)]
    bases: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Save each trial's shot stream as shots-<trial>.txt.
    #[arg(long)]
    save_shots: bool,
    /// Clip-and-renormalize each tomo estimate before computing metrics.
    #[arg(long)]
    project: bool,
    /// Also report every smaller subset of each overlap target.
    #[arg(long)]
    include_smaller: bool,
    /// Worker threads (0 = all cores). Never affects results.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// trials.jsonl produced by a previous run.
    #[arg(long)]
    input: PathBuf,
    /// Directory for the regenerated CSV.
    #[arg(long)]
    out: PathBuf,
}

impl RunArgs {
    fn into_builder(self) -> Result<ConfigBuilder> {
        let mut builder = match &self.config {
            Some(path) => ConfigBuilder::from_text(&std::fs::read_to_string(path)?)?,
            None => ConfigBuilder::default(),
        };
        // Flags override config-file values.
        macro_rules! flag {
            ($field:ident) => {
                if let Some(value) = self.$field {
                    builder.$field = Some(value);
                }
            };
        }
        flag!(n);
        flag!(k);
        flag!(epsilon);
        flag!(delta);
        flag!(trials);
        flag!(seed);
        flag!(m);
        flag!(shots);
        flag!(workers);
        flag!(out);
        if let Some(state) = &self.state {
            builder.state = Some(state.parse()?);
        }
        if let Some(subsets) = &self.subsets {
            builder.subsets = None;
            builder.set("subsets", subsets)?;
        }
        if let Some(n_list) = &self.n_list {
            builder.n_list = None;
            builder.set("n_list", n_list)?;
        }
        if let Some(bases) = &self.bases {
            builder.bases = None;
            builder.set("bases", bases)?;
        }
        if self.save_shots {
            builder.save_shots = Some(true);
        }
        if self.project {
            builder.project = Some(true);
        }
        if self.include_smaller {
            builder.include_smaller = Some(true);
        }
        Ok(builder)
    }
}

fn run(kind: ExperimentKind, args: RunArgs) -> Result<()> {
    let config = args.into_builder()?.build_with_kind(kind)?;
    let start = Instant::now();
    let output = run_experiment(&config)?;
    let elapsed = start.elapsed().as_secs_f64();
    let out_dir = output.out_dir.display();
    if let Some(summary) = &output.summary {
        println!(
            "{kind}: {} trials, success rate {} (95% CI [{}, {}]), {} shots/trial",
            summary.trials,
            summary.success_rate,
            summary.wilson_lower,
            summary.wilson_upper,
            summary.shots_per_trial,
        );
        println!("wrote {out_dir}/trials.jsonl and {out_dir}/summary.csv");
    }
    if let Some(rows) = &output.scaling {
        for row in rows {
            println!(
                "n = {}: m* = {} (success rate {} over {} trials)",
                row.n, row.m_star, row.success_rate, row.trials
            );
        }
        println!("wrote {out_dir}/trials.jsonl and {out_dir}/scaling.csv");
    }
    if output.oracle.is_some() {
        println!("wrote {out_dir}/oracle.json");
    }
    eprintln!("config {} finished in {elapsed:.2}s", output.config_hash);
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let lines = read_record_lines(&args.input)?;
    let path = regenerate_summary(&lines, &args.out)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tomo(args) => run(ExperimentKind::Tomo, args),
        Command::Overlap(args) => run(ExperimentKind::Overlap, args),
        Command::Lowerbound(args) => run(ExperimentKind::Lowerbound, args),
        Command::Oracle(args) => run(ExperimentKind::Oracle, args),
        Command::Report(args) => report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
