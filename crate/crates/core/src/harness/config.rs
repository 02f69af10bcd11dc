//! Experiment configuration: a flat `key = value` text format, per-kind
//! validation, and a provenance hash.
//!
//! The config hash covers only the scientific parameters (state, sizes,
//! tolerances, trial count, seed, overrides) — storage and parallelism
//! knobs (`out`, `workers`, `save_shots`) are excluded, so the same
//! experiment written to a different directory or run on a different
//! worker count reports the same hash and produces byte-identical
//! records.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measurement::MeasurementBasis;
use crate::qstate::{StateSpec, Subset};

/// Which experiment a config drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Tomo,
    Overlap,
    Lowerbound,
    Oracle,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Tomo => "tomo",
            Self::Overlap => "overlap",
            Self::Lowerbound => "lowerbound",
            Self::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tomo" => Ok(Self::Tomo),
            "overlap" => Ok(Self::Overlap),
            "lowerbound" => Ok(Self::Lowerbound),
            "oracle" => Ok(Self::Oracle),
            other => Err(Error::Config(format!(
                "unknown experiment kind \"{other}\" (expected tomo, overlap, lowerbound, or oracle)"
            ))),
        }
    }
}

/// Full-state tomography experiment parameters.
#[derive(Clone, Debug)]
pub struct TomoConfig {
    pub state: StateSpec,
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    /// Overrides the derived per-basis shot count when set (key `m`).
    pub shots_override: Option<u64>,
    /// Clip-and-renormalize each estimate before computing metrics.
    pub project: bool,
    pub save_shots: bool,
    /// 0 means the process-default thread pool.
    pub workers: usize,
    pub out: PathBuf,
}

/// Overlapping tomography experiment parameters.
#[derive(Clone, Debug)]
pub struct OverlapConfig {
    pub state: StateSpec,
    pub n: usize,
    /// Subset size in all-subsets mode; derived from the target list in
    /// partial mode.
    pub k: Option<usize>,
    /// Explicit target subsets (partial mode); `None` means all size-`k`
    /// subsets.
    pub subsets: Option<Vec<Subset>>,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    /// Overrides the derived total shot count when set (key `shots`).
    pub shots_override: Option<u64>,
    pub include_smaller: bool,
    pub save_shots: bool,
    pub workers: usize,
    pub out: PathBuf,
}

/// Hidden-bit decoding scaling experiment parameters.
#[derive(Clone, Debug)]
pub struct LowerboundConfig {
    pub n_list: Vec<usize>,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
}

/// Exact ground-truth report parameters.
#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub state: StateSpec,
    pub n: usize,
    pub subsets: Vec<Subset>,
    pub bases: Vec<MeasurementBasis>,
    pub out: PathBuf,
}

/// A validated experiment configuration.
#[derive(Clone, Debug)]
pub enum ExperimentConfig {
    Tomo(TomoConfig),
    Overlap(OverlapConfig),
    Lowerbound(LowerboundConfig),
    Oracle(OracleConfig),
}

impl ExperimentConfig {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Self::Tomo(_) => ExperimentKind::Tomo,
            Self::Overlap(_) => ExperimentKind::Overlap,
            Self::Lowerbound(_) => ExperimentKind::Lowerbound,
            Self::Oracle(_) => ExperimentKind::Oracle,
        }
    }

    pub fn out_dir(&self) -> &PathBuf {
        match self {
            Self::Tomo(c) => &c.out,
            Self::Overlap(c) => &c.out,
            Self::Lowerbound(c) => &c.out,
            Self::Oracle(c) => &c.out,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::Tomo(c) => c.seed,
            Self::Overlap(c) => c.seed,
            Self::Lowerbound(c) => c.seed,
            Self::Oracle(_) => 0,
        }
    }

    /// Canonical `key=value` rendering of the scientific parameters, one
    /// per line, keys sorted. This string is what the config hash covers.
    pub fn canonical_string(&self) -> String {
        let mut entries: Vec<(&'static str, String)> = vec![("kind", self.kind().to_string())];
        match self {
            Self::Tomo(c) => {
                entries.push(("delta", c.delta.to_string()));
                entries.push(("epsilon", c.epsilon.to_string()));
                if let Some(m) = c.shots_override {
                    entries.push(("m", m.to_string()));
                }
                entries.push(("n", c.n.to_string()));
                entries.push(("project", c.project.to_string()));
                entries.push(("seed", c.seed.to_string()));
                entries.push(("state", c.state.to_string()));
                entries.push(("trials", c.trials.to_string()));
            }
            Self::Overlap(c) => {
                entries.push(("delta", c.delta.to_string()));
                entries.push(("epsilon", c.epsilon.to_string()));
                entries.push(("include_smaller", c.include_smaller.to_string()));
                if let Some(k) = c.k {
                    entries.push(("k", k.to_string()));
                }
                entries.push(("n", c.n.to_string()));
                entries.push(("seed", c.seed.to_string()));
                if let Some(shots) = c.shots_override {
                    entries.push(("shots", shots.to_string()));
                }
                entries.push(("state", c.state.to_string()));
                if let Some(subsets) = &c.subsets {
                    entries.push(("subsets", join_subsets(subsets)));
                }
                entries.push(("trials", c.trials.to_string()));
            }
            Self::Lowerbound(c) => {
                entries.push(("delta", c.delta.to_string()));
                entries.push(("epsilon", c.epsilon.to_string()));
                entries.push((
                    "n_list",
                    c.n_list
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(","),
                ));
                entries.push(("seed", c.seed.to_string()));
                entries.push(("trials", c.trials.to_string()));
            }
            Self::Oracle(c) => {
                if !c.bases.is_empty() {
                    entries.push((
                        "bases",
                        c.bases
                            .iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>()
                            .join(";"),
                    ));
                }
                entries.push(("n", c.n.to_string()));
                entries.push(("state", c.state.to_string()));
                if !c.subsets.is_empty() {
                    entries.push(("subsets", join_subsets(&c.subsets)));
                }
            }
        }
        entries.sort_by_key(|(k, _)| *k);
        let mut out = String::new();
        for (key, value) in entries {
            out.push_str(key);
            out.push('=');
            out.push_str(&value);
            out.push('\n');
        }
        out
    }

    /// First 16 hex characters of the SHA-256 of the canonical string.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_string().as_bytes());
        digest
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// `0,1;2,3` — indices comma-separated within a subset, subsets separated
/// by semicolons.
fn join_subsets(subsets: &[Subset]) -> String {
    subsets
        .iter()
        .map(|s| {
            s.indices()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_subsets(text: &str) -> Result<Vec<Subset>> {
    text.split(';')
        .map(|part| {
            let indices = part
                .split(',')
                .map(|idx| {
                    idx.trim().parse::<usize>().map_err(|_| {
                        Error::Config(format!("invalid subset index \"{}\"", idx.trim()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Subset::new(indices)
        })
        .collect()
}

fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid n_list entry \"{}\"", part.trim())))
        })
        .collect()
}

fn parse_bases(text: &str) -> Result<Vec<MeasurementBasis>> {
    text.split(';').map(|part| part.trim().parse()).collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::Config(format!(
            "key {key} expects true or false, got \"{other}\""
        ))),
    }
}

macro_rules! parse_numeric {
    ($key:expr, $value:expr, $ty:ty) => {
        $value.parse::<$ty>().map_err(|_| {
            Error::Config(format!(
                "key {} expects a {}, got \"{}\"",
                $key,
                stringify!($ty),
                $value
            ))
        })
    };
}

/// Accumulates raw settings from a config file and/or CLI flags before
/// per-kind validation. Every field records whether it was explicitly
/// set; [`ConfigBuilder::build`] rejects settings the chosen kind does
/// not use.
#[derive(Clone, Debug, Default)]
pub struct ConfigBuilder {
    pub kind: Option<ExperimentKind>,
    pub state: Option<StateSpec>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub m: Option<u64>,
    pub shots: Option<u64>,
    pub subsets: Option<Vec<Subset>>,
    pub n_list: Option<Vec<usize>>,
    pub bases: Option<Vec<MeasurementBasis>>,
    pub include_smaller: Option<bool>,
    pub project: Option<bool>,
    pub save_shots: Option<bool>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ConfigBuilder {
    /// Parses the flat config format: one `key = value` per line, `#`
    /// starts a comment, blank lines ignored. Unknown and duplicate keys
    /// are errors.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut builder = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected \"key = value\", got \"{line}\"",
                    lineno + 1
                ))
            })?;
            builder.set(key.trim(), value.trim())?;
        }
        Ok(builder)
    }

    /// Sets one key from its text form; duplicate assignments are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn put<T>(key: &str, slot: &mut Option<T>, value: T) -> Result<()> {
            if slot.is_some() {
                return Err(Error::Config(format!("duplicate key {key}")));
            }
            *slot = Some(value);
            Ok(())
        }
        match key {
            "kind" => put(key, &mut self.kind, value.parse()?),
            "state" => put(key, &mut self.state, value.parse()?),
            "n" => put(key, &mut self.n, parse_numeric!(key, value, usize)?),
            "k" => put(key, &mut self.k, parse_numeric!(key, value, usize)?),
            "epsilon" => put(key, &mut self.epsilon, parse_numeric!(key, value, f64)?),
            "delta" => put(key, &mut self.delta, parse_numeric!(key, value, f64)?),
            "trials" => put(key, &mut self.trials, parse_numeric!(key, value, u64)?),
            "seed" => put(key, &mut self.seed, parse_numeric!(key, value, u64)?),
            "m" => put(key, &mut self.m, parse_numeric!(key, value, u64)?),
            "shots" => put(key, &mut self.shots, parse_numeric!(key, value, u64)?),
            "subsets" => put(key, &mut self.subsets, parse_subsets(value)?),
            "n_list" => put(key, &mut self.n_list, parse_n_list(value)?),
            "bases" => put(key, &mut self.bases, parse_bases(value)?),
            "include_smaller" => put(key, &mut self.include_smaller, parse_bool(key, value)?),
            "project" => put(key, &mut self.project, parse_bool(key, value)?),
            "save_shots" => put(key, &mut self.save_shots, parse_bool(key, value)?),
            "workers" => put(key, &mut self.workers, parse_numeric!(key, value, usize)?),
            "out" => put(key, &mut self.out, PathBuf::from(value)),
            other => Err(Error::Config(format!("unknown key \"{other}\""))),
        }
    }

    /// Validates against `kind` (which must match the `kind` key if both
    /// are present) and produces the typed config.
    pub fn build_with_kind(mut self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        if let Some(declared) = self.kind {
            if declared != kind {
                return Err(Error::Config(format!(
                    "config declares kind {declared} but {kind} was requested"
                )));
            }
        }
        self.kind = Some(kind);
        self.build()
    }

    /// Validates using the `kind` key, which must be present.
    pub fn build(self) -> Result<ExperimentConfig> {
        let kind = self
            .kind
            .ok_or_else(|| Error::Config("missing key kind".into()))?;
        self.reject_inapplicable(kind)?;
        fn need<T>(key: &str, slot: Option<T>) -> Result<T> {
            slot.ok_or_else(|| Error::Config(format!("missing key {key}")))
        }
        let out = need("out", self.out.clone())?;
        match kind {
            ExperimentKind::Tomo => Ok(ExperimentConfig::Tomo(TomoConfig {
                state: need("state", self.state)?,
                n: need("n", self.n)?,
                epsilon: need("epsilon", self.epsilon)?,
                delta: need("delta", self.delta)?,
                trials: need("trials", self.trials)?,
                seed: self.seed.unwrap_or(0),
                shots_override: self.m,
                project: self.project.unwrap_or(false),
                save_shots: self.save_shots.unwrap_or(false),
                workers: self.workers.unwrap_or(0),
                out,
            })),
            ExperimentKind::Overlap => {
                if self.k.is_none() && self.subsets.is_none() {
                    return Err(Error::Config(
                        "overlap needs either k (all subsets) or subsets (explicit targets)"
                            .into(),
                    ));
                }
                if self.k.is_some() && self.subsets.is_some() {
                    return Err(Error::Config(
                        "keys k and subsets are mutually exclusive".into(),
                    ));
                }
                Ok(ExperimentConfig::Overlap(OverlapConfig {
                    state: need("state", self.state)?,
                    n: need("n", self.n)?,
                    k: self.k,
                    subsets: self.subsets,
                    epsilon: need("epsilon", self.epsilon)?,
                    delta: need("delta", self.delta)?,
                    trials: need("trials", self.trials)?,
                    seed: self.seed.unwrap_or(0),
                    shots_override: self.shots,
                    include_smaller: self.include_smaller.unwrap_or(false),
                    save_shots: self.save_shots.unwrap_or(false),
                    workers: self.workers.unwrap_or(0),
                    out,
                }))
            }
            ExperimentKind::Lowerbound => Ok(ExperimentConfig::Lowerbound(LowerboundConfig {
                n_list: need("n_list", self.n_list)?,
                epsilon: need("epsilon", self.epsilon)?,
                delta: need("delta", self.delta)?,
                trials: need("trials", self.trials)?,
                seed: self.seed.unwrap_or(0),
                workers: self.workers.unwrap_or(0),
                out,
            })),
            ExperimentKind::Oracle => Ok(ExperimentConfig::Oracle(OracleConfig {
                state: need("state", self.state)?,
                n: need("n", self.n)?,
                subsets: self.subsets.unwrap_or_default(),
                bases: self.bases.unwrap_or_default(),
                out,
            })),
        }
    }

    /// Keys the chosen kind never reads are configuration mistakes.
    fn reject_inapplicable(&self, kind: ExperimentKind) -> Result<()> {
        let mut stray: Vec<&str> = Vec::new();
        let mut check = |set: bool, key: &'static str, applicable: bool| {
            if set && !applicable {
                stray.push(key);
            }
        };
        use ExperimentKind::*;
        check(self.state.is_some(), "state", kind != Lowerbound);
        check(self.n.is_some(), "n", kind != Lowerbound);
        check(self.k.is_some(), "k", kind == Overlap);
        check(
            self.epsilon.is_some(),
            "epsilon",
            matches!(kind, Tomo | Overlap | Lowerbound),
        );
        check(
            self.delta.is_some(),
            "delta",
            matches!(kind, Tomo | Overlap | Lowerbound),
        );
        check(
            self.trials.is_some(),
            "trials",
            matches!(kind, Tomo | Overlap | Lowerbound),
        );
        check(
            self.seed.is_some(),
            "seed",
            matches!(kind, Tomo | Overlap | Lowerbound),
        );
        check(self.m.is_some(), "m", kind == Tomo);
        check(self.shots.is_some(), "shots", kind == Overlap);
        check(
            self.subsets.is_some(),
            "subsets",
            matches!(kind, Overlap | Oracle),
        );
        check(self.n_list.is_some(), "n_list", kind == Lowerbound);
        check(self.bases.is_some(), "bases", kind == Oracle);
        check(
            self.include_smaller.is_some(),
            "include_smaller",
            kind == Overlap,
        );
        check(self.project.is_some(), "project", kind == Tomo);
        check(
            self.save_shots.is_some(),
            "save_shots",
            matches!(kind, Tomo | Overlap),
        );
        check(
            self.workers.is_some(),
            "workers",
            matches!(kind, Tomo | Overlap | Lowerbound),
        );
        if stray.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "keys not applicable to kind {kind}: {}",
                stray.join(", ")
            )))
        }
    }
}
