//! Trial records, aggregate summaries, and their on-disk forms.
//!
//! Per-trial results go to a JSON-lines file whose first line is a header
//! record carrying the config hash and seed; aggregate summaries go to
//! CSV with the same provenance in a leading comment line. Both formats
//! are rendered deterministically so identical experiments produce
//! byte-identical files.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lowerbound::ScalingRow;

/// 95% two-sided normal quantile used for Wilson intervals.
const WILSON_Z: f64 = 1.959963984540054;

/// One line of a trial-record file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum RecordLine {
    Header(HeaderRecord),
    Trial(TrialRecord),
    ScalingRow(ScalingRecord),
}

/// Provenance header: always the first line of a record file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeaderRecord {
    pub kind: String,
    pub config_hash: String,
    pub seed: u64,
    pub trials: u64,
    /// Shots per trial for sampling experiments; absent for scaling runs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shots_per_trial: Option<u64>,
}

/// Result of one independent trial.
///
/// `success` is the strict trace-norm criterion `trace_error < epsilon`
/// (for overlapping runs, the worst target subset). Wall time is tracked
/// in memory for operator feedback but never serialized, so outputs stay
/// byte-identical across machines and worker counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// `||rho - sigma||_1` (worst target subset for overlapping runs).
    pub trace_error: f64,
    /// `||rho - sigma||_2` (worst target subset for overlapping runs).
    pub frobenius_error: f64,
    pub success: bool,
    pub shots: u64,
    #[serde(skip, default)]
    pub wall_seconds: f64,
}

/// One scaling-table row in record form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub n: usize,
    pub m_star: u64,
    pub trials: u64,
    pub success_rate: f64,
    pub stderr: f64,
}

impl From<&ScalingRow> for ScalingRecord {
    fn from(row: &ScalingRow) -> Self {
        Self {
            n: row.n,
            m_star: row.m_star,
            trials: row.trials,
            success_rate: row.success_rate,
            stderr: row.stderr,
        }
    }
}

/// Aggregate of a trial set. With zero trials every statistic is NaN,
/// which the CSV renders literally as `NaN` to flag the degenerate run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub wilson_lower: f64,
    pub wilson_upper: f64,
    pub trace_error_mean: f64,
    pub trace_error_std: f64,
    pub frobenius_error_mean: f64,
    pub frobenius_error_std: f64,
    pub shots_per_trial: u64,
}

fn mean_and_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let count = values.clone().count();
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / count as f64;
    if count < 2 {
        return (mean, f64::NAN);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64;
    (mean, var.sqrt())
}

impl Summary {
    pub fn from_records(records: &[TrialRecord], shots_per_trial: u64) -> Self {
        let trials = records.len() as u64;
        let successes = records.iter().filter(|r| r.success).count() as u64;
        let success_rate = if trials == 0 {
            f64::NAN
        } else {
            successes as f64 / trials as f64
        };
        let (wilson_lower, wilson_upper) = wilson_interval(successes, trials);
        let (trace_error_mean, trace_error_std) =
            mean_and_std(records.iter().map(|r| r.trace_error));
        let (frobenius_error_mean, frobenius_error_std) =
            mean_and_std(records.iter().map(|r| r.frobenius_error));
        Self {
            trials,
            successes,
            success_rate,
            wilson_lower,
            wilson_upper,
            trace_error_mean,
            trace_error_std,
            frobenius_error_mean,
            frobenius_error_std,
            shots_per_trial,
        }
    }

    /// Summary CSV: a provenance comment, a header row, one data row.
    pub fn to_csv(&self, config_hash: &str, seed: u64) -> String {
        format!(
            "# config={config_hash} seed={seed}\n\
             trials,successes,success_rate,wilson_lower,wilson_upper,\
             trace_error_mean,trace_error_std,frobenius_error_mean,frobenius_error_std,\
             shots_per_trial\n\
             {},{},{},{},{},{},{},{},{},{}\n",
            self.trials,
            self.successes,
            self.success_rate,
            self.wilson_lower,
            self.wilson_upper,
            self.trace_error_mean,
            self.trace_error_std,
            self.frobenius_error_mean,
            self.frobenius_error_std,
            self.shots_per_trial,
        )
    }
}

/// Scaling-table CSV: provenance comment, header, one row per `n`.
pub fn scaling_csv(rows: &[ScalingRecord], config_hash: &str, seed: u64) -> String {
    let mut out = format!("# config={config_hash} seed={seed}\nn,m_star,trials,success_rate,stderr\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.n, row.m_star, row.trials, row.success_rate, row.stderr
        ));
    }
    out
}

/// 95% Wilson score interval for `successes` out of `trials`, clamped to
/// `[0, 1]`; `(NaN, NaN)` when there are no trials.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (f64::NAN, f64::NAN);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Frequency vector of `samples` over the alphabet `0..alphabet_size`.
pub fn empirical_distribution(samples: &[usize], alphabet_size: usize) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    if alphabet_size == 0 {
        return Err(Error::EmptyInput("alphabet"));
    }
    let mut counts = vec![0u64; alphabet_size];
    for &s in samples {
        if s >= alphabet_size {
            return Err(Error::ParamOutOfRange {
                name: "sample",
                value: s as f64,
                expected: "< alphabet size",
            });
        }
        counts[s] += 1;
    }
    let total = samples.len() as f64;
    Ok(counts.iter().map(|&c| c as f64 / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_lines_have_stable_json() {
        let header = RecordLine::Header(HeaderRecord {
            kind: "tomo".into(),
            config_hash: "abc123".into(),
            seed: 7,
            trials: 2,
            shots_per_trial: Some(12),
        });
        assert_eq!(
            serde_json::to_string(&header).unwrap(),
            r#"{"record":"header","kind":"tomo","config_hash":"abc123","seed":7,"trials":2,"shots_per_trial":12}"#
        );
        let trial = RecordLine::Trial(TrialRecord {
            trial: 0,
            trace_error: 0.125,
            frobenius_error: 0.0625,
            success: true,
            shots: 12,
            wall_seconds: 123.0,
        });
        // Wall time is never serialized.
        assert_eq!(
            serde_json::to_string(&trial).unwrap(),
            r#"{"record":"trial","trial":0,"trace_error":0.125,"frobenius_error":0.0625,"success":true,"shots":12}"#
        );
        let scaling = RecordLine::ScalingRow(ScalingRecord {
            n: 4,
            m_star: 80,
            trials: 2000,
            success_rate: 0.91,
            stderr: 0.0064,
        });
        assert_eq!(
            serde_json::to_string(&scaling).unwrap(),
            r#"{"record":"scaling_row","n":4,"m_star":80,"trials":2000,"success_rate":0.91,"stderr":0.0064}"#
        );
    }

    #[test]
    fn record_lines_roundtrip() {
        let line = r#"{"record":"trial","trial":3,"trace_error":0.5,"frobenius_error":0.25,"success":false,"shots":9}"#;
        let parsed: RecordLine = serde_json::from_str(line).unwrap();
        let RecordLine::Trial(trial) = &parsed else {
            panic!("wrong variant");
        };
        assert_eq!(trial.trial, 3);
        assert!(!trial.success);
        assert_eq!(trial.wall_seconds, 0.0);
        assert_eq!(serde_json::to_string(&parsed).unwrap(), line);
    }

    #[test]
    fn wilson_interval_matches_reference_value() {
        // Textbook check: 8 successes in 10 trials gives (0.4902, 0.9433).
        let (lo, hi) = wilson_interval(8, 10);
        assert!((lo - 0.4902).abs() < 5e-4, "lo = {lo}");
        assert!((hi - 0.9433).abs() < 5e-4, "hi = {hi}");
    }

    #[test]
    fn wilson_interval_edge_cases() {
        let (lo, hi) = wilson_interval(0, 0);
        assert!(lo.is_nan() && hi.is_nan());
        let (lo, hi) = wilson_interval(10, 10);
        assert!(lo > 0.65 && (0.0..=1.0).contains(&lo));
        assert!(hi > 0.999 && hi <= 1.0);
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!(hi < 0.35);
    }

    #[test]
    fn empirical_distribution_basics() {
        assert_eq!(
            empirical_distribution(&[0, 0, 1, 1], 2).unwrap(),
            vec![0.5, 0.5]
        );
        assert_eq!(
            empirical_distribution(&[3], 4).unwrap(),
            vec![0.0, 0.0, 0.0, 1.0]
        );
        assert!(empirical_distribution(&[], 2).is_err());
        assert!(empirical_distribution(&[2], 2).is_err());
        let freq = empirical_distribution(&[0, 1, 2, 2, 1, 0, 1], 3).unwrap();
        assert!((freq.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    fn record(trial: u64, trace: f64, frob: f64, success: bool) -> TrialRecord {
        TrialRecord {
            trial,
            trace_error: trace,
            frobenius_error: frob,
            success,
            shots: 10,
            wall_seconds: 0.0,
        }
    }

    #[test]
    fn summary_aggregates_mean_and_sample_std() {
        let records = [
            record(0, 0.1, 0.05, true),
            record(1, 0.2, 0.10, true),
            record(2, 0.6, 0.30, false),
        ];
        let summary = Summary::from_records(&records, 10);
        assert_eq!(summary.trials, 3);
        assert_eq!(summary.successes, 2);
        assert!((summary.success_rate - 2.0 / 3.0).abs() < 1e-15);
        assert!((summary.trace_error_mean - 0.3).abs() < 1e-15);
        // Sample standard deviation of {0.1, 0.2, 0.6}.
        assert!((summary.trace_error_std - 0.26457513110645905).abs() < 1e-12);
        assert_eq!(summary.shots_per_trial, 10);
    }

    #[test]
    fn summary_of_zero_trials_is_nan_flagged() {
        let summary = Summary::from_records(&[], 42);
        assert!(summary.success_rate.is_nan());
        assert!(summary.trace_error_mean.is_nan());
        let csv = summary.to_csv("deadbeef", 3);
        assert!(csv.starts_with("# config=deadbeef seed=3\n"));
        assert!(csv.contains("NaN"));
    }

    #[test]
    fn summary_csv_is_stable() {
        let records = [record(0, 0.25, 0.125, true)];
        let csv = Summary::from_records(&records, 12).to_csv("cafe", 9);
        assert_eq!(
            csv,
            "# config=cafe seed=9\n\
             trials,successes,success_rate,wilson_lower,wilson_upper,trace_error_mean,trace_error_std,frobenius_error_mean,frobenius_error_std,shots_per_trial\n\
             1,1,1,0.20654931437723745,1,0.25,NaN,0.125,NaN,12\n"
        );
    }

    #[test]
    fn scaling_csv_is_stable() {
        let rows = [
            ScalingRecord {
                n: 1,
                m_star: 44,
                trials: 2000,
                success_rate: 0.9105,
                stderr: 0.00638,
            },
            ScalingRecord {
                n: 2,
                m_star: 60,
                trials: 2000,
                success_rate: 0.907,
                stderr: 0.0065,
            },
        ];
        assert_eq!(
            scaling_csv(&rows, "beef", 5),
            "# config=beef seed=5\nn,m_star,trials,success_rate,stderr\n\
             1,44,2000,0.9105,0.00638\n2,60,2000,0.907,0.0065\n"
        );
    }
}
