//! Classical hardness baseline: hidden-bit product distributions,
//! minority-symbol decoding, and the sample-count scaling they force.
//!
//! A hidden n-bit string `z` selects, per coordinate, one of two biased
//! coin distributions: coordinate `j` emits its hidden symbol `z_j` with
//! probability `1/2 - epsilon` and the opposite symbol with probability
//! `1/2 + epsilon`. A decoder sees `m` independent n-bit samples and
//! guesses each `z_j` as the strictly less frequent symbol of column `j`
//! (ties by a fair coin). This module simulates that game, checks an
//! anticoncentration inequality that limits any decoder, evaluates the
//! closed-form per-coordinate sample requirement, and measures how the
//! empirically minimal sample count grows with `n`.
//!
//! Everything here is classical bit processing by construction: diagonal
//! states reduce the corresponding quantum estimation task to exactly
//! this game, so no quantum simulation is involved.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// The pair of biased coin distributions selected by one hidden bit.
///
/// Hidden bit `b` makes symbol `b` the minority: it appears with
/// probability `1/2 - epsilon`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiasedCoinPair {
    epsilon: f64,
}

impl BiasedCoinPair {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) || !epsilon.is_finite() {
            return Err(Error::ParamOutOfRange {
                name: "epsilon",
                value: epsilon,
                expected: "(0, 1/2)",
            });
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Probability that one draw equals 1 when the hidden bit is `hidden`.
    pub fn prob_one(&self, hidden: u8) -> f64 {
        if hidden == 0 {
            0.5 + self.epsilon
        } else {
            0.5 - self.epsilon
        }
    }

    /// Probability that one draw equals the hidden symbol itself.
    pub fn hidden_symbol_probability(&self) -> f64 {
        0.5 - self.epsilon
    }
}

/// The hidden n-bit string the decoder tries to recover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiddenIndex {
    bits: Vec<u8>,
}

impl HiddenIndex {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyInput("hidden index bits"));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parse("hidden index bits must be 0 or 1".into()));
        }
        Ok(Self { bits })
    }

    /// Uniformly random hidden string.
    pub fn random(n: usize, rng: &mut impl Rng) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("hidden index bits"));
        }
        Self::new((0..n).map(|_| rng.random_range(0..2u8)).collect())
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl std::fmt::Display for HiddenIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for HiddenIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parse(format!(
                    "invalid hidden index character '{other}'"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

/// `m` samples of the n-coordinate product distribution, row-major
/// (row = one sample).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    m: usize,
    n: usize,
    bits: Vec<u8>,
}

impl Dataset {
    /// Builds a dataset from explicit row-major bits (`m * n` entries).
    pub fn from_rows(m: usize, n: usize, bits: Vec<u8>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::EmptyInput("dataset dimensions"));
        }
        if bits.len() != m * n {
            return Err(Error::DimensionMismatch {
                expected: m * n,
                actual: bits.len(),
            });
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parse("dataset entries must be 0 or 1".into()));
        }
        Ok(Self { m, n, bits })
    }

    /// Number of samples (rows).
    pub fn samples(&self) -> usize {
        self.m
    }

    /// Number of coordinates (columns).
    pub fn coordinates(&self) -> usize {
        self.n
    }

    pub fn bit(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.n + col]
    }

    /// Number of ones in column `col`.
    pub fn column_ones(&self, col: usize) -> u64 {
        (0..self.m).map(|r| u64::from(self.bit(r, col))).sum()
    }
}

/// Draws `m` i.i.d. samples of the product distribution selected by `z`:
/// column `j` emits 1 with probability `1/2 + epsilon` if `z_j = 0` and
/// `1/2 - epsilon` if `z_j = 1`. Deterministic given the rng state
/// (row-major fill order).
pub fn sample_dataset(
    z: &HiddenIndex,
    epsilon: f64,
    m: usize,
    rng: &mut impl Rng,
) -> Result<Dataset> {
    let pair = BiasedCoinPair::new(epsilon)?;
    if m == 0 {
        return Err(Error::ParamOutOfRange {
            name: "m",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let n = z.len();
    let p_one: Vec<f64> = z.bits().iter().map(|&b| pair.prob_one(b)).collect();
    let mut bits = Vec::with_capacity(m * n);
    for _ in 0..m {
        for &p in &p_one {
            bits.push(u8::from(rng.random::<f64>() < p));
        }
    }
    Dataset::from_rows(m, n, bits)
}

/// Decodes each coordinate as the strictly less frequent symbol of its
/// column; an exact tie is resolved by an independent fair coin.
pub fn majority_decode(d: &Dataset, rng: &mut impl Rng) -> Vec<u8> {
    let m = d.samples() as u64;
    (0..d.coordinates())
        .map(|j| {
            let ones = d.column_ones(j);
            let zeros = m - ones;
            match ones.cmp(&zeros) {
                std::cmp::Ordering::Less => 1,
                std::cmp::Ordering::Greater => 0,
                std::cmp::Ordering::Equal => rng.random_range(0..2u8),
            }
        })
        .collect()
}

/// Result of one empirical anticoncentration check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnticoncentrationCheck {
    /// Frequency with which a `Binomial(m, 1/2 - epsilon)` draw exceeded
    /// `t + m (1/2 - epsilon)`.
    pub empirical_lhs: f64,
    /// Lower-bound value `(1/4) exp(-2 t^2 / (m (1/2 - epsilon)))`.
    pub rhs: f64,
    /// Whether `empirical_lhs >= rhs - 3 * stderr(empirical_lhs)`.
    pub pass: bool,
}

/// Empirically checks that the upper tail of the minority-symbol count
/// stays above its closed-form lower bound: over `trials` draws of
/// `K ~ Binomial(m, 1/2 - epsilon)`, the frequency of
/// `K > t + m (1/2 - epsilon)` is compared against
/// `(1/4) exp(-2 t^2 / (m (1/2 - epsilon)))`. Valid for
/// `0 <= t <= 2 m epsilon` (the threshold stays at most `m/2`).
pub fn anticoncentration_check(
    epsilon: f64,
    m: u64,
    t: f64,
    trials: u64,
    rng: &mut impl Rng,
) -> Result<AnticoncentrationCheck> {
    let pair = BiasedCoinPair::new(epsilon)?;
    if m == 0 {
        return Err(Error::ParamOutOfRange {
            name: "m",
            value: 0.0,
            expected: ">= 1",
        });
    }
    if trials == 0 {
        return Err(Error::ParamOutOfRange {
            name: "trials",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let t_max = 2.0 * m as f64 * epsilon;
    if !(0.0..=t_max).contains(&t) {
        return Err(Error::ParamOutOfRange {
            name: "t",
            value: t,
            expected: "0 <= t <= 2*m*epsilon",
        });
    }
    let q = pair.hidden_symbol_probability();
    let threshold = t + m as f64 * q;
    let binomial =
        Binomial::new(m, q).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let mut hits = 0u64;
    for _ in 0..trials {
        if binomial.sample(rng) as f64 > threshold {
            hits += 1;
        }
    }
    let empirical_lhs = hits as f64 / trials as f64;
    let rhs = 0.25 * (-2.0 * t * t / (m as f64 * q)).exp();
    let stderr = (empirical_lhs * (1.0 - empirical_lhs) / trials as f64).sqrt();
    Ok(AnticoncentrationCheck {
        empirical_lhs,
        rhs,
        pass: empirical_lhs >= rhs - 3.0 * stderr,
    })
}

/// Closed-form per-coordinate sample requirement
/// `ceil((1 - 2 epsilon) / (4 epsilon^2) * ln(1 / (4 delta_prime)))`,
/// clamped to at least 1. Requires `0 < delta_prime < 1/4`.
pub fn required_samples_single(epsilon: f64, delta_prime: f64) -> Result<u64> {
    BiasedCoinPair::new(epsilon)?;
    if !(delta_prime > 0.0 && delta_prime < 0.25) {
        return Err(Error::ParamOutOfRange {
            name: "delta_prime",
            value: delta_prime,
            expected: "(0, 1/4)",
        });
    }
    let raw = (1.0 - 2.0 * epsilon) / (4.0 * epsilon * epsilon) * (1.0 / (4.0 * delta_prime)).ln();
    Ok((raw.ceil() as u64).max(1))
}

/// Outcome of `trials` decode attempts at fixed `(n, epsilon, m)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecodeStats {
    /// Fraction of trials in which every coordinate was decoded correctly.
    pub joint_rate: f64,
    /// Fraction of all `trials * n` coordinate decodes that were correct.
    pub coordinate_rate: f64,
    pub trials: u64,
    pub coordinates: usize,
}

/// Runs `trials` independent hidden-string decode games, each on a fresh
/// uniformly random hidden string and a fresh dataset of `m` samples.
/// Trial `i` uses the deterministic substream `seed ^ i`, so results do
/// not depend on thread scheduling.
pub fn decode_stats(
    n: usize,
    epsilon: f64,
    m: usize,
    trials: u64,
    seed: u64,
) -> Result<DecodeStats> {
    BiasedCoinPair::new(epsilon)?;
    if n == 0 {
        return Err(Error::EmptyInput("hidden index bits"));
    }
    if m == 0 || trials == 0 {
        return Err(Error::ParamOutOfRange {
            name: "m/trials",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let (joint, coord) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed ^ i);
            let z = HiddenIndex::random(n, &mut rng).expect("n >= 1");
            let d = sample_dataset(&z, epsilon, m, &mut rng).expect("validated parameters");
            let y = majority_decode(&d, &mut rng);
            let correct = y
                .iter()
                .zip(z.bits())
                .filter(|(a, b)| a == b)
                .count() as u64;
            (u64::from(correct == n as u64), correct)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(DecodeStats {
        joint_rate: joint as f64 / trials as f64,
        coordinate_rate: coord as f64 / (trials * n as u64) as f64,
        trials,
        coordinates: n,
    })
}

/// Independence check: the joint decode success rate should match the
/// per-coordinate rate raised to the n-th power, because columns are
/// independent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FactorizationCheck {
    pub joint_rate: f64,
    pub coordinate_rate: f64,
    /// `coordinate_rate ^ n`.
    pub predicted_joint: f64,
    /// Pooled standard error of `joint_rate - predicted_joint`.
    pub pooled_stderr: f64,
    /// Whether `|joint_rate - predicted_joint| <= 3 * pooled_stderr`.
    pub pass: bool,
}

/// Compares the empirical joint success rate with the factorized
/// prediction from the per-coordinate rate, at fixed `(n, epsilon, m)`.
pub fn factorization_check(
    n: usize,
    epsilon: f64,
    m: usize,
    trials: u64,
    seed: u64,
) -> Result<FactorizationCheck> {
    let stats = decode_stats(n, epsilon, m, trials, seed)?;
    let p = stats.coordinate_rate;
    let predicted = p.powi(n as i32);
    let joint_var = stats.joint_rate * (1.0 - stats.joint_rate) / trials as f64;
    // Delta method: Var(p^n) ~ (n p^{n-1})^2 * Var(p), with p estimated
    // from trials * n independent coordinate decodes.
    let coord_var = p * (1.0 - p) / (trials as f64 * n as f64);
    let predicted_var = (n as f64 * p.powi(n as i32 - 1)).powi(2) * coord_var;
    let pooled_stderr = (joint_var + predicted_var).sqrt();
    let deviation = (stats.joint_rate - predicted).abs();
    Ok(FactorizationCheck {
        joint_rate: stats.joint_rate,
        coordinate_rate: p,
        predicted_joint: predicted,
        pooled_stderr,
        pass: deviation <= 3.0 * pooled_stderr,
    })
}

/// One row of the scaling table: the empirically minimal sample count at
/// one string length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    /// Smallest `m` whose empirical joint success rate reached
    /// `1 - delta`.
    pub m_star: u64,
    pub trials: u64,
    /// Joint success rate measured at `m_star`.
    pub success_rate: f64,
    /// Binomial standard error of `success_rate`.
    pub stderr: f64,
}

const SCALING_MIN_TRIALS: u64 = 2000;
const SCALING_SEARCH_CAP: u64 = 1 << 22;

/// For each `n` in `n_list`, finds the smallest `m` whose empirical joint
/// decode success rate over `trials` games reaches `1 - delta` (doubling
/// then bisection; every rate evaluation uses a fresh substream drawn
/// from `rng`). Requires `trials >= 2000` so the rate estimates resolve
/// the target.
pub fn scaling_experiment(
    n_list: &[usize],
    epsilon: f64,
    delta: f64,
    trials: u64,
    rng: &mut impl Rng,
) -> Result<Vec<ScalingRow>> {
    BiasedCoinPair::new(epsilon)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "delta",
            value: delta,
            expected: "(0, 1)",
        });
    }
    if trials < SCALING_MIN_TRIALS {
        return Err(Error::ParamOutOfRange {
            name: "trials",
            value: trials as f64,
            expected: ">= 2000",
        });
    }
    if n_list.is_empty() {
        return Err(Error::EmptyInput("n_list"));
    }
    let target = 1.0 - delta;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let rate_at = |m: u64, rng: &mut dyn rand::RngCore| -> Result<f64> {
            let seed = rng.next_u64();
            Ok(decode_stats(n, epsilon, m as usize, trials, seed)?.joint_rate)
        };
        // Doubling phase: find an m that reaches the target.
        let mut hi = 1u64;
        let mut hi_rate = rate_at(hi, rng)?;
        while hi_rate < target {
            if hi >= SCALING_SEARCH_CAP {
                return Err(Error::ParamOutOfRange {
                    name: "m",
                    value: hi as f64,
                    expected: "joint success rate to reach 1 - delta below the search cap",
                });
            }
            hi *= 2;
            hi_rate = rate_at(hi, rng)?;
        }
        // Bisection: smallest m in (hi/2, hi] that reaches the target.
        let mut lo = hi / 2;
        let mut rate = hi_rate;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let mid_rate = rate_at(mid, rng)?;
            if mid_rate >= target {
                hi = mid;
                rate = mid_rate;
            } else {
                lo = mid;
            }
        }
        rows.push(ScalingRow {
            n,
            m_star: hi,
            trials,
            success_rate: rate,
            stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
        });
    }
    Ok(rows)
}
