//! Overlapping tomography: all `k`-qubit reduced states from one stream
//! of uniformly random product Pauli bases.
//!
//! Every shot draws an independent uniform `{X, Y, Z}` letter per qubit.
//! Restricted to any subset `S` of `k` qubits, the letters are again
//! uniform over the `3^k` restricted bases, so a single stream of `T`
//! shots simultaneously serves every subset: the reduced state on `S` is
//! reconstructed by pooling, for each restricted Pauli string `Q`, all
//! shots whose restricted basis is compatible with `Q` (count-weighted,
//! exactly as in full tomography but on `k` qubits).

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::reconstruct_from_estimates;
use crate::measurement::{pow3, random_basis, MeasurementBasis, Shot, ShotSampler};
use crate::qstate::{one_norm_distance, ComplexMatrix, DensityMatrix, Subset};
use crate::MAX_QUBITS;

/// `C(n, k)` for the all-subsets shot budget; `n <= 12` keeps this tiny.
pub fn binomial_coefficient(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1u64;
    for i in 0..k {
        num = num * (n - i) as u64 / (i + 1) as u64;
    }
    num
}

/// Total shots for the overlapping scheme:
/// `T = ceil(32 * 10^k * ln(2 B / delta) / epsilon^2)`, clamped to at
/// least 1, where `B` is the number of target subsets — `C(n, k)` in
/// all-subsets mode, or the provided target count `m_targets` in partial
/// mode.
pub fn total_shots(
    n: usize,
    k: usize,
    epsilon: f64,
    delta: f64,
    m_targets: Option<usize>,
) -> Result<u64> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    if k == 0 || k > n {
        return Err(Error::ParamOutOfRange {
            name: "k",
            value: k as f64,
            expected: "1..=n",
        });
    }
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(Error::ParamOutOfRange {
            name: "epsilon",
            value: epsilon,
            expected: "(0, 2]",
        });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "delta",
            value: delta,
            expected: "(0, 1)",
        });
    }
    let targets = match m_targets {
        Some(0) => {
            return Err(Error::ParamOutOfRange {
                name: "m_targets",
                value: 0.0,
                expected: ">= 1",
            })
        }
        Some(m) => m as f64,
        None => binomial_coefficient(n, k) as f64,
    };
    let raw = 32.0 * 10f64.powi(k as i32) * (2.0 * targets / delta).ln() / (epsilon * epsilon);
    Ok((raw.ceil() as u64).max(1))
}

/// Which reduced states one overlapping run should report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OverlapTargets {
    /// Every size-`k` subset, lexicographic.
    AllSubsets,
    /// An explicit list (validated: no duplicates, all within range).
    Partial(Vec<Subset>),
}

/// Parameters of one overlapping tomography run.
#[derive(Clone, Debug)]
pub struct OverlapPlan {
    n: usize,
    k: usize,
    epsilon: f64,
    delta: f64,
    shots: u64,
    targets: OverlapTargets,
    include_smaller: bool,
}

impl OverlapPlan {
    /// Plan covering all `C(n, k)` subsets at the derived budget.
    pub fn all_subsets(n: usize, k: usize, epsilon: f64, delta: f64) -> Result<Self> {
        let shots = total_shots(n, k, epsilon, delta, None)?;
        Ok(Self {
            n,
            k,
            epsilon,
            delta,
            shots,
            targets: OverlapTargets::AllSubsets,
            include_smaller: false,
        })
    }

    /// Plan covering an explicit target list; `k` is the largest target
    /// size and the budget counts only the listed subsets.
    pub fn partial(n: usize, epsilon: f64, delta: f64, subsets: Vec<Subset>) -> Result<Self> {
        if subsets.is_empty() {
            return Err(Error::EmptyInput("overlap target subsets"));
        }
        let mut seen = BTreeSet::new();
        for s in &subsets {
            s.validate_for(n)?;
            if !seen.insert(s.indices().to_vec()) {
                return Err(Error::InvalidSubset(format!("duplicate target {s}")));
            }
        }
        let k = subsets.iter().map(Subset::size).max().unwrap_or(1);
        let shots = total_shots(n, k, epsilon, delta, Some(subsets.len()))?;
        Ok(Self {
            n,
            k,
            epsilon,
            delta,
            shots,
            targets: OverlapTargets::Partial(subsets),
            include_smaller: false,
        })
    }

    /// Overrides the derived shot budget.
    pub fn with_shots(mut self, shots: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::ParamOutOfRange {
                name: "shots",
                value: 0.0,
                expected: ">= 1",
            });
        }
        self.shots = shots;
        Ok(self)
    }

    /// Additionally reports every non-empty proper sub-subset of each
    /// target (deduplicated). Those marginals pool strictly more shots
    /// than their parents and coincide exactly with partial traces of the
    /// parent estimates.
    pub fn include_smaller(mut self) -> Self {
        self.include_smaller = true;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// The concrete target list, expanded and ordered deterministically
    /// (lexicographic; smaller derived subsets included when requested).
    pub fn resolve_targets(&self) -> Result<Vec<Subset>> {
        let base: Vec<Subset> = match &self.targets {
            OverlapTargets::AllSubsets => Subset::all_subsets(self.n, self.k)?,
            OverlapTargets::Partial(list) => list.clone(),
        };
        if !self.include_smaller {
            return Ok(base);
        }
        let mut expanded: BTreeSet<Vec<usize>> =
            base.iter().map(|s| s.indices().to_vec()).collect();
        for subset in &base {
            let idx = subset.indices();
            // All non-empty proper subsets of idx.
            for mask in 1..(1u32 << idx.len()) - 1 {
                let sub: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|(pos, _)| mask >> pos & 1 == 1)
                    .map(|(_, &q)| q)
                    .collect();
                expanded.insert(sub);
            }
        }
        expanded.into_iter().map(Subset::new).collect()
    }
}

/// One reconstructed reduced state.
#[derive(Clone, Debug)]
pub struct SubsetEstimate {
    /// Which qubits this estimate covers.
    pub subset: Subset,
    /// Pooled linear-inversion estimate (`2^k x 2^k`, Hermitian, unit
    /// trace, generally not positive).
    pub sigma: ComplexMatrix,
    /// Shots per restricted basis, indexed by restricted basis code
    /// (lexicographic); sums to the stream length.
    pub per_basis_counts: Vec<u64>,
    /// `||rho_S - sigma_S||_1` when the true state is known.
    pub trace_error: Option<f64>,
}

impl SubsetEstimate {
    /// Restricted-basis counts labeled by basis letters, in lexicographic
    /// order.
    pub fn labeled_counts(&self) -> Vec<(String, u64)> {
        let k = self.subset.size();
        self.per_basis_counts
            .iter()
            .enumerate()
            .map(|(code, &count)| {
                let basis = MeasurementBasis::from_code(k, code as u32)
                    .expect("count vector is indexed by valid codes");
                (basis.to_string(), count)
            })
            .collect()
    }
}

/// Per-subset view of one shot: restricted basis code and outcome bits.
fn restrict_shot(shot: &Shot, indices: &[usize]) -> (u32, u32) {
    let mut basis_code = 0u32;
    let mut outcome = 0u32;
    for &q in indices {
        basis_code = basis_code * 3 + shot.basis.axis(q) as u32;
        outcome = (outcome << 1) | u32::from(shot.outcome_bit(q));
    }
    (basis_code, outcome)
}

/// Pooled reconstruction of the reduced state on `subset` from a stream
/// of (typically random-basis) shots.
///
/// Every restricted Pauli string pools the signs of all shots whose
/// restricted basis is compatible with it. Errors with "insufficient
/// coverage" — naming the missing restricted basis — if any of the `3^k`
/// restricted bases never occurs, since the full-weight string of that
/// basis would then have no estimate.
pub fn reconstruct_subset(shots: &[Shot], subset: &Subset) -> Result<SubsetEstimate> {
    if shots.is_empty() {
        return Err(Error::EmptyInput("shot stream"));
    }
    let n = shots[0].n();
    subset.validate_for(n)?;
    let indices = subset.indices();
    let k = subset.size();
    let slots = 1usize << (2 * k);
    let mut mu = vec![0i64; slots];
    let mut count = vec![0u64; slots];
    let mut basis_counts = vec![0u64; pow3(k) as usize];

    for shot in shots {
        if shot.n() != n {
            return Err(Error::QubitCountMismatch {
                expected: n,
                actual: shot.n(),
            });
        }
        let (basis_code, outcome) = restrict_shot(shot, indices);
        basis_counts[basis_code as usize] += 1;
        // Packed-code contribution of keeping the restricted letter at bit
        // position p (restricted qubit k-1-p). Restricted axis digits are
        // 0..2; the Pauli letter code is the digit + 1.
        let mut contrib = [0u32; MAX_QUBITS];
        let mut rest = basis_code;
        for p in 0..k {
            contrib[p] = (rest % 3 + 1) << (2 * p);
            rest /= 3;
        }
        for mask in 0..(1u32 << k) {
            let mut code = 0u32;
            let mut bits = mask;
            while bits != 0 {
                let p = bits.trailing_zeros() as usize;
                code += contrib[p];
                bits &= bits - 1;
            }
            let sign: i64 = if (mask & outcome).count_ones() % 2 == 0 {
                1
            } else {
                -1
            };
            mu[code as usize] += sign;
            count[code as usize] += 1;
        }
    }

    if let Some(missing) = basis_counts.iter().position(|&c| c == 0) {
        let basis = MeasurementBasis::from_code(k, missing as u32)
            .expect("basis count index is a valid code");
        return Err(Error::InsufficientCoverage {
            subset: subset.to_string(),
            pattern: basis.to_string(),
        });
    }

    let estimates: Vec<f64> = mu
        .iter()
        .zip(&count)
        .map(|(&m, &c)| m as f64 / c as f64)
        .collect();
    let sigma = reconstruct_from_estimates(k, &estimates)?;
    Ok(SubsetEstimate {
        subset: subset.clone(),
        sigma,
        per_basis_counts: basis_counts,
        trace_error: None,
    })
}

/// Runs one overlapping tomography experiment: draws `plan.shots()` shots
/// with independent uniform letters (a single sequential stream, for
/// replay determinism), then reconstructs every target subset from the
/// shared stream. Subset errors against the known input state are filled
/// into the estimates.
pub fn run_overlap(
    rho: &DensityMatrix,
    plan: &OverlapPlan,
    rng: &mut impl Rng,
) -> Result<Vec<SubsetEstimate>> {
    let (estimates, _) = run_overlap_recording(rho, plan, rng)?;
    Ok(estimates)
}

/// Like [`run_overlap`], additionally returning the generated shot
/// stream.
pub fn run_overlap_recording(
    rho: &DensityMatrix,
    plan: &OverlapPlan,
    rng: &mut impl Rng,
) -> Result<(Vec<SubsetEstimate>, Vec<Shot>)> {
    if plan.n() != rho.qubits() {
        return Err(Error::QubitCountMismatch {
            expected: rho.qubits(),
            actual: plan.n(),
        });
    }
    let targets = plan.resolve_targets()?;
    let mut sampler = ShotSampler::new(rho);
    let mut shots = Vec::with_capacity(plan.shots() as usize);
    for _ in 0..plan.shots() {
        let basis = random_basis(plan.n(), rng)?;
        shots.push(sampler.sample(&basis, rng)?);
    }
    // Reconstructions read-share the stream; results keep target order.
    let mut estimates = targets
        .par_iter()
        .map(|subset| reconstruct_subset(&shots, subset))
        .collect::<Result<Vec<_>>>()?;
    for est in &mut estimates {
        let reduced = rho.partial_trace(&est.subset)?;
        est.trace_error = Some(one_norm_distance(reduced.matrix(), &est.sigma)?);
    }
    Ok((estimates, shots))
}

/// Coverage report for one subset of a shot stream.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    /// Shots per restricted basis, indexed by restricted basis code.
    pub per_basis_counts: Vec<u64>,
    /// Smallest per-basis count.
    pub min_count: u64,
    /// Whether every restricted basis reached `m_required`.
    pub ok: bool,
    /// Union-bound failure probability `3^k * (2/e)^m_required` for a
    /// stream of `2 * m_required * 3^k` random shots.
    pub failure_bound: f64,
}

/// Counts how often each restricted basis occurs in the stream and checks
/// every count reaches `m_required`.
pub fn coverage_check(shots: &[Shot], subset: &Subset, m_required: u64) -> Result<CoverageReport> {
    if shots.is_empty() {
        return Err(Error::EmptyInput("shot stream"));
    }
    let n = shots[0].n();
    subset.validate_for(n)?;
    let k = subset.size();
    let mut per_basis_counts = vec![0u64; pow3(k) as usize];
    for shot in shots {
        if shot.n() != n {
            return Err(Error::QubitCountMismatch {
                expected: n,
                actual: shot.n(),
            });
        }
        let (basis_code, _) = restrict_shot(shot, subset.indices());
        per_basis_counts[basis_code as usize] += 1;
    }
    let min_count = per_basis_counts.iter().copied().min().unwrap_or(0);
    let failure_bound =
        pow3(k) as f64 * (2.0 / std::f64::consts::E).powf(m_required as f64);
    Ok(CoverageReport {
        ok: min_count >= m_required,
        min_count,
        per_basis_counts,
        failure_bound,
    })
}
