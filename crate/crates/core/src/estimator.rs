//! Full-state tomography from Pauli measurements with shot reuse.
//!
//! The scheme measures every one of the `3^n` product Pauli bases `m`
//! times. Each shot in basis `P` is reused for all `2^n` Pauli strings
//! obtained by replacing a subset of `P`'s letters with identities: the
//! shot contributes its outcome-parity sign to every such string. After a
//! full run, a string of weight `w` has been observed `m 3^(n-w)` times,
//! and the state estimate is
//!
//! `sigma = sum_Q mu(Q) / count(Q) * P_Q / 2^n`,
//!
//! which is unbiased but in general not positive semidefinite. The raw
//! `sigma` is the primary output; [`project_to_physical`] is opt-in.

use rand::Rng;

use crate::error::{Error, Result};
use crate::measurement::{MeasurementBasis, Shot, ShotSampler};
use crate::qstate::{one_norm_distance, ComplexMatrix, DensityMatrix, PauliString};
use crate::MAX_QUBITS;

/// Shots required per basis so that the full run satisfies the
/// `(epsilon, delta)` trace-norm guarantee:
/// `m = ceil(16 * 10^n * ln(1/delta) / (3^n * epsilon^2))`, clamped to at
/// least 1.
///
/// `epsilon` must lie in `(0, 2]` (trace-norm distances never exceed 2)
/// and `delta` in `(0, 1)`.
pub fn shots_per_basis(n: usize, epsilon: f64, delta: f64) -> Result<u64> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
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
    let raw =
        16.0 * 10f64.powi(n as i32) * (1.0 / delta).ln() / (3f64.powi(n as i32) * epsilon * epsilon);
    Ok((raw.ceil() as u64).max(1))
}

/// Parameters of one full tomography run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TomographyPlan {
    n: usize,
    epsilon: f64,
    delta: f64,
    m: u64,
}

impl TomographyPlan {
    /// Plan with the shot budget derived from `(epsilon, delta)`.
    pub fn new(n: usize, epsilon: f64, delta: f64) -> Result<Self> {
        let m = shots_per_basis(n, epsilon, delta)?;
        Ok(Self {
            n,
            epsilon,
            delta,
            m,
        })
    }

    /// Plan with an explicit per-basis shot count (still carries
    /// `epsilon`/`delta` for success accounting).
    pub fn with_shots(n: usize, epsilon: f64, delta: f64, m: u64) -> Result<Self> {
        // Validate the parameter ranges, then override the budget.
        let _ = shots_per_basis(n, epsilon, delta)?;
        if m == 0 {
            return Err(Error::ParamOutOfRange {
                name: "m",
                value: 0.0,
                expected: ">= 1",
            });
        }
        Ok(Self {
            n,
            epsilon,
            delta,
            m,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Shots per basis.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Total shots of a full run: `m * 3^n`.
    pub fn total_shots(&self) -> u64 {
        self.m * u64::from(crate::measurement::pow3(self.n))
    }
}

/// Signed-count accumulator over all `4^n` Pauli strings, indexed by
/// [`PauliString::code`].
///
/// After a full run of `m` shots in each of the `3^n` bases,
/// `count(Q) = m * 3^(n - weight(Q))` holds exactly, and `|mu(Q)| <=
/// count(Q)`.
#[derive(Clone, Debug)]
pub struct PauliAccumulator {
    n: usize,
    mu: Vec<i64>,
    count: Vec<u64>,
}

impl PauliAccumulator {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        let slots = 1usize << (2 * n);
        Ok(Self {
            n,
            mu: vec![0; slots],
            count: vec![0; slots],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self, q: &PauliString) -> i64 {
        self.mu[q.code() as usize]
    }

    pub fn count(&self, q: &PauliString) -> u64 {
        self.count[q.code() as usize]
    }

    pub fn mus(&self) -> &[i64] {
        &self.mu
    }

    pub fn counts(&self) -> &[u64] {
        &self.count
    }

    /// Total shots folded in so far (every shot updates the identity
    /// slot).
    pub fn shots(&self) -> u64 {
        self.count[0]
    }

    /// Folds one shot into every compatible Pauli string: all `2^n`
    /// strings obtained by keeping a subset of the basis letters and
    /// replacing the rest with `I`. The sign for a kept subset is the
    /// parity of the selected outcome bits.
    pub fn accumulate(&mut self, shot: &Shot) -> Result<()> {
        if shot.n() != self.n {
            return Err(Error::QubitCountMismatch {
                expected: self.n,
                actual: shot.n(),
            });
        }
        let n = self.n;
        // contrib[p] is the packed-code contribution of keeping the basis
        // letter at bit position p (qubit n-1-p).
        let mut contrib = [0u32; MAX_QUBITS];
        for p in 0..n {
            let axis = shot.basis.axis(n - 1 - p);
            contrib[p] = (axis.to_letter() as u32) << (2 * p);
        }
        let outcome = shot.outcome;
        for mask in 0..(1u32 << n) {
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
            self.mu[code as usize] += sign;
            self.count[code as usize] += 1;
        }
        Ok(())
    }

    /// Per-Pauli estimates `mu(Q) / count(Q)`; errors on the first Pauli
    /// (in lexicographic order) that no shot has covered.
    pub fn ratios(&self) -> Result<Vec<f64>> {
        self.mu
            .iter()
            .zip(&self.count)
            .enumerate()
            .map(|(code, (&mu, &count))| {
                if count == 0 {
                    let p = PauliString::from_code(self.n, code as u32)
                        .expect("code within accumulator range");
                    return Err(Error::ZeroCount {
                        pauli: p.to_string(),
                    });
                }
                Ok(mu as f64 / count as f64)
            })
            .collect()
    }
}

/// Assembles `sigma = sum_Q est(Q) * P_Q / 2^n` from per-Pauli estimates
/// indexed by packed code (`est.len()` must be `4^n`).
///
/// The output is Hermitian with trace `est[identity]`; it is generally not
/// positive semidefinite.
pub fn reconstruct_from_estimates(n: usize, estimates: &[f64]) -> Result<ComplexMatrix> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    let slots = 1usize << (2 * n);
    if estimates.len() != slots {
        return Err(Error::DimensionMismatch {
            expected: slots,
            actual: estimates.len(),
        });
    }
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let mut sigma = ComplexMatrix::zeros(dim)?;
    for (code, est) in estimates.iter().enumerate() {
        if *est == 0.0 {
            continue;
        }
        let p = PauliString::from_code(n, code as u32)?;
        let coeff = est * scale;
        for j in 0..dim as u32 {
            let (target, phase) = p.apply_to_basis(j);
            let t = target as usize;
            let cur = sigma.get(t, j as usize);
            sigma.set(t, j as usize, cur + phase * coeff);
        }
    }
    Ok(sigma)
}

/// Linear-inversion estimate from an accumulator with full coverage.
pub fn reconstruct(acc: &PauliAccumulator) -> Result<ComplexMatrix> {
    let estimates = acc.ratios()?;
    reconstruct_from_estimates(acc.n(), &estimates)
}

/// Error metrics and shot totals of one completed run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TomographyDiagnostics {
    /// Trace-norm error `||rho - sigma||_1` against the true state.
    pub trace_error: f64,
    /// Frobenius error `||rho - sigma||_2` against the true state.
    pub frobenius_error: f64,
    /// Shots per basis actually used.
    pub shots_per_basis: u64,
    /// Total shots consumed (`m * 3^n`).
    pub total_shots: u64,
}

fn run_full_tomography_impl(
    rho: &DensityMatrix,
    plan: &TomographyPlan,
    rng: &mut impl Rng,
    mut record: Option<&mut Vec<Shot>>,
) -> Result<(ComplexMatrix, TomographyDiagnostics)> {
    if plan.n() != rho.qubits() {
        return Err(Error::QubitCountMismatch {
            expected: rho.qubits(),
            actual: plan.n(),
        });
    }
    let mut sampler = ShotSampler::new(rho);
    let mut acc = PauliAccumulator::new(plan.n())?;
    for basis in MeasurementBasis::all(plan.n())? {
        for _ in 0..plan.m() {
            let shot = sampler.sample(&basis, rng)?;
            acc.accumulate(&shot)?;
            if let Some(sink) = record.as_deref_mut() {
                sink.push(shot);
            }
        }
    }
    let sigma = reconstruct(&acc)?;
    let diff = rho.matrix().sub(&sigma)?;
    let diagnostics = TomographyDiagnostics {
        trace_error: one_norm_distance(rho.matrix(), &sigma)?,
        frobenius_error: diff.frobenius_norm(),
        shots_per_basis: plan.m(),
        total_shots: plan.total_shots(),
    };
    Ok((sigma, diagnostics))
}

/// Runs a full tomography experiment: `m` seeded shots in each of the
/// `3^n` bases (lexicographic order), shot reuse across all compatible
/// Pauli strings, linear-inversion reconstruction, and error diagnostics
/// against the known input state.
pub fn run_full_tomography(
    rho: &DensityMatrix,
    plan: &TomographyPlan,
    rng: &mut impl Rng,
) -> Result<(ComplexMatrix, TomographyDiagnostics)> {
    run_full_tomography_impl(rho, plan, rng, None)
}

/// Like [`run_full_tomography`], additionally returning the shot stream in
/// generation order (basis-major), suitable for
/// [`crate::measurement::write_shots`].
pub fn run_full_tomography_recording(
    rho: &DensityMatrix,
    plan: &TomographyPlan,
    rng: &mut impl Rng,
) -> Result<(ComplexMatrix, TomographyDiagnostics, Vec<Shot>)> {
    let mut shots = Vec::with_capacity(plan.total_shots() as usize);
    let (sigma, diagnostics) = run_full_tomography_impl(rho, plan, rng, Some(&mut shots))?;
    Ok((sigma, diagnostics, shots))
}

/// Replays an ingested shot stream (for example one read back via
/// [`crate::measurement::read_shots`]) into an estimate. Errors if any
/// Pauli string has no compatible shot.
pub fn estimate_from_shots(n: usize, shots: &[Shot]) -> Result<(ComplexMatrix, PauliAccumulator)> {
    let mut acc = PauliAccumulator::new(n)?;
    for shot in shots {
        acc.accumulate(shot)?;
    }
    let sigma = reconstruct(&acc)?;
    Ok((sigma, acc))
}

/// Clips negative eigenvalues to zero and renormalizes the trace to 1,
/// yielding a valid density matrix near the raw estimate.
///
/// The input must be Hermitian; if every eigenvalue is clipped (trace of
/// the positive part is zero) the projection is undefined and an error is
/// returned.
pub fn project_to_physical(sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dev = sigma.hermiticity_deviation();
    if dev > crate::qstate::HERMITICITY_TOLERANCE {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: crate::qstate::HERMITICITY_TOLERANCE,
        });
    }
    let (vals, vecs) = sigma.hermitian_eigen();
    let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidDistribution(
            "projection undefined: no positive eigenvalue mass".into(),
        ));
    }
    let dim = sigma.dim();
    let mut out = ComplexMatrix::zeros(dim)?;
    // V diag(clipped / total) V^dagger.
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += vecs.get(i, k) * (clipped[k] / total) * vecs.get(j, k).conj();
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{read_shots, write_shots};
    use crate::qstate::{make_state, StateSpec};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shot_budget_matches_pinned_values() {
        assert_eq!(shots_per_basis(2, 0.2, 0.1).unwrap(), 10234);
        let plan = TomographyPlan::new(2, 0.2, 0.1).unwrap();
        assert_eq!(plan.total_shots(), 92106);
        // ln(1/delta) = 1 at delta = 1/e.
        assert_eq!(shots_per_basis(1, 2.0, 1.0 / std::f64::consts::E).unwrap(), 14);
        // Near-degenerate delta drives the formula to zero; clamp to 1.
        assert_eq!(shots_per_basis(1, 2.0, 0.999_999_999).unwrap(), 1);
    }

    #[test]
    fn shot_budget_rejects_degenerate_parameters() {
        assert!(matches!(
            shots_per_basis(1, 0.0, 0.1),
            Err(Error::ParamOutOfRange { name: "epsilon", .. })
        ));
        assert!(matches!(
            shots_per_basis(1, 2.5, 0.1),
            Err(Error::ParamOutOfRange { name: "epsilon", .. })
        ));
        assert!(matches!(
            shots_per_basis(1, 0.5, 0.0),
            Err(Error::ParamOutOfRange { name: "delta", .. })
        ));
        assert!(matches!(
            shots_per_basis(1, 0.5, 1.0),
            Err(Error::ParamOutOfRange { name: "delta", .. })
        ));
        assert!(shots_per_basis(0, 0.5, 0.5).is_err());
        assert!(shots_per_basis(13, 0.5, 0.5).is_err());
        assert!(TomographyPlan::with_shots(1, 0.5, 0.5, 0).is_err());
    }

    #[test]
    fn accumulate_single_qubit_shot() {
        let mut acc = PauliAccumulator::new(1).unwrap();
        acc.accumulate(&Shot {
            basis: "Z".parse().unwrap(),
            outcome: 0,
        })
        .unwrap();
        let q = |s: &str| s.parse::<PauliString>().unwrap();
        assert_eq!(acc.mu(&q("I")), 1);
        assert_eq!(acc.count(&q("I")), 1);
        assert_eq!(acc.mu(&q("Z")), 1);
        assert_eq!(acc.count(&q("Z")), 1);
        assert_eq!(acc.count(&q("X")), 0);
        assert_eq!(acc.count(&q("Y")), 0);
    }

    #[test]
    fn accumulate_spreads_signs_over_subsets() {
        // Basis XY, outcome bits (0, 1): the kept-qubit parity gives
        // II -> +1, XI -> +1, IY -> -1, XY -> -1.
        let mut acc = PauliAccumulator::new(2).unwrap();
        acc.accumulate(&Shot {
            basis: "XY".parse().unwrap(),
            outcome: 0b01,
        })
        .unwrap();
        let q = |s: &str| s.parse::<PauliString>().unwrap();
        for (pauli, want) in [("II", 1), ("XI", 1), ("IY", -1), ("XY", -1)] {
            assert_eq!(acc.mu(&q(pauli)), want, "mu for {pauli}");
            assert_eq!(acc.count(&q(pauli)), 1, "count for {pauli}");
        }
        // Strings inconsistent with the basis stay untouched.
        for pauli in ["ZI", "IX", "YY", "ZZ"] {
            assert_eq!(acc.count(&q(pauli)), 0, "count for {pauli}");
        }
        assert!(matches!(
            acc.accumulate(&Shot {
                basis: "X".parse().unwrap(),
                outcome: 0
            }),
            Err(Error::QubitCountMismatch { .. })
        ));
    }

    #[test]
    fn full_run_satisfies_count_law() {
        let n = 2;
        let m = 5;
        let rho = make_state(n, &StateSpec::MaximallyMixed).unwrap();
        let plan = TomographyPlan::with_shots(n, 0.5, 0.5, m).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut sampler = ShotSampler::new(&rho);
        let mut acc = PauliAccumulator::new(n).unwrap();
        for basis in MeasurementBasis::all(n).unwrap() {
            for _ in 0..plan.m() {
                acc.accumulate(&sampler.sample(&basis, &mut rng).unwrap()).unwrap();
            }
        }
        for code in 0..16u32 {
            let q = PauliString::from_code(n, code).unwrap();
            let expected = m * 3u64.pow((n - q.weight()) as u32);
            assert_eq!(acc.count(&q), expected, "count law for {q}");
            assert!(acc.mu(&q).unsigned_abs() <= expected);
        }
    }

    #[test]
    fn reconstruct_from_trivial_estimates() {
        // All-zero estimates except the identity give the maximally mixed
        // state.
        let mut est = vec![0.0; 4];
        est[0] = 1.0;
        let sigma = reconstruct_from_estimates(1, &est).unwrap();
        assert_eq!(sigma.get(0, 0), c(0.5, 0.0));
        assert_eq!(sigma.get(1, 1), c(0.5, 0.0));
        assert_eq!(sigma.get(0, 1), c(0.0, 0.0));

        // Saturated Z estimate gives |0><0|.
        let est = vec![1.0, 0.0, 0.0, 1.0];
        let sigma = reconstruct_from_estimates(1, &est).unwrap();
        assert_eq!(sigma.get(0, 0), c(1.0, 0.0));
        assert_eq!(sigma.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn reconstruct_requires_full_coverage() {
        let acc = PauliAccumulator::new(1).unwrap();
        assert!(matches!(reconstruct(&acc), Err(Error::ZeroCount { .. })));
    }

    #[test]
    fn exact_estimates_reproduce_the_state() {
        let rho = make_state(2, &StateSpec::RandomMixed { rank: 3, seed: 17 }).unwrap();
        let alphas = rho.pauli_decompose().unwrap();
        let sigma = reconstruct_from_estimates(2, &alphas).unwrap();
        let dev = sigma.sub(rho.matrix()).unwrap().frobenius_norm();
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn estimator_is_unbiased_in_the_mean() {
        let rho = make_state(1, &StateSpec::RandomMixed { rank: 2, seed: 6 }).unwrap();
        let plan = TomographyPlan::with_shots(1, 0.5, 0.5, 2000).unwrap();
        let trials = 200;
        let mut mean = ComplexMatrix::zeros(2).unwrap();
        for t in 0..trials {
            let mut rng = ChaCha12Rng::seed_from_u64(1000 + t);
            let (sigma, _) = run_full_tomography(&rho, &plan, &mut rng).unwrap();
            mean = mean.add(&sigma).unwrap();
        }
        mean = mean.scale(c(1.0 / f64::from(trials as u32), 0.0));
        let dev = mean.sub(rho.matrix()).unwrap().frobenius_norm();
        // Entry standard error is about 8e-4 at this budget; 0.005 is a
        // comfortable multiple.
        assert!(dev < 0.005, "mean deviates from rho by {dev}");
    }

    #[test]
    fn errors_shrink_with_more_shots() {
        let rho = make_state(1, &StateSpec::MaximallyMixed).unwrap();
        let run = |m: u64| {
            let plan = TomographyPlan::with_shots(1, 0.5, 0.5, m).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(42);
            run_full_tomography(&rho, &plan, &mut rng).unwrap().1
        };
        let coarse = run(100);
        let fine = run(10_000);
        assert!(fine.frobenius_error < coarse.frobenius_error);
        assert!(fine.trace_error < coarse.trace_error);
        assert_eq!(coarse.total_shots, 300);
        assert_eq!(fine.shots_per_basis, 10_000);
    }

    #[test]
    fn runs_are_seed_deterministic() {
        let rho = make_state(2, &StateSpec::RandomMixed { rank: 4, seed: 9 }).unwrap();
        let plan = TomographyPlan::with_shots(2, 0.5, 0.5, 64).unwrap();
        let run = |seed: u64| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            run_full_tomography(&rho, &plan, &mut rng).unwrap()
        };
        let (a, da) = run(5);
        let (b, db) = run(5);
        assert_eq!(a.data(), b.data());
        assert_eq!(da, db);
        let (c_, _) = run(6);
        assert_ne!(a.data(), c_.data());
    }

    #[test]
    fn recorded_shots_replay_to_the_same_estimate() {
        let rho = make_state(2, &StateSpec::Ghz).unwrap();
        let plan = TomographyPlan::with_shots(2, 0.5, 0.5, 20).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let (sigma, _, shots) = run_full_tomography_recording(&rho, &plan, &mut rng).unwrap();
        assert_eq!(shots.len(), plan.total_shots() as usize);

        // Serialize, read back, replay.
        let mut buf = Vec::new();
        write_shots(&mut buf, &shots).unwrap();
        let replayed = read_shots(buf.as_slice()).unwrap();
        let (sigma2, acc) = estimate_from_shots(2, &replayed).unwrap();
        assert_eq!(sigma.data(), sigma2.data());
        assert_eq!(acc.shots(), plan.total_shots());
    }

    #[test]
    fn flipping_one_outcome_bit_moves_each_mu_by_at_most_two() {
        let n = 2;
        let rho = make_state(n, &StateSpec::RandomMixed { rank: 2, seed: 14 }).unwrap();
        let plan = TomographyPlan::with_shots(n, 0.5, 0.5, 50).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let (_, _, shots) = run_full_tomography_recording(&rho, &plan, &mut rng).unwrap();
        let (_, base_acc) = estimate_from_shots(n, &shots).unwrap();

        let mut pick = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..100 {
            let idx = pick.random_range(0..shots.len());
            let qubit = pick.random_range(0..n);
            let mut perturbed = shots.clone();
            perturbed[idx].outcome ^= 1 << (n - 1 - qubit);
            let (_, acc) = estimate_from_shots(n, &perturbed).unwrap();
            for code in 0..16usize {
                let delta = (acc.mus()[code] - base_acc.mus()[code]).abs();
                assert!(delta <= 2, "mu moved by {delta} for code {code}");
                assert_eq!(acc.counts()[code], base_acc.counts()[code]);
            }
        }
    }

    #[test]
    fn projection_clips_and_renormalizes() {
        // diag(1.2, -0.2) -> diag(1, 0).
        let sigma = ComplexMatrix::from_vec(
            2,
            vec![c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)],
        )
        .unwrap();
        let proj = project_to_physical(&sigma).unwrap();
        assert!((proj.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(proj.get(1, 1).norm() < 1e-12);
        assert!(DensityMatrix::try_new(proj).is_ok());
    }

    #[test]
    fn projection_fixes_physical_states() {
        let rho = make_state(2, &StateSpec::RandomMixed { rank: 4, seed: 23 }).unwrap();
        let proj = project_to_physical(rho.matrix()).unwrap();
        let dev = proj.sub(rho.matrix()).unwrap().frobenius_norm();
        assert!(dev < 1e-10, "projection moved a physical state by {dev}");
    }

    #[test]
    fn projection_rejects_degenerate_inputs() {
        let skew = ComplexMatrix::from_vec(
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            project_to_physical(&skew),
            Err(Error::NotHermitian { .. })
        ));
        let negative = ComplexMatrix::identity(2).unwrap().scale(c(-0.5, 0.0));
        assert!(project_to_physical(&negative).is_err());
    }
}
