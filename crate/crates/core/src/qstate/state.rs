//! Density matrices, state construction, and exact Pauli-basis queries.
//!
//! Everything here is exact linear algebra (up to float tolerance); the
//! sampling side of the toolkit lives in `measurement` and is tested
//! against these functions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qstate::matrix::{qubits_for_dim, ComplexMatrix};
use crate::qstate::pauli::{PauliString, Subset};
use crate::MAX_QUBITS;

/// Maximum entrywise deviation from `A = A^dagger` accepted as Hermitian.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
/// Maximum deviation of the trace from 1 accepted for a density matrix.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Most negative eigenvalue accepted as "positive semidefinite".
pub const EIGENVALUE_FLOOR: f64 = -1e-9;
/// Largest imaginary part tolerated (then discarded) in a Pauli
/// expectation of a Hermitian matrix.
pub const EXPECTATION_IMAG_TOLERANCE: f64 = 1e-10;

/// A validated quantum state: Hermitian, unit trace, positive semidefinite
/// (all up to the tolerances above), dimension `2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps a matrix as a quantum state.
    pub fn try_new(mat: ComplexMatrix) -> Result<Self> {
        let n = qubits_for_dim(mat.dim())?;
        let dev = mat.hermiticity_deviation();
        if dev > HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: HERMITICITY_TOLERANCE,
            });
        }
        let trace = mat.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::NotUnitTrace {
                trace: trace.re,
                tolerance: TRACE_TOLERANCE,
            });
        }
        let eigs = mat.hermitian_eigenvalues();
        let min = eigs.first().copied().unwrap_or(0.0);
        if min < EIGENVALUE_FLOOR {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
                tolerance: EIGENVALUE_FLOOR,
            });
        }
        Ok(Self { n, mat })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Exact Pauli expectation `tr(rho P)`.
    ///
    /// Uses the one-nonzero-per-column structure of a Pauli matrix, so the
    /// cost is `O(2^n)`. The result must be real for a Hermitian input; the
    /// imaginary residue is checked against
    /// [`EXPECTATION_IMAG_TOLERANCE`] and discarded.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.n() != self.n {
            return Err(Error::QubitCountMismatch {
                expected: self.n,
                actual: p.n(),
            });
        }
        let dim = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        // tr(rho P) = sum_j phase(j) rho[j][j ^ flip].
        for j in 0..dim as u32 {
            let (target, phase) = p.apply_to_basis(j);
            acc += phase * self.mat.get(j as usize, target as usize);
        }
        if acc.im.abs() > EXPECTATION_IMAG_TOLERANCE {
            return Err(Error::NonRealExpectation {
                imaginary: acc.im,
                tolerance: EXPECTATION_IMAG_TOLERANCE,
            });
        }
        Ok(acc.re)
    }

    /// All `4^n` Pauli expectations, indexed by [`PauliString::code`]
    /// (lexicographic order). Entry 0 (the identity) is always 1.
    pub fn pauli_decompose(&self) -> Result<Vec<f64>> {
        let count = 1usize << (2 * self.n);
        let mut out = Vec::with_capacity(count);
        for code in 0..count as u32 {
            let p = PauliString::from_code(self.n, code)?;
            out.push(self.expectation(&p)?);
        }
        Ok(out)
    }

    /// Reduced state on the given subset of qubits.
    ///
    /// The result is re-validated, so it satisfies every density-matrix
    /// invariant up to tolerance.
    pub fn partial_trace(&self, keep: &Subset) -> Result<DensityMatrix> {
        keep.validate_for(self.n)?;
        let reduced = self.mat.partial_trace_raw(keep.indices())?;
        DensityMatrix::try_new(reduced)
    }
}

/// Dense `2^n x 2^n` matrix of a Pauli string (qubit 0 = most significant
/// index bit). The single-qubit factors are
/// `X = [[0,1],[1,0]]`, `Y = [[0,i],[-i,0]]`, `Z = [[1,0],[0,-1]]`.
pub fn pauli_matrix(p: &PauliString) -> ComplexMatrix {
    let dim = 1usize << p.n();
    let mut m = ComplexMatrix::zeros(dim).expect("pauli dims are validated powers of two");
    for j in 0..dim as u32 {
        let (target, phase) = p.apply_to_basis(j);
        m.set(target as usize, j as usize, phase);
    }
    m
}

/// Trace-norm distance `||a - b||_1` (sum of absolute eigenvalues of the
/// difference; orthogonal pure states are at distance 2).
///
/// Both inputs must be Hermitian within [`HERMITICITY_TOLERANCE`] and have
/// equal dimensions.
pub fn one_norm_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    for m in [a, b] {
        let dev = m.hermiticity_deviation();
        if dev > HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: HERMITICITY_TOLERANCE,
            });
        }
    }
    let diff = a.sub(b)?;
    Ok(diff.hermitian_eigenvalues().iter().map(|v| v.abs()).sum())
}

/// Recipe for a test state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateSpec {
    /// `I / 2^n`.
    MaximallyMixed,
    /// Computational basis state `|bits><bits|`; `bits.len()` must equal
    /// the qubit count at construction time.
    BasisState(String),
    /// `(|0..0> + |1..1>)/sqrt(2)` as a density matrix.
    Ghz,
    /// Haar-like random pure state from a seeded Gaussian vector.
    RandomPure { seed: u64 },
    /// Random mixed state `G G^dagger / tr(G G^dagger)` with `G` a seeded
    /// Gaussian `2^n x rank` matrix.
    RandomMixed { rank: usize, seed: u64 },
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MaximallyMixed => write!(f, "maximally_mixed"),
            Self::BasisState(bits) => write!(f, "basis:{bits}"),
            Self::Ghz => write!(f, "ghz"),
            Self::RandomPure { seed } => write!(f, "random_pure:{seed}"),
            Self::RandomMixed { rank, seed } => write!(f, "random_mixed:{rank}:{seed}"),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    /// Parses the colon-separated forms produced by `Display`:
    /// `maximally_mixed`, `basis:<bits>`, `ghz`, `random_pure:<seed>`,
    /// `random_mixed:<rank>:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let parse_u64 = |part: &str, what: &str| {
            part.parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad {what} '{part}' in state spec '{s}'")))
        };
        match parts.as_slice() {
            ["maximally_mixed"] => Ok(Self::MaximallyMixed),
            ["ghz"] => Ok(Self::Ghz),
            ["basis", bits] => {
                if bits.is_empty() || bits.chars().any(|c| c != '0' && c != '1') {
                    return Err(Error::Parse(format!("bad bitstring '{bits}' in state spec")));
                }
                Ok(Self::BasisState((*bits).to_string()))
            }
            ["random_pure", seed] => Ok(Self::RandomPure {
                seed: parse_u64(seed, "seed")?,
            }),
            ["random_mixed", rank, seed] => Ok(Self::RandomMixed {
                rank: parse_u64(rank, "rank")? as usize,
                seed: parse_u64(seed, "seed")?,
            }),
            _ => Err(Error::Parse(format!("unrecognized state spec '{s}'"))),
        }
    }
}

/// Builds the described state on `n` qubits.
pub fn make_state(n: usize, spec: &StateSpec) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::EmptyInput("state with zero qubits"));
    }
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    let dim = 1usize << n;
    let mat = match spec {
        StateSpec::MaximallyMixed => {
            let w = Complex64::new(1.0 / dim as f64, 0.0);
            ComplexMatrix::identity(dim)?.scale(w)
        }
        StateSpec::BasisState(bits) => {
            if bits.len() != n {
                return Err(Error::QubitCountMismatch {
                    expected: n,
                    actual: bits.len(),
                });
            }
            let mut index = 0usize;
            for ch in bits.chars() {
                index = (index << 1)
                    | match ch {
                        '0' => 0,
                        '1' => 1,
                        other => {
                            return Err(Error::Parse(format!("bad bit '{other}' in basis state")))
                        }
                    };
            }
            let mut m = ComplexMatrix::zeros(dim)?;
            m.set(index, index, Complex64::new(1.0, 0.0));
            m
        }
        StateSpec::Ghz => {
            let mut m = ComplexMatrix::zeros(dim)?;
            let half = Complex64::new(0.5, 0.0);
            let last = dim - 1;
            m.set(0, 0, half);
            m.set(0, last, half);
            m.set(last, 0, half);
            m.set(last, last, half);
            m
        }
        StateSpec::RandomPure { seed } => {
            let mut rng = ChaCha12Rng::seed_from_u64(*seed);
            let mut v = Vec::with_capacity(dim);
            for _ in 0..dim {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                v.push(Complex64::new(re, im));
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let mut m = ComplexMatrix::zeros(dim)?;
            for i in 0..dim {
                for j in 0..dim {
                    m.set(i, j, v[i] * v[j].conj() / (norm * norm));
                }
            }
            m
        }
        StateSpec::RandomMixed { rank, seed } => {
            if *rank == 0 || *rank > dim {
                return Err(Error::ParamOutOfRange {
                    name: "rank",
                    value: *rank as f64,
                    expected: "1..=2^n",
                });
            }
            let mut rng = ChaCha12Rng::seed_from_u64(*seed);
            // G is 2^n x rank, filled row-major, re then im per entry.
            let mut g = vec![Complex64::new(0.0, 0.0); dim * rank];
            for entry in g.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *entry = Complex64::new(re, im);
            }
            let mut m = ComplexMatrix::zeros(dim)?;
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for r in 0..*rank {
                        acc += g[i * rank + r] * g[j * rank + r].conj();
                    }
                    m.set(i, j, acc);
                }
            }
            let trace = m.trace().re;
            m.scale(Complex64::new(1.0 / trace, 0.0))
        }
    };
    DensityMatrix::try_new(mat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(letter: char) -> ComplexMatrix {
        pauli_matrix(&letter.to_string().parse().unwrap())
    }

    /// Independent dense route: tr(rho P) via an explicit matrix product.
    fn dense_expectation(rho: &DensityMatrix, p: &PauliString) -> f64 {
        rho.matrix().matmul(&pauli_matrix(p)).unwrap().trace().re
    }

    fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.sub(b).unwrap().frobenius_norm()
    }

    #[test]
    fn pauli_matrices_match_stated_convention() {
        let z = single('Z');
        assert_eq!(z.get(0, 0), c(1.0, 0.0));
        assert_eq!(z.get(1, 1), c(-1.0, 0.0));
        assert_eq!(z.get(0, 1), c(0.0, 0.0));

        let x = single('X');
        assert_eq!(x.get(0, 1), c(1.0, 0.0));
        assert_eq!(x.get(1, 0), c(1.0, 0.0));

        // Y = [[0, i], [-i, 0]].
        let y = single('Y');
        assert_eq!(y.get(0, 0), c(0.0, 0.0));
        assert_eq!(y.get(0, 1), c(0.0, 1.0));
        assert_eq!(y.get(1, 0), c(0.0, -1.0));

        let ii = pauli_matrix(&"II".parse().unwrap());
        assert_eq!(max_abs_diff(&ii, &ComplexMatrix::identity(4).unwrap()), 0.0);
    }

    #[test]
    fn multi_qubit_pauli_is_kron_of_singles() {
        let xz = pauli_matrix(&"XZ".parse().unwrap());
        let explicit = single('X').kron(&single('Z')).unwrap();
        assert_eq!(max_abs_diff(&xz, &explicit), 0.0);

        let yzx = pauli_matrix(&"YZX".parse().unwrap());
        let explicit = single('Y').kron(&single('Z')).unwrap().kron(&single('X')).unwrap();
        assert_eq!(max_abs_diff(&yzx, &explicit), 0.0);
    }

    #[test]
    fn expectation_basics() {
        let mixed = make_state(1, &StateSpec::MaximallyMixed).unwrap();
        assert_eq!(mixed.expectation(&"X".parse().unwrap()).unwrap(), 0.0);

        let zero = make_state(1, &StateSpec::BasisState("0".into())).unwrap();
        assert_eq!(zero.expectation(&"Z".parse().unwrap()).unwrap(), 1.0);

        // rho = (I + 0.3 X + 0.4 Z)/2 has <X> = 0.3 and <Z> = 0.4.
        let m = ComplexMatrix::from_vec(
            2,
            vec![c(0.7, 0.0), c(0.15, 0.0), c(0.15, 0.0), c(0.3, 0.0)],
        )
        .unwrap();
        let rho = DensityMatrix::try_new(m).unwrap();
        assert!((rho.expectation(&"X".parse().unwrap()).unwrap() - 0.3).abs() < 1e-14);
        assert!((rho.expectation(&"Z".parse().unwrap()).unwrap() - 0.4).abs() < 1e-14);
    }

    #[test]
    fn expectation_rejects_qubit_mismatch() {
        let rho = make_state(2, &StateSpec::MaximallyMixed).unwrap();
        assert!(matches!(
            rho.expectation(&"X".parse().unwrap()),
            Err(Error::QubitCountMismatch {
                expected: 2,
                actual: 1
            })
        ));
    }

    #[test]
    fn sparse_expectation_agrees_with_dense_trace() {
        let rho = make_state(2, &StateSpec::RandomMixed { rank: 4, seed: 11 }).unwrap();
        for code in 0..16u32 {
            let p = PauliString::from_code(2, code).unwrap();
            let fast = rho.expectation(&p).unwrap();
            let slow = dense_expectation(&rho, &p);
            assert!(
                (fast - slow).abs() < 1e-12,
                "mismatch for {p}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn decompose_known_states() {
        let mixed = make_state(1, &StateSpec::MaximallyMixed).unwrap();
        assert_eq!(mixed.pauli_decompose().unwrap(), vec![1.0, 0.0, 0.0, 0.0]);

        let zero = make_state(1, &StateSpec::BasisState("0".into())).unwrap();
        let alphas = zero.pauli_decompose().unwrap();
        // Order I, X, Y, Z.
        assert_eq!(alphas, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn decompose_reassembles_state() {
        let rho = make_state(2, &StateSpec::RandomMixed { rank: 3, seed: 5 }).unwrap();
        let alphas = rho.pauli_decompose().unwrap();
        let mut rebuilt = ComplexMatrix::zeros(4).unwrap();
        for (code, alpha) in alphas.iter().enumerate() {
            let p = PauliString::from_code(2, code as u32).unwrap();
            rebuilt = rebuilt
                .add(&pauli_matrix(&p).scale(c(alpha / 4.0, 0.0)))
                .unwrap();
        }
        assert!(max_abs_diff(&rebuilt, rho.matrix()) < 1e-10);
    }

    #[test]
    fn partial_trace_of_product_state_recovers_factor() {
        let a = make_state(1, &StateSpec::RandomMixed { rank: 2, seed: 3 }).unwrap();
        let b = make_state(1, &StateSpec::RandomMixed { rank: 2, seed: 4 }).unwrap();
        let joint =
            DensityMatrix::try_new(a.matrix().kron(b.matrix()).unwrap()).unwrap();
        let keep_a = joint.partial_trace(&Subset::new(vec![0]).unwrap()).unwrap();
        assert!(max_abs_diff(keep_a.matrix(), a.matrix()) < 1e-12);
        let keep_b = joint.partial_trace(&Subset::new(vec![1]).unwrap()).unwrap();
        assert!(max_abs_diff(keep_b.matrix(), b.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_of_ghz_pair_is_half_mixture_of_corners() {
        // Tracing GHZ(3) down to qubits {0,1} leaves
        // (|00><00| + |11><11|)/2.
        let ghz = make_state(3, &StateSpec::Ghz).unwrap();
        let pair = ghz
            .partial_trace(&Subset::new(vec![0, 1]).unwrap())
            .unwrap();
        let mut expected = ComplexMatrix::zeros(4).unwrap();
        expected.set(0, 0, c(0.5, 0.0));
        expected.set(3, 3, c(0.5, 0.0));
        assert!(max_abs_diff(pair.matrix(), &expected) < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let bell = make_state(2, &StateSpec::Ghz).unwrap();
        let one = bell.partial_trace(&Subset::new(vec![0]).unwrap()).unwrap();
        let mixed = make_state(1, &StateSpec::MaximallyMixed).unwrap();
        assert!(max_abs_diff(one.matrix(), mixed.matrix()) < 1e-14);
    }

    #[test]
    fn one_norm_distance_basics() {
        let a = make_state(1, &StateSpec::BasisState("0".into())).unwrap();
        let b = make_state(1, &StateSpec::BasisState("1".into())).unwrap();
        assert_eq!(one_norm_distance(a.matrix(), a.matrix()).unwrap(), 0.0);
        // Orthogonal pure states sit at distance 2 under this (unhalved)
        // convention.
        assert!((one_norm_distance(a.matrix(), b.matrix()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn one_norm_distance_rejects_bad_inputs() {
        let a = ComplexMatrix::identity(2).unwrap();
        let b = ComplexMatrix::identity(4).unwrap();
        assert!(matches!(
            one_norm_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        let skew =
            ComplexMatrix::from_vec(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
                .unwrap();
        assert!(matches!(
            one_norm_distance(&a, &skew),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn make_state_known_outputs() {
        let mixed = make_state(2, &StateSpec::MaximallyMixed).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert_eq!(mixed.matrix().get(i, j), c(want, 0.0));
            }
        }

        let basis = make_state(2, &StateSpec::BasisState("01".into())).unwrap();
        assert_eq!(basis.matrix().get(1, 1), c(1.0, 0.0));
        assert_eq!(basis.matrix().get(0, 0), c(0.0, 0.0));

        let ghz = make_state(3, &StateSpec::Ghz).unwrap();
        assert_eq!(ghz.matrix().get(0, 7), c(0.5, 0.0));
        assert_eq!(ghz.matrix().get(7, 7), c(0.5, 0.0));
        assert_eq!(ghz.matrix().get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn random_states_are_valid_and_seed_deterministic() {
        let a = make_state(2, &StateSpec::RandomMixed { rank: 4, seed: 7 }).unwrap();
        let b = make_state(2, &StateSpec::RandomMixed { rank: 4, seed: 7 }).unwrap();
        let other = make_state(2, &StateSpec::RandomMixed { rank: 4, seed: 8 }).unwrap();
        assert_eq!(a.matrix().data(), b.matrix().data());
        assert!(max_abs_diff(a.matrix(), other.matrix()) > 1e-3);

        // Purity of a random pure state is 1.
        let pure = make_state(2, &StateSpec::RandomPure { seed: 9 }).unwrap();
        let sq = pure.matrix().matmul(pure.matrix()).unwrap();
        assert!((sq.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn make_state_rejects_bad_parameters() {
        assert!(matches!(
            make_state(2, &StateSpec::RandomMixed { rank: 0, seed: 1 }),
            Err(Error::ParamOutOfRange { name: "rank", .. })
        ));
        assert!(matches!(
            make_state(1, &StateSpec::RandomMixed { rank: 3, seed: 1 }),
            Err(Error::ParamOutOfRange { name: "rank", .. })
        ));
        assert!(matches!(
            make_state(3, &StateSpec::BasisState("01".into())),
            Err(Error::QubitCountMismatch { .. })
        ));
        assert!(make_state(0, &StateSpec::Ghz).is_err());
        assert!(make_state(13, &StateSpec::Ghz).is_err());
    }

    #[test]
    fn state_spec_text_roundtrip() {
        for spec in [
            StateSpec::MaximallyMixed,
            StateSpec::BasisState("010".into()),
            StateSpec::Ghz,
            StateSpec::RandomPure { seed: 42 },
            StateSpec::RandomMixed { rank: 3, seed: 17 },
        ] {
            let text = spec.to_string();
            assert_eq!(text.parse::<StateSpec>().unwrap(), spec, "roundtrip {text}");
        }
        assert!("randomish".parse::<StateSpec>().is_err());
        assert!("basis:012".parse::<StateSpec>().is_err());
        assert!("random_mixed:x:1".parse::<StateSpec>().is_err());
    }

    #[test]
    fn density_matrix_validation_errors() {
        // Wrong trace.
        let double = ComplexMatrix::identity(2).unwrap();
        assert!(matches!(
            DensityMatrix::try_new(double),
            Err(Error::NotUnitTrace { .. })
        ));
        // Hermitian, trace one, but indefinite.
        let indefinite = ComplexMatrix::from_vec(
            2,
            vec![c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            DensityMatrix::try_new(indefinite),
            Err(Error::NotPositive { .. })
        ));
        // Non-Hermitian.
        let skew = ComplexMatrix::from_vec(
            2,
            vec![c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            DensityMatrix::try_new(skew),
            Err(Error::NotHermitian { .. })
        ));
    }
}
