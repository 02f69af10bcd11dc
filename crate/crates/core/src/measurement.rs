//! Single-shot Pauli measurements.
//!
//! A measurement basis assigns one of `{X, Y, Z}` to every qubit; a shot
//! is a basis plus one sampled outcome bitstring, with bit 0 meaning the
//! `+1` eigenvalue. This module computes exact outcome distributions,
//! samples shots reproducibly, decides Pauli/basis compatibility and shot
//! signs, provides the six-element informationally complete POVM, and
//! defines the on-disk shot stream format (`<basis letters> TAB <outcome
//! bits>`, one shot per line).

use std::collections::HashMap;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qstate::{ComplexMatrix, DensityMatrix, PauliLetter, PauliString};

/// Elements of a POVM must sum to the identity within this tolerance.
pub const POVM_SUM_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted in a POVM element.
pub const POVM_EIGENVALUE_FLOOR: f64 = -1e-12;
/// Outcome probabilities may undershoot zero by at most this much before
/// being clipped; worse indicates an invalid state.
pub const PROBABILITY_FLOOR: f64 = -1e-12;
/// Outcome probabilities must sum to 1 within this tolerance.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-10;

/// One measurement direction for a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub fn from_char(ch: char) -> Result<Self> {
        match ch {
            'X' => Ok(Self::X),
            'Y' => Ok(Self::Y),
            'Z' => Ok(Self::Z),
            other => Err(Error::Parse(format!("invalid basis letter '{other}'"))),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    pub fn to_letter(self) -> PauliLetter {
        match self {
            Self::X => PauliLetter::X,
            Self::Y => PauliLetter::Y,
            Self::Z => PauliLetter::Z,
        }
    }

    fn from_digit(d: u32) -> Self {
        match d {
            0 => Self::X,
            1 => Self::Y,
            2 => Self::Z,
            _ => unreachable!("digit is taken mod 3"),
        }
    }
}

/// A full product measurement basis: one axis per qubit, no identity
/// letters. Packed base-3 with qubit 0 as the most significant digit, so
/// code order is lexicographic with `X < Y < Z`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasurementBasis {
    n: u8,
    code: u32,
}

/// `3^n` as a `u32`; safe for `n <= MAX_QUBITS`.
pub(crate) fn pow3(n: usize) -> u32 {
    3u32.pow(n as u32)
}

impl MeasurementBasis {
    pub fn from_axes(axes: &[Axis]) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::EmptyInput("measurement basis"));
        }
        if axes.len() > crate::MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: axes.len(),
                max: crate::MAX_QUBITS,
            });
        }
        let mut code = 0u32;
        for &axis in axes {
            code = code * 3 + axis as u32;
        }
        Ok(Self {
            n: axes.len() as u8,
            code,
        })
    }

    /// Basis from its lexicographic index among all `3^n` bases.
    pub fn from_code(n: usize, code: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("measurement basis"));
        }
        if n > crate::MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n,
                max: crate::MAX_QUBITS,
            });
        }
        if code >= pow3(n) {
            return Err(Error::Parse(format!(
                "basis code {code} out of range for {n} qubits"
            )));
        }
        Ok(Self { n: n as u8, code })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    /// Axis measured on qubit `index` (0 = leftmost letter).
    pub fn axis(&self, index: usize) -> Axis {
        debug_assert!(index < self.n());
        let div = pow3(self.n() - 1 - index);
        Axis::from_digit((self.code / div) % 3)
    }

    pub fn axes(&self) -> Vec<Axis> {
        (0..self.n()).map(|i| self.axis(i)).collect()
    }

    /// The weight-`n` Pauli string with the same letters.
    pub fn as_pauli(&self) -> PauliString {
        let letters: Vec<PauliLetter> = (0..self.n()).map(|i| self.axis(i).to_letter()).collect();
        PauliString::from_letters(&letters).expect("basis length already validated")
    }

    /// All `3^n` bases in lexicographic order.
    pub fn all(n: usize) -> Result<Vec<MeasurementBasis>> {
        if n == 0 || n > crate::MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n,
                max: crate::MAX_QUBITS,
            });
        }
        Ok((0..pow3(n))
            .map(|code| MeasurementBasis { n: n as u8, code })
            .collect())
    }
}

impl std::fmt::Display for MeasurementBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n() {
            write!(f, "{}", self.axis(i).to_char())?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for MeasurementBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for MeasurementBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes: Vec<Axis> = s.chars().map(Axis::from_char).collect::<Result<_>>()?;
        Self::from_axes(&axes)
    }
}

/// A basis uniform over `{X, Y, Z}` on every qubit independently; qubit 0
/// is drawn first.
pub fn random_basis(n: usize, rng: &mut impl Rng) -> Result<MeasurementBasis> {
    if n == 0 || n > crate::MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: crate::MAX_QUBITS,
        });
    }
    let mut code = 0u32;
    for _ in 0..n {
        code = code * 3 + rng.random_range(0..3u32);
    }
    Ok(MeasurementBasis { n: n as u8, code })
}

/// One measurement record: the basis used and the sampled outcome bits.
///
/// Outcome bit for qubit `i` sits at position `n-1-i` (qubit 0 = most
/// significant bit); bit value 0 encodes the `+1` eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shot {
    pub basis: MeasurementBasis,
    pub outcome: u32,
}

impl Shot {
    pub fn n(&self) -> usize {
        self.basis.n()
    }

    /// Outcome bit (0 or 1) for qubit `index`.
    pub fn outcome_bit(&self, index: usize) -> u8 {
        ((self.outcome >> (self.n() - 1 - index)) & 1) as u8
    }

    /// Serializes to the shot stream line format, e.g. `XYZ\t010`.
    pub fn to_line(&self) -> String {
        let mut bits = String::with_capacity(self.n());
        for i in 0..self.n() {
            bits.push(if self.outcome_bit(i) == 0 { '0' } else { '1' });
        }
        format!("{}\t{}", self.basis, bits)
    }

    /// Parses one shot stream line.
    pub fn parse_line(line: &str) -> Result<Self> {
        let (basis_part, bits_part) = line
            .split_once('\t')
            .ok_or_else(|| Error::Parse(format!("shot line '{line}' lacks a tab separator")))?;
        let basis: MeasurementBasis = basis_part.parse()?;
        if bits_part.len() != basis.n() {
            return Err(Error::Parse(format!(
                "outcome '{bits_part}' length does not match basis '{basis_part}'"
            )));
        }
        let mut outcome = 0u32;
        for ch in bits_part.chars() {
            outcome = (outcome << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(Error::Parse(format!("bad outcome bit '{other}'"))),
                };
        }
        Ok(Shot { basis, outcome })
    }
}

/// Writes shots in the stream format, one per line.
pub fn write_shots<W: Write>(writer: &mut W, shots: &[Shot]) -> Result<()> {
    for shot in shots {
        writeln!(writer, "{}", shot.to_line())?;
    }
    Ok(())
}

/// Reads a shot stream; all lines must share one qubit count.
pub fn read_shots<R: BufRead>(reader: R) -> Result<Vec<Shot>> {
    let mut shots = Vec::new();
    let mut n: Option<usize> = None;
    for line in reader.lines() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let shot = Shot::parse_line(&line)?;
        match n {
            None => n = Some(shot.n()),
            Some(expected) if expected != shot.n() => {
                return Err(Error::QubitCountMismatch {
                    expected,
                    actual: shot.n(),
                })
            }
            _ => {}
        }
        shots.push(shot);
    }
    Ok(shots)
}

/// Single-qubit eigenvector matrix `V` with `basis = V Z V^dagger`;
/// column 0 is the `+1` eigenvector.
fn axis_eigenvectors(axis: Axis) -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x, 0.0);
    let i = |x: f64| Complex64::new(0.0, x);
    match axis {
        // X = H Z H with H the Hadamard matrix.
        Axis::X => [[r(h), r(h)], [r(h), r(-h)]],
        // For Y = [[0,i],[-i,0]] the +1 eigenvector is (1, -i)/sqrt(2).
        Axis::Y => [[r(h), r(h)], [i(-h), i(h)]],
        Axis::Z => [[r(1.0), r(0.0)], [r(0.0), r(1.0)]],
    }
}

/// In-place `A <- V^dagger A V` with `V` acting on one qubit of an
/// `n`-qubit matrix stored row-major.
fn conjugate_on_qubit(data: &mut [Complex64], n: usize, qubit: usize, v: &[[Complex64; 2]; 2]) {
    let dim = 1usize << n;
    let stride = 1usize << (n - 1 - qubit);
    // Left multiply by V^dagger: mix row pairs differing at the qubit bit.
    for base in 0..dim {
        if base & stride != 0 {
            continue;
        }
        let (r0, r1) = (base, base | stride);
        for col in 0..dim {
            let a = data[r0 * dim + col];
            let b = data[r1 * dim + col];
            data[r0 * dim + col] = v[0][0].conj() * a + v[1][0].conj() * b;
            data[r1 * dim + col] = v[0][1].conj() * a + v[1][1].conj() * b;
        }
    }
    // Right multiply by V: mix column pairs.
    for row in 0..dim {
        for base in 0..dim {
            if base & stride != 0 {
                continue;
            }
            let (c0, c1) = (base, base | stride);
            let a = data[row * dim + c0];
            let b = data[row * dim + c1];
            data[row * dim + c0] = a * v[0][0] + b * v[1][0];
            data[row * dim + c1] = a * v[0][1] + b * v[1][1];
        }
    }
}

/// Exact outcome distribution of measuring `rho` in `basis`.
///
/// Returns `2^n` probabilities indexed by the outcome bitstring (qubit 0 =
/// most significant bit). Entries are clipped to zero if they undershoot
/// by no more than [`PROBABILITY_FLOOR`]; the vector must sum to 1 within
/// [`PROBABILITY_SUM_TOLERANCE`].
pub fn outcome_distribution(rho: &DensityMatrix, basis: &MeasurementBasis) -> Result<Vec<f64>> {
    if basis.n() != rho.qubits() {
        return Err(Error::QubitCountMismatch {
            expected: rho.qubits(),
            actual: basis.n(),
        });
    }
    let n = rho.qubits();
    let dim = rho.dim();
    // Rotate every non-Z axis to Z, then read the diagonal:
    // p(s) = <s| V^dagger rho V |s>.
    let mut work = rho.matrix().data().to_vec();
    for q in 0..n {
        let axis = basis.axis(q);
        if axis != Axis::Z {
            conjugate_on_qubit(&mut work, n, q, &axis_eigenvectors(axis));
        }
    }
    let mut probs = Vec::with_capacity(dim);
    for s in 0..dim {
        let p = work[s * dim + s].re;
        if p < PROBABILITY_FLOOR {
            return Err(Error::InvalidDistribution(format!(
                "probability {p:.3e} for outcome {s} below floor {PROBABILITY_FLOOR:.1e}"
            )));
        }
        probs.push(p.max(0.0));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {sum}, expected 1 within {PROBABILITY_SUM_TOLERANCE:.1e}"
        )));
    }
    Ok(probs)
}

/// Reusable sampler that caches the cumulative outcome distribution per
/// basis, so repeated shots in one basis cost one uniform draw and a
/// binary search.
pub struct ShotSampler<'a> {
    rho: &'a DensityMatrix,
    cdfs: HashMap<u32, Box<[f64]>>,
}

impl<'a> ShotSampler<'a> {
    pub fn new(rho: &'a DensityMatrix) -> Self {
        Self {
            rho,
            cdfs: HashMap::new(),
        }
    }

    pub fn state(&self) -> &DensityMatrix {
        self.rho
    }

    fn cdf(&mut self, basis: &MeasurementBasis) -> Result<&[f64]> {
        if !self.cdfs.contains_key(&basis.code()) {
            let probs = outcome_distribution(self.rho, basis)?;
            let mut cdf = Vec::with_capacity(probs.len());
            let mut acc = 0.0;
            for p in probs {
                acc += p;
                cdf.push(acc);
            }
            self.cdfs.insert(basis.code(), cdf.into_boxed_slice());
        }
        Ok(self.cdfs.get(&basis.code()).expect("inserted above"))
    }

    /// Draws one shot; consumes exactly one uniform `f64` from the RNG.
    pub fn sample(&mut self, basis: &MeasurementBasis, rng: &mut impl Rng) -> Result<Shot> {
        let dim = self.rho.dim();
        let cdf = self.cdf(basis)?;
        let u: f64 = rng.random();
        let outcome = cdf.partition_point(|&c| c <= u).min(dim - 1) as u32;
        Ok(Shot {
            basis: *basis,
            outcome,
        })
    }
}

/// One-off shot sampler; prefer [`ShotSampler`] in loops.
pub fn sample_shot(
    rho: &DensityMatrix,
    basis: &MeasurementBasis,
    rng: &mut impl Rng,
) -> Result<Shot> {
    ShotSampler::new(rho).sample(basis, rng)
}

/// Whether every non-identity letter of `q` matches the basis letter at
/// the same position, i.e. whether shots in `basis` carry information
/// about `q`.
pub fn is_compatible(q: &PauliString, basis: &MeasurementBasis) -> Result<bool> {
    if q.n() != basis.n() {
        return Err(Error::QubitCountMismatch {
            expected: basis.n(),
            actual: q.n(),
        });
    }
    Ok((0..q.n()).all(|i| {
        let letter = q.letter(i);
        letter == PauliLetter::I || letter == basis.axis(i).to_letter()
    }))
}

/// Sign contributed by one shot to the estimate of `q`: the product of
/// `(-1)^bit` over the support of `q`. Errors if `q` is not compatible
/// with the shot's basis.
pub fn shot_sign(q: &PauliString, shot: &Shot) -> Result<i8> {
    if !is_compatible(q, &shot.basis)? {
        return Err(Error::Incompatible {
            pauli: q.to_string(),
            basis: shot.basis.to_string(),
        });
    }
    let mut parity = 0u8;
    for i in 0..q.n() {
        if q.letter(i) != PauliLetter::I {
            parity ^= shot.outcome_bit(i);
        }
    }
    Ok(if parity == 0 { 1 } else { -1 })
}

/// A positive operator-valued measure on one qubit.
#[derive(Clone, Debug)]
pub struct SingleQubitPOVM {
    elements: Vec<ComplexMatrix>,
}

impl SingleQubitPOVM {
    /// Validates: every element is a Hermitian 2x2 matrix with eigenvalues
    /// `>= POVM_EIGENVALUE_FLOOR`, and the elements sum to the identity
    /// within [`POVM_SUM_TOLERANCE`].
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyInput("povm elements"));
        }
        let mut sum = ComplexMatrix::zeros(2)?;
        for el in &elements {
            if el.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    actual: el.dim(),
                });
            }
            let dev = el.hermiticity_deviation();
            if dev > crate::qstate::HERMITICITY_TOLERANCE {
                return Err(Error::NotHermitian {
                    deviation: dev,
                    tolerance: crate::qstate::HERMITICITY_TOLERANCE,
                });
            }
            let min = el.hermitian_eigenvalues()[0];
            if min < POVM_EIGENVALUE_FLOOR {
                return Err(Error::NotPositive {
                    min_eigenvalue: min,
                    tolerance: POVM_EIGENVALUE_FLOOR,
                });
            }
            sum = sum.add(el)?;
        }
        let id = ComplexMatrix::identity(2)?;
        let dev = sum.sub(&id)?.frobenius_norm();
        if dev > POVM_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "povm elements sum deviates from identity by {dev:.3e}"
            )));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Exact outcome probabilities `tr(rho M_j)` on a single-qubit state.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.qubits() != 1 {
            return Err(Error::QubitCountMismatch {
                expected: 1,
                actual: rho.qubits(),
            });
        }
        self.elements
            .iter()
            .map(|el| {
                let p = rho.matrix().matmul(el)?.trace().re;
                Ok(p.max(0.0))
            })
            .collect()
    }
}

/// The six-outcome informationally complete POVM
/// `{(I + X)/6, (I - X)/6, (I + Y)/6, (I - Y)/6, (I + Z)/6, (I - Z)/6}`,
/// in that order. Each element has eigenvalues `{0, 1/3}`.
pub fn ic_povm() -> SingleQubitPOVM {
    let id = ComplexMatrix::identity(2).expect("dim 2 is valid");
    let sixth = Complex64::new(1.0 / 6.0, 0.0);
    let mut elements = Vec::with_capacity(6);
    for letter in ['X', 'Y', 'Z'] {
        let sigma = crate::qstate::pauli_matrix(&letter.to_string().parse().expect("valid letter"));
        for sign in [1.0, -1.0] {
            let el = id
                .add(&sigma.scale(Complex64::new(sign, 0.0)))
                .expect("same dims")
                .scale(sixth);
            elements.push(el);
        }
    }
    SingleQubitPOVM::new(elements).expect("the IC POVM satisfies the POVM invariants")
}
