//! Dense row-major complex matrices sized for qubit systems.
//!
//! Dimensions are restricted to powers of two because every matrix in this
//! crate acts on some number of qubits. The type is deliberately small:
//! just the arithmetic the tomography pipeline needs, plus Hermitian
//! eigendecomposition (delegated to nalgebra).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::MAX_QUBITS;

/// A square complex matrix with power-of-two dimension, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

/// Returns `log2(dim)` if `dim` is a power of two no larger than
/// `2^MAX_QUBITS`, otherwise an error.
pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: MAX_QUBITS,
        });
    }
    Ok(n)
}

impl ComplexMatrix {
    /// Zero matrix of the given dimension (must be a power of two).
    pub fn zeros(dim: usize) -> Result<Self> {
        qubits_for_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    /// Identity matrix of the given dimension (must be a power of two).
    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// Builds a matrix from a row-major entry vector.
    ///
    /// Fails if the length is not a square of a power of two or any entry
    /// is non-finite.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        qubits_for_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix by evaluating `f(row, col)` at every entry.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        qubits_for_dim(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::from_vec(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits this matrix acts on (`dim = 2^n`).
    pub fn qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    /// Row-major entry slice.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        Ok(())
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    /// Scalar multiple.
    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        Ok(Self { dim: d, data: out })
    }

    /// Kronecker product `self (x) other`; the left factor occupies the
    /// most significant index bits.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let d = self.dim * other.dim;
        qubits_for_dim(d)?;
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for ia in 0..self.dim {
            for ja in 0..self.dim {
                let a = self.data[ia * self.dim + ja];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for ib in 0..other.dim {
                    for jb in 0..other.dim {
                        let b = other.data[ib * other.dim + jb];
                        out[(ia * other.dim + ib) * d + (ja * other.dim + jb)] = a * b;
                    }
                }
            }
        }
        Ok(Self { dim: d, data: out })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Self { dim: d, data }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Frobenius norm `sqrt(sum |a_ij|^2)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let dev = (self.data[i * d + j] - self.data[j * d + i].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.hermiticity_deviation() <= tolerance
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c))
    }

    /// Eigenvalues of a Hermitian matrix, sorted ascending.
    ///
    /// The caller is expected to have verified Hermiticity; the solver only
    /// reads the matrix as if it were exactly Hermitian.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let eig = self.to_nalgebra().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        vals
    }

    /// Full Hermitian eigendecomposition: `(eigenvalues, eigenvectors)`
    /// with eigenvector `k` stored in column `k`, eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        let eig = self.to_nalgebra().symmetric_eigen();
        let d = self.dim;
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vecs = vec![Complex64::new(0.0, 0.0); d * d];
        for (col_out, &col_in) in order.iter().enumerate() {
            for row in 0..d {
                vecs[row * d + col_out] = eig.eigenvectors[(row, col_in)];
            }
        }
        (
            vals,
            ComplexMatrix {
                dim: d,
                data: vecs,
            },
        )
    }

    /// Partial trace keeping the listed qubits (sorted ascending), without
    /// any density-matrix validation of the result.
    ///
    /// Qubit 0 is the most significant index bit. Works on any matrix of
    /// the right dimension, e.g. non-positive tomography estimates.
    pub fn partial_trace_raw(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        let n = qubits_for_dim(self.dim)?;
        if keep.is_empty() {
            return Err(Error::InvalidSubset("empty keep list".into()));
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSubset(format!(
                "keep list {keep:?} is not strictly increasing"
            )));
        }
        if *keep.last().unwrap() >= n {
            return Err(Error::InvalidSubset(format!(
                "keep list {keep:?} references qubit >= {n}"
            )));
        }
        let k = keep.len();
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let t = traced.len();
        let out_dim = 1usize << k;
        let mut out = vec![Complex64::new(0.0, 0.0); out_dim * out_dim];

        // Scatter a reduced index (bits over `keep`) and an environment
        // index (bits over `traced`) into a full index. Bit j of a full
        // index addresses qubit n-1-j, so qubit q occupies bit n-1-q.
        let spread = |bits: usize, qubits: &[usize]| -> usize {
            let mut full = 0usize;
            for (pos, &q) in qubits.iter().enumerate() {
                let bit = (bits >> (qubits.len() - 1 - pos)) & 1;
                full |= bit << (n - 1 - q);
            }
            full
        };

        for a in 0..out_dim {
            let base_a = spread(a, keep);
            for b in 0..out_dim {
                let base_b = spread(b, keep);
                let mut acc = Complex64::new(0.0, 0.0);
                for e in 0..(1usize << t) {
                    let env = spread(e, &traced);
                    acc += self.get(base_a | env, base_b | env);
                }
                out[a * out_dim + b] = acc;
            }
        }
        Ok(ComplexMatrix {
            dim: out_dim,
            data: out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_power_of_two_dims() {
        assert!(matches!(
            ComplexMatrix::zeros(3),
            Err(Error::NotPowerOfTwo(3))
        ));
        assert!(matches!(
            ComplexMatrix::zeros(0),
            Err(Error::NotPowerOfTwo(0))
        ));
        assert!(ComplexMatrix::zeros(1).is_ok());
        assert!(ComplexMatrix::zeros(8).is_ok());
    }

    #[test]
    fn rejects_oversized_dims() {
        assert!(matches!(
            ComplexMatrix::zeros(1 << 13),
            Err(Error::TooManyQubits { n: 13, .. })
        ));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let mut data = vec![c(0.0, 0.0); 4];
        data[2] = c(f64::NAN, 0.0);
        assert!(matches!(
            ComplexMatrix::from_vec(2, data),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn identity_trace_and_frobenius() {
        let id = ComplexMatrix::identity(4).unwrap();
        assert_eq!(id.trace(), c(4.0, 0.0));
        assert!((id.frobenius_norm() - 2.0).abs() < 1e-15);
        assert_eq!(ComplexMatrix::zeros(4).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn matmul_against_hand_product() {
        // [[1,i],[0,2]] * [[0,1],[1,0]] = [[i,1],[2,0]]
        let a = ComplexMatrix::from_vec(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        let b = ComplexMatrix::from_vec(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let p = a.matmul(&b).unwrap();
        assert_eq!(p.get(0, 0), c(0.0, 1.0));
        assert_eq!(p.get(0, 1), c(1.0, 0.0));
        assert_eq!(p.get(1, 0), c(2.0, 0.0));
        assert_eq!(p.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn kron_places_left_factor_in_high_bits() {
        // diag(1,2) (x) I_2 = diag(1,1,2,2)
        let a = ComplexMatrix::from_vec(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)])
            .unwrap();
        let id = ComplexMatrix::identity(2).unwrap();
        let k = a.kron(&id).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| k.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, 1.0, 2.0, 2.0]);
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = ComplexMatrix::from_vec(2, vec![c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0), c(7.0, 8.0)])
            .unwrap();
        let ad = a.adjoint();
        assert_eq!(ad.get(0, 1), c(5.0, -6.0));
        assert_eq!(ad.get(1, 0), c(3.0, -4.0));
        assert!(a.hermiticity_deviation() > 1.0);
        let h = a.add(&a.adjoint()).unwrap();
        assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn hermitian_eigenvalues_of_known_matrices() {
        // [[0,1],[1,0]] has eigenvalues -1, +1.
        let x = ComplexMatrix::from_vec(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let vals = x.hermitian_eigenvalues();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);

        let d = ComplexMatrix::from_vec(
            2,
            vec![c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)],
        )
        .unwrap();
        let vals = d.hermitian_eigenvalues();
        assert!((vals[0] - 0.3).abs() < 1e-12 && (vals[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_reconstructs_matrix() {
        // A = [[1, i], [-i, 2]] is Hermitian; V diag(vals) V^dagger must
        // reproduce it.
        let a = ComplexMatrix::from_vec(
            2,
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
        )
        .unwrap();
        let (vals, vecs) = a.hermitian_eigen();
        let mut diag = ComplexMatrix::zeros(2).unwrap();
        for (i, v) in vals.iter().enumerate() {
            diag.set(i, i, c(*v, 0.0));
        }
        let rebuilt = vecs.matmul(&diag).unwrap().matmul(&vecs.adjoint()).unwrap();
        assert!(rebuilt.sub(&a).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn partial_trace_raw_validates_keep_list() {
        let m = ComplexMatrix::identity(4).unwrap();
        assert!(matches!(
            m.partial_trace_raw(&[]),
            Err(Error::InvalidSubset(_))
        ));
        assert!(matches!(
            m.partial_trace_raw(&[1, 0]),
            Err(Error::InvalidSubset(_))
        ));
        assert!(matches!(
            m.partial_trace_raw(&[0, 2]),
            Err(Error::InvalidSubset(_))
        ));
        let r = m.partial_trace_raw(&[0]).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.get(0, 0), c(2.0, 0.0));
    }
}
