//! Hand-written oracles shared by the integration suites.
//!
//! Each oracle takes a deliberately different route from the library
//! implementation it checks: eigenvalues come from a self-contained
//! complex Jacobi iteration instead of the linear-algebra dependency,
//! outcome probabilities from explicit projector matrices instead of
//! basis rotation, and binomial tails from log-domain summation instead
//! of sampling.

#![allow(dead_code)]

use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix (row-major, `dim x dim`), sorted
/// ascending, via cyclic complex Jacobi rotations. Self-contained: no
/// linear-algebra dependency.
pub fn jacobi_eigenvalues(dim: usize, data: &[Complex64]) -> Vec<f64> {
    assert_eq!(data.len(), dim * dim, "matrix shape");
    let mut a = data.to_vec();
    let at = |a: &[Complex64], i: usize, j: usize| a[i * dim + j];
    let scale = a
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    // Classical Jacobi converges linearly in the squared off-diagonal
    // mass; this bound leaves generous headroom for dim <= 16.
    let max_rotations = 400 * dim * dim;
    for _rotation in 0..max_rotations {
        // Largest off-diagonal element decides convergence and the pivot.
        let mut best = (0usize, 0usize, 0.0f64);
        for p in 0..dim {
            for q in (p + 1)..dim {
                let mag = at(&a, p, q).norm();
                if mag > best.2 {
                    best = (p, q, mag);
                }
            }
        }
        let (p, q, mag) = best;
        if mag <= 1e-14 * scale {
            let mut eigs: Vec<f64> = (0..dim).map(|i| at(&a, i, i).re).collect();
            eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return eigs;
        }
        // Unitary rotation in the (p, q) plane annihilating a[p][q]:
        // with a[p][q] = b e^{i phi}, choose theta from
        // tan(2 theta) = 2 b / (a[p][p] - a[q][q]).
        let apq = at(&a, p, q);
        let b = apq.norm();
        let phase = apq / b;
        let theta = 0.5 * (2.0 * b).atan2(at(&a, p, p).re - at(&a, q, q).re);
        let (c, s) = (theta.cos(), theta.sin());
        // Column update: A <- A U with U[p][p]=c, U[p][q]=-s*phase,
        // U[q][p]=s*conj(phase), U[q][q]=c.
        for k in 0..dim {
            let akp = at(&a, k, p);
            let akq = at(&a, k, q);
            a[k * dim + p] = akp * c + akq * s * phase.conj();
            a[k * dim + q] = -akp * s * phase + akq * c;
        }
        // Row update: A <- U^dagger A.
        for k in 0..dim {
            let apk = at(&a, p, k);
            let aqk = at(&a, q, k);
            a[p * dim + k] = apk * c + aqk * s * phase;
            a[q * dim + k] = -apk * s * phase.conj() + aqk * c;
        }
    }
    panic!("jacobi iteration did not converge");
}

/// Single-qubit Pauli matrices in the convention used throughout: the Y
/// matrix is `[[0, i], [-i, 0]]`.
pub fn pauli_2x2(letter: char) -> [[Complex64; 2]; 2] {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match letter {
        'I' => [[one, zero], [zero, one]],
        'X' => [[zero, one], [one, zero]],
        'Y' => [[zero, i], [-i, zero]],
        'Z' => [[one, zero], [zero, -one]],
        other => panic!("unknown Pauli letter {other}"),
    }
}

/// Kronecker product of row-major square matrices (left factor occupies
/// the high bits, i.e. the leftmost qubit).
pub fn kron(a_dim: usize, a: &[Complex64], b_dim: usize, b: &[Complex64]) -> Vec<Complex64> {
    let dim = a_dim * b_dim;
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for ar in 0..a_dim {
        for ac in 0..a_dim {
            for br in 0..b_dim {
                for bc in 0..b_dim {
                    out[(ar * b_dim + br) * dim + (ac * b_dim + bc)] =
                        a[ar * a_dim + ac] * b[br * b_dim + bc];
                }
            }
        }
    }
    out
}

/// Exact outcome distribution of measuring `rho` (row-major `2^n x 2^n`)
/// in the product basis given by `letters` (no identities), computed via
/// explicit outcome projectors `(I + (-1)^bit sigma) / 2` per qubit —
/// independent of the basis-rotation route.
pub fn projector_distribution(n: usize, rho: &[Complex64], letters: &str) -> Vec<f64> {
    assert_eq!(letters.len(), n);
    let dim = 1usize << n;
    assert_eq!(rho.len(), dim * dim);
    let half = Complex64::new(0.5, 0.0);
    (0..dim as u32)
        .map(|outcome| {
            // Projector for this outcome: leftmost letter is qubit 0 and
            // carries the most significant outcome bit.
            let mut proj = vec![Complex64::new(1.0, 0.0)];
            let mut proj_dim = 1usize;
            for (i, letter) in letters.chars().enumerate() {
                let bit = (outcome >> (n - 1 - i)) & 1;
                let sign = if bit == 0 { 1.0 } else { -1.0 };
                let sigma = pauli_2x2(letter);
                let eye = pauli_2x2('I');
                let mut single = [Complex64::new(0.0, 0.0); 4];
                for r in 0..2 {
                    for c in 0..2 {
                        single[r * 2 + c] = (eye[r][c] + sigma[r][c] * sign) * half;
                    }
                }
                proj = kron(proj_dim, &proj, 2, &single);
                proj_dim *= 2;
            }
            // tr(rho . proj) = sum_{jk} rho[j][k] proj[k][j].
            let mut trace = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                for k in 0..dim {
                    trace += rho[j * dim + k] * proj[k * dim + j];
                }
            }
            assert!(trace.im.abs() < 1e-10, "projector probability not real");
            trace.re
        })
        .collect()
}

fn ln_factorial(k: u64) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Exact binomial pmf via log-domain evaluation.
pub fn binomial_pmf(m: u64, p: f64, k: u64) -> f64 {
    let ln_choose = ln_factorial(m) - ln_factorial(k) - ln_factorial(m - k);
    (ln_choose + k as f64 * p.ln() + (m - k) as f64 * (1.0 - p).ln()).exp()
}

/// Exact `P(Binomial(m, p) > threshold)` by direct summation.
pub fn binomial_tail_gt(m: u64, p: f64, threshold: f64) -> f64 {
    (0..=m)
        .filter(|&k| k as f64 > threshold)
        .map(|k| binomial_pmf(m, p, k))
        .sum()
}
