//! Cyclic Jacobi eigensolver for dense Hermitian matrices.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::{CMatrix, CVector, Tolerance, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this (relative to the spectral scale) are treated
/// as one degenerate cluster when ordering eigenvectors.
const CLUSTER_RTOL: f64 = 1e-12;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<CVector>,
}

impl EigenDecomposition {
    /// Eigenvectors as the columns of a unitary matrix.
    pub fn vectors_matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.eigenvectors)
    }

    /// `V f(Λ) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut out = CMatrix::zeros(n, n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lambda);
            if w == 0.0 {
                continue;
            }
            out += &CMatrix::outer(v, v).scale_real(w);
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Rotation `J = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]]` that diagonalises the
/// Hermitian 2×2 block `[[alpha, gamma], [conj(gamma), beta]]` via `J* H J`.
///
/// Returns `(c, s, e^{iφ}, t)` where `t = s / c`.
pub(super) fn jacobi_rotation(alpha: f64, beta: f64, gamma: Complex64) -> (f64, f64, Complex64, f64) {
    let g = gamma.norm();
    let phase = gamma / g;
    let tau = (beta - alpha) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase, t)
}

/// Hermitian eigendecomposition `A = V Λ V*`.
///
/// Eigenvalues come out in descending order. Each eigenvector is rotated so
/// that its first entry of largest modulus is real and non-negative, and
/// eigenvectors inside a degenerate cluster are ordered by descending
/// lexicographic comparison of their entries (real part, then imaginary part).
pub fn hermitian_eigendecompose(a: &CMatrix, tol: Tolerance) -> Result<EigenDecomposition> {
    let n = a.ensure_square()?;
    let scale = a.frobenius_norm();
    let residual = a.hermiticity_residual();
    if residual > tol.eps_residual * (1.0 + scale) {
        return Err(Error::NotHermitian { residual });
    }

    // Work on the Hermitian part so the rotations see an exactly symmetric input.
    let mut m = CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let gamma = m[(p, q)];
                if gamma == ZERO {
                    continue;
                }
                let alpha = m[(p, p)].re;
                let beta = m[(q, q)].re;
                let (c, s, phase, t) = jacobi_rotation(alpha, beta, gamma);
                let g = gamma.norm();
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m[(r, p)];
                    let arq = m[(r, q)];
                    let new_rp = arp * c - arq * phase.conj() * s;
                    let new_rq = arp * phase * s + arq * c;
                    m[(r, p)] = new_rp;
                    m[(p, r)] = new_rp.conj();
                    m[(r, q)] = new_rq;
                    m[(q, r)] = new_rq.conj();
                }
                m[(p, p)] = Complex64::new(alpha - t * g, 0.0);
                m[(q, q)] = Complex64::new(beta + t * g, 0.0);
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * c - vrq * phase.conj() * s;
                    v[(r, q)] = vrp * phase * s + vrq * c;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|j| (m[(j, j)].re, fix_phase(v.column(j))))
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    // Canonical order inside degenerate clusters; the cluster keeps its sorted
    // eigenvalue sequence so the spectrum stays exactly descending.
    let spread = pairs.first().map_or(0.0, |p| p.0.abs()).max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end - 1].0 - pairs[end].0 <= CLUSTER_RTOL * spread {
            end += 1;
        }
        if end - start > 1 {
            let values: Vec<f64> = pairs[start..end].iter().map(|p| p.0).collect();
            pairs[start..end].sort_by(|x, y| lex_descending(&x.1, &y.1));
            for (p, value) in pairs[start..end].iter_mut().zip(values) {
                p.0 = value;
            }
        }
        start = end;
    }

    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Positive square root of a positive semidefinite matrix; negative
/// eigenvalues from round-off are clamped to zero.
pub fn psd_sqrt(a: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    let eig = hermitian_eigendecompose(a, tol)?;
    Ok(eig.reconstruct_with(|x| x.max(0.0).sqrt()))
}

fn fix_phase(mut v: CVector) -> CVector {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v;
    }
    let idx = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .expect("pivot exists");
    let pivot = v[idx];
    let rot = pivot.conj() / pivot.norm();
    for z in &mut v {
        *z *= rot;
    }
    v[idx] = Complex64::new(pivot.norm(), 0.0);
    v
}

fn lex_descending(x: &[Complex64], y: &[Complex64]) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        let ord = b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}
