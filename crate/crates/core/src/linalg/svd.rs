//! Singular values by one-sided (Hestenes) Jacobi.
//!
//! One-sided Jacobi keeps small singular values accurate to round-off of the
//! largest one, which is what rank decisions at a relative cutoff need. Going
//! through `A*A` instead would square the condition number.

use num_complex::Complex64;

use super::eigen::jacobi_rotation;
use super::{inner, CMatrix, Tolerance, ZERO};

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    // Orthogonalise whichever side has fewer vectors.
    let work = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    let mut cols: Vec<Vec<Complex64>> = work.columns();
    let n = cols.len();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = inner(&cols[p], &cols[q]);
                if gamma == ZERO || gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, phase, _) = jacobi_rotation(alpha, beta, gamma);
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let xp = *x;
                    let yq = *y;
                    *x = xp * c - yq * phase.conj() * s;
                    *y = xp * phase * s + yq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values above `eps_rank` times the largest one.
pub fn numerical_rank(a: &CMatrix, tol: Tolerance) -> usize {
    let sv = singular_values(a);
    let largest = sv.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.eps_rank * largest).count()
}

/// Spectral norm (largest singular value).
pub fn operator_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}
