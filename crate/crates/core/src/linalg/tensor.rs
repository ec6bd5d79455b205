use super::CMatrix;
use crate::error::{Error, Result};

/// Kronecker product; row `(i, k)` of the result is `i * b.rows() + k`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = (b.rows(), b.cols());
    CMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// `(A ⊗ B) M` without materialising the Kronecker product.
///
/// Each column of `M` is read as a `dim_A × dim_B` array `X` and mapped to
/// `A X Bᵀ`.
pub fn kron_apply(a: &CMatrix, b: &CMatrix, m: &CMatrix) -> CMatrix {
    let (da, db) = (a.cols(), b.cols());
    assert!(a.is_square() && b.is_square(), "kron_apply expects square factors");
    assert_eq!(m.rows(), da * db, "kron_apply shape mismatch");
    let mut out = CMatrix::zeros(da * db, m.cols());
    let bt = CMatrix::from_fn(db, db, |i, j| b[(j, i)]);
    for col in 0..m.cols() {
        let x = CMatrix::from_fn(da, db, |i, j| m[(i * db + j, col)]);
        let y = &(a * &x) * &bt;
        for i in 0..da {
            for j in 0..db {
                out[(i * db + j, col)] = y[(i, j)];
            }
        }
    }
    out
}

/// Partial trace over the second factor of `C^d ⊗ C^k`.
pub fn partial_trace_second(m: &CMatrix, d: usize, k: usize) -> Result<CMatrix> {
    let n = m.ensure_square()?;
    if d == 0 || k == 0 || n != d * k {
        return Err(Error::DimensionMismatch {
            context: "partial_trace_second",
            expected: d * k,
            found: n,
        });
    }
    Ok(CMatrix::from_fn(d, d, |i, j| {
        (0..k).map(|b| m[(i * k + b, j * k + b)]).sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, kron_vec, ONE};
    use crate::random::{ginibre, random_state_matrix, seeded_rng};
    use num_complex::Complex64;

    #[test]
    fn identity_and_diagonal_products() {
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
        let a = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let b = CMatrix::from_real(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let expect = CMatrix::diag(&[0.0, 1.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0)));
        assert_eq!(kron(&a, &b), expect);
    }

    #[test]
    fn matches_four_index_loop() {
        let mut rng = seeded_rng(1);
        let a = ginibre(&mut rng, 2, 2);
        let b = ginibre(&mut rng, 2, 2);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 2 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_apply_matches_explicit_product() {
        let mut rng = seeded_rng(8);
        let a = ginibre(&mut rng, 3, 3);
        let b = ginibre(&mut rng, 2, 2);
        let m = ginibre(&mut rng, 6, 4);
        let explicit = &kron(&a, &b) * &m;
        assert!(kron_apply(&a, &b, &m).distance(&explicit) < 1e-12);
    }

    #[test]
    fn product_state_traces_to_first_factor() {
        let mut rng = seeded_rng(6);
        let rho = random_state_matrix(&mut rng, 2);
        let eta = random_state_matrix(&mut rng, 3);
        let out = partial_trace_second(&kron(&rho, &eta), 2, 3).unwrap();
        assert!(out.distance(&rho) < 1e-12);
    }

    #[test]
    fn maximally_entangled_gives_half_identity() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut phi = kron_vec(&basis_vector(2, 0), &basis_vector(2, 0));
        let other = kron_vec(&basis_vector(2, 1), &basis_vector(2, 1));
        for (x, y) in phi.iter_mut().zip(&other) {
            *x = (*x + y) * s;
        }
        let proj = CMatrix::outer(&phi, &phi);
        let out = partial_trace_second(&proj, 2, 2).unwrap();
        assert!(out.distance(&CMatrix::identity(2).scale_real(0.5)) < 1e-15);
        assert!((out.trace() - ONE).norm() < 1e-15);
    }

    #[test]
    fn matches_index_sum_oracle() {
        let mut rng = seeded_rng(12);
        let m = ginibre(&mut rng, 6, 6);
        let out = partial_trace_second(&m, 2, 3).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for b in 0..3 {
                    acc += m[(3 * i + b, 3 * j + b)];
                }
                assert!((out[(i, j)] - acc).norm() < 1e-15);
            }
        }
        assert!((out.trace() - m.trace()).norm() < 1e-12);
        assert!(partial_trace_second(&m, 4, 2).is_err());
    }
}
