use super::{basis_vector, inner, norm, CVector, Tolerance};
use crate::error::{Error, Result};

/// `‖G − I‖_F` for the Gram matrix `G_ij = ⟨v_i|v_j⟩`.
pub fn gram_residual(vectors: &[CVector]) -> f64 {
    let mut acc = 0.0;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            acc += (inner(u, v) - target).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Extends an orthonormal list to an orthonormal basis of `C^dim`.
///
/// The input vectors are kept verbatim as the leading entries. Missing vectors
/// come from orthogonalising the canonical basis vectors in index order (two
/// Gram–Schmidt passes), skipping any whose projected norm is below
/// `eps_rank`.
pub fn orthonormal_complete(partial: &[CVector], dim: usize, tol: Tolerance) -> Result<Vec<CVector>> {
    if partial.len() > dim {
        return Err(Error::TooManyVectors {
            count: partial.len(),
            dim,
        });
    }
    if let Some(bad) = partial.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            context: "orthonormal_complete",
            expected: dim,
            found: bad.len(),
        });
    }
    let residual = gram_residual(partial);
    if residual > tol.eps_residual {
        return Err(Error::NotOrthonormal {
            outcome: None,
            residual,
        });
    }

    let mut basis: Vec<CVector> = partial.to_vec();
    for index in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut w = basis_vector(dim, index);
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let n = norm(&w);
        if n < tol.eps_rank {
            continue;
        }
        w.iter_mut().for_each(|z| *z /= n);
        basis.push(w);
    }
    if basis.len() != dim {
        return Err(Error::Inconsistent(format!(
            "completion produced {} of {dim} vectors",
            basis.len()
        )));
    }
    Ok(basis)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_isometry, seeded_rng};

    #[test]
    fn completes_single_vector() {
        let out = orthonormal_complete(&[basis_vector(2, 0)], 2, Tolerance::default()).unwrap();
        assert_eq!(out, vec![basis_vector(2, 0), basis_vector(2, 1)]);
    }

    #[test]
    fn empty_input_gives_canonical_basis() {
        let out = orthonormal_complete(&[], 3, Tolerance::default()).unwrap();
        assert_eq!(out, (0..3).map(|i| basis_vector(3, i)).collect::<Vec<_>>());
    }

    #[test]
    fn random_isometry_columns() {
        let mut rng = seeded_rng(21);
        let y = random_isometry(&mut rng, 5, 2);
        let cols = y.columns();
        let out = orthonormal_complete(&cols, 5, Tolerance::default()).unwrap();
        assert_eq!(out.len(), 5);
        assert_eq!(&out[..2], &cols[..]);
        assert!(gram_residual(&out) <= 1e-9);
    }

    #[test]
    fn error_paths() {
        let tol = Tolerance::default();
        let v = basis_vector(2, 0);
        assert!(matches!(
            orthonormal_complete(&[v.clone(), v.clone()], 2, tol),
            Err(Error::NotOrthonormal { .. })
        ));
        assert!(matches!(
            orthonormal_complete(&[v.clone(), basis_vector(2, 1), v], 2, tol),
            Err(Error::TooManyVectors { .. })
        ));
    }
}
