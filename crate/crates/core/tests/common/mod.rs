//! Independent numerical oracles backed by nalgebra.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qdilate::instruments::KrausList;
use qdilate::CMatrix;

pub fn to_na(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = to_na(m).singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Rank at the relative cutoff `rel`.
pub fn rank(m: &CMatrix, rel: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel * top).count()
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = to_na(m).symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Rank of `Σ_s vec(A_s) vec(A_s)*`, built from scratch.
pub fn choi_rank(ops: &[CMatrix]) -> usize {
    let d = ops[0].rows();
    let mut c = DMatrix::<Complex64>::zeros(d * d, d * d);
    for a in ops {
        let v = DMatrix::from_fn(d * d, 1, |r, _| a[(r / d, r % d)]);
        c += &v * v.adjoint();
    }
    let mut sv: Vec<f64> = c.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv[0];
    sv.iter().filter(|&&s| s > 1e-8 * top).count()
}

pub fn kraus_choi_rank(list: &KrausList) -> usize {
    choi_rank(list.ops())
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
