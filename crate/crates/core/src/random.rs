//! Seeded random fixtures: Ginibre matrices, Haar isometries, random states,
//! observables and instruments.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::instruments::DiscreteInstrument;
use crate::linalg::{hermitian_eigendecompose, inner, norm, CMatrix, CVector, Tolerance};
use crate::observables::DiscretePOVM;

pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Entries i.i.d. complex Gaussian with `E|z|² = 1`.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Haar-distributed isometry `C^cols → C^rows`, `cols ≤ rows`.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    loop {
        let mut basis: Vec<CVector> = Vec::with_capacity(cols);
        for mut v in ginibre(rng, rows, cols).columns() {
            for _ in 0..2 {
                for b in &basis {
                    let c = inner(b, &v);
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let n = norm(&v);
            if n < 1e-6 {
                break;
            }
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
        if basis.len() == cols {
            return CMatrix::from_columns(&basis);
        }
    }
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    random_isometry(rng, dim, dim)
}

/// Unit vector drawn uniformly from the sphere.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    random_isometry(rng, dim, 1).column(0)
}

/// Full-rank density matrix `G G* / tr(G G*)`.
pub fn random_state_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim);
    let p = &g * &g.adjoint();
    let t = p.trace().re;
    p.scale_real(1.0 / t)
}

fn inverse_sqrt(s: &CMatrix) -> CMatrix {
    hermitian_eigendecompose(s, Tolerance::default())
        .expect("positive definite normaliser")
        .reconstruct_with(|x| 1.0 / x.sqrt())
}

/// POVM with `M_i = S^{-1/2} G_i G_i* S^{-1/2}`, `G_i` of shape `dim × ranks[i]`.
/// Requires `Σ ranks ≥ dim` and every rank in `1..=dim`.
pub fn random_povm_with_ranks<R: Rng + ?Sized>(rng: &mut R, dim: usize, ranks: &[usize]) -> DiscretePOVM {
    assert!(ranks.iter().sum::<usize>() >= dim, "ranks too small to resolve the identity");
    let raw: Vec<CMatrix> = ranks
        .iter()
        .map(|&r| {
            let g = ginibre(rng, dim, r);
            &g * &g.adjoint()
        })
        .collect();
    let mut total = CMatrix::zeros(dim, dim);
    raw.iter().for_each(|m| total += m);
    let n = inverse_sqrt(&total);
    let effects = raw.iter().map(|m| &(&n * m) * &n).collect();
    DiscretePOVM::new(effects, Tolerance::default()).expect("normalised random POVM")
}

/// Full-rank effects.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> DiscretePOVM {
    random_povm_with_ranks(rng, dim, &vec![dim; outcomes])
}

/// Projections onto disjoint blocks of columns of a Haar unitary.
/// Requires `1 ≤ outcomes ≤ dim`.
pub fn random_sharp_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> DiscretePOVM {
    assert!(outcomes >= 1 && outcomes <= dim, "need 1 <= outcomes <= dim");
    let cols = random_unitary(rng, dim).columns();
    let mut effects = Vec::with_capacity(outcomes);
    let mut start = 0;
    for i in 0..outcomes {
        let size = dim / outcomes + usize::from(i < dim % outcomes);
        let mut p = CMatrix::zeros(dim, dim);
        for c in &cols[start..start + size] {
            p += &CMatrix::outer(c, c);
        }
        start += size;
        effects.push(p);
    }
    DiscretePOVM::new(effects, Tolerance::default()).expect("sharp random POVM")
}

/// Instrument with `kraus_counts[i]` operators for outcome `i`, normalised as
/// `A = G S^{-1/2}` with `S = Σ G*G`.
pub fn random_instrument<R: Rng + ?Sized>(rng: &mut R, dim: usize, kraus_counts: &[usize]) -> DiscreteInstrument {
    let raw: Vec<Vec<CMatrix>> = kraus_counts
        .iter()
        .map(|&r| (0..r).map(|_| ginibre(rng, dim, dim)).collect())
        .collect();
    let mut total = CMatrix::zeros(dim, dim);
    for g in raw.iter().flatten() {
        total += &(&g.adjoint() * g);
    }
    let n = inverse_sqrt(&total);
    let ops = raw
        .into_iter()
        .map(|list| list.iter().map(|g| g * &n).collect())
        .collect();
    DiscreteInstrument::from_ops(ops, Tolerance::default()).expect("normalised random instrument")
}
