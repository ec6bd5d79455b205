//! Discrete POVMs: validation, rank-one effect decomposition with
//! bi-orthogonal duals, classification and minimal Naimark dilation.

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, hermitian_eigendecompose, inner, numerical_rank, sum_matrices, CMatrix, CVector,
    Tolerance,
};

/// Positive effects `M_1..M_N` on `C^dim` summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePOVM {
    dim: usize,
    effects: Vec<CMatrix>,
}

impl DiscretePOVM {
    pub fn new(effects: Vec<CMatrix>, tol: Tolerance) -> Result<Self> {
        validate_povm(effects, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    pub fn effect(&self, i: usize) -> &CMatrix {
        &self.effects[i]
    }
}

/// Checks positivity, normalisation and non-vanishing of every effect.
pub fn validate_povm(effects: Vec<CMatrix>, tol: Tolerance) -> Result<DiscretePOVM> {
    let first = effects.first().ok_or(Error::EmptyObservable)?;
    let dim = first.ensure_square()?;
    for m in &effects {
        let n = m.ensure_square()?;
        if n != dim {
            return Err(Error::DimensionMismatch {
                context: "effect",
                expected: dim,
                found: n,
            });
        }
    }
    for (i, m) in effects.iter().enumerate() {
        if m.frobenius_norm() <= tol.eps_rank {
            return Err(Error::ZeroEffect { outcome: i });
        }
        let eig = hermitian_eigendecompose(m, tol)?;
        let min = *eig.eigenvalues.last().expect("non-empty spectrum");
        if min < -tol.eps_residual {
            return Err(Error::NotPositive {
                outcome: i,
                min_eigenvalue: min,
            });
        }
    }
    let deficit = &CMatrix::identity(dim) - &sum_matrices(&effects, dim, dim);
    let residual = deficit.frobenius_norm();
    if residual > tol.eps_residual {
        return Err(Error::NotNormalized { residual, deficit });
    }
    Ok(DiscretePOVM { dim, effects })
}

/// Rank-one pieces of a single effect `M_i = Σ_k |d_k⟩⟨d_k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDecomposition {
    /// Non-zero eigenvalues `λ_k`, descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors `ψ_k`.
    pub eigenvectors: Vec<CVector>,
    /// `d_k = √λ_k ψ_k`.
    pub vectors: Vec<CVector>,
    /// Duals `g_k = ψ_k / √λ_k`, so that `⟨d_k|g_l⟩ = δ_kl`.
    pub duals: Vec<CVector>,
}

impl OutcomeDecomposition {
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ_k |d_k⟩⟨d_k|`.
    pub fn reconstruct(&self, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for d in &self.vectors {
            m += &CMatrix::outer(d, d);
        }
        m
    }

    /// `‖[⟨d_k|g_l⟩] − I‖_F`.
    pub fn biorthogonality_residual(&self) -> f64 {
        let mut acc = 0.0;
        for (k, d) in self.vectors.iter().enumerate() {
            for (l, g) in self.duals.iter().enumerate() {
                let target = if k == l { 1.0 } else { 0.0 };
                acc += (inner(d, g) - target).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectDecomposition {
    pub dim: usize,
    pub outcomes: Vec<OutcomeDecomposition>,
}

impl EffectDecomposition {
    /// Multiplicities `m_i`.
    pub fn ranks(&self) -> Vec<usize> {
        self.outcomes.iter().map(OutcomeDecomposition::rank).collect()
    }

    pub fn total_rank(&self) -> usize {
        self.outcomes.iter().map(OutcomeDecomposition::rank).sum()
    }
}

/// Eigen-route decomposition of every effect. Eigenvalues at or below
/// `eps_rank · λ_max` of that effect are dropped, which fixes the ranks `m_i`.
pub fn decompose_effects(povm: &DiscretePOVM, tol: Tolerance) -> Result<EffectDecomposition> {
    let outcomes = povm
        .effects
        .iter()
        .map(|m| decompose_effect(m, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(EffectDecomposition {
        dim: povm.dim,
        outcomes,
    })
}

pub(crate) fn decompose_effect(m: &CMatrix, tol: Tolerance) -> Result<OutcomeDecomposition> {
    let eig = hermitian_eigendecompose(m, tol)?;
    let lambda_max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let mut out = OutcomeDecomposition {
        eigenvalues: Vec::new(),
        eigenvectors: Vec::new(),
        vectors: Vec::new(),
        duals: Vec::new(),
    };
    for (lambda, psi) in eig.eigenvalues.into_iter().zip(eig.eigenvectors) {
        if lambda <= tol.eps_rank * lambda_max || lambda <= 0.0 {
            continue;
        }
        let root = lambda.sqrt();
        out.vectors.push(psi.iter().map(|z| z * root).collect());
        out.duals.push(psi.iter().map(|z| z / root).collect());
        out.eigenvectors.push(psi);
        out.eigenvalues.push(lambda);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PovmClass {
    pub is_sharp: bool,
    /// `Some(p)` when every effect is `p_i · I`.
    pub trivial_probabilities: Option<Vec<f64>>,
    pub rank_vector: Vec<usize>,
    pub is_rank1: bool,
}

impl PovmClass {
    pub fn is_trivial(&self) -> bool {
        self.trivial_probabilities.is_some()
    }
}

pub fn classify(povm: &DiscretePOVM, tol: Tolerance) -> Result<PovmClass> {
    let rank_vector = decompose_effects(povm, tol)?.ranks();
    let is_sharp = povm
        .effects
        .iter()
        .all(|m| (&(m * m) - m).frobenius_norm() <= tol.eps_residual);
    let probabilities: Vec<f64> = povm
        .effects
        .iter()
        .map(|m| m.trace().re / povm.dim as f64)
        .collect();
    let is_trivial = povm.effects.iter().zip(&probabilities).all(|(m, &p)| {
        m.distance(&CMatrix::identity(povm.dim).scale_real(p)) <= tol.eps_residual
    });
    Ok(PovmClass {
        is_sharp,
        trivial_probabilities: is_trivial.then_some(probabilities),
        is_rank1: rank_vector.iter().all(|&m| m == 1),
        rank_vector,
    })
}

/// Isometry `J: C^dim → C^aux_dim` with a projective measurement `P` such
/// that `J* P_i J = M_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct NaimarkDilation {
    pub aux_dim: usize,
    pub j: CMatrix,
    pub projections: Vec<CMatrix>,
    /// Auxiliary basis indices belonging to each outcome.
    pub labels: Vec<Range<usize>>,
    pub is_unitary: bool,
}

impl NaimarkDilation {
    /// `max_i ‖J* P_i J − M_i‖_F`.
    pub fn max_residual(&self, povm: &DiscretePOVM) -> f64 {
        let jt = self.j.adjoint();
        self.projections
            .iter()
            .zip(povm.effects())
            .map(|(p, m)| (&(&jt * p) * &self.j).distance(m))
            .fold(0.0, f64::max)
    }
}

/// Minimal Naimark dilation `Jψ = Σ_{i,k} ⟨d_ik|ψ⟩ e_ik` with the auxiliary
/// basis ordered by outcome, then by eigenvalue index.
pub fn naimark_dilate(povm: &DiscretePOVM, tol: Tolerance) -> Result<NaimarkDilation> {
    let dec = decompose_effects(povm, tol)?;
    let aux_dim = dec.total_rank();
    let dim = povm.dim;

    let mut j = CMatrix::zeros(aux_dim, dim);
    let mut labels = Vec::with_capacity(dec.outcomes.len());
    let mut row = 0;
    for outcome in &dec.outcomes {
        let start = row;
        for d in &outcome.vectors {
            for (n, z) in d.iter().enumerate() {
                j[(row, n)] = z.conj();
            }
            row += 1;
        }
        labels.push(start..row);
    }
    let projections: Vec<CMatrix> = labels
        .iter()
        .map(|r| CMatrix::basis_projection(aux_dim, r.clone()))
        .collect();

    let isometry = j.isometry_residual();
    if isometry > tol.scaled(dim) {
        return Err(Error::NotIsometry { residual: isometry });
    }

    // Minimality: the vectors P_i J h_l span the whole auxiliary space.
    let mut spanning = Vec::with_capacity(projections.len() * dim);
    for p in &projections {
        let pj = p * &j;
        spanning.extend(pj.columns());
    }
    let span_rank = numerical_rank(&CMatrix::from_columns(&spanning), tol);
    if span_rank != aux_dim {
        return Err(Error::Inconsistent(format!(
            "Naimark dilation spans {span_rank} of {aux_dim} dimensions"
        )));
    }

    let is_unitary = aux_dim == dim
        && (&j * &j.adjoint()).distance(&CMatrix::identity(aux_dim)) <= tol.scaled(dim);
    let sharp = classify(povm, tol)?.is_sharp;
    if sharp != is_unitary {
        return Err(Error::Inconsistent(format!(
            "sharp = {sharp} but J unitary = {is_unitary}"
        )));
    }

    Ok(NaimarkDilation {
        aux_dim,
        j,
        projections,
        labels,
        is_unitary,
    })
}

/// Computational-basis measurement on `C^dim`.
pub fn computational_basis_povm(dim: usize) -> DiscretePOVM {
    let effects = (0..dim)
        .map(|i| CMatrix::outer(&basis_vector(dim, i), &basis_vector(dim, i)))
        .collect();
    DiscretePOVM { dim, effects }
}

/// Trivial observable `M_i = p_i · I`.
pub fn trivial_povm(dim: usize, probabilities: &[f64], tol: Tolerance) -> Result<DiscretePOVM> {
    let effects = probabilities
        .iter()
        .map(|&p| CMatrix::identity(dim).scale(Complex64::new(p, 0.0)))
        .collect();
    validate_povm(effects, tol)
}
