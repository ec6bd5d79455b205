//! Discrete instruments in Kraus form.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{gram_residual, hermitian_eigendecompose, inner, CMatrix, CVector, Tolerance};
use crate::observables::{decompose_effects, validate_povm, DiscretePOVM, EffectDecomposition};

/// Kraus operators `A_1..A_r` of one completely positive map on `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausList(Vec<CMatrix>);

impl KrausList {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops.first().ok_or(Error::AllZero)?;
        let dim = first.ensure_square()?;
        for a in &ops {
            let n = a.ensure_square()?;
            if n != dim {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator",
                    expected: dim,
                    found: n,
                });
            }
        }
        Ok(Self(ops))
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.0
    }

    pub fn into_ops(self) -> Vec<CMatrix> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0[0].rows()
    }

    /// Schrödinger picture: `Σ_s A_s T A_s*`.
    pub fn apply(&self, t: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for a in &self.0 {
            out += &(&(a * t) * &a.adjoint());
        }
        out
    }

    /// Heisenberg picture: `Σ_s A_s* B A_s`.
    pub fn apply_dual(&self, b: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for a in &self.0 {
            out += &(&(&a.adjoint() * b) * a);
        }
        out
    }

    /// `Σ_s A_s* A_s`.
    pub fn effect(&self) -> CMatrix {
        self.apply_dual(&CMatrix::identity(self.dim()))
    }

    /// Choi-type matrix `Σ_s vec(A_s) vec(A_s)*` on `C^{d²}`.
    pub fn choi(&self) -> CMatrix {
        let n = self.dim() * self.dim();
        let mut c = CMatrix::zeros(n, n);
        for a in &self.0 {
            let v = a.vectorize();
            c += &CMatrix::outer(&v, &v);
        }
        c
    }
}

/// Outcome-indexed Kraus lists whose total map is trace preserving.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteInstrument {
    dim: usize,
    outcomes: Vec<KrausList>,
}

impl DiscreteInstrument {
    pub fn new(outcomes: Vec<KrausList>, tol: Tolerance) -> Result<Self> {
        let dim = outcomes.first().ok_or(Error::EmptyInstrument)?.dim();
        for list in &outcomes {
            if list.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "instrument outcome",
                    expected: dim,
                    found: list.dim(),
                });
            }
        }
        for (i, list) in outcomes.iter().enumerate() {
            if list.ops().iter().all(|a| a.frobenius_norm() <= tol.eps_rank) {
                return Err(Error::ZeroOutcome { outcome: i });
            }
        }
        let mut total = CMatrix::zeros(dim, dim);
        for list in &outcomes {
            total += &list.effect();
        }
        let residual = total.distance(&CMatrix::identity(dim));
        if residual > tol.eps_residual {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(Self { dim, outcomes })
    }

    /// Convenience constructor from raw operator lists.
    pub fn from_ops(outcomes: Vec<Vec<CMatrix>>, tol: Tolerance) -> Result<Self> {
        let lists = outcomes.into_iter().map(KrausList::new).collect::<Result<Vec<_>>>()?;
        Self::new(lists, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcomes(&self) -> &[KrausList] {
        &self.outcomes
    }

    pub fn outcome(&self, i: usize) -> &KrausList {
        &self.outcomes[i]
    }

    /// The same instrument with every outcome in minimal Kraus form.
    pub fn minimized(&self, tol: Tolerance) -> Result<Self> {
        let outcomes = self
            .outcomes
            .iter()
            .map(|k| minimize_kraus(k, tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim: self.dim,
            outcomes,
        })
    }

    fn check_outcomes(&self, set: &[usize]) -> Result<BTreeSet<usize>> {
        let set: BTreeSet<usize> = set.iter().copied().collect();
        if let Some(&bad) = set.iter().find(|&&i| i >= self.outcomes.len()) {
            return Err(Error::OutcomeOutOfRange {
                outcome: bad,
                count: self.outcomes.len(),
            });
        }
        Ok(set)
    }

    /// Schrödinger picture `Σ_{i∈set} I_i(T)`.
    pub fn apply_schrodinger(&self, outcome_set: &[usize], t: &CMatrix) -> Result<CMatrix> {
        self.check_square_operand(t)?;
        let set = self.check_outcomes(outcome_set)?;
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for i in set {
            out += &self.outcomes[i].apply(t);
        }
        Ok(out)
    }

    fn check_square_operand(&self, b: &CMatrix) -> Result<()> {
        let n = b.ensure_square()?;
        if n != self.dim {
            return Err(Error::DimensionMismatch {
                context: "operand",
                expected: self.dim,
                found: n,
            });
        }
        Ok(())
    }
}

/// Heisenberg picture `Σ_{i∈set} Σ_s A_is* B A_is`. Repeated outcome indices
/// count once.
pub fn apply_heisenberg(instr: &DiscreteInstrument, outcome_set: &[usize], b: &CMatrix) -> Result<CMatrix> {
    instr.check_square_operand(b)?;
    let set = instr.check_outcomes(outcome_set)?;
    let mut out = CMatrix::zeros(instr.dim, instr.dim);
    for i in set {
        out += &instr.outcomes[i].apply_dual(b);
    }
    Ok(out)
}

/// `M_i = Σ_s A_is* A_is`.
pub fn associated_observable(instr: &DiscreteInstrument, tol: Tolerance) -> Result<DiscretePOVM> {
    validate_povm(instr.outcomes.iter().map(KrausList::effect).collect(), tol)
}

/// All Kraus operators of all outcomes, in outcome order.
pub fn induced_channel(instr: &DiscreteInstrument) -> KrausList {
    KrausList(instr.outcomes.iter().flat_map(|k| k.0.iter().cloned()).collect())
}

/// Minimal Kraus form from the Gram matrix `G_st = tr(A_s* A_t)`.
///
/// For each eigenpair `(γ_t, v_t)` of `G` above the rank cutoff the output
/// carries `B_t = Σ_s (v_t)_s A_s`. Then `Σ_t vec(B_t) vec(B_t)*` equals the
/// Choi-type matrix of the input, so the map is unchanged, and the `B_t` are
/// mutually Hilbert–Schmidt orthogonal with `tr(B_t* B_t) = γ_t`.
pub fn minimize_kraus(ops: &KrausList, tol: Tolerance) -> Result<KrausList> {
    let r = ops.len();
    let gram = CMatrix::from_fn(r, r, |s, t| ops.0[s].hs_inner(&ops.0[t]));
    let eig = hermitian_eigendecompose(&gram, tol)?;
    let gamma_max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if gamma_max <= 0.0 {
        return Err(Error::AllZero);
    }
    let dim = ops.dim();
    let out: Vec<CMatrix> = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(g, _)| **g > tol.eps_rank * gamma_max)
        .map(|(_, v)| {
            let mut b = CMatrix::zeros(dim, dim);
            for (coeff, a) in v.iter().zip(&ops.0) {
                b += &a.scale(*coeff);
            }
            b
        })
        .collect();
    if out.is_empty() {
        return Err(Error::AllZero);
    }
    Ok(KrausList(out))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrausRankVector {
    pub ranks: Vec<usize>,
    pub total: usize,
}

pub fn kraus_rank_vector(instr: &DiscreteInstrument, tol: Tolerance) -> Result<KrausRankVector> {
    let ranks = instr
        .outcomes
        .iter()
        .map(|k| minimize_kraus(k, tol).map(|m| m.len()))
        .collect::<Result<Vec<_>>>()?;
    let multiplicities = decompose_effects(&associated_observable(instr, tol)?, tol)?.ranks();
    for (i, (&r, &m)) in ranks.iter().zip(&multiplicities).enumerate() {
        if r == 0 || r > m * instr.dim {
            return Err(Error::Inconsistent(format!(
                "outcome {i}: Kraus rank {r} outside 1..={}",
                m * instr.dim
            )));
        }
    }
    Ok(KrausRankVector {
        total: ranks.iter().sum(),
        ranks,
    })
}

/// Structure vectors `φ_iks = A_is g_ik`, indexed `[i][k][s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureVectors {
    pub vectors: Vec<Vec<Vec<CVector>>>,
}

pub fn structure_vectors(
    instr: &DiscreteInstrument,
    dec: &EffectDecomposition,
    tol: Tolerance,
) -> Result<StructureVectors> {
    if dec.outcomes.len() != instr.num_outcomes() {
        return Err(Error::DimensionMismatch {
            context: "structure vectors: outcome count",
            expected: instr.num_outcomes(),
            found: dec.outcomes.len(),
        });
    }
    if dec.dim != instr.dim {
        return Err(Error::DimensionMismatch {
            context: "structure vectors: dimension",
            expected: instr.dim,
            found: dec.dim,
        });
    }
    let mut vectors = Vec::with_capacity(instr.num_outcomes());
    for (i, (list, outcome)) in instr.outcomes.iter().zip(&dec.outcomes).enumerate() {
        let phi: Vec<Vec<CVector>> = outcome
            .duals
            .iter()
            .map(|g| list.ops().iter().map(|a| a.mul_vec(g)).collect())
            .collect();

        // Σ_s ⟨φ_iks|φ_ils⟩ = δ_kl
        let m = outcome.rank();
        let mut ortho = 0.0;
        for k in 0..m {
            for l in 0..m {
                let g: Complex64 = (0..list.len()).map(|s| inner(&phi[k][s], &phi[l][s])).sum();
                let target = if k == l { 1.0 } else { 0.0 };
                ortho += (g - target).norm_sqr();
            }
        }
        let ortho = ortho.sqrt();
        if ortho > tol.eps_residual {
            return Err(Error::NotOrthonormal {
                outcome: Some(i),
                residual: ortho,
            });
        }

        // A_is = Σ_k |φ_iks⟩⟨d_ik|
        for (s, a) in list.ops().iter().enumerate() {
            let mut rebuilt = CMatrix::zeros(instr.dim, instr.dim);
            for (phi_k, d_k) in phi.iter().zip(&outcome.vectors) {
                rebuilt += &CMatrix::outer(&phi_k[s], d_k);
            }
            let residual = rebuilt.distance(a);
            if residual > tol.eps_residual {
                return Err(Error::ReconstructionFailed {
                    outcome: i,
                    residual,
                });
            }
        }
        vectors.push(phi);
    }
    Ok(StructureVectors { vectors })
}

/// Lüders instrument: one Kraus operator `√M_i` per outcome.
pub fn luders_instrument(povm: &DiscretePOVM, tol: Tolerance) -> Result<DiscreteInstrument> {
    let dec = decompose_effects(povm, tol)?;
    let dim = povm.dim();
    let outcomes = dec
        .outcomes
        .iter()
        .map(|o| {
            let mut a = CMatrix::zeros(dim, dim);
            for (lambda, psi) in o.eigenvalues.iter().zip(&o.eigenvectors) {
                a += &CMatrix::outer(psi, psi).scale_real(lambda.sqrt());
            }
            KrausList::new(vec![a])
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteInstrument::new(outcomes, tol)
}

/// Rank-one instrument `A_i = Σ_k |φ_ik⟩⟨d_ik|` for caller-chosen orthonormal
/// structure vectors.
pub fn rank1_instrument_with_vectors(
    povm: &DiscretePOVM,
    phi: &[Vec<CVector>],
    tol: Tolerance,
) -> Result<DiscreteInstrument> {
    let dec = decompose_effects(povm, tol)?;
    if phi.len() != dec.outcomes.len() {
        return Err(Error::DimensionMismatch {
            context: "structure vectors: outcome count",
            expected: dec.outcomes.len(),
            found: phi.len(),
        });
    }
    let dim = povm.dim();
    let mut outcomes = Vec::with_capacity(phi.len());
    for (i, (vectors, outcome)) in phi.iter().zip(&dec.outcomes).enumerate() {
        if vectors.len() != outcome.rank() {
            return Err(Error::CountMismatch {
                outcome: i,
                expected: outcome.rank(),
                found: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                context: "structure vector",
                expected: dim,
                found: v.len(),
            });
        }
        let residual = gram_residual(vectors);
        if residual > tol.eps_residual {
            return Err(Error::NotOrthonormal {
                outcome: Some(i),
                residual,
            });
        }
        let mut a = CMatrix::zeros(dim, dim);
        for (f, d) in vectors.iter().zip(&outcome.vectors) {
            a += &CMatrix::outer(f, d);
        }
        outcomes.push(KrausList::new(vec![a])?);
    }
    DiscreteInstrument::new(outcomes, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceReport {
    /// The induced channel has Kraus rank above one.
    NotApplicable { channel_rank: usize },
    /// Isometric channel: the observable is `p_i · I`.
    TrivialObservable {
        probabilities: Vec<f64>,
        max_residual: f64,
    },
}

/// An instrument whose total channel has a single Kraus operator can only
/// measure a trivial observable. Returns the recovered probabilities, or
/// [`DisturbanceReport::NotApplicable`] when the channel rank exceeds one.
pub fn check_no_info_without_disturbance(instr: &DiscreteInstrument, tol: Tolerance) -> Result<DisturbanceReport> {
    let channel_rank = minimize_kraus(&induced_channel(instr), tol)?.len();
    if channel_rank != 1 {
        return Ok(DisturbanceReport::NotApplicable { channel_rank });
    }
    let povm = associated_observable(instr, tol)?;
    let d = instr.dim;
    let probabilities: Vec<f64> = povm.effects().iter().map(|m| m.trace().re / d as f64).collect();
    let max_residual = povm
        .effects()
        .iter()
        .zip(&probabilities)
        .map(|(m, &p)| m.distance(&CMatrix::identity(d).scale_real(p)))
        .fold(0.0, f64::max);
    if max_residual > tol.eps_residual {
        return Err(Error::TheoremViolation {
            residual: max_residual,
        });
    }
    Ok(DisturbanceReport::TrivialObservable {
        probabilities,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, numerical_rank};
    use crate::observables::{computational_basis_povm, trivial_povm};
    use crate::random::{ginibre, random_instrument, random_isometry, random_povm, random_unitary, seeded_rng};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn z_luders() -> DiscreteInstrument {
        luders_instrument(&computational_basis_povm(2), tol()).unwrap()
    }

    fn coin_instrument() -> DiscreteInstrument {
        let a = CMatrix::identity(2).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        DiscreteInstrument::from_ops(vec![vec![a.clone()], vec![a]], tol()).unwrap()
    }

    #[test]
    fn constructor_errors() {
        assert!(matches!(
            DiscreteInstrument::from_ops(vec![vec![CMatrix::identity(2).scale_real(0.5)]], tol()),
            Err(Error::NotTracePreserving { .. })
        ));
        assert!(matches!(
            DiscreteInstrument::from_ops(vec![vec![CMatrix::identity(2)], vec![CMatrix::zeros(2, 2)]], tol()),
            Err(Error::ZeroOutcome { outcome: 1 })
        ));
        assert!(matches!(DiscreteInstrument::new(vec![], tol()), Err(Error::EmptyInstrument)));
    }

    #[test]
    fn heisenberg_unitality_and_conjugation() {
        let mut rng = seeded_rng(3);
        let instr = random_instrument(&mut rng, 3, &[2, 1]);
        let id = apply_heisenberg(&instr, &[0, 1], &CMatrix::identity(3)).unwrap();
        assert!(id.distance(&CMatrix::identity(3)) <= 1e-9);

        let u0 = random_unitary(&mut rng, 3);
        let single = DiscreteInstrument::from_ops(vec![vec![u0.clone()]], tol()).unwrap();
        let b = ginibre(&mut rng, 3, 3);
        let out = apply_heisenberg(&single, &[0], &b).unwrap();
        assert!(out.distance(&(&(&u0.adjoint() * &b) * &u0)) < 1e-12);

        assert!(matches!(
            apply_heisenberg(&instr, &[2], &b),
            Err(Error::OutcomeOutOfRange { .. })
        ));
        assert!(matches!(
            apply_heisenberg(&instr, &[0], &CMatrix::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn heisenberg_schrodinger_duality() {
        let mut rng = seeded_rng(4);
        for _ in 0..5 {
            let instr = random_instrument(&mut rng, 3, &[2, 3]);
            let b = ginibre(&mut rng, 3, 3);
            let t = ginibre(&mut rng, 3, 3);
            for set in [vec![0], vec![1], vec![0, 1]] {
                let lhs = (&apply_heisenberg(&instr, &set, &b).unwrap() * &t).trace();
                let rhs = (&b * &instr.apply_schrodinger(&set, &t).unwrap()).trace();
                assert!((lhs - rhs).norm() < 1e-12);
            }
            // additivity over disjoint sets
            let whole = apply_heisenberg(&instr, &[0, 1], &b).unwrap();
            let split = &apply_heisenberg(&instr, &[0], &b).unwrap() + &apply_heisenberg(&instr, &[1], &b).unwrap();
            assert!(whole.distance(&split) < 1e-12);
        }
    }

    #[test]
    fn associated_observables() {
        let z = associated_observable(&z_luders(), tol()).unwrap();
        for (m, e) in z.effects().iter().zip(computational_basis_povm(2).effects()) {
            assert!(m.distance(e) < 1e-15);
        }
        let coin = associated_observable(&coin_instrument(), tol()).unwrap();
        for m in coin.effects() {
            assert!(m.distance(&CMatrix::identity(2).scale_real(0.5)) < 1e-15);
        }
        let mut rng = seeded_rng(5);
        let instr = random_instrument(&mut rng, 3, &[2, 2]);
        let povm = associated_observable(&instr, tol()).unwrap();
        let total = povm.effect(0) + povm.effect(1);
        assert!(total.distance(&CMatrix::identity(3)) <= 1e-9);
    }

    #[test]
    fn induced_channels() {
        let single = DiscreteInstrument::from_ops(vec![vec![CMatrix::identity(2)]], tol()).unwrap();
        assert_eq!(induced_channel(&single).ops(), single.outcome(0).ops());
        let deph = induced_channel(&z_luders());
        assert_eq!(deph.ops(), computational_basis_povm(2).effects());
        let mut rng = seeded_rng(6);
        let instr = random_instrument(&mut rng, 3, &[3, 2]);
        let ch = induced_channel(&instr);
        assert!(ch.effect().distance(&CMatrix::identity(3)) <= 1e-9);
    }

    #[test]
    fn minimize_duplicate() {
        let mut rng = seeded_rng(7);
        let a = ginibre(&mut rng, 2, 2);
        let out = minimize_kraus(&KrausList::new(vec![a.clone(), a.clone()]).unwrap(), tol()).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out.ops()[0].distance(&a.scale_real(2f64.sqrt())) < 1e-12);
    }

    #[test]
    fn minimize_keeps_independent_projections() {
        let ops = computational_basis_povm(2).effects().to_vec();
        let out = minimize_kraus(&KrausList::new(ops.clone()).unwrap(), tol()).unwrap();
        assert_eq!(out.ops(), &ops[..]);
    }

    #[test]
    fn minimize_mixed_redundant_list() {
        let mut rng = seeded_rng(8);
        let base = [ginibre(&mut rng, 3, 3), ginibre(&mut rng, 3, 3)];
        let w = random_isometry(&mut rng, 4, 2);
        let mixed: Vec<CMatrix> = (0..4)
            .map(|s| &base[0].scale(w[(s, 0)]) + &base[1].scale(w[(s, 1)]))
            .collect();
        let list = KrausList::new(mixed).unwrap();
        let out = minimize_kraus(&list, tol()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(numerical_rank(&list.choi(), tol()), 2);
        assert!(out.effect().distance(&list.effect()) <= 1e-9);
        assert!(out.choi().distance(&list.choi()) <= 1e-9);
        assert!(matches!(
            minimize_kraus(&KrausList::new(vec![CMatrix::zeros(2, 2)]).unwrap(), tol()),
            Err(Error::AllZero)
        ));
    }

    #[test]
    fn rank_vectors() {
        assert_eq!(kraus_rank_vector(&z_luders(), tol()).unwrap().ranks, vec![1, 1]);

        let mut rng = seeded_rng(9);
        let instr = random_instrument(&mut rng, 2, &[3, 1]);
        let rv = kraus_rank_vector(&instr, tol()).unwrap();
        assert_eq!(rv.ranks, vec![3, 1]);
        assert_eq!(rv.total, 4);

        let doubled = DiscreteInstrument::from_ops(
            instr
                .outcomes()
                .iter()
                .map(|k| {
                    k.ops()
                        .iter()
                        .flat_map(|a| {
                            let h = a.scale_real(std::f64::consts::FRAC_1_SQRT_2);
                            [h.clone(), h]
                        })
                        .collect()
                })
                .collect(),
            tol(),
        )
        .unwrap();
        assert_eq!(kraus_rank_vector(&doubled, tol()).unwrap(), rv);
    }

    #[test]
    fn structure_vector_examples() {
        let z = z_luders();
        let dec = decompose_effects(&associated_observable(&z, tol()).unwrap(), tol()).unwrap();
        let sv = structure_vectors(&z, &dec, tol()).unwrap();
        assert_eq!(sv.vectors[0][0][0], basis_vector(2, 0));
        assert_eq!(sv.vectors[1][0][0], basis_vector(2, 1));

        let coin = coin_instrument();
        let dec = decompose_effects(&associated_observable(&coin, tol()).unwrap(), tol()).unwrap();
        let sv = structure_vectors(&coin, &dec, tol()).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let phi = &sv.vectors[i][k][0];
                let h = basis_vector(2, k);
                assert!(phi.iter().zip(&h).all(|(a, b)| (a - b).norm() < 1e-15));
            }
        }

        let mut rng = seeded_rng(10);
        let instr = random_instrument(&mut rng, 3, &[2, 3]).minimized(tol()).unwrap();
        let dec = decompose_effects(&associated_observable(&instr, tol()).unwrap(), tol()).unwrap();
        assert!(structure_vectors(&instr, &dec, tol()).is_ok());

        // mismatched decomposition is detected
        let other = decompose_effects(&random_povm(&mut rng, 3, 2), tol()).unwrap();
        assert!(structure_vectors(&instr, &other, tol()).is_err());
    }

    #[test]
    fn luders_examples() {
        let z = z_luders();
        for (k, m) in z.outcomes().iter().zip(computational_basis_povm(2).effects()) {
            assert!(k.ops()[0].distance(m) < 1e-15);
        }
        let coin = luders_instrument(&trivial_povm(2, &[0.5, 0.5], tol()).unwrap(), tol()).unwrap();
        for k in coin.outcomes() {
            assert!(k.ops()[0].distance(&CMatrix::identity(2).scale_real(0.5f64.sqrt())) < 1e-15);
        }
        let mut rng = seeded_rng(11);
        let povm = random_povm(&mut rng, 3, 3);
        let back = associated_observable(&luders_instrument(&povm, tol()).unwrap(), tol()).unwrap();
        for (a, b) in back.effects().iter().zip(povm.effects()) {
            assert!(a.distance(b) <= 1e-9);
        }
    }

    #[test]
    fn rank1_with_vectors() {
        let mut rng = seeded_rng(12);
        let povm = random_povm(&mut rng, 3, 2);
        let dec = decompose_effects(&povm, tol()).unwrap();
        let eigen_choice: Vec<Vec<CVector>> = dec.outcomes.iter().map(|o| o.eigenvectors.clone()).collect();
        let a = rank1_instrument_with_vectors(&povm, &eigen_choice, tol()).unwrap();
        let b = luders_instrument(&povm, tol()).unwrap();
        for (x, y) in a.outcomes().iter().zip(b.outcomes()) {
            assert!(x.ops()[0].distance(&y.ops()[0]) < 1e-12);
        }

        let coin = trivial_povm(2, &[0.5, 0.5], tol()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)];
        let minus = vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)];
        let phi = vec![vec![basis_vector(2, 0), basis_vector(2, 1)], vec![plus, minus]];
        let instr = rank1_instrument_with_vectors(&coin, &phi, tol()).unwrap();
        let back = associated_observable(&instr, tol()).unwrap();
        for (x, y) in back.effects().iter().zip(coin.effects()) {
            assert!(x.distance(y) <= 1e-9);
        }

        let repeated = vec![vec![basis_vector(2, 0), basis_vector(2, 0)], phi[1].clone()];
        assert!(matches!(
            rank1_instrument_with_vectors(&coin, &repeated, tol()),
            Err(Error::NotOrthonormal { outcome: Some(0), .. })
        ));
        let short = vec![vec![basis_vector(2, 0)], phi[1].clone()];
        assert!(matches!(
            rank1_instrument_with_vectors(&coin, &short, tol()),
            Err(Error::CountMismatch { outcome: 0, .. })
        ));
    }

    #[test]
    fn no_info_without_disturbance() {
        let mut rng = seeded_rng(13);
        let u0 = random_unitary(&mut rng, 2);
        let instr = DiscreteInstrument::from_ops(
            vec![vec![u0.scale_real(0.3f64.sqrt())], vec![u0.scale_real(0.7f64.sqrt())]],
            tol(),
        )
        .unwrap();
        match check_no_info_without_disturbance(&instr, tol()).unwrap() {
            DisturbanceReport::TrivialObservable { probabilities, max_residual } => {
                assert!((probabilities[0] - 0.3).abs() < 1e-12);
                assert!((probabilities[1] - 0.7).abs() < 1e-12);
                assert!(max_residual <= 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            check_no_info_without_disturbance(&z_luders(), tol()).unwrap(),
            DisturbanceReport::NotApplicable { channel_rank: 2 }
        );
    }
}
