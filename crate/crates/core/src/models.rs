//! Normal measurement models `(K, P, U, ξ)`: unitary extension of dilation
//! isometries, Halmos dilations, the plus-one augmentation and model checks.

use crate::dilation::{build_minimal_stinespring, StinespringDilation};
use crate::error::{Error, Result};
use crate::instruments::{apply_heisenberg, associated_observable, induced_channel, luders_instrument, minimize_kraus, DiscreteInstrument};
use crate::linalg::{
    basis_vector, hermitian_eigendecompose, kron, kron_apply, norm, operator_norm, orthonormal_complete,
    partial_trace_second, CMatrix, CVector, Tolerance, ONE, ZERO,
};
use crate::observables::DiscretePOVM;
use crate::random::{random_state_matrix, seeded_rng};

/// Seed of the probe states used by [`verify_model`].
pub const PROBE_SEED: u64 = 0x5eed;
pub const PROBE_STATES: usize = 6;

/// Defect eigenvalues `1 − x` at or below this are treated as exactly zero so
/// both Halmos defect operators vanish on the same directions.
const DEFECT_SNAP: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeLabel {
    Outcome(usize),
    /// Added by the plus-one augmentation; its instrument component is zero.
    Sink,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalMeasurementModel {
    sys_dim: usize,
    app_dim: usize,
    pointer_pvm: Vec<CMatrix>,
    u: CMatrix,
    xi: CVector,
    outcome_labels: Vec<OutcomeLabel>,
}

impl NormalMeasurementModel {
    /// Validates shapes, `‖ξ‖ = 1` and the pointer PVM. Unitarity of `U` is
    /// left to [`verify_model`] so that a damaged model can still be reported on.
    pub fn new(
        sys_dim: usize,
        pointer_pvm: Vec<CMatrix>,
        u: CMatrix,
        xi: CVector,
        outcome_labels: Vec<OutcomeLabel>,
        tol: Tolerance,
    ) -> Result<Self> {
        let app_dim = xi.len();
        if sys_dim == 0 || app_dim == 0 {
            return Err(Error::InvalidDimension("model needs non-zero dimensions".into()));
        }
        let n = u.ensure_square()?;
        if n != sys_dim * app_dim {
            return Err(Error::DimensionMismatch {
                context: "model unitary",
                expected: sys_dim * app_dim,
                found: n,
            });
        }
        if pointer_pvm.len() != outcome_labels.len() {
            return Err(Error::InvalidModel(format!(
                "{} pointer projections for {} outcome labels",
                pointer_pvm.len(),
                outcome_labels.len()
            )));
        }
        let xi_norm = norm(&xi);
        if (xi_norm - 1.0).abs() > tol.eps_residual {
            return Err(Error::NotUnitVector { norm: xi_norm });
        }
        let mut total = CMatrix::zeros(app_dim, app_dim);
        for (i, p) in pointer_pvm.iter().enumerate() {
            if p.rows() != app_dim || p.cols() != app_dim {
                return Err(Error::DimensionMismatch {
                    context: "pointer projection",
                    expected: app_dim,
                    found: p.rows(),
                });
            }
            let idem = (p * p).distance(p).max(p.hermiticity_residual());
            if idem > tol.eps_residual {
                return Err(Error::InvalidModel(format!("pointer {i} is not a projection (residual {idem:.3e})")));
            }
            total += p;
        }
        let completeness = total.distance(&CMatrix::identity(app_dim));
        if completeness > tol.eps_residual {
            return Err(Error::InvalidModel(format!(
                "pointer projections do not resolve the identity (residual {completeness:.3e})"
            )));
        }
        Ok(Self {
            sys_dim,
            app_dim,
            pointer_pvm,
            u,
            xi,
            outcome_labels,
        })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn app_dim(&self) -> usize {
        self.app_dim
    }

    pub fn pointer_pvm(&self) -> &[CMatrix] {
        &self.pointer_pvm
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn xi(&self) -> &[num_complex::Complex64] {
        &self.xi
    }

    pub fn outcome_labels(&self) -> &[OutcomeLabel] {
        &self.outcome_labels
    }

    /// `W = U (I ⊗ ξ)`, the isometry `ψ ↦ U(ψ ⊗ ξ)`.
    pub fn effective_isometry(&self) -> CMatrix {
        let xi_col = CMatrix::from_columns(std::slice::from_ref(&self.xi));
        &self.u * &kron(&CMatrix::identity(self.sys_dim), &xi_col)
    }

    /// Index of the pointer projection carrying `label`.
    pub fn label_index(&self, label: OutcomeLabel) -> Option<usize> {
        self.outcome_labels.iter().position(|l| *l == label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedModel {
    /// Model on the apparatus space of dimension `pointer_dim + 1`.
    pub base: NormalMeasurementModel,
    /// Position of [`OutcomeLabel::Sink`] among the pointer projections.
    pub sink_index: usize,
}

/// Extends an isometry `Y: C^d → C^d ⊗ C^k` to a unitary `U` on `C^d ⊗ C^k`
/// with `U(h_n ⊗ ξ) = Y h_n`.
pub fn extend_to_unitary(y: &CMatrix, xi: &[num_complex::Complex64], d: usize, k: usize, tol: Tolerance) -> Result<CMatrix> {
    if y.rows() != d * k || y.cols() != d {
        return Err(Error::DimensionMismatch {
            context: "isometry to extend",
            expected: d * k,
            found: y.rows(),
        });
    }
    if xi.len() != k {
        return Err(Error::DimensionMismatch {
            context: "apparatus vector",
            expected: k,
            found: xi.len(),
        });
    }
    let residual = y.isometry_residual();
    if residual > tol.eps_residual {
        return Err(Error::NotIsometry { residual });
    }
    let xi_norm = norm(xi);
    if (xi_norm - 1.0).abs() > tol.eps_residual {
        return Err(Error::NotUnitVector { norm: xi_norm });
    }
    let xi_unit: CVector = xi.iter().map(|z| z / xi_norm).collect();
    let sources: Vec<CVector> = (0..d)
        .map(|n| crate::linalg::kron_vec(&basis_vector(d, n), &xi_unit))
        .collect();
    let v_full = CMatrix::from_columns(&orthonormal_complete(&sources, d * k, tol)?);
    let w_full = CMatrix::from_columns(&orthonormal_complete(&y.columns(), d * k, tol)?);
    Ok(&w_full * &v_full.adjoint())
}

fn defect(m: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    let eig = hermitian_eigendecompose(m, tol)?;
    Ok(eig.reconstruct_with(|x| {
        let g = 1.0 - x;
        if g <= DEFECT_SNAP {
            0.0
        } else {
            g.sqrt()
        }
    }))
}

/// `[[A, (I − AA*)^½], [(I − A*A)^½, −A*]]` for a contraction `A`.
pub fn halmos_dilation(a: &CMatrix, tol: Tolerance) -> Result<CMatrix> {
    let n = a.ensure_square()?;
    let op = operator_norm(a);
    if op > 1.0 + tol.eps_residual {
        return Err(Error::NotContraction { norm: op });
    }
    let a_adj = a.adjoint();
    let top_right = defect(&(a * &a_adj), tol)?;
    let bottom_left = defect(&(&a_adj * a), tol)?;
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    u.set_block(0, 0, a);
    u.set_block(0, n, &top_right);
    u.set_block(n, 0, &bottom_left);
    u.set_block(n, n, &(-&a_adj));
    Ok(u)
}

#[derive(Debug, Clone, PartialEq)]
pub enum XiPolicy {
    /// First pointer basis vector.
    Canonical,
    Given(CVector),
}

/// Minimize, dilate and extend: a normal measurement model with apparatus
/// dimension `Σ r_i`.
pub fn assemble_model(instr: &DiscreteInstrument, xi_policy: &XiPolicy, tol: Tolerance) -> Result<NormalMeasurementModel> {
    let dil = build_minimal_stinespring(instr, tol)?;
    let model = model_from_dilation(&dil, xi_policy, tol)?;
    let report = verify_model(&model, instr, tol)?;
    if !report.passed {
        return Err(Error::NotADilation {
            residual: report.max_residual(),
        });
    }
    Ok(model)
}

/// Extends a dilation to a model without re-verifying it against an instrument.
pub fn model_from_dilation(dil: &StinespringDilation, xi_policy: &XiPolicy, tol: Tolerance) -> Result<NormalMeasurementModel> {
    let (d, k) = (dil.sys_dim(), dil.pointer_dim());
    let xi = match xi_policy {
        XiPolicy::Canonical => basis_vector(k, 0),
        XiPolicy::Given(v) => v.clone(),
    };
    let u = extend_to_unitary(dil.y(), &xi, d, k, tol)?;
    NormalMeasurementModel::new(
        d,
        dil.pointer_pvm().to_vec(),
        u,
        xi,
        (0..dil.num_outcomes()).map(OutcomeLabel::Outcome).collect(),
        tol,
    )
}

/// Appends one apparatus dimension that carries a sink outcome never observed:
/// `Y₊ψ = (Yψ, 0)`, `ξ₊ = e_0`.
pub fn augment_plus_one(dil: &StinespringDilation, instr: &DiscreteInstrument, tol: Tolerance) -> Result<AugmentedModel> {
    let (d, k) = (dil.sys_dim(), dil.pointer_dim());
    let k1 = k + 1;
    let y_plus = CMatrix::from_fn(d * k1, d, |row, n| {
        let (a, b) = (row / k1, row % k1);
        if b < k {
            dil.y()[(a * k + b, n)]
        } else {
            ZERO
        }
    });
    let xi = basis_vector(k1, 0);
    let u = extend_to_unitary(&y_plus, &xi, d, k1, tol)?;
    let mut pvm: Vec<CMatrix> = dil
        .pointer_pvm()
        .iter()
        .map(|p| {
            let mut q = CMatrix::zeros(k1, k1);
            q.set_block(0, 0, p);
            q
        })
        .collect();
    pvm.push(CMatrix::basis_projection(k1, [k]));
    let mut labels: Vec<OutcomeLabel> = (0..dil.num_outcomes()).map(OutcomeLabel::Outcome).collect();
    labels.push(OutcomeLabel::Sink);
    let sink_index = labels.len() - 1;
    let base = NormalMeasurementModel::new(d, pvm, u, xi, labels, tol)?;
    let report = verify_model(&base, instr, tol)?;
    if !report.passed {
        return Err(Error::NotADilation {
            residual: report.max_residual(),
        });
    }
    Ok(AugmentedModel { base, sink_index })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelReport {
    pub instrument_residual: f64,
    pub observable_residual: f64,
    pub probability_residual: f64,
    pub unitarity_residual: f64,
    pub passed: bool,
}

impl ModelReport {
    pub fn max_residual(&self) -> f64 {
        self.instrument_residual
            .max(self.observable_residual)
            .max(self.probability_residual)
    }
}

fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |r, c| if (r, c) == (i, j) { ONE } else { ZERO })
}

fn check_labels(model: &NormalMeasurementModel, instr: &DiscreteInstrument) -> Result<()> {
    if model.sys_dim != instr.dim() {
        return Err(Error::DimensionMismatch {
            context: "model system dimension",
            expected: instr.dim(),
            found: model.sys_dim,
        });
    }
    let n = instr.num_outcomes();
    for label in &model.outcome_labels {
        if let OutcomeLabel::Outcome(i) = label {
            if *i >= n {
                return Err(Error::OutcomeOutOfRange { outcome: *i, count: n });
            }
        }
    }
    for i in 0..n {
        let count = model.outcome_labels.iter().filter(|l| **l == OutcomeLabel::Outcome(i)).count();
        if count != 1 {
            return Err(Error::DimensionMismatch {
                context: "model labels per instrument outcome",
                expected: 1,
                found: count,
            });
        }
    }
    Ok(())
}

/// Instrument, observable and probability residuals of `model` against
/// `instr`; sink labels are compared with the zero map.
pub fn verify_model(model: &NormalMeasurementModel, instr: &DiscreteInstrument, tol: Tolerance) -> Result<ModelReport> {
    check_labels(model, instr)?;
    let d = model.sys_dim;
    let w = model.effective_isometry();
    let w_adj = w.adjoint();
    let povm = associated_observable(instr, tol)?;

    let mut instrument_residual: f64 = 0.0;
    let mut observable_residual: f64 = 0.0;
    for (label, p) in model.outcome_labels.iter().zip(&model.pointer_pvm) {
        for n in 0..d {
            for m in 0..d {
                let unit = matrix_unit(d, n, m);
                let expected = match label {
                    OutcomeLabel::Outcome(i) => apply_heisenberg(instr, &[*i], &unit)?,
                    OutcomeLabel::Sink => CMatrix::zeros(d, d),
                };
                let got = &w_adj * &kron_apply(&unit, p, &w);
                instrument_residual = instrument_residual.max(expected.distance(&got));
            }
        }
        let expected = match label {
            OutcomeLabel::Outcome(i) => povm.effect(*i).clone(),
            OutcomeLabel::Sink => CMatrix::zeros(d, d),
        };
        let got = &w_adj * &kron_apply(&CMatrix::identity(d), p, &w);
        observable_residual = observable_residual.max(expected.distance(&got));
    }

    let mut rng = seeded_rng(PROBE_SEED);
    let mut probability_residual: f64 = 0.0;
    for _ in 0..PROBE_STATES {
        let rho = random_state_matrix(&mut rng, d);
        let sigma = &(&w * &rho) * &w_adj;
        for (label, p) in model.outcome_labels.iter().zip(&model.pointer_pvm) {
            let born = match label {
                OutcomeLabel::Outcome(i) => (povm.effect(*i) * &rho).trace().re,
                OutcomeLabel::Sink => 0.0,
            };
            let got = pointer_probability(&sigma, p, d, model.app_dim);
            probability_residual = probability_residual.max((born - got).abs());
        }
    }

    let unitarity_residual = model.u.isometry_residual();
    let bound = tol.scaled(d);
    Ok(ModelReport {
        instrument_residual,
        observable_residual,
        probability_residual,
        unitarity_residual,
        passed: instrument_residual <= bound
            && observable_residual <= bound
            && probability_residual <= bound
            && unitarity_residual <= bound,
    })
}

/// `tr((I ⊗ P) σ)` for `σ` on `C^d ⊗ C^k`.
pub(crate) fn pointer_probability(sigma: &CMatrix, p: &CMatrix, d: usize, k: usize) -> f64 {
    let mut acc = ZERO;
    for a in 0..d {
        for b in 0..k {
            for c in 0..k {
                acc += p[(b, c)] * sigma[(a * k + c, a * k + b)];
            }
        }
    }
    acc.re
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentReport {
    pub residual: f64,
    pub channel_rank: usize,
    /// For single-outcome instruments: whether `app_dim` equals the channel rank.
    pub rank_matches: Option<bool>,
    pub passed: bool,
}

/// Compares the induced channel with `T ↦ tr_K[U(T ⊗ |ξ⟩⟨ξ|)U*]` on all
/// matrix units.
pub fn environment_channel_check(
    model: &NormalMeasurementModel,
    instr: &DiscreteInstrument,
    tol: Tolerance,
) -> Result<EnvironmentReport> {
    check_labels(model, instr)?;
    let d = model.sys_dim;
    let channel = induced_channel(instr);
    let w = model.effective_isometry();
    let w_adj = w.adjoint();
    let mut residual: f64 = 0.0;
    for n in 0..d {
        for m in 0..d {
            let t = matrix_unit(d, n, m);
            let reduced = partial_trace_second(&(&(&w * &t) * &w_adj), d, model.app_dim)?;
            residual = residual.max(channel.apply(&t).distance(&reduced));
        }
    }
    let channel_rank = minimize_kraus(&channel, tol)?.len();
    let rank_matches = (instr.num_outcomes() == 1).then_some(model.app_dim == channel_rank);
    Ok(EnvironmentReport {
        residual,
        channel_rank,
        rank_matches,
        passed: residual <= tol.scaled(d) && rank_matches != Some(false),
    })
}

/// Model of the Lüders instrument of `povm`; the apparatus has one dimension
/// per outcome.
pub fn minimal_observable_model(povm: &DiscretePOVM, tol: Tolerance) -> Result<NormalMeasurementModel> {
    let instr = luders_instrument(povm, tol)?;
    let model = assemble_model(&instr, &XiPolicy::Canonical, tol)?;
    if model.app_dim != povm.len() {
        return Err(Error::Inconsistent(format!(
            "apparatus dimension {} for {} outcomes",
            model.app_dim,
            povm.len()
        )));
    }
    Ok(model)
}

/// The same measurement with initial apparatus vector `new_xi`: returns
/// `U (I ⊗ V)` where the unitary `V` maps `new_xi` to the current `ξ`.
pub fn rebase_xi(model: &NormalMeasurementModel, new_xi: &[num_complex::Complex64], tol: Tolerance) -> Result<NormalMeasurementModel> {
    let k = model.app_dim;
    if new_xi.len() != k {
        return Err(Error::DimensionMismatch {
            context: "apparatus vector",
            expected: k,
            found: new_xi.len(),
        });
    }
    let n = norm(new_xi);
    if (n - 1.0).abs() > tol.eps_residual {
        return Err(Error::NotUnitVector { norm: n });
    }
    let to_old = CMatrix::from_columns(&orthonormal_complete(std::slice::from_ref(&model.xi), k, tol)?);
    let from_new = CMatrix::from_columns(&orthonormal_complete(&[new_xi.to_vec()], k, tol)?);
    let v = &to_old * &from_new.adjoint();
    let u = &model.u * &kron(&CMatrix::identity(model.sys_dim), &v);
    NormalMeasurementModel::new(
        model.sys_dim,
        model.pointer_pvm.clone(),
        u,
        new_xi.to_vec(),
        model.outcome_labels.clone(),
        tol,
    )
}
