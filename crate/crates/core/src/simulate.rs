//! Born statistics, post-measurement states and seeded shot sampling.
//!
//! Sampling draws one `f64` per shot from ChaCha20 seeded with
//! `seed_from_u64(seed)` and picks the first outcome whose cumulative
//! probability exceeds it. The stream is platform independent, so equal
//! inputs give identical records.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::instruments::DiscreteInstrument;
use crate::linalg::{hermitian_eigendecompose, kron_apply, partial_trace_second, CMatrix, CVector, Tolerance};
use crate::models::{pointer_probability, NormalMeasurementModel};
use crate::observables::DiscretePOVM;

/// Density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    matrix: CMatrix,
}

impl QuantumState {
    pub fn new(matrix: CMatrix, tol: Tolerance) -> Result<Self> {
        matrix.ensure_square()?;
        let herm = matrix.hermiticity_residual();
        if herm > tol.eps_residual {
            return Err(Error::InvalidState(format!("not Hermitian (residual {herm:.3e})")));
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol.eps_residual {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let min = hermitian_eigendecompose(&matrix, tol)?
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -tol.eps_residual {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector `ψ`.
    pub fn pure(psi: &[num_complex::Complex64], tol: Tolerance) -> Result<Self> {
        Self::new(CMatrix::outer(psi, psi), tol)
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// `p_i = tr(M_i ρ)` clamped to `[0, 1]`.
pub fn born_probabilities(povm: &DiscretePOVM, rho: &QuantumState) -> Result<Vec<f64>> {
    check_dim("state dimension", povm.dim(), rho.dim())?;
    Ok(povm
        .effects()
        .iter()
        .map(|m| (m * &rho.matrix).trace().re.clamp(0.0, 1.0))
        .collect())
}

/// `I_i(ρ) / p_i`.
pub fn post_state(instr: &DiscreteInstrument, rho: &QuantumState, outcome: usize, tol: Tolerance) -> Result<QuantumState> {
    check_dim("state dimension", instr.dim(), rho.dim())?;
    let unnormalised = instr.apply_schrodinger(&[outcome], &rho.matrix)?;
    let probability = unnormalised.trace().re;
    if probability <= tol.eps_rank {
        return Err(Error::ZeroProbabilityOutcome { outcome, probability });
    }
    QuantumState::new(unnormalised.scale_real(1.0 / probability), tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeResult {
    /// Indexed like the model's pointer projections.
    pub probabilities: Vec<f64>,
    /// `None` where the probability is at most `eps_rank`.
    pub post_states: Vec<Option<QuantumState>>,
}

/// Evolves `ρ ⊗ |ξ⟩⟨ξ|` through `U` and reads the pointer.
pub fn run_composite(model: &NormalMeasurementModel, rho: &QuantumState, tol: Tolerance) -> Result<CompositeResult> {
    let (d, k) = (model.sys_dim(), model.app_dim());
    check_dim("state dimension", d, rho.dim())?;
    // U(ρ ⊗ |ξ⟩⟨ξ|)U* = W ρ W* with W = U(I ⊗ ξ).
    let w = model.effective_isometry();
    let sigma = &(&w * &rho.matrix) * &w.adjoint();
    let id = CMatrix::identity(d);
    let mut probabilities = Vec::with_capacity(model.pointer_pvm().len());
    let mut post_states = Vec::with_capacity(model.pointer_pvm().len());
    for p in model.pointer_pvm() {
        let prob = pointer_probability(&sigma, p, d, k);
        probabilities.push(prob.clamp(0.0, 1.0));
        if prob <= tol.eps_rank {
            post_states.push(None);
            continue;
        }
        let left = kron_apply(&id, p, &sigma);
        let both = kron_apply(&id, p, &left.adjoint()).adjoint();
        let reduced = partial_trace_second(&both, d, k)?.scale_real(1.0 / prob);
        post_states.push(Some(QuantumState::new(reduced, tol)?));
    }
    Ok(CompositeResult {
        probabilities,
        post_states,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotRecord {
    pub shots: u64,
    pub seed: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
}

/// Inverse-CDF sampling from `probabilities`.
pub fn sample_probabilities(probabilities: &[f64], shots: u64, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::InvalidDimension("shots must be at least 1".into()));
    }
    let total: f64 = probabilities.iter().sum();
    if probabilities.is_empty() || total.is_nan() || total <= 0.0 {
        return Err(Error::InvalidState("no outcome has positive probability".into()));
    }
    let mut cumulative: Vec<f64> = probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p / total;
            Some(*acc)
        })
        .collect();
    let last_positive = probabilities.iter().rposition(|&p| p > 0.0).expect("positive total");
    cumulative[last_positive..].iter_mut().for_each(|c| *c = f64::INFINITY);

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probabilities.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let i = cumulative.iter().position(|&c| u < c).expect("last bin is unbounded");
        counts[i] += 1;
    }
    let frequencies = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    Ok(ShotRecord {
        shots,
        seed,
        counts,
        frequencies,
    })
}

/// `shots` independent runs of the model on `ρ`.
pub fn sample(model: &NormalMeasurementModel, rho: &QuantumState, shots: u64, seed: u64, tol: Tolerance) -> Result<ShotRecord> {
    let composite = run_composite(model, rho, tol)?;
    sample_probabilities(&composite.probabilities, shots, seed)
}

/// Unit vector from raw amplitudes, rejecting the zero vector.
pub fn normalised(psi: &[num_complex::Complex64]) -> Result<CVector> {
    let n = crate::linalg::norm(psi);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::InvalidState("zero or non-finite state vector".into()));
    }
    Ok(psi.iter().map(|z| z / n).collect())
}
