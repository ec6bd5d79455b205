//! Minimal Stinespring dilations `B ↦ Y*(B ⊗ P_i)Y` of discrete instruments.
//!
//! Pointer basis vectors are ordered lexicographically by `(outcome, kraus)`,
//! and `C^d ⊗ C^k` uses the system-major index `a * k + b`.

use crate::error::{Error, Result};
use crate::instruments::{apply_heisenberg, DiscreteInstrument, KrausList};
use crate::linalg::{kron_apply, numerical_rank, CMatrix, CVector, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct StinespringDilation {
    sys_dim: usize,
    pointer_dim: usize,
    /// `(outcome, kraus index)` of each pointer basis vector.
    pointer_labels: Vec<(usize, usize)>,
    y: CMatrix,
    pointer_pvm: Vec<CMatrix>,
}

impl StinespringDilation {
    /// Assembles a dilation from raw parts. `Y` must be an isometry and every
    /// outcome below `num_outcomes` must own at least one pointer vector.
    pub fn from_parts(
        sys_dim: usize,
        num_outcomes: usize,
        pointer_labels: Vec<(usize, usize)>,
        y: CMatrix,
        tol: Tolerance,
    ) -> Result<Self> {
        let pointer_dim = pointer_labels.len();
        if sys_dim == 0 || pointer_dim == 0 {
            return Err(Error::InvalidDimension("dilation needs non-zero dimensions".into()));
        }
        if y.rows() != sys_dim * pointer_dim || y.cols() != sys_dim {
            return Err(Error::DimensionMismatch {
                context: "dilation isometry rows",
                expected: sys_dim * pointer_dim,
                found: y.rows(),
            });
        }
        if let Some(&(i, _)) = pointer_labels.iter().find(|(i, _)| *i >= num_outcomes) {
            return Err(Error::OutcomeOutOfRange {
                outcome: i,
                count: num_outcomes,
            });
        }
        if let Some(i) = (0..num_outcomes).find(|i| pointer_labels.iter().all(|(j, _)| j != i)) {
            return Err(Error::ZeroOutcome { outcome: i });
        }
        let residual = y.isometry_residual();
        if residual > tol.eps_residual {
            return Err(Error::NotIsometry { residual });
        }
        let pointer_pvm = (0..num_outcomes)
            .map(|i| {
                CMatrix::basis_projection(
                    pointer_dim,
                    pointer_labels.iter().enumerate().filter(|(_, l)| l.0 == i).map(|(b, _)| b),
                )
            })
            .collect();
        Ok(Self {
            sys_dim,
            pointer_dim,
            pointer_labels,
            y,
            pointer_pvm,
        })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn pointer_dim(&self) -> usize {
        self.pointer_dim
    }

    pub fn num_outcomes(&self) -> usize {
        self.pointer_pvm.len()
    }

    pub fn pointer_labels(&self) -> &[(usize, usize)] {
        &self.pointer_labels
    }

    pub fn y(&self) -> &CMatrix {
        &self.y
    }

    pub fn pointer_pvm(&self) -> &[CMatrix] {
        &self.pointer_pvm
    }

    /// Kraus operators read back from `Y`: `A_b[a, n] = Y[a k + b, n]` for each
    /// pointer vector `b`, grouped by outcome in pointer order.
    pub fn kraus_operators(&self) -> Vec<Vec<CMatrix>> {
        let (d, k) = (self.sys_dim, self.pointer_dim);
        let mut out = vec![Vec::new(); self.num_outcomes()];
        for (b, &(i, _)) in self.pointer_labels.iter().enumerate() {
            out[i].push(CMatrix::from_fn(d, d, |a, n| self.y[(a * k + b, n)]));
        }
        out
    }

    /// `Y*(B ⊗ P_i)Y`.
    pub fn heisenberg(&self, outcome: usize, b: &CMatrix) -> CMatrix {
        &self.y.adjoint() * &kron_apply(b, &self.pointer_pvm[outcome], &self.y)
    }
}

/// `Yψ = Σ_{i,s} A_is ψ ⊗ e_is` for the minimal Kraus form of `instr`.
pub fn build_minimal_stinespring(instr: &DiscreteInstrument, tol: Tolerance) -> Result<StinespringDilation> {
    let minimal = instr.minimized(tol)?;
    let d = minimal.dim();
    let labels: Vec<(usize, usize)> = minimal
        .outcomes()
        .iter()
        .enumerate()
        .flat_map(|(i, list)| (0..list.len()).map(move |s| (i, s)))
        .collect();
    let k = labels.len();
    let ops: Vec<&CMatrix> = minimal.outcomes().iter().flat_map(KrausList::ops).collect();
    let y = CMatrix::from_fn(d * k, d, |row, n| ops[row % k][(row / k, n)]);
    StinespringDilation::from_parts(d, minimal.num_outcomes(), labels, y, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilationReport {
    pub isometry_residual: f64,
    /// Max over outcomes and matrix units of the Heisenberg-picture mismatch.
    pub max_residual: f64,
    pub passed: bool,
}

pub fn verify_stinespring(
    dil: &StinespringDilation,
    instr: &DiscreteInstrument,
    tol: Tolerance,
) -> Result<DilationReport> {
    let d = instr.dim();
    if dil.sys_dim != d {
        return Err(Error::DimensionMismatch {
            context: "dilation system dimension",
            expected: d,
            found: dil.sys_dim,
        });
    }
    if dil.num_outcomes() != instr.num_outcomes() {
        return Err(Error::DimensionMismatch {
            context: "dilation outcome count",
            expected: instr.num_outcomes(),
            found: dil.num_outcomes(),
        });
    }
    let mut max_residual: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let unit = CMatrix::from_fn(d, d, |r, c| {
                if (r, c) == (i, j) {
                    crate::linalg::ONE
                } else {
                    crate::linalg::ZERO
                }
            });
            for outcome in 0..instr.num_outcomes() {
                let expected = apply_heisenberg(instr, &[outcome], &unit)?;
                max_residual = max_residual.max(expected.distance(&dil.heisenberg(outcome, &unit)));
            }
        }
    }
    let isometry_residual = dil.y.isometry_residual();
    let bound = tol.scaled(d);
    Ok(DilationReport {
        isometry_residual,
        max_residual,
        passed: max_residual <= bound && isometry_residual <= bound,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityReport {
    /// Rank of `{(E_nm ⊗ P_i) Y h_l}`.
    pub span_rank: usize,
    /// `d · pointer_dim`.
    pub full_rank: usize,
    pub kraus_independent: bool,
    pub minimal: bool,
}

/// Decides minimality by brute-force span rank and by linear independence of
/// the per-outcome Kraus operators; the two verdicts must agree.
pub fn check_minimality(
    dil: &StinespringDilation,
    instr: &DiscreteInstrument,
    tol: Tolerance,
) -> Result<MinimalityReport> {
    let report = verify_stinespring(dil, instr, tol)?;
    if !report.passed {
        return Err(Error::NotADilation {
            residual: report.max_residual.max(report.isometry_residual),
        });
    }
    let (d, k) = (dil.sys_dim, dil.pointer_dim);
    let mut vectors: Vec<CVector> = Vec::with_capacity(d * d * d * dil.num_outcomes());
    for p in &dil.pointer_pvm {
        for n in 0..d {
            for m in 0..d {
                for l in 0..d {
                    // (E_nm ⊗ P) Y h_l lives in row block n.
                    let mut v = vec![crate::linalg::ZERO; d * k];
                    for b in 0..k {
                        if p[(b, b)].re > 0.5 {
                            v[n * k + b] = dil.y[(m * k + b, l)];
                        }
                    }
                    vectors.push(v);
                }
            }
        }
    }
    let span_rank = numerical_rank(&CMatrix::from_columns(&vectors), tol);
    let full_rank = d * k;

    let kraus_independent = dil.kraus_operators().iter().all(|ops| {
        let vecs: Vec<CVector> = ops.iter().map(CMatrix::vectorize).collect();
        numerical_rank(&CMatrix::from_columns(&vecs), tol) == ops.len()
    });
    let minimal = span_rank == full_rank;
    if minimal != kraus_independent {
        return Err(Error::Inconsistent(format!(
            "minimality criteria disagree: span rank {span_rank} of {full_rank}, Kraus independence {kraus_independent}"
        )));
    }
    Ok(MinimalityReport {
        span_rank,
        full_rank,
        kraus_independent,
        minimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instruments::{kraus_rank_vector, luders_instrument};
    use crate::linalg::{basis_vector, kron_vec};
    use crate::observables::computational_basis_povm;
    use crate::random::{random_instrument, seeded_rng};
    use num_complex::Complex64;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn z_luders() -> DiscreteInstrument {
        luders_instrument(&computational_basis_povm(2), tol()).unwrap()
    }

    #[test]
    fn z_luders_copies_into_pointer() {
        let dil = build_minimal_stinespring(&z_luders(), tol()).unwrap();
        assert_eq!(dil.pointer_dim(), 2);
        let psi = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let out = dil.y().mul_vec(&psi);
        let mut expect = kron_vec(&basis_vector(2, 0), &basis_vector(2, 0));
        let other = kron_vec(&basis_vector(2, 1), &basis_vector(2, 1));
        for (e, o) in expect.iter_mut().zip(&other) {
            *e = *e * psi[0] + o * psi[1];
        }
        assert_eq!(out, expect);
        let rep = verify_stinespring(&dil, &z_luders(), tol()).unwrap();
        assert!(rep.passed && rep.max_residual <= 1e-12);
        let min = check_minimality(&dil, &z_luders(), tol()).unwrap();
        assert!(min.minimal);
        assert_eq!(min.span_rank, 4);
    }

    #[test]
    fn coin_dilation_is_product() {
        let a = CMatrix::identity(2).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let coin = DiscreteInstrument::from_ops(vec![vec![a.clone()], vec![a]], tol()).unwrap();
        let dil = build_minimal_stinespring(&coin, tol()).unwrap();
        assert_eq!(dil.pointer_dim(), 2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let xi = vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)];
        let psi = vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)];
        let out = dil.y().mul_vec(&psi);
        let expect = kron_vec(&psi, &xi);
        assert!(out.iter().zip(&expect).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn random_instrument_dilation() {
        let mut rng = seeded_rng(31);
        let instr = random_instrument(&mut rng, 3, &[2, 1]);
        let dil = build_minimal_stinespring(&instr, tol()).unwrap();
        assert_eq!((dil.y().rows(), dil.y().cols()), (9, 3));
        assert!(dil.y().isometry_residual() <= 1e-9);
        assert_eq!(dil.pointer_dim(), kraus_rank_vector(&instr, tol()).unwrap().total);
        assert!(verify_stinespring(&dil, &instr, tol()).unwrap().passed);
        assert!(check_minimality(&dil, &instr, tol()).unwrap().minimal);
        let sum = &dil.pointer_pvm()[0] + &dil.pointer_pvm()[1];
        assert_eq!(sum, CMatrix::identity(3));
    }

    #[test]
    fn perturbation_is_detected() {
        let instr = z_luders();
        let dil = build_minimal_stinespring(&instr, tol()).unwrap();
        let mut y = dil.y().clone();
        y[(0, 0)] += Complex64::new(1e-3, 0.0);
        let bad = StinespringDilation {
            y,
            ..dil
        };
        let rep = verify_stinespring(&bad, &instr, tol()).unwrap();
        assert!(!rep.passed && rep.max_residual > 1e-4);
        assert!(matches!(check_minimality(&bad, &instr, tol()), Err(Error::NotADilation { .. })));
    }

    #[test]
    fn padded_pointer_is_not_minimal() {
        let instr = z_luders();
        let dil = build_minimal_stinespring(&instr, tol()).unwrap();
        let (d, k) = (2, 2);
        let y = CMatrix::from_fn(d * (k + 1), d, |row, n| {
            let (a, b) = (row / (k + 1), row % (k + 1));
            if b < k {
                dil.y()[(a * k + b, n)]
            } else {
                crate::linalg::ZERO
            }
        });
        let mut labels = dil.pointer_labels().to_vec();
        labels.push((0, 1));
        let padded = StinespringDilation::from_parts(2, 2, labels, y, tol()).unwrap();
        assert!(verify_stinespring(&padded, &instr, tol()).unwrap().passed);
        let rep = check_minimality(&padded, &instr, tol()).unwrap();
        assert!(!rep.minimal && !rep.kraus_independent);
        assert_eq!(rep.span_rank, 4);
    }

    #[test]
    fn dimension_mismatch() {
        let dil = build_minimal_stinespring(&z_luders(), tol()).unwrap();
        let mut rng = seeded_rng(1);
        let other = random_instrument(&mut rng, 3, &[1, 1]);
        assert!(matches!(
            verify_stinespring(&dil, &other, tol()),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
