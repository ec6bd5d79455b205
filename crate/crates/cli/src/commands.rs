use std::path::Path;
use std::time::Instant;

use qdilate::dilation::{build_minimal_stinespring, StinespringDilation};
use qdilate::instruments::{kraus_rank_vector, DiscreteInstrument};
use qdilate::linalg::basis_vector;
use qdilate::models::{augment_plus_one, model_from_dilation, rebase_xi, verify_model, NormalMeasurementModel, OutcomeLabel, XiPolicy};
use qdilate::observables::{decompose_effects, validate_povm};
use qdilate::simulate::{normalised, run_composite, sample_probabilities, QuantumState};
use qdilate::symbolic::{decide_extendability, decide_from_ranks, fixture, AuxDim, ExtendabilityVerdict, IndexIsometry};
use qdilate::{CMatrix, Tolerance};
use serde_json::json;

use crate::formats::*;
use crate::CliError;

/// Result of a successful command: the document for standard output, a
/// diagnostic summary for standard error and the exit code (0 or 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub document: String,
    pub summary: serde_json::Value,
    pub exit_code: i32,
}

impl Response {
    fn ok(document: String, summary: serde_json::Value) -> Self {
        Self {
            document,
            summary,
            exit_code: 0,
        }
    }
}

/// How the apparatus vector is chosen by `extend`.
#[derive(Debug, Clone, PartialEq)]
pub enum XiChoice {
    Auto,
    Index(usize),
    File(std::path::PathBuf),
}

impl XiChoice {
    /// `auto`, a basis index, or otherwise a path to a xi document.
    pub fn parse(s: &str) -> Self {
        match s {
            "auto" => XiChoice::Auto,
            _ => match s.parse::<usize>() {
                Ok(i) => XiChoice::Index(i),
                Err(_) => XiChoice::File(s.into()),
            },
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load<T: serde::de::DeserializeOwned>(path: &Path, what: &'static str) -> Result<T, CliError> {
    parse_document(&read_text(path)?, what)
}

pub fn load_instrument(doc: &InstrumentDoc, tol: Tolerance) -> Result<DiscreteInstrument, CliError> {
    Ok(DiscreteInstrument::from_ops(doc.ops()?, tol)?)
}

pub fn dilation_from_doc(doc: &DilationDoc, tol: Tolerance) -> Result<StinespringDilation, CliError> {
    if doc.pointer_labels.len() != doc.pointer_dim {
        return Err(CliError::Input(format!(
            "pointer_dim {} but {} pointer labels",
            doc.pointer_dim,
            doc.pointer_labels.len()
        )));
    }
    let num_outcomes = doc.pointer_labels.iter().map(|l| l[0] + 1).max().unwrap_or(0);
    let y = matrix_from_json(&doc.y, doc.sys_dim * doc.pointer_dim, doc.sys_dim, "Y")?;
    let labels = doc.pointer_labels.iter().map(|l| (l[0], l[1])).collect();
    Ok(StinespringDilation::from_parts(doc.sys_dim, num_outcomes, labels, y, tol)?)
}

pub fn dilation_to_doc(dil: &StinespringDilation) -> DilationDoc {
    DilationDoc {
        schema_version: SchemaVersion,
        sys_dim: dil.sys_dim(),
        pointer_dim: dil.pointer_dim(),
        y: matrix_to_json(dil.y()),
        pointer_labels: dil.pointer_labels().iter().map(|&(i, s)| [i, s]).collect(),
    }
}

pub fn model_from_doc(doc: &ModelDoc, tol: Tolerance) -> Result<NormalMeasurementModel, CliError> {
    if doc.xi.len() != doc.app_dim {
        return Err(CliError::Input(format!("xi has {} entries, app_dim is {}", doc.xi.len(), doc.app_dim)));
    }
    let n = doc.sys_dim * doc.app_dim;
    let u = matrix_from_json(&doc.u, n, n, "U")?;
    let pointer = doc
        .pointer
        .iter()
        .enumerate()
        .map(|(i, p)| matrix_from_json(p, doc.app_dim, doc.app_dim, &format!("pointer projection {i}")))
        .collect::<Result<Vec<_>, _>>()?;
    let labels = doc.outcome_labels.iter().map(|&l| l.into()).collect();
    Ok(NormalMeasurementModel::new(
        doc.sys_dim,
        pointer,
        u,
        vector_from_json(&doc.xi),
        labels,
        tol,
    )?)
}

pub fn model_to_doc(model: &NormalMeasurementModel) -> ModelDoc {
    ModelDoc {
        schema_version: SchemaVersion,
        sys_dim: model.sys_dim(),
        app_dim: model.app_dim(),
        u: matrix_to_json(model.u()),
        xi: vector_to_json(model.xi()),
        pointer: model.pointer_pvm().iter().map(matrix_to_json).collect(),
        outcome_labels: model.outcome_labels().iter().map(|&l| l.into()).collect(),
        unitarity_residual: Some(model.u().isometry_residual()),
    }
}

pub fn state_from_doc(doc: &StateDoc, tol: Tolerance) -> Result<QuantumState, CliError> {
    match (&doc.vector, &doc.density) {
        (Some(v), None) => {
            if v.len() != doc.dim {
                return Err(CliError::Input(format!("state vector has {} entries, dim is {}", v.len(), doc.dim)));
            }
            Ok(QuantumState::pure(&normalised(&vector_from_json(v))?, tol)?)
        }
        (None, Some(m)) => Ok(QuantumState::new(matrix_from_json(m, doc.dim, doc.dim, "density")?, tol)?),
        _ => Err(CliError::Input("state needs exactly one of \"vector\" and \"density\"".into())),
    }
}

pub fn decompose(povm_path: &Path, tol: Tolerance) -> Result<Response, CliError> {
    let doc: PovmDoc = load(povm_path, "povm")?;
    let povm = validate_povm(doc.effects()?, tol)?;
    let dec = decompose_effects(&povm, tol)?;
    let out = DecompositionDoc {
        schema_version: SchemaVersion,
        dim: dec.dim,
        multiplicities: dec.ranks(),
        outcomes: dec
            .outcomes
            .iter()
            .map(|o| DecomposedOutcomeDoc {
                eigenvalues: o.eigenvalues.clone(),
                eigenvectors: o.eigenvectors.iter().map(|v| vector_to_json(v)).collect(),
                vectors: o.vectors.iter().map(|v| vector_to_json(v)).collect(),
                duals: o.duals.iter().map(|v| vector_to_json(v)).collect(),
            })
            .collect(),
    };
    let summary = json!({ "command": "decompose", "multiplicities": out.multiplicities });
    Ok(Response::ok(to_document(&out), summary))
}

pub fn dilate(instrument_path: &Path, tol: Tolerance) -> Result<Response, CliError> {
    let doc: InstrumentDoc = load(instrument_path, "instrument")?;
    let instr = load_instrument(&doc, tol)?;
    let ranks = kraus_rank_vector(&instr, tol)?;
    let dil = build_minimal_stinespring(&instr, tol)?;
    let summary = json!({
        "command": "dilate",
        "pointer_dim": dil.pointer_dim(),
        "kraus_ranks": ranks.ranks,
    });
    Ok(Response::ok(to_document(&dilation_to_doc(&dil)), summary))
}

fn xi_vector(choice: &XiChoice, app_dim: usize) -> Result<Option<Vec<num_complex::Complex64>>, CliError> {
    match choice {
        XiChoice::Auto => Ok(None),
        XiChoice::Index(i) if *i < app_dim => Ok(Some(basis_vector(app_dim, *i))),
        XiChoice::Index(i) => Err(CliError::Input(format!(
            "xi index {i} out of range for apparatus dimension {app_dim}"
        ))),
        XiChoice::File(path) => {
            let doc: XiDoc = load(path, "xi")?;
            if doc.xi.len() != app_dim {
                return Err(CliError::Input(format!(
                    "xi has {} entries, apparatus dimension is {app_dim}",
                    doc.xi.len()
                )));
            }
            Ok(Some(vector_from_json(&doc.xi)))
        }
    }
}

pub fn extend(dilation_path: &Path, xi: &XiChoice, augment: bool, tol: Tolerance) -> Result<Response, CliError> {
    let doc: DilationDoc = load(dilation_path, "dilation")?;
    let dil = dilation_from_doc(&doc, tol)?;
    let model = if augment {
        let xi = xi_vector(xi, dil.pointer_dim() + 1)?;
        let instr = DiscreteInstrument::from_ops(dil.kraus_operators(), tol)?;
        let aug = augment_plus_one(&dil, &instr, tol)?;
        match xi {
            None => aug.base,
            Some(v) => rebase_xi(&aug.base, &v, tol)?,
        }
    } else {
        let policy = match xi_vector(xi, dil.pointer_dim())? {
            None => XiPolicy::Canonical,
            Some(v) => XiPolicy::Given(v),
        };
        model_from_dilation(&dil, &policy, tol)?
    };
    let out = model_to_doc(&model);
    let summary = json!({
        "command": "extend",
        "app_dim": model.app_dim(),
        "augmented": augment,
        "sink": model.label_index(OutcomeLabel::Sink),
        "unitarity_residual": out.unitarity_residual,
    });
    Ok(Response::ok(to_document(&out), summary))
}

pub fn verify(model_path: &Path, instrument_path: &Path, tol: Tolerance) -> Result<Response, CliError> {
    let model = model_from_doc(&load(model_path, "model")?, tol)?;
    let instr = load_instrument(&load(instrument_path, "instrument")?, tol)?;
    let start = Instant::now();
    let rep = verify_model(&model, &instr, tol)?;
    let seconds = start.elapsed().as_secs_f64();
    let bound = tol.scaled(model.sys_dim());
    let out = ReportDoc {
        schema_version: SchemaVersion,
        residuals: ResidualsDoc {
            instrument: rep.instrument_residual,
            observable: rep.observable_residual,
            probability: rep.probability_residual,
            unitarity: rep.unitarity_residual,
        },
        verdicts: VerdictsDoc {
            bound,
            instrument: rep.instrument_residual <= bound,
            observable: rep.observable_residual <= bound,
            probability: rep.probability_residual <= bound,
            unitarity: rep.unitarity_residual <= bound,
            passed: rep.passed,
        },
        timings: TimingsDoc { verify_seconds: seconds },
    };
    let summary = json!({ "command": "verify", "passed": rep.passed, "max_residual": rep.max_residual() });
    Ok(Response {
        document: to_document(&out),
        summary,
        exit_code: if rep.passed { 0 } else { 1 },
    })
}

pub fn simulate(model_path: &Path, state_path: &Path, shots: u64, seed: u64, tol: Tolerance) -> Result<Response, CliError> {
    let model = model_from_doc(&load(model_path, "model")?, tol)?;
    let rho = state_from_doc(&load(state_path, "state")?, tol)?;
    let composite = run_composite(&model, &rho, tol)?;
    let record = sample_probabilities(&composite.probabilities, shots, seed)?;
    let out = ShotsDoc {
        schema_version: SchemaVersion,
        shots: record.shots,
        seed: record.seed,
        outcome_labels: model.outcome_labels().iter().map(|&l| l.into()).collect(),
        probabilities: composite.probabilities,
        counts: record.counts,
        frequencies: record.frequencies,
    };
    let summary = json!({ "command": "simulate", "shots": shots, "seed": seed });
    Ok(Response::ok(to_document(&out), summary))
}

fn verdict_doc(v: &ExtendabilityVerdict, fixture: Option<String>) -> VerdictDoc {
    VerdictDoc {
        schema_version: SchemaVersion,
        verdict: format!("{:?}", v.verdict),
        rule_fired: format!("{:?}", v.rule_fired),
        witness: v.witness.map(JsonExtDim),
        follow_up: v.follow_up.map(|f| format!("{f:?}")),
        fixture,
    }
}

fn require<T>(value: Option<T>, field: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("missing field \"{field}\"")))
}

fn forbid<T>(value: &Option<T>, field: &str, context: &str) -> Result<(), CliError> {
    match value {
        Some(_) => Err(CliError::Input(format!("\"{field}\" cannot be combined with {context}"))),
        None => Ok(()),
    }
}

fn check_agrees<T: PartialEq + std::fmt::Debug>(given: Option<T>, derived: T, field: &str) -> Result<T, CliError> {
    match given {
        Some(g) if g != derived => Err(CliError::Input(format!(
            "\"{field}\" is {g:?} but the isometry rule gives {derived:?}"
        ))),
        _ => Ok(derived),
    }
}

pub fn decide_document(doc: &SymbolicDoc) -> Result<VerdictDoc, CliError> {
    if let Some(name) = &doc.fixture {
        forbid(&doc.dim_a, "dimA", "\"fixture\"")?;
        forbid(&doc.dim_b, "dimB", "\"fixture\"")?;
        forbid(&doc.isometry_rule, "isometry_rule", "\"fixture\"")?;
        forbid(&doc.corank, "corank", "\"fixture\"")?;
        forbid(&doc.effect_ranks, "effect_ranks", "\"fixture\"")?;
        let fx = fixture(name).ok_or_else(|| CliError::Input(format!("unknown fixture \"{name}\"")))?;
        return Ok(verdict_doc(&fx.decide()?, Some(name.clone())));
    }
    if let Some(ranks) = &doc.effect_ranks {
        forbid(&doc.dim_b, "dimB", "\"effect_ranks\"")?;
        forbid(&doc.isometry_rule, "isometry_rule", "\"effect_ranks\"")?;
        forbid(&doc.corank, "corank", "\"effect_ranks\"")?;
        let dim_a = require(doc.dim_a, "dimA")?.0;
        let ranks: Vec<_> = ranks.iter().map(|r| r.0).collect();
        return Ok(verdict_doc(&decide_from_ranks(&ranks, dim_a)?, None));
    }
    let (dim_a, dim_b, corank) = match &doc.isometry_rule {
        Some(rule) => {
            let iso = IndexIsometry::new(rule.source.into(), rule.target.into(), rule.rule.clone().into())?;
            let dim_a = check_agrees(doc.dim_a.map(|d| d.0), iso.source.cardinality(), "dimA")?;
            let dim_b = check_agrees(doc.dim_b.map(|d| d.0), AuxDim::Separable(iso.target.fibers), "dimB")?;
            let corank = check_agrees(doc.corank.map(|d| d.0), iso.corank()?, "corank")?;
            (dim_a, dim_b, corank)
        }
        None => (
            require(doc.dim_a, "dimA")?.0,
            require(doc.dim_b, "dimB")?.0,
            require(doc.corank, "corank")?.0,
        ),
    };
    Ok(verdict_doc(&decide_extendability(dim_a, dim_b, corank)?, None))
}

pub fn decide(symbolic_path: &Path) -> Result<Response, CliError> {
    let doc: SymbolicDoc = load(symbolic_path, "symbolic")?;
    let out = decide_document(&doc)?;
    let summary = json!({ "command": "decide", "verdict": out.verdict, "rule_fired": out.rule_fired });
    Ok(Response::ok(to_document(&out), summary))
}

pub fn povm_to_doc(effects: &[CMatrix]) -> PovmDoc {
    PovmDoc {
        schema_version: SchemaVersion,
        dim: effects.first().map_or(0, |e| e.rows()),
        effects: effects.iter().map(matrix_to_json).collect(),
    }
}
