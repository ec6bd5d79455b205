//! JSON interchange documents. Every document carries `"schema_version": 1`
//! and rejects unknown fields. Complex numbers are `[re, im]`, matrices are
//! row-major arrays of rows.

use num_complex::Complex64;
use qdilate::models::OutcomeLabel;
use qdilate::symbolic::{AuxDim, ExtDim, IndexSet, IsometryRule};
use qdilate::CMatrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SchemaVersion;

impl SchemaVersion {
    pub const CURRENT: u32 = 1;
}

impl TryFrom<u32> for SchemaVersion {
    type Error = String;

    fn try_from(v: u32) -> Result<Self, String> {
        if v == Self::CURRENT {
            Ok(SchemaVersion)
        } else {
            Err(format!("unsupported schema_version {v}, expected {}", Self::CURRENT))
        }
    }
}

impl From<SchemaVersion> for u32 {
    fn from(_: SchemaVersion) -> u32 {
        SchemaVersion::CURRENT
    }
}

/// A finite complex number as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct JsonComplex(pub Complex64);

impl TryFrom<[f64; 2]> for JsonComplex {
    type Error = String;

    fn try_from([re, im]: [f64; 2]) -> Result<Self, String> {
        if re.is_finite() && im.is_finite() {
            Ok(JsonComplex(Complex64::new(re, im)))
        } else {
            Err("complex entries must be finite".into())
        }
    }
}

impl From<JsonComplex> for [f64; 2] {
    fn from(z: JsonComplex) -> [f64; 2] {
        [z.0.re, z.0.im]
    }
}

pub type JsonVector = Vec<JsonComplex>;
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

pub fn vector_to_json(v: &[Complex64]) -> JsonVector {
    v.iter().copied().map(JsonComplex).collect()
}

pub fn vector_from_json(v: &[JsonComplex]) -> Vec<Complex64> {
    v.iter().map(|z| z.0).collect()
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.rows()).map(|i| vector_to_json(m.row(i))).collect()
}

/// Parses a matrix and checks its shape.
pub fn matrix_from_json(m: &JsonMatrix, rows: usize, cols: usize, what: &str) -> Result<CMatrix, CliError> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(CliError::Input(format!("{what} must be a {rows}x{cols} matrix")));
    }
    let data = m.iter().flat_map(|r| r.iter().map(|z| z.0)).collect();
    Ok(CMatrix::from_vec(rows, cols, data)?)
}

fn square_from_json(m: &JsonMatrix, dim: usize, what: &str) -> Result<CMatrix, CliError> {
    matrix_from_json(m, dim, dim, what)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmDoc {
    pub schema_version: SchemaVersion,
    pub dim: usize,
    pub effects: Vec<JsonMatrix>,
}

impl PovmDoc {
    pub fn effects(&self) -> Result<Vec<CMatrix>, CliError> {
        self.effects
            .iter()
            .enumerate()
            .map(|(i, e)| square_from_json(e, self.dim, &format!("effect {i}")))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentOutcomeDoc {
    pub kraus: Vec<JsonMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentDoc {
    pub schema_version: SchemaVersion,
    pub dim: usize,
    pub outcomes: Vec<InstrumentOutcomeDoc>,
}

impl InstrumentDoc {
    pub fn from_ops(dim: usize, ops: &[Vec<CMatrix>]) -> Self {
        Self {
            schema_version: SchemaVersion,
            dim,
            outcomes: ops
                .iter()
                .map(|list| InstrumentOutcomeDoc {
                    kraus: list.iter().map(matrix_to_json).collect(),
                })
                .collect(),
        }
    }

    pub fn ops(&self) -> Result<Vec<Vec<CMatrix>>, CliError> {
        self.outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| {
                o.kraus
                    .iter()
                    .enumerate()
                    .map(|(s, a)| square_from_json(a, self.dim, &format!("Kraus operator {s} of outcome {i}")))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposedOutcomeDoc {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<JsonVector>,
    /// `√λ · eigenvector`.
    pub vectors: Vec<JsonVector>,
    /// Biorthogonal to `vectors`.
    pub duals: Vec<JsonVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionDoc {
    pub schema_version: SchemaVersion,
    pub dim: usize,
    pub multiplicities: Vec<usize>,
    pub outcomes: Vec<DecomposedOutcomeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilationDoc {
    pub schema_version: SchemaVersion,
    pub sys_dim: usize,
    pub pointer_dim: usize,
    #[serde(rename = "Y")]
    pub y: JsonMatrix,
    /// `[outcome, kraus index]` of each pointer basis vector.
    pub pointer_labels: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SinkTag {
    #[serde(rename = "sink")]
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonLabel {
    Outcome(usize),
    Sink(SinkTag),
}

impl From<OutcomeLabel> for JsonLabel {
    fn from(l: OutcomeLabel) -> Self {
        match l {
            OutcomeLabel::Outcome(i) => JsonLabel::Outcome(i),
            OutcomeLabel::Sink => JsonLabel::Sink(SinkTag::Sink),
        }
    }
}

impl From<JsonLabel> for OutcomeLabel {
    fn from(l: JsonLabel) -> Self {
        match l {
            JsonLabel::Outcome(i) => OutcomeLabel::Outcome(i),
            JsonLabel::Sink(_) => OutcomeLabel::Sink,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub schema_version: SchemaVersion,
    pub sys_dim: usize,
    pub app_dim: usize,
    #[serde(rename = "U")]
    pub u: JsonMatrix,
    pub xi: JsonVector,
    pub pointer: Vec<JsonMatrix>,
    pub outcome_labels: Vec<JsonLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitarity_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiDoc {
    pub schema_version: SchemaVersion,
    pub xi: JsonVector,
}

/// Exactly one of `vector` (normalised on load) and `density` is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub schema_version: SchemaVersion,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<JsonVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<JsonMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualsDoc {
    pub instrument: f64,
    pub observable: f64,
    pub probability: f64,
    pub unitarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictsDoc {
    pub bound: f64,
    pub instrument: bool,
    pub observable: bool,
    pub probability: bool,
    pub unitarity: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingsDoc {
    pub verify_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub schema_version: SchemaVersion,
    pub residuals: ResidualsDoc,
    pub verdicts: VerdictsDoc,
    pub timings: TimingsDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotsDoc {
    pub schema_version: SchemaVersion,
    pub shots: u64,
    pub seed: u64,
    pub outcome_labels: Vec<JsonLabel>,
    pub probabilities: Vec<f64>,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
}

/// A separable dimension: a non-negative integer or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDim", into = "RawDim")]
pub struct JsonExtDim(pub ExtDim);

/// An auxiliary dimension: a separable dimension or `"nonseparable"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDim", into = "RawDim")]
pub struct JsonAuxDim(pub AuxDim);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawDim {
    Finite(u64),
    Named(String),
}

const INF: &str = "inf";
const NON_SEPARABLE: &str = "nonseparable";

impl TryFrom<RawDim> for JsonExtDim {
    type Error = String;

    fn try_from(raw: RawDim) -> Result<Self, String> {
        match raw {
            RawDim::Finite(n) => Ok(JsonExtDim(ExtDim::Finite(n))),
            RawDim::Named(s) if s == INF => Ok(JsonExtDim(ExtDim::CountablyInfinite)),
            RawDim::Named(s) => Err(format!("expected an integer or \"{INF}\", got \"{s}\"")),
        }
    }
}

impl From<JsonExtDim> for RawDim {
    fn from(d: JsonExtDim) -> RawDim {
        match d.0 {
            ExtDim::Finite(n) => RawDim::Finite(n),
            ExtDim::CountablyInfinite => RawDim::Named(INF.into()),
        }
    }
}

impl TryFrom<RawDim> for JsonAuxDim {
    type Error = String;

    fn try_from(raw: RawDim) -> Result<Self, String> {
        match raw {
            RawDim::Named(s) if s == NON_SEPARABLE => Ok(JsonAuxDim(AuxDim::NonSeparable)),
            other => JsonExtDim::try_from(other).map(|d| JsonAuxDim(AuxDim::Separable(d.0))),
        }
    }
}

impl From<JsonAuxDim> for RawDim {
    fn from(d: JsonAuxDim) -> RawDim {
        match d.0 {
            AuxDim::Separable(e) => JsonExtDim(e).into(),
            AuxDim::NonSeparable => RawDim::Named(NON_SEPARABLE.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSetDoc {
    pub base: JsonExtDim,
    pub fibers: JsonExtDim,
}

impl From<IndexSetDoc> for IndexSet {
    fn from(d: IndexSetDoc) -> Self {
        IndexSet::new(d.base.0, d.fibers.0)
    }
}

impl From<IndexSet> for IndexSetDoc {
    fn from(s: IndexSet) -> Self {
        IndexSetDoc {
            base: JsonExtDim(s.base),
            fibers: JsonExtDim(s.fibers),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleDoc {
    Identity,
    Shift { offset: u64 },
    EvenEmbed,
    Diagonal { period: u64 },
    /// Targets `[n, f]` of the source indices in row-major order.
    Table { targets: Vec<[u64; 2]> },
}

impl From<RuleDoc> for IsometryRule {
    fn from(r: RuleDoc) -> Self {
        match r {
            RuleDoc::Identity => IsometryRule::Identity,
            RuleDoc::Shift { offset } => IsometryRule::Shift { offset },
            RuleDoc::EvenEmbed => IsometryRule::EvenEmbed,
            RuleDoc::Diagonal { period } => IsometryRule::Diagonal { period },
            RuleDoc::Table { targets } => IsometryRule::Table(targets.into_iter().map(|[n, f]| (n, f)).collect()),
        }
    }
}

impl From<IsometryRule> for RuleDoc {
    fn from(r: IsometryRule) -> Self {
        match r {
            IsometryRule::Identity => RuleDoc::Identity,
            IsometryRule::Shift { offset } => RuleDoc::Shift { offset },
            IsometryRule::EvenEmbed => RuleDoc::EvenEmbed,
            IsometryRule::Diagonal { period } => RuleDoc::Diagonal { period },
            IsometryRule::Table(t) => RuleDoc::Table {
                targets: t.into_iter().map(|(n, f)| [n, f]).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryRuleDoc {
    pub source: IndexSetDoc,
    pub target: IndexSetDoc,
    pub rule: RuleDoc,
}

/// Input of `decide`. Accepted combinations: `fixture` alone;
/// `effect_ranks` with `dimA`; `isometry_rule` with optional matching
/// `dimA`, `dimB`, `corank`; or `dimA`, `dimB` and `corank`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolicDoc {
    pub schema_version: SchemaVersion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(rename = "dimA", default, skip_serializing_if = "Option::is_none")]
    pub dim_a: Option<JsonExtDim>,
    #[serde(rename = "dimB", default, skip_serializing_if = "Option::is_none")]
    pub dim_b: Option<JsonAuxDim>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isometry_rule: Option<IsometryRuleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corank: Option<JsonExtDim>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effect_ranks: Option<Vec<JsonExtDim>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictDoc {
    pub schema_version: SchemaVersion,
    pub verdict: String,
    pub rule_fired: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<JsonExtDim>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub follow_up: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
}

/// Pretty-printed document followed by a newline.
pub fn to_document<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn parse_document<T: serde::de::DeserializeOwned>(text: &str, what: &'static str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|source| CliError::Parse { what, source })
}
