//! Cardinal arithmetic on separable dimensions and exact extendability
//! decisions for permutation-type isometries between index sets.
//!
//! Natural-number indices start at 1. An index set is `{1..base} × {1..fibers}`
//! where either factor may be countably infinite.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtDim {
    Finite(u64),
    CountablyInfinite,
}

use ExtDim::{CountablyInfinite, Finite};

impl ExtDim {
    pub const ZERO: ExtDim = Finite(0);
    pub const ONE: ExtDim = Finite(1);

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_zero(self) -> bool {
        self == Finite(0)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Finite(n) => Some(n),
            CountablyInfinite => None,
        }
    }

    /// Cardinality of `{1..self} \ {1..inner}`; `None` when `inner` exceeds
    /// `self`.
    pub fn complement(self, inner: ExtDim) -> Option<ExtDim> {
        match (self, inner) {
            (Finite(a), Finite(b)) => a.checked_sub(b).map(Finite),
            (CountablyInfinite, Finite(_)) => Some(CountablyInfinite),
            (CountablyInfinite, CountablyInfinite) => Some(Finite(0)),
            (Finite(_), CountablyInfinite) => None,
        }
    }

    fn le(self, other: ExtDim) -> bool {
        other.complement(self).is_some()
    }
}

impl fmt::Display for ExtDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(n) => write!(f, "{n}"),
            CountablyInfinite => f.write_str("inf"),
        }
    }
}

/// Cardinal product; `0 · ∞ = 0`.
impl std::ops::Mul for ExtDim {
    type Output = ExtDim;

    fn mul(self, other: ExtDim) -> ExtDim {
        match (self, other) {
            (Finite(0), _) | (_, Finite(0)) => Finite(0),
            (Finite(a), Finite(b)) => Finite(a * b),
            _ => CountablyInfinite,
        }
    }
}

impl std::ops::Add for ExtDim {
    type Output = ExtDim;

    fn add(self, other: ExtDim) -> ExtDim {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => CountablyInfinite,
        }
    }
}

/// Dimension of the auxiliary space; non-separable spaces are a flag only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuxDim {
    Separable(ExtDim),
    NonSeparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexSet {
    pub base: ExtDim,
    pub fibers: ExtDim,
}

impl IndexSet {
    pub fn new(base: ExtDim, fibers: ExtDim) -> Self {
        Self { base, fibers }
    }

    /// `ℕ × {1}`.
    pub fn naturals() -> Self {
        Self::new(CountablyInfinite, Finite(1))
    }

    pub fn cardinality(&self) -> ExtDim {
        self.base * self.fibers
    }
}

/// Closed-form injective maps `(n, f) ↦ target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IsometryRule {
    /// `(n, f) ↦ (n, f)`.
    Identity,
    /// `(n, f) ↦ (n + offset, f)`.
    Shift { offset: u64 },
    /// `(n, f) ↦ (2n, f)`.
    EvenEmbed,
    /// Single-fiber source, `n ↦ (n, ((n − 1) mod period) + 1)`.
    Diagonal { period: u64 },
    /// Finite source listed row-major over `(n, f)`; each entry is the target
    /// `(n, f)` of that source index.
    Table(Vec<(u64, u64)>),
}

impl IsometryRule {
    pub fn name(&self) -> &'static str {
        match self {
            IsometryRule::Identity => "identity",
            IsometryRule::Shift { .. } => "shift",
            IsometryRule::EvenEmbed => "even_embed",
            IsometryRule::Diagonal { .. } => "diagonal",
            IsometryRule::Table(_) => "table",
        }
    }
}

/// Isometry sending basis vectors of `source` to distinct basis vectors of
/// `target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexIsometry {
    pub source: IndexSet,
    pub target: IndexSet,
    pub rule: IsometryRule,
}

fn domain_error(msg: impl Into<String>) -> Error {
    Error::InvalidDimension(msg.into())
}

impl IndexIsometry {
    pub fn new(source: IndexSet, target: IndexSet, rule: IsometryRule) -> Result<Self> {
        let iso = Self { source, target, rule };
        iso.corank()?;
        Ok(iso)
    }

    /// Cardinality of `target \ image`.
    pub fn corank(&self) -> Result<ExtDim> {
        let (s, t) = (self.source, self.target);
        if s.cardinality().is_zero() || t.cardinality().is_zero() {
            return Err(domain_error("index sets must be non-empty"));
        }
        // Fibres of a fibre-preserving rule: (Bt)(Ft − Fs) missed outside the
        // source fibres, plus the missed base indices times Fs.
        let fiber_preserving = |base_missed: Option<ExtDim>| -> Result<ExtDim> {
            let fiber_gap = t
                .fibers
                .complement(s.fibers)
                .ok_or_else(|| domain_error("source has more fibres than target"))?;
            let base_missed = base_missed.ok_or_else(|| domain_error("image leaves the target base"))?;
            Ok(t.base * fiber_gap + base_missed * s.fibers)
        };
        match &self.rule {
            IsometryRule::Identity => fiber_preserving(t.base.complement(s.base)),
            IsometryRule::Shift { offset } => {
                let reach = s.base + Finite(*offset);
                let missed = t.base.complement(reach).map(|rest| rest + Finite(*offset));
                fiber_preserving(missed)
            }
            IsometryRule::EvenEmbed => {
                let missed = t.base.complement(s.base * Finite(2)).map(|_| match t.base {
                    CountablyInfinite => CountablyInfinite,
                    Finite(bt) => Finite(bt - s.base.finite().expect("finite source inside finite target")),
                });
                fiber_preserving(missed)
            }
            IsometryRule::Diagonal { period } => {
                if s.fibers != Finite(1) {
                    return Err(domain_error("diagonal rule needs a single-fibre source"));
                }
                if *period == 0 || !Finite(*period).le(t.fibers) {
                    return Err(domain_error("diagonal period must be in 1..=target fibres"));
                }
                let base_gap = t
                    .base
                    .complement(s.base)
                    .ok_or_else(|| domain_error("image leaves the target base"))?;
                let fiber_gap = t.fibers.complement(Finite(1)).expect("fibres >= 1");
                Ok(base_gap * t.fibers + s.base * fiber_gap)
            }
            IsometryRule::Table(entries) => {
                let (Some(bs), Some(fs), Some(bt), Some(ft)) =
                    (s.base.finite(), s.fibers.finite(), t.base.finite(), t.fibers.finite())
                else {
                    return Err(domain_error("table rule needs finite index sets"));
                };
                if entries.len() as u64 != bs * fs {
                    return Err(domain_error(format!(
                        "table has {} entries for {} source indices",
                        entries.len(),
                        bs * fs
                    )));
                }
                let mut seen = std::collections::HashSet::with_capacity(entries.len());
                for &(n, f) in entries {
                    if n == 0 || f == 0 || n > bt || f > ft {
                        return Err(domain_error(format!("table target ({n}, {f}) outside the target set")));
                    }
                    if !seen.insert((n, f)) {
                        return Err(Error::NotInjective(format!("target ({n}, {f}) hit twice")));
                    }
                }
                Ok(Finite(bt * ft - entries.len() as u64))
            }
        }
    }

    /// The same map into a target with one extra fibre.
    pub fn augmented(&self) -> Result<IndexIsometry> {
        let Finite(f) = self.target.fibers else {
            return Err(domain_error("target already has infinitely many fibres"));
        };
        IndexIsometry::new(self.source, IndexSet::new(self.target.base, Finite(f + 1)), self.rule.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Extendable,
    NotExtendable,
    ExtendableAfterPlusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    FiniteDimA,
    NonSeparableB,
    CorankZeroB1,
    CorankInfinite,
    CorankFiniteObstruction,
    FiniteEffectRank,
    NotRankInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtendabilityVerdict {
    pub verdict: Verdict,
    pub rule_fired: Rule,
    /// Co-rank of the dilation isometry when it decided the case.
    pub witness: Option<ExtDim>,
    /// Always `ExtendableAfterPlusOne` for `NotExtendable`.
    pub follow_up: Option<Verdict>,
}

impl ExtendabilityVerdict {
    fn new(verdict: Verdict, rule_fired: Rule, witness: Option<ExtDim>) -> Self {
        Self {
            verdict,
            rule_fired,
            witness,
            follow_up: (verdict == Verdict::NotExtendable).then_some(Verdict::ExtendableAfterPlusOne),
        }
    }
}

/// Whether an isometry `Y: H_A → H_A ⊗ H_B` with `dim (YY*)^⊥ = corank`
/// extends to a unitary `U` with `U(ψ ⊗ ξ) = Yψ`.
pub fn decide_extendability(dim_a: ExtDim, dim_b: AuxDim, corank: ExtDim) -> Result<ExtendabilityVerdict> {
    if dim_a.is_zero() {
        return Err(domain_error("system dimension must be at least 1"));
    }
    let inconsistent = || Error::InconsistentCorank {
        dim_a: dim_a.to_string(),
        dim_b: match dim_b {
            AuxDim::Separable(b) => b.to_string(),
            AuxDim::NonSeparable => "non-separable".into(),
        },
        corank: corank.to_string(),
    };
    if let AuxDim::Separable(b) = dim_b {
        if b.is_zero() {
            return Err(domain_error("auxiliary dimension must be at least 1"));
        }
        let total = dim_a * b;
        if !corank.le(total) {
            return Err(inconsistent());
        }
        if dim_a.is_finite() && total.complement(dim_a) != Some(corank) {
            return Err(inconsistent());
        }
    }

    if dim_a.is_finite() {
        return Ok(ExtendabilityVerdict::new(Verdict::Extendable, Rule::FiniteDimA, Some(corank)));
    }
    let b = match dim_b {
        AuxDim::NonSeparable => {
            return Ok(ExtendabilityVerdict::new(Verdict::Extendable, Rule::NonSeparableB, None));
        }
        AuxDim::Separable(b) => b,
    };
    if b == ExtDim::ONE {
        return Ok(if corank.is_zero() {
            ExtendabilityVerdict::new(Verdict::Extendable, Rule::CorankZeroB1, Some(corank))
        } else {
            ExtendabilityVerdict::new(Verdict::NotExtendable, Rule::CorankFiniteObstruction, Some(corank))
        });
    }
    Ok(if corank == CountablyInfinite {
        ExtendabilityVerdict::new(Verdict::Extendable, Rule::CorankInfinite, Some(corank))
    } else {
        ExtendabilityVerdict::new(Verdict::NotExtendable, Rule::CorankFiniteObstruction, Some(corank))
    })
}

/// Extendability of the minimal model from effect ranks alone. When every
/// rank is infinite the answer is deferred to the plus-one augmentation.
pub fn decide_from_ranks(effect_ranks: &[ExtDim], sys_dim: ExtDim) -> Result<ExtendabilityVerdict> {
    if effect_ranks.is_empty() {
        return Err(Error::EmptyObservable);
    }
    if let Some(r) = effect_ranks.iter().find(|r| !r.le(sys_dim)) {
        return Err(domain_error(format!("effect rank {r} exceeds system dimension {sys_dim}")));
    }
    Ok(if sys_dim.is_finite() {
        ExtendabilityVerdict::new(Verdict::Extendable, Rule::FiniteDimA, None)
    } else if effect_ranks.iter().any(|r| r.is_finite()) {
        ExtendabilityVerdict::new(Verdict::Extendable, Rule::FiniteEffectRank, None)
    } else {
        ExtendabilityVerdict::new(Verdict::ExtendableAfterPlusOne, Rule::NotRankInfinity, None)
    })
}

/// A named extendability case with its expected verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicFixture {
    pub name: &'static str,
    pub dim_a: ExtDim,
    pub dim_b: AuxDim,
    pub corank: ExtDim,
    /// Absent for cases whose isometry has general coefficients; the co-rank
    /// is then stored directly.
    pub isometry: Option<IndexIsometry>,
    pub expected: Verdict,
}

impl SymbolicFixture {
    pub fn decide(&self) -> Result<ExtendabilityVerdict> {
        decide_extendability(self.dim_a, self.dim_b, self.corank)
    }
}

fn fixture_from_isometry(name: &'static str, iso: IndexIsometry, expected: Verdict) -> SymbolicFixture {
    let corank = iso.corank().expect("fixture isometries are valid");
    SymbolicFixture {
        name,
        dim_a: iso.source.cardinality(),
        dim_b: AuxDim::Separable(iso.target.fibers),
        corank,
        isometry: Some(iso),
        expected,
    }
}

/// Sharp observable with rank-one Lüders model: `h_n ↦ h_n ⊗ e_{f(n)}` on a
/// `d`-dimensional system with `outcomes` pointer values. Co-rank `d(N − 1)`.
pub fn von_neumann_lueders_sharp(d: ExtDim, outcomes: u64) -> SymbolicFixture {
    let iso = IndexIsometry::new(
        IndexSet::new(d, Finite(1)),
        IndexSet::new(d, Finite(outcomes)),
        IsometryRule::Diagonal { period: outcomes },
    )
    .expect("valid diagonal isometry");
    fixture_from_isometry("von_neumann_lueders_sharp", iso, Verdict::Extendable)
}

/// The named reference cases.
pub fn reference_fixtures() -> Vec<SymbolicFixture> {
    let two_fibres = IndexSet::new(CountablyInfinite, Finite(2));
    vec![
        fixture_from_isometry(
            "shift_isometry",
            IndexIsometry::new(IndexSet::naturals(), IndexSet::naturals(), IsometryRule::Shift { offset: 1 })
                .expect("valid shift"),
            Verdict::NotExtendable,
        ),
        fixture_from_isometry(
            "rank_inf_sharp_relabel",
            IndexIsometry::new(two_fibres, two_fibres, IsometryRule::Identity).expect("valid relabel"),
            Verdict::NotExtendable,
        ),
        fixture_from_isometry(
            "even_index_embedding",
            IndexIsometry::new(two_fibres, two_fibres, IsometryRule::EvenEmbed).expect("valid embedding"),
            Verdict::Extendable,
        ),
        von_neumann_lueders_sharp(CountablyInfinite, 2),
        SymbolicFixture {
            name: "two_outcome_lambda",
            dim_a: CountablyInfinite,
            dim_b: AuxDim::Separable(Finite(2)),
            corank: CountablyInfinite,
            isometry: None,
            expected: Verdict::Extendable,
        },
    ]
}

pub fn fixture(name: &str) -> Option<SymbolicFixture> {
    reference_fixtures().into_iter().find(|f| f.name == name)
}
