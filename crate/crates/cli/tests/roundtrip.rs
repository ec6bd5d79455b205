//! Serialize then parse is the identity on every document type.

use num_complex::Complex64;
use proptest::prelude::*;
use qdilate::dilation::build_minimal_stinespring;
use qdilate::models::{assemble_model, augment_plus_one, XiPolicy};
use qdilate::random::{random_instrument, random_povm, seeded_rng};
use qdilate::symbolic::{AuxDim, ExtDim};
use qdilate::{CMatrix, Tolerance};
use qdilate_cli::commands::{dilation_from_doc, dilation_to_doc, model_from_doc, model_to_doc, povm_to_doc};
use qdilate_cli::formats::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn roundtrip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(doc: &T) -> T {
    let text = to_document(doc);
    let back: T = parse_document(&text, "test").unwrap();
    assert_eq!(&back, doc);
    assert_eq!(to_document(&back), text);
    back
}

fn same_bits(a: &CMatrix, b: &CMatrix) -> bool {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn any_dim() -> impl Strategy<Value = ExtDim> {
    prop_oneof![any::<u64>().prop_map(ExtDim::Finite), Just(ExtDim::CountablyInfinite)]
}

fn any_aux() -> impl Strategy<Value = AuxDim> {
    prop_oneof![any_dim().prop_map(AuxDim::Separable), Just(AuxDim::NonSeparable)]
}

fn any_rule() -> impl Strategy<Value = RuleDoc> {
    prop_oneof![
        Just(RuleDoc::Identity),
        any::<u64>().prop_map(|offset| RuleDoc::Shift { offset }),
        Just(RuleDoc::EvenEmbed),
        any::<u64>().prop_map(|period| RuleDoc::Diagonal { period }),
        proptest::collection::vec(any::<[u64; 2]>(), 0..4).prop_map(|targets| RuleDoc::Table { targets }),
    ]
}

fn any_index_set() -> impl Strategy<Value = IndexSetDoc> {
    (any_dim(), any_dim()).prop_map(|(b, f)| IndexSetDoc {
        base: JsonExtDim(b),
        fibers: JsonExtDim(f),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn numeric_documents_roundtrip(seed in any::<u64>(), d in 2usize..4, n in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let counts: Vec<usize> = (0..n).map(|i| 1 + (i + seed as usize) % (d * d)).collect();
        let instr = random_instrument(&mut rng, d, &counts);
        let ops: Vec<Vec<CMatrix>> = instr.outcomes().iter().map(|k| k.ops().to_vec()).collect();
        let inst_doc = roundtrip(&InstrumentDoc::from_ops(d, &ops));
        for (a, b) in inst_doc.ops().unwrap().iter().flatten().zip(ops.iter().flatten()) {
            prop_assert!(same_bits(a, b));
        }

        roundtrip(&povm_to_doc(random_povm(&mut rng, d, n + 1).effects()));

        let dil = build_minimal_stinespring(&instr, tol()).unwrap();
        let dil_doc = roundtrip(&dilation_to_doc(&dil));
        let parsed = dilation_from_doc(&dil_doc, tol()).unwrap();
        prop_assert!(same_bits(parsed.y(), dil.y()));
        prop_assert_eq!(parsed.pointer_labels(), dil.pointer_labels());

        let model = assemble_model(&instr, &XiPolicy::Canonical, tol()).unwrap();
        let model_doc = roundtrip(&model_to_doc(&model));
        let parsed = model_from_doc(&model_doc, tol()).unwrap();
        prop_assert!(same_bits(parsed.u(), model.u()));
        prop_assert_eq!(parsed.outcome_labels(), model.outcome_labels());

        let aug = augment_plus_one(&dil, &instr, tol()).unwrap();
        let parsed = model_from_doc(&roundtrip(&model_to_doc(&aug.base)), tol()).unwrap();
        prop_assert_eq!(parsed.outcome_labels(), aug.base.outcome_labels());
    }

    #[test]
    fn scalar_documents_roundtrip(
        values in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 6),
        counts in proptest::collection::vec(any::<u64>(), 1..5),
        seed in any::<u64>(),
        flag in any::<bool>(),
    ) {
        let z: Vec<Complex64> = values.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let state = roundtrip(&StateDoc {
            schema_version: SchemaVersion,
            dim: z.len(),
            vector: Some(vector_to_json(&z)),
            density: None,
        });
        for (a, b) in state.vector.unwrap().iter().zip(&z) {
            prop_assert_eq!(a.0.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.0.im.to_bits(), b.im.to_bits());
        }
        roundtrip(&XiDoc { schema_version: SchemaVersion, xi: vector_to_json(&z) });
        roundtrip(&ReportDoc {
            schema_version: SchemaVersion,
            residuals: ResidualsDoc {
                instrument: values[0],
                observable: values[1],
                probability: values[2],
                unitarity: values[3],
            },
            verdicts: VerdictsDoc {
                bound: values[4],
                instrument: flag,
                observable: !flag,
                probability: flag,
                unitarity: flag,
                passed: false,
            },
            timings: TimingsDoc { verify_seconds: values[5].abs() },
        });
        let labels = counts
            .iter()
            .map(|&c| if c % 3 == 0 { JsonLabel::Sink(SinkTag::Sink) } else { JsonLabel::Outcome(c as usize) })
            .collect();
        roundtrip(&ShotsDoc {
            schema_version: SchemaVersion,
            shots: counts.iter().fold(0u64, |a, &c| a.wrapping_add(c)),
            seed,
            outcome_labels: labels,
            probabilities: values[..counts.len().min(6)].to_vec(),
            counts: counts.clone(),
            frequencies: values[..counts.len().min(6)].to_vec(),
        });
    }

    #[test]
    fn symbolic_documents_roundtrip(
        a in proptest::option::of(any_dim()),
        b in proptest::option::of(any_aux()),
        c in proptest::option::of(any_dim()),
        ranks in proptest::option::of(proptest::collection::vec(any_dim(), 0..4)),
        iso in proptest::option::of((any_index_set(), any_index_set(), any_rule())),
        fixture in proptest::option::of("[a-z_]{1,12}"),
    ) {
        roundtrip(&SymbolicDoc {
            schema_version: SchemaVersion,
            fixture: fixture.clone(),
            dim_a: a.map(JsonExtDim),
            dim_b: b.map(JsonAuxDim),
            isometry_rule: iso.map(|(source, target, rule)| IsometryRuleDoc { source, target, rule }),
            corank: c.map(JsonExtDim),
            effect_ranks: ranks.map(|r| r.into_iter().map(JsonExtDim).collect()),
        });
        roundtrip(&VerdictDoc {
            schema_version: SchemaVersion,
            verdict: "NotExtendable".into(),
            rule_fired: "CorankFiniteObstruction".into(),
            witness: c.map(JsonExtDim),
            follow_up: Some("ExtendableAfterPlusOne".into()),
            fixture,
        });
    }
}

#[test]
fn labels_use_integers_and_sink() {
    let text = serde_json::to_string(&vec![JsonLabel::Outcome(3), JsonLabel::Sink(SinkTag::Sink)]).unwrap();
    assert_eq!(text, r#"[3,"sink"]"#);
    assert!(serde_json::from_str::<JsonLabel>(r#""source""#).is_err());
}

#[test]
fn dimensions_use_integers_and_inf() {
    let text = serde_json::to_string(&(JsonExtDim(ExtDim::Finite(4)), JsonExtDim(ExtDim::CountablyInfinite), JsonAuxDim(AuxDim::NonSeparable)))
        .unwrap();
    assert_eq!(text, r#"[4,"inf","nonseparable"]"#);
    assert!(serde_json::from_str::<JsonExtDim>(r#""nonseparable""#).is_err());
    assert!(serde_json::from_str::<JsonExtDim>("-1").is_err());
}

#[test]
fn rule_documents_are_tagged_by_name() {
    let rule: RuleDoc = serde_json::from_str(r#"{"name":"diagonal","period":3}"#).unwrap();
    assert_eq!(rule, RuleDoc::Diagonal { period: 3 });
    assert!(serde_json::from_str::<RuleDoc>(r#"{"name":"shift","offset":1,"extra":0}"#).is_err());
    assert!(serde_json::from_str::<RuleDoc>(r#"{"name":"rotate"}"#).is_err());
}

#[test]
fn non_finite_and_malformed_complex_rejected() {
    assert!(serde_json::from_str::<JsonComplex>("[1.0]").is_err());
    assert!(serde_json::from_str::<JsonComplex>("[1.0, 2.0, 3.0]").is_err());
    assert!(serde_json::from_str::<JsonComplex>("[1e999, 0.0]").is_err());
    assert_eq!(serde_json::from_str::<JsonComplex>("[1.5, -2]").unwrap().0, Complex64::new(1.5, -2.0));
}
