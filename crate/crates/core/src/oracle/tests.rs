use super::*;
use crate::dsl::{parse_bundle, Bundle, HASH_INJECTIVITY, SMART_METERING, SPOTCHECK};
use crate::prover::{Mutation, ProverOptions};

fn bundle(src: &str) -> Bundle {
    parse_bundle(src).unwrap()
}

fn small_smart() -> (Architecture, Model) {
    let b = bundle(SMART_METERING);
    let mut m = b.model.unwrap();
    m.interp.domain_lo = 0;
    m.interp.domain_hi = 1;
    (b.architecture, m)
}

fn goal_of(a: &Architecture, src: &str) -> Formula {
    let printed = crate::dsl::pretty_print(&Bundle { architecture: a.clone(), model: None, goals: vec![] });
    parse_bundle(&format!("{printed}\ngoals {{ {src} }}")).unwrap().goals.remove(0)
}

#[test]
fn single_possession_state_count() {
    let b = bundle("architecture one { component A; var v; has A (v); } model { domain 0..1; }");
    let exp = explore(&b.architecture, b.model.as_ref().unwrap());
    assert!(exp.exhaustive());
    assert_eq!(exp.states().len(), 3);
    let o = Oracle::new(&b.architecture, b.model.as_ref().unwrap(), OracleOptions::default());
    let f = goal_of(&b.architecture, "hasall A (v) & hasone A (v)");
    assert_eq!(o.holds(&f).verdict, Verdict::Holds);
    let f = goal_of(&b.architecture, "hasnone A (v)");
    let v = o.holds(&f);
    assert_eq!(v.verdict, Verdict::Fails);
    assert_eq!(v.witness.unwrap().trace.len(), 1);
}

#[test]
fn case_study_goals_hold() {
    let (a, m) = small_smart();
    let o = Oracle::new(&a, &m, OracleOptions::default());
    assert!(o.exploration().exhaustive());
    for g in bundle(SMART_METERING).goals {
        let v = o.holds(&g);
        assert_eq!(v.verdict, Verdict::Holds, "{g}");
        assert!(v.exhaustive);
    }
}

#[test]
fn knowledge_without_trust_fails_with_witness() {
    let (mut a, m) = small_smart();
    a.relations.retain(|r| !matches!(r, Relation::Trust { .. }));
    let g = goal_of(&a, "K P { Fee = iter(+, y); }");
    let v = holds(&a, &g, &m, OracleOptions::default());
    assert_eq!(v.verdict, Verdict::Fails);
    let w = v.witness.unwrap();
    assert_eq!(w.jsonl().lines().count(), w.trace.len());
    assert!(!w.note.is_empty());
}

#[test]
fn spotcheck_gives_belief_not_knowledge() {
    let b = bundle(SPOTCHECK);
    let o = Oracle::new(&b.architecture, b.model.as_ref().unwrap(), OracleOptions::default());
    let verdicts: Vec<Verdict> = b.goals.iter().map(|g| o.holds(g).verdict).collect();
    assert_eq!(verdicts, [Verdict::Holds, Verdict::Holds, Verdict::Fails]);
}

#[test]
fn injectivity_is_learned() {
    let b = bundle(HASH_INJECTIVITY);
    let o = Oracle::new(&b.architecture, b.model.as_ref().unwrap(), OracleOptions::default());
    for g in &b.goals {
        assert_eq!(o.holds(g).verdict, Verdict::Holds, "{g}");
    }
}

#[test]
fn none_implies_one_over_family() {
    let (a, m) = small_smart();
    let o = Oracle::new(&a, &m, OracleOptions::default());
    for f in formula_family(&a) {
        if let Formula::HasNone { component, var } = &f {
            if o.holds(&f).holds() {
                let one = Formula::HasOne { component: component.clone(), var: var.clone() };
                assert!(o.holds(&one).holds(), "{f}");
            }
        }
    }
}

#[test]
fn literal_reading_is_stronger() {
    let b = bundle(
        "architecture doomed { component A B; var u; var w; fun f/1;
           has A (u); compute A (w = f(u)); receive B from A { attest A { w = f(u); } } vars { w };
           verify_attest B (attest A { w = f(u); }); check B { w = 0; }; trust B A; }
         model { domain 0..1; fun f(a) = a; }
         goals { K B { w = f(u); } }",
    );
    let m = b.model.unwrap();
    let viable = holds(&b.architecture, &b.goals[0], &m, OracleOptions::default());
    let literal = holds(
        &b.architecture,
        &b.goals[0],
        &m,
        OracleOptions { reading: KnowledgeReading::Literal, ..Default::default() },
    );
    assert_eq!(viable.verdict, Verdict::Holds);
    assert_eq!(literal.verdict, Verdict::Holds);
}

#[test]
fn crosscheck_agrees_on_examples() {
    let (a, m) = small_smart();
    let r = crosscheck(&a, &formula_family(&a), &m, ProverOptions::default(), OracleOptions::default());
    assert!(r.exhaustive);
    assert_eq!(r.soundness_discrepancies, 0, "{r}");
    assert_eq!(r.unclassified_gaps, 0, "{r}");
    for src in [SPOTCHECK, HASH_INJECTIVITY] {
        let b = bundle(src);
        let m = b.model.unwrap();
        let r = crosscheck(
            &b.architecture,
            &formula_family(&b.architecture),
            &m,
            ProverOptions::default(),
            OracleOptions::default(),
        );
        assert_eq!(r.soundness_discrepancies, 0, "{r}");
        assert_eq!(r.unclassified_gaps, 0, "{r}");
    }
}

#[test]
fn mutation_is_caught() {
    let (mut a, m) = small_smart();
    a.relations.retain(|r| !matches!(r, Relation::Trust { .. }));
    let goals = vec![goal_of(&a, "K P { Fee = iter(+, y); }")];
    let popts = ProverOptions { mutation: Some(Mutation::DropK5Trust), ..Default::default() };
    let r = crosscheck(&a, &goals, &m, popts, OracleOptions::default());
    assert_eq!(r.soundness_discrepancies, 1);
    assert!(r.goals[0].semantic.witness.is_some());
    let r = crosscheck(&a, &goals, &m, ProverOptions::default(), OracleOptions::default());
    assert_eq!(r.soundness_discrepancies, 0);
}

#[test]
fn report_serialises() {
    let b = bundle(SPOTCHECK);
    let m = b.model.unwrap();
    let r = crosscheck(&b.architecture, &b.goals, &m, ProverOptions::default(), OracleOptions::default());
    let j = serde_json::to_value(&r).unwrap();
    assert_eq!(j["goals"].as_array().unwrap().len(), 3);
    assert_eq!(j["goals"][0]["agreement"]["status"], "agree");
    let back: CrosscheckReport = serde_json::from_value(j).unwrap();
    assert_eq!(back, r);
}
