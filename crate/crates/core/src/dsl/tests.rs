use super::*;
use crate::model::*;

#[test]
fn parses_smart_metering() {
    let b = parse_bundle(SMART_METERING).unwrap();
    let a = &b.architecture;
    assert_eq!(a.components, vec!["M", "P"]);
    let kinds: Vec<String> = a.relations.iter().map(|r| r.to_string()).collect();
    assert_eq!(
        kinds,
        vec![
            "Has_M(Cons)",
            "Compute_M(x[t] = S(Cons[t]))",
            "Compute_M(y[t] = F(x[t]))",
            "Compute_M(Fee = iter(+, y))",
            "Receive_{P,M}({Attest_M({Fee = iter(+, y); y[t] = F(x[t]); x[t] = S(Cons[t])})}, {Fee})",
            "VerifAttest_P(Attest_M({Fee = iter(+, y); y[t] = F(x[t]); x[t] = S(Cons[t])}))",
            "Trust_{P,M}",
        ]
    );
    assert_eq!(a.deps.len(), 10);
    assert_eq!(b.goals.len(), 3);
    assert_eq!(a.range_of("Cons"), Some(3));
}

#[test]
fn empty_architecture() {
    let b = parse_bundle("architecture a { component C; }").unwrap();
    assert_eq!(b.architecture.components.len(), 1);
    assert!(b.architecture.relations.is_empty());
    let out = pretty_print(&b);
    assert_eq!(out.matches("component").count(), 1);
}

#[test]
fn arity_diagnostic() {
    let src = "architecture a { component M; array Cons[2]; array x[2]; var extra; fun S/1;
        compute M (x[t] = S(Cons[t], extra)); }";
    let d = parse_bundle(src).unwrap_err();
    assert!(d.iter().any(|d| d.kind == DiagKind::Arity), "{d:?}");
    assert_eq!(d[0].span.line, 2);
}

#[test]
fn undeclared_and_range_diagnostics() {
    let src = "architecture a { component M; array x[2];
        has Q (x);
        has M (x[5]);
        has M (zz); }";
    let d = parse_bundle(src).unwrap_err();
    let kinds: Vec<DiagKind> = d.iter().map(|d| d.kind).collect();
    assert!(kinds.contains(&DiagKind::Undeclared));
    assert!(kinds.contains(&DiagKind::IndexRange));
    assert_eq!(d.len(), 3);
}

#[test]
fn syntax_errors_recover_per_statement() {
    let src = "architecture a { component M;
        has M x;
        trust M;
        array y[2];
        compute M (y[t] = );
    }";
    let d = parse_bundle(src).unwrap_err();
    assert_eq!(d.iter().filter(|d| d.kind == DiagKind::Syntax).count(), 3, "{d:?}");
    assert_eq!(d.iter().map(|d| d.span.line).collect::<Vec<_>>(), vec![2, 3, 5]);
}

#[test]
fn lexical_errors_have_spans() {
    let d = parse_bundle("architecture a { component M; $ }").unwrap_err();
    assert_eq!(d[0].kind, DiagKind::Lexical);
    assert_eq!(d[0].span.col, 31);
}

#[test]
fn nested_attest_in_proof() {
    let src = "architecture a { component M P; var v, w; fun H/1;
        receive P from M { proof M { v = H(w); attest M { w = 1; }; } } vars { v };
        verify_proof P (proof M { v = H(w); attest M { w = 1; }; });
    }";
    let b = parse_bundle(src).unwrap();
    match &b.architecture.relations[1] {
        Relation::VerifyProof { proof, .. } => {
            assert_eq!(proof.items.len(), 2);
            assert!(matches!(proof.items[1], ProofItem::Attest(_)));
        }
        r => panic!("unexpected {r}"),
    }
    assert_eq!(parse_bundle(&pretty_print(&b)).unwrap(), b);
}

#[test]
fn duplicate_receive_entries_are_merged_with_warning() {
    let src = "architecture a { component M P; var v; receive P from M { } vars { v, v }; }";
    let (b, w) = parse_bundle_with_warnings(src).unwrap();
    assert_eq!(w.len(), 1);
    assert_eq!(w[0].severity, Severity::Warning);
    match &b.architecture.relations[0] {
        Relation::Receive { payload, .. } => assert_eq!(payload.len(), 1),
        _ => unreachable!(),
    }
}

#[test]
fn round_trip_smart_metering() {
    let b = parse_bundle(SMART_METERING).unwrap();
    let printed = pretty_print(&b);
    assert_eq!(parse_bundle(&printed).unwrap(), b);
    // printing is a fixpoint after one pass
    assert_eq!(pretty_print(&parse_bundle(&printed).unwrap()), printed);
}

#[test]
fn relation_order_is_preserved() {
    let src = "architecture a { component A B; trust B A; trust A B; }";
    let b = parse_bundle(src).unwrap();
    let out = pretty_print(&b);
    assert!(out.find("trust B A").unwrap() < out.find("trust A B").unwrap());
}

#[test]
fn model_and_rules_round_trip() {
    let src = "architecture a { component P; var h1, h2, x1, x2; fun H/1, G/2;
        deduce P rule inj: { ?h1 = H(?x1); ?h2 = H(?x2); ?h1 = ?h2 } => ?x1 = ?x2;
      }
      model { domain -1..2; fun H(a) = a * 2 - (a - 1); fun G(a, b) = table { (0, 0) -> 1, (0, 1) -> -1 };
        maxAdversarialComputes 1; valueCap 2; }
      goals { K P { x1 = x2 } & (B P { h1 = h2 } & hasone P (x1)); }";
    let b = parse_bundle(src).unwrap();
    assert_eq!(b.model.as_ref().unwrap().interp.domain_lo, -1);
    assert!(matches!(b.goals[0], Formula::And(_, ref r) if matches!(**r, Formula::And(..))));
    assert_eq!(parse_bundle(&pretty_print(&b)).unwrap(), b);
}

#[test]
fn metavariables_outside_rules_rejected() {
    let d = parse_bundle("architecture a { component P; var v; check P { v = ?z }; }").unwrap_err();
    assert!(d.iter().any(|d| d.message.contains("metavariable")));
    let d = parse_bundle("architecture a { component P; var v; deduce P rule r: { v = ?a } => v = ?b; }").unwrap_err();
    assert!(d.iter().any(|d| d.kind == DiagKind::Semantic));
}

#[test]
fn model_must_cover_functions() {
    let d = parse_bundle("architecture a { component P; fun F/1; } model { domain 0..1; }").unwrap_err();
    assert!(d.iter().any(|d| d.message.contains("no interpretation")));
}

#[test]
fn bom_is_ignored() {
    let plain = "architecture a { component C; }";
    assert_eq!(parse_bundle(&format!("\u{feff}{plain}")).unwrap(), parse_bundle(plain).unwrap());
}

#[test]
fn load_errors_are_distinct() {
    match load_bundle("/nonexistent/x.parch") {
        Err(LoadError::Io { .. }) => {}
        other => panic!("expected io error, got {other:?}"),
    }
}

#[test]
fn goals_parse_against_an_architecture() {
    let a = parse_bundle(SMART_METERING).unwrap().architecture;
    let g = parse_goals(&a, "hasall P (Fee); hasnone P (Cons)").unwrap();
    assert_eq!(g.len(), 2);
    let err = parse_goals(&a, "hasall P (Nope)").unwrap_err();
    assert_eq!(err[0].span.line, 1);
}
