use super::*;
use crate::dsl::{parse_bundle, Bundle, SMART_METERING, SPOTCHECK};
use crate::model::*;

fn smart() -> Bundle {
    parse_bundle(SMART_METERING).unwrap()
}

fn eq(src: &str) -> Equation {
    let b = parse_bundle(&format!(
        "architecture e {{ component M P; array Cons[3]; array x[3]; array y[3]; var Fee; fun S/1; fun F/1; }} goals {{ K P {{ {src} }} }}"
    ))
    .unwrap();
    match &b.goals[0] {
        Formula::Knows { eqs, .. } => eqs[0].clone(),
        _ => unreachable!(),
    }
}

fn attest(a: &Architecture) -> Attestation {
    a.relations
        .iter()
        .find_map(|r| match r {
            Relation::VerifyAttest { attest, .. } => Some(attest.clone()),
            _ => None,
        })
        .unwrap()
}

/// The meter computes everything from `cons`, sends the fee and the provider verifies.
fn honest(a: &Architecture, cons: [i64; 3], fee: i64) -> Trace {
    let mut t = vec![Event::Has {
        owner: "M".into(),
        assignment: Assignment { var: VarRef::whole("Cons"), values: cons.to_vec() },
    }];
    for k in 0..3 {
        t.push(Event::Compute { owner: "M".into(), eq: eq(&format!("x[{k}] = S(Cons[{k}])")) });
    }
    for k in 0..3 {
        t.push(Event::Compute { owner: "M".into(), eq: eq(&format!("y[{k}] = F(x[{k}])")) });
    }
    t.push(Event::Compute { owner: "M".into(), eq: eq("Fee = iter(+, y)") });
    t.push(Event::Receive {
        receiver: "P".into(),
        sender: "M".into(),
        statements: vec![SentStatement { statement: Statement::Attest(attest(a)), snapshot: vec![] }],
        payload: vec![Assignment { var: VarRef::whole("Fee"), values: vec![fee] }],
    });
    t.push(Event::VerifyAttest { owner: "P".into(), attest: attest(a) });
    t
}

#[test]
fn initial_state_holds_trust_only() {
    let a = smart().architecture;
    let s = initial_state(&a);
    let p = s.get("P").unwrap().live().unwrap();
    assert_eq!(p.trusts.iter().collect::<Vec<_>>(), vec!["M"]);
    assert!(p.vars.is_empty() && p.pk.is_empty() && p.pb.is_empty());
    assert!(s.get("M").unwrap().live().unwrap().trusts.is_empty());

    let mutual = parse_bundle("architecture m { component A B; trust A B; trust B A; }").unwrap().architecture;
    let s = initial_state(&mutual);
    assert_eq!(s.get("A").unwrap().live().unwrap().trusts.iter().collect::<Vec<_>>(), vec!["B"]);
    assert_eq!(s.get("B").unwrap().live().unwrap().trusts.iter().collect::<Vec<_>>(), vec!["A"]);
}

#[test]
fn honest_trace_computes_the_fee() {
    let b = smart();
    let a = &b.architecture;
    let interp = &b.model.as_ref().unwrap().interp;
    let t = honest(a, [1, 0, 2], 6);
    assert_eq!(check_trace(&t, a), Ok(()));
    let s = run_trace(&t, a, interp).unwrap();
    let p = s.get("P").unwrap();
    assert_eq!(p.value(&Slot::scalar("Fee")), Some(6));
    let pk = &p.live().unwrap().pk;
    for e in ["Fee = iter(+, y)", "y[0] = F(x[0])", "y[2] = F(x[2])", "x[1] = S(Cons[1])"] {
        assert!(pk.contains(&eq(e)), "{e}");
    }
    assert_eq!(pk.len(), 7);
    let m = s.get("M").unwrap();
    assert_eq!(m.value(&Slot::scalar("Fee")), Some(6));
    assert!(a.all_slots().iter().all(|x| m.value(x).is_some()));
    assert!(m.live().unwrap().pk.contains(&eq("x[2] = S(Cons[2])")));
}

#[test]
fn empty_trace_is_initial() {
    let b = smart();
    let s = run_trace(&[], &b.architecture, &b.model.unwrap().interp).unwrap();
    assert_eq!(s, initial_state(&b.architecture));
}

#[test]
fn compatibility_examples() {
    let a = smart().architecture;
    let find =
        |kind: &str, owner: &str| a.relations.iter().find(|r| r.kind() == kind && r.owner() == owner).unwrap().clone();
    let cx = a.relations.iter().find(|r| r.to_string() == "Compute_M(x[t] = S(Cons[t]))").unwrap();
    assert!(compatible_event(&Event::Compute { owner: "M".into(), eq: eq("x[2] = S(Cons[2])") }, cx, &a));
    let out_of_range = eq("x[2] = S(Cons[2])").substitute_index("unused", 0);
    let bad = Equation::eq(Term::Var(VarRef::at("x", 3)), Term::app("S", vec![Term::Var(VarRef::at("Cons", 3))]));
    assert!(!compatible_event(&Event::Compute { owner: "M".into(), eq: bad }, cx, &a));
    assert!(compatible_event(&Event::Compute { owner: "M".into(), eq: out_of_range }, cx, &a));
    let recv = find("Receive", "P");
    let e = Event::Receive {
        receiver: "P".into(),
        sender: "M".into(),
        statements: vec![SentStatement { statement: Statement::Attest(attest(&a)), snapshot: vec![] }],
        payload: vec![Assignment { var: VarRef::whole("Fee"), values: vec![7] }],
    };
    assert!(compatible_event(&e, &recv, &a));
    let fee = a.relations.iter().find(|r| r.to_string() == "Compute_M(Fee = iter(+, y))").unwrap();
    assert!(!compatible_event(&Event::Compute { owner: "P".into(), eq: eq("Fee = iter(+, y)") }, fee, &a));
}

#[test]
fn use_before_definition() {
    let b = smart();
    let a = &b.architecture;
    let mut t = honest(a, [1, 0, 2], 6);
    t.swap(1, 4); // y[0] before x[0]
    let v = check_trace(&t, a).unwrap_err();
    assert_eq!(v[0].position, 1);
    assert_eq!(v[0].kind, ViolationKind::UseBeforeDefinition);
}

#[test]
fn reassignment_and_unlicensed_derive() {
    let b = smart();
    let a = &b.architecture;
    let mut t = honest(a, [1, 0, 2], 6);
    t.push(t[0].clone());
    let v = check_trace(&t, a).unwrap_err();
    assert!(v.iter().any(|v| v.kind == ViolationKind::Reassignment && v.position == t.len() - 1));

    let d = Event::Derive {
        owner: "P".into(),
        sources: vec![VarRef::whole("Fee")],
        assignment: Assignment { var: VarRef::at("y", 0), values: vec![1] },
    };
    let v = check_trace(&[d], a).unwrap_err();
    assert_eq!(v[0].kind, ViolationKind::UnlicensedDerive);
}

#[test]
fn derive_with_licence() {
    let b = smart();
    let a = &b.architecture;
    let interp = &b.model.as_ref().unwrap().interp;
    // P receives a fee but has no x; a licensed derive of x[0] needs y[0] first.
    let d = Event::Derive {
        owner: "P".into(),
        sources: vec![VarRef::at("y", 0)],
        assignment: Assignment { var: VarRef::at("x", 0), values: vec![1] },
    };
    let v = check_trace(std::slice::from_ref(&d), a).unwrap_err();
    assert_eq!(v[0].kind, ViolationKind::UseBeforeDefinition);
    let space = EventSpace::new(a, interp, &EnumBounds::default());
    let s = run_trace_config(&honest(a, [1, 0, 2], 6), a, interp).unwrap();
    assert!(space.enabled(&s, interp).iter().all(|e| e.kind() != "derive"));
}

#[test]
fn two_spotchecks_are_rejected() {
    let b = parse_bundle(SPOTCHECK).unwrap();
    let a = &b.architecture;
    let interp = &b.model.as_ref().unwrap().interp;
    let sc = |k: usize| Event::Spotcheck {
        checker: "P".into(),
        source: "M".into(),
        array: "Cons".into(),
        index: k,
        value: 1,
        eqs: vec![eq("x[k] = S(Cons[k])")],
    };
    let recv = Event::Receive {
        receiver: "P".into(),
        sender: "M".into(),
        statements: vec![],
        payload: vec![Assignment { var: VarRef::whole("x"), values: vec![1, 0] }],
    };
    let ok = vec![recv.clone(), sc(0)];
    assert_eq!(check_trace(&ok, a), Ok(()));
    let s = run_trace(&ok, a, interp).unwrap();
    let p = s.get("P").unwrap().live().unwrap();
    assert_eq!(p.vars.get(&Slot::elem("Cons", 0)), Some(&1));
    assert_eq!(p.pb.len(), 2);
    assert!(p.pk.is_empty());

    let v = check_trace(&[recv.clone(), sc(0), sc(1)], a).unwrap_err();
    assert_eq!(v.len(), 1);
    assert_eq!((v[0].position, v[0].kind), (2, ViolationKind::RepeatedSpotcheck));

    // A sampled value contradicting the received x sends the checker to Error.
    let s = run_trace(&[recv, sc(1)], a, interp).unwrap();
    assert!(s.get("P").unwrap().is_error());
}

#[test]
fn checks_and_errors() {
    let src = "architecture c { component A; var u, v; fun f/1; has A (u); compute A (v = f(u)); check A { v = f(u) }; check A { v = u }; }
        model { domain 0..2; fun f(a) = a + 1; }";
    let b = parse_bundle(src).unwrap();
    let (a, interp) = (&b.architecture, &b.model.as_ref().unwrap().interp);
    let has = Event::Has { owner: "A".into(), assignment: Assignment { var: VarRef::whole("u"), values: vec![1] } };
    let comp = Event::Compute {
        owner: "A".into(),
        eq: a
            .relations
            .iter()
            .find_map(|r| match r {
                Relation::Compute { eq, .. } => Some(eq.clone()),
                _ => None,
            })
            .unwrap(),
    };
    let checks: Vec<Event> = a
        .relations
        .iter()
        .filter_map(|r| match r {
            Relation::Check { owner, eqs } => Some(Event::Check { owner: owner.clone(), eqs: eqs.clone() }),
            _ => None,
        })
        .collect();
    let s = run_trace(&[has.clone(), comp.clone(), checks[0].clone()], a, interp).unwrap();
    assert_eq!(s.get("A").unwrap().live().unwrap().pk.len(), 1);
    let s = run_trace(&[has.clone(), comp.clone(), checks[1].clone()], a, interp).unwrap();
    assert!(s.get("A").unwrap().is_error());
    let err = run_trace(&[has, comp, checks[1].clone(), checks[0].clone()], a, interp).unwrap_err();
    assert!(matches!(err, TraceError::Inconsistent(v) if v[0].kind == ViolationKind::AfterError && v[0].position == 3));
}

#[test]
fn untrusted_attestation_adds_nothing() {
    let b = smart();
    let mut a = b.architecture.clone();
    a.relations.retain(|r| !matches!(r, Relation::Trust { .. }));
    let s = run_trace(&honest(&a, [1, 0, 2], 6), &a, &b.model.unwrap().interp).unwrap();
    let p = s.get("P").unwrap();
    assert!(!p.is_error());
    assert!(p.live().unwrap().pk.is_empty());
}

#[test]
fn proofs_are_bound_to_sent_values() {
    let src = "architecture z { component M P; var a, b; fun g/1;
        has M (a); compute M (b = g(a));
        receive P from M { proof M { b = g(a) } } vars { b };
        verify_proof P (proof M { b = g(a) }); }
        model { domain 0..2; fun g(v) = v + 1; }";
    let bd = parse_bundle(src).unwrap();
    let (a, interp) = (&bd.architecture, &bd.model.as_ref().unwrap().interp);
    let Relation::VerifyProof { proof, .. } = a.relations[3].clone() else { panic!() };
    let run = |delivered: i64| {
        let mut t =
            vec![Event::Has { owner: "M".into(), assignment: Assignment { var: VarRef::whole("a"), values: vec![1] } }];
        t.push(Event::Compute { owner: "M".into(), eq: eq_of(a, 1) });
        let snap =
            snapshot_for(&Statement::Proof(proof.clone()), &run_trace(&t, a, interp).unwrap().components[0].1, a);
        t.push(Event::Receive {
            receiver: "P".into(),
            sender: "M".into(),
            statements: vec![SentStatement { statement: Statement::Proof(proof.clone()), snapshot: snap }],
            payload: vec![Assignment { var: VarRef::whole("b"), values: vec![delivered] }],
        });
        t.push(Event::VerifyProof { owner: "P".into(), proof: proof.clone() });
        run_trace(&t, a, interp).unwrap()
    };
    let good = run(2);
    assert!(good.get("P").unwrap().live().unwrap().pk.len() == 1);
    assert!(run(9).get("P").unwrap().is_error());
}

fn eq_of(a: &Architecture, i: usize) -> Equation {
    match &a.relations[i] {
        Relation::Compute { eq, .. } => eq.clone(),
        _ => panic!(),
    }
}

#[test]
fn forged_snapshot_is_rejected() {
    let src = "architecture z { component M P; var a; receive P from M { proof M { a = 1 } } vars { }; }";
    let a = parse_bundle(src).unwrap().architecture;
    let Relation::Receive { statements, .. } = &a.relations[0] else { panic!() };
    let e = Event::Receive {
        receiver: "P".into(),
        sender: "M".into(),
        statements: vec![SentStatement { statement: statements[0].clone(), snapshot: vec![(Slot::scalar("a"), 1)] }],
        payload: vec![],
    };
    let err = run_trace(&[e], &a, &Interpretation::new(0, 1)).unwrap_err();
    assert!(matches!(err, TraceError::Step { source: StepError::Snapshot, .. }));
}

#[test]
fn jsonl_round_trip_and_determinism() {
    let b = smart();
    let model = b.model.clone().unwrap();
    let (t1, c1) = random_trace(&b.architecture, &model, 7, 64);
    let (t2, _) = random_trace(&b.architecture, &model, 7, 64);
    assert_eq!(t1, t2);
    assert!(!t1.is_empty());
    let text = trace_to_jsonl(&t1);
    assert_eq!(text.lines().count(), t1.len());
    let back = trace_from_jsonl(&text).unwrap();
    assert_eq!(back, t1);
    assert_eq!(trace_to_jsonl(&back), text);
    assert_eq!(check_trace(&t1, &b.architecture), Ok(()));
    assert_eq!(run_trace_config(&t1, &b.architecture, &model.interp).unwrap(), c1);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Along random traces only the owner changes, knowledge grows and nothing is written twice.
        #[test]
        fn locality_growth_and_single_assignment(seed in any::<u64>(), which in 0usize..2) {
            let b = parse_bundle([SMART_METERING, SPOTCHECK][which]).unwrap();
            let model = b.model.clone().unwrap();
            let a = &b.architecture;
            let (t, _) = random_trace(a, &model, seed, 40);
            prop_assert!(check_trace(&t, a).is_ok());
            let mut cfg = Configuration::initial(a);
            for e in &t {
                let next = step(e, &cfg, a, &model.interp).unwrap();
                for ((c, before), (_, after)) in cfg.state.components.iter().zip(&next.state.components) {
                    if c != e.owner() {
                        prop_assert_eq!(before, after);
                    } else if let (Some(b), Some(n)) = (before.live(), after.live()) {
                        prop_assert!(b.pk.is_subset(&n.pk) && b.pb.is_subset(&n.pb));
                        prop_assert!(b.vars.iter().all(|(s, v)| n.vars.get(s) == Some(v)));
                    }
                }
                cfg = next;
            }
        }
    }
}
