//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use privarch::dsl::{
    parse_bundle, parse_goals, pretty_print, Bundle, EXAMPLES, HASH_INJECTIVITY, SMART_METERING, SPOTCHECK,
};
use privarch::gen::{batch, MAX_ARRAYS, MAX_COMPONENTS, MAX_RELATIONS};
use privarch::oracle::{
    crosscheck, formula_family, holds, Agreement, CrosscheckReport, Oracle, OracleOptions, Verdict,
};
use privarch::prover::{ProofOutcome, Prover, ProverOptions};
use privarch::semantics::{check_trace, Event, ViolationKind};
use privarch::{Architecture, Formula, Relation, VarRef};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<String, String> {
    let e = t.elapsed();
    ensure(e < limit, format!("took {e:.2?}, limit {limit:?}"))?;
    Ok(format!("{e:.2?}"))
}

/// Every prover outcome observed, for the termination criterion.
#[derive(Default)]
struct Log {
    outcomes: Vec<(String, ProofOutcome)>,
}

impl Log {
    fn prove(&mut self, p: &Prover, g: &Formula) -> ProofOutcome {
        let o = p.prove(g);
        self.outcomes.push((g.to_string(), o.clone()));
        o
    }

    fn record(&mut self, r: &CrosscheckReport) {
        self.outcomes.extend(r.goals.iter().map(|g| (g.goal.clone(), g.prover.clone())));
    }
}

fn goal(a: &Architecture, src: &str) -> Formula {
    parse_goals(a, src).expect("goal parses").remove(0)
}

fn without_trust(a: &Architecture) -> Architecture {
    let mut a = a.clone();
    a.relations.retain(|r| !matches!(r, Relation::Trust { .. }));
    a
}

fn case_study(log: &mut Log) -> Check {
    let t = Instant::now();
    let b = parse_bundle(SMART_METERING).map_err(|e| format!("{e:?}"))?;
    let p = Prover::new(&b.architecture, ProverOptions::default());
    ensure(b.goals.len() == 3, "expected three goals")?;
    let d: Vec<_> = b.goals.iter().map(|g| log.prove(&p, g)).collect();
    let d: Vec<_> = d
        .iter()
        .zip(&b.goals)
        .map(|(o, g)| o.derivation().ok_or(format!("{g} not proved")))
        .collect::<Result<_, _>>()?;
    ensure(d[0].rule == "H2", format!("Has^all_P(Fee) via {}", d[0].rule))?;
    ensure(d[1].count("H6") == 3, "three H6 applications expected")?;
    ensure(d[2].rule == "K∧" && d[2].count("K5") == 3, "K∧ over three K5 expected")?;
    let time = within(t, Duration::from_secs(1))?;
    Ok(format!("H2, 3×H6, K∧ over 3×K5 in {time}"))
}

fn meter_access(log: &mut Log) -> Check {
    let t = Instant::now();
    let a = parse_bundle(SMART_METERING).map_err(|e| format!("{e:?}"))?.architecture;
    let p = Prover::new(&a, ProverOptions::default());
    let mut rules = Vec::new();
    for v in ["Cons", "x", "y", "Fee"] {
        let o = log.prove(&p, &goal(&a, &format!("hasall M ({v})")));
        let d = o.derivation().ok_or(format!("Has^all_M({v}) not proved"))?;
        rules.push(format!("{v}:{}", d.rule));
    }
    let time = within(t, Duration::from_secs(1))?;
    Ok(format!("{} in {time}", rules.join(" ")))
}

fn negative_control(log: &mut Log) -> Check {
    let t = Instant::now();
    let b = parse_bundle(SMART_METERING).map_err(|e| format!("{e:?}"))?;
    let a = without_trust(&b.architecture).with_uniform_range(2);
    let mut model = b.model.clone().ok_or("no model")?;
    model.interp.domain_lo = 0;
    model.interp.domain_hi = 1;
    let p = Prover::new(&a, ProverOptions::default());
    let k = goal(&a, "K P { Fee = iter(+, y); y[t] = F(x[t]); x[t] = S(Cons[t]); }");
    let o = log.prove(&p, &k);
    ensure(matches!(o, ProofOutcome::NotProvable { .. }), format!("K goal outcome: {o:?}"))?;
    let v = holds(&a, &k, &model, OracleOptions::default());
    ensure(v.verdict == Verdict::Fails && v.exhaustive, format!("K goal verdict {:?}", v.verdict))?;
    let w = v.witness.ok_or("no witness")?;
    let full = Prover::new(&b.architecture, ProverOptions::default());
    for g in &b.goals[..2] {
        let with = log.prove(&full, g);
        let without = log.prove(&p, g);
        ensure(
            with.derivation().map(|d| d.rules()) == without.derivation().map(|d| d.rules()) && without.is_proved(),
            format!("{g} changed without trust"),
        )?;
    }
    let time = within(t, Duration::from_secs(10))?;
    Ok(format!("K not provable, oracle fails ({}), Has goals unchanged, {time}", w.note))
}

struct Suite {
    reports: Vec<(u64, CrosscheckReport)>,
    elapsed: Duration,
    in_space: bool,
}

fn random_suite(log: &mut Log) -> Suite {
    let t = Instant::now();
    let mut reports = Vec::new();
    let mut in_space = true;
    for g in batch(1, 200) {
        let a = &g.architecture;
        in_space &=
            a.components.len() <= MAX_COMPONENTS && a.arrays.len() <= MAX_ARRAYS && a.relations.len() <= MAX_RELATIONS;
        let r = crosscheck(a, &formula_family(a), &g.model, ProverOptions::default(), OracleOptions::default());
        log.record(&r);
        reports.push((g.seed, r));
    }
    Suite { reports, elapsed: t.elapsed(), in_space }
}

fn soundness(s: &Suite) -> Check {
    ensure(s.in_space, "an architecture left the generator space")?;
    let inexhaustive: Vec<u64> = s.reports.iter().filter(|(_, r)| !r.exhaustive).map(|(seed, _)| *seed).collect();
    ensure(inexhaustive.is_empty(), format!("non-exhaustive explorations for seeds {inexhaustive:?}"))?;
    let proved: usize = s.reports.iter().map(|(_, r)| r.goals.iter().filter(|g| g.proved).count()).sum();
    let bad: Vec<String> =
        s.reports.iter().flat_map(|(seed, r)| r.soundness().map(move |g| format!("seed {seed}: {}", g.goal))).collect();
    ensure(bad.is_empty(), format!("{} discrepancies: {}", bad.len(), bad.join("; ")))?;
    ensure(s.elapsed < Duration::from_secs(600), format!("took {:.2?}", s.elapsed))?;
    Ok(format!("200 architectures, {proved} proved formulas all hold, 0 discrepancies, {:.2?}", s.elapsed))
}

fn completeness(s: &Suite) -> Check {
    let mut valid = 0;
    let mut gaps = 0;
    let mut unclassified = Vec::new();
    for (seed, r) in &s.reports {
        for g in &r.goals {
            if g.semantic.verdict == Verdict::Holds {
                valid += 1;
            }
            match g.agreement {
                Agreement::CompletenessGap(k) => {
                    gaps += 1;
                    let explained = g.explanation.as_deref().is_some_and(|e| !e.is_empty());
                    if k == privarch::oracle::GapKind::Unclassified || !explained {
                        unclassified.push(format!("seed {seed}: {}", g.goal));
                    }
                }
                Agreement::Inconclusive => unclassified.push(format!("seed {seed}: {} inconclusive", g.goal)),
                _ => {}
            }
        }
    }
    ensure(unclassified.is_empty(), format!("{} unclassified: {}", unclassified.len(), unclassified.join("; ")))?;
    Ok(format!(
        "{valid} valid formulas, {} proved, {gaps} classified gaps with explanations, 0 unclassified",
        valid - gaps
    ))
}

fn termination(log: &Log) -> Check {
    let exhausted: Vec<&str> = log
        .outcomes
        .iter()
        .filter(|(_, o)| matches!(o, ProofOutcome::BudgetExhausted { .. }))
        .map(|(g, _)| g.as_str())
        .collect();
    ensure(exhausted.is_empty(), format!("budget exhausted on {}", exhausted.join("; ")))?;
    Ok(format!("{} prover invocations, none exhausted depth 4", log.outcomes.len()))
}

fn injectivity() -> Check {
    let b = parse_bundle(HASH_INJECTIVITY).map_err(|e| format!("{e:?}"))?;
    let o = Prover::new(&b.architecture, ProverOptions::default()).prove(&b.goals[0]);
    let d = o.derivation().ok_or(format!("x1 = x2 not derived: {o:?}"))?;
    ensure(d.rule == "K▷" && d.count("K▷") == 1, format!("{} K▷ steps", d.count("K▷")))?;
    let facts: Vec<&str> = d.premises.iter().filter(|p| p.rule != "rule").map(|p| p.rule.as_str()).collect();
    ensure(facts.len() == 3, format!("premises {facts:?}"))?;
    Ok(format!("one K▷ step over {} premise facts ({})", facts.len(), facts.join(", ")))
}

fn spotcheck() -> Check {
    let b = parse_bundle(SPOTCHECK).map_err(|e| format!("{e:?}"))?;
    let a = &b.architecture;
    let model = b.model.clone().ok_or("no model")?;
    let p = Prover::new(a, ProverOptions::default());
    let o = Oracle::new(a, &model, OracleOptions::default());
    let (one, belief, knowledge) = (&b.goals[0], &b.goals[1], &b.goals[2]);
    ensure(
        matches!(one, Formula::HasOne { var, .. } if *var == VarRef::whole("Cons")),
        "first goal is Has^one_P(Cons)",
    )?;
    for g in [one, belief] {
        ensure(p.prove(g).is_proved(), format!("{g} not provable"))?;
        ensure(o.holds(g).verdict == Verdict::Holds, format!("{g} does not hold"))?;
    }
    ensure(!p.prove(knowledge).is_proved(), format!("{knowledge} provable"))?;
    ensure(o.holds(knowledge).verdict == Verdict::Fails, format!("{knowledge} holds"))?;
    let eqs = a
        .relations
        .iter()
        .find_map(|r| match r {
            Relation::Spotcheck { eqs, .. } => Some(eqs.clone()),
            _ => None,
        })
        .ok_or("no spotcheck relation")?;
    let exp = o.exploration();
    let mut rejected = 0;
    for id in 0..exp.len() {
        let trace = exp.trace_to(id);
        if !trace.iter().any(|e| matches!(e, Event::Spotcheck { .. })) {
            continue;
        }
        for index in 0..2 {
            for value in model.interp.domain() {
                let mut t = trace.clone();
                t.push(Event::Spotcheck {
                    checker: "P".into(),
                    source: "M".into(),
                    array: "Cons".into(),
                    index,
                    value,
                    eqs: eqs.clone(),
                });
                let v = check_trace(&t, a).err().ok_or("second spotcheck accepted")?;
                ensure(v.iter().any(|v| v.kind == ViolationKind::RepeatedSpotcheck), "wrong violation")?;
                rejected += 1;
            }
        }
    }
    ensure(rejected > 0, "no trace with a spotcheck was explored")?;
    Ok(format!("Has^one and B proved and hold, K neither, {rejected} double-spotcheck traces rejected"))
}

fn round_trip_and_determinism() -> Check {
    for (name, src) in EXAMPLES {
        let b = parse_bundle(src).map_err(|e| format!("{name}: {e:?}"))?;
        let printed = pretty_print(&b);
        let again: Bundle = parse_bundle(&printed).map_err(|e| format!("{name} reprint: {e:?}"))?;
        ensure(again == b, format!("{name}: round trip changed the bundle"))?;
        ensure(pretty_print(&again) == printed, format!("{name}: printing is not stable"))?;
    }
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/examples/smart_metering.parch");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_privarch"))
            .args(["simulate", "--seed", "7", "--count", "3", "--json"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())
    };
    let (x, y) = (run()?, run()?);
    ensure(x.status.success() && !x.stdout.is_empty(), "simulate failed")?;
    ensure(x.stdout == y.stdout, "simulate output differs between runs")?;
    Ok(format!("{} examples round-trip, simulate --seed 7 byte-stable ({} bytes)", EXAMPLES.len(), x.stdout.len()))
}

fn main() {
    let mut log = Log::default();
    let mut results: Vec<(usize, &str, Check)> = Vec::new();
    results.push((1, "case-study goals", case_study(&mut log)));
    results.push((2, "meter access", meter_access(&mut log)));
    results.push((3, "negative control without trust", negative_control(&mut log)));
    let suite = random_suite(&mut log);
    results.push((4, "soundness on random architectures", soundness(&suite)));
    results.push((5, "completeness spot-check", completeness(&suite)));
    results.push((6, "prover termination", termination(&log)));
    results.push((7, "deduction engine", injectivity()));
    results.push((8, "spotcheck semantics", spotcheck()));
    results.push((9, "round trip and determinism", round_trip_and_determinism()));
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {n} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
