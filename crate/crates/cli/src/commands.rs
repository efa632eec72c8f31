use std::fmt::Write as _;
use std::path::Path;

use privarch::consistency::check_architecture;
use privarch::dsl::{load_bundle, parse_goals, Bundle, LoadError, SourceDiagnostic};
use privarch::gen::batch;
use privarch::oracle::{self, Agreement, CrosscheckReport, KnowledgeReading, Oracle, OracleOptions, Verdict};
use privarch::prover::{DeductionBudget, Mutation, ProofOutcome, Prover, ProverOptions};
use privarch::semantics::{random_trace, ComponentState, GlobalState};
use privarch::{Architecture, Formula, Model};
use serde_json::json;

use crate::style::Style;
use crate::{BoundsArgs, CheckArgs, CrosscheckArgs, Exit, Failure, MutationArg, ProveArgs, SimulateArgs, VerifyArgs};

type Outcome = Result<Exit, Failure>;

fn print_json(v: &serde_json::Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("JSON values serialise"));
}

fn diagnostics(path: &Path, ds: &[SourceDiagnostic], json: bool) -> Failure {
    if json {
        print_json(&json!({ "path": path.display().to_string(), "diagnostics": ds }));
        return Failure { exit: Exit::Parse, message: String::new() };
    }
    let mut m = String::new();
    for d in ds {
        let _ = writeln!(m, "{}:{d}", path.display());
    }
    Failure { exit: Exit::Parse, message: m }
}

fn load(path: &Path, json: bool) -> Result<Bundle, Failure> {
    load_bundle(path).map_err(|e| match e {
        LoadError::Io { .. } => Failure::usage(format!("error: {e}")),
        LoadError::Parse { diagnostics: ds, .. } => diagnostics(path, &ds, json),
    })
}

/// Refuses inconsistent architectures, printing the failed checks.
fn consistent(a: &Architecture) -> Result<(), Failure> {
    let report = check_architecture(a);
    if report.is_pass() {
        return Ok(());
    }
    let mut m = format!("error: architecture `{}` is inconsistent\n", a.name);
    for e in report.failures() {
        let _ = writeln!(m, "  {}: {}", e.check, e.message);
    }
    Err(Failure { exit: Exit::Inconsistent, message: m })
}

fn model_of(b: &Bundle) -> Result<Model, Failure> {
    b.model.clone().ok_or_else(|| Failure::usage("error: the bundle has no model section"))
}

/// Goals chosen by `--goal` (indices or goal text), or every goal of the bundle.
fn select_goals(
    path: &Path,
    b: &Bundle,
    arch: &Architecture,
    sel: &[String],
    json: bool,
) -> Result<Vec<Formula>, Failure> {
    if sel.is_empty() {
        return Ok(b.goals.clone());
    }
    let mut out = Vec::new();
    for s in sel {
        if let Ok(n) = s.trim().parse::<usize>() {
            let g = n.checked_sub(1).and_then(|i| b.goals.get(i)).ok_or_else(|| {
                Failure::usage(format!("error: goal {n} does not exist (the bundle has {} goals)", b.goals.len()))
            })?;
            out.push(g.clone());
        } else {
            out.extend(parse_goals(arch, s).map_err(|ds| diagnostics(path, &ds, json))?);
        }
    }
    Ok(out)
}

fn mutation(m: Option<MutationArg>) -> Option<Mutation> {
    m.map(|MutationArg::DropK5Trust| Mutation::DropK5Trust)
}

pub fn check(args: &CheckArgs, style: Style) -> Outcome {
    let b = load(&args.path, args.json)?;
    let report = check_architecture(&b.architecture);
    if args.json {
        print_json(&json!({ "architecture": b.architecture.name, "consistent": report.is_pass(), "report": report }));
    } else {
        for line in report.to_string().lines() {
            let painted = if line.contains(" FAIL ") { style.bad(line) } else { line.to_string() };
            out!("{painted}");
        }
        let verdict = if report.is_pass() { style.good("consistent") } else { style.bad("inconsistent") };
        out!("{}: {verdict}", b.architecture.name);
    }
    Ok(if report.is_pass() { Exit::Success } else { Exit::Inconsistent })
}

pub fn prove(args: &ProveArgs, style: Style) -> Outcome {
    let b = load(&args.path, args.json)?;
    let a = &b.architecture;
    consistent(a)?;
    let goals = select_goals(&args.path, &b, a, &args.goal, args.json)?;
    if goals.is_empty() {
        return Err(Failure::usage("error: the bundle has no goals; pass --goal"));
    }
    let mut budget = DeductionBudget::default();
    if let Some(d) = args.budget {
        budget.depth = d;
    }
    let prover = Prover::new(a, ProverOptions { budget, mutation: mutation(args.mutate) });
    let outcomes: Vec<ProofOutcome> = goals.iter().map(|g| prover.prove(g)).collect();
    let all = outcomes.iter().all(ProofOutcome::is_proved);
    if args.json {
        let rows: Vec<_> =
            goals.iter().zip(&outcomes).map(|(g, o)| json!({ "goal": g.to_string(), "result": o })).collect();
        print_json(&json!({ "architecture": a.name, "all_proved": all, "goals": rows }));
    } else {
        for (i, (g, o)) in goals.iter().zip(&outcomes).enumerate() {
            out!("{} {g}", style.bold(&format!("goal {}:", i + 1)));
            match o {
                ProofOutcome::Proved { derivation } => {
                    out!("  {}", style.good("proved"));
                    for line in derivation.to_string().lines() {
                        out!("    {line}");
                    }
                }
                ProofOutcome::NotProvable { reason } => out!("  {}: {reason}", style.bad("not provable")),
                ProofOutcome::BudgetExhausted { reason } => out!("  {}: {reason}", style.note("budget exhausted")),
            }
        }
    }
    Ok(if all { Exit::Success } else { Exit::GoalFailed })
}

fn state_text(s: &GlobalState) -> String {
    let mut out = String::new();
    for (c, st) in &s.components {
        match st {
            ComponentState::Error => {
                let _ = writeln!(out, "  {c}: error");
            }
            ComponentState::Live(l) => {
                let vars: Vec<String> = l.vars.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(out, "  {c}: {{{}}}", vars.join(", "));
                for e in &l.pk {
                    let _ = writeln!(out, "    knows {e}");
                }
                for e in &l.pb {
                    let _ = writeln!(out, "    believes {e}");
                }
            }
        }
    }
    out
}

pub fn simulate(args: &SimulateArgs) -> Outcome {
    let b = load(&args.path, args.json)?;
    let model = model_of(&b)?;
    let a = &b.architecture;
    consistent(a)?;
    for i in 0..args.count as u64 {
        let seed = args.seed.wrapping_add(i);
        let (trace, cfg) = random_trace(a, &model, seed, args.max_len);
        if args.json {
            let line = json!({ "seed": seed, "trace": trace, "final": cfg.state });
            out!("{}", serde_json::to_string(&line).expect("JSON values serialise"));
        } else {
            out!("trace {} (seed {seed}, {} events)", i + 1, trace.len());
            for e in &trace {
                out!("  {e}");
            }
            out!("final state");
            out!("{}", state_text(&cfg.state).trim_end());
        }
    }
    Ok(Exit::Success)
}

fn parse_domain(s: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::usage(format!("error: --domain expects LO..HI, got `{s}`"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let (lo, hi) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Applies bound overrides; returns the adjusted architecture, model and oracle options.
fn bounded(a: &Architecture, model: &Model, o: &BoundsArgs) -> Result<(Architecture, Model, OracleOptions), Failure> {
    let mut m = model.clone();
    if let Some(d) = &o.domain {
        (m.interp.domain_lo, m.interp.domain_hi) = parse_domain(d)?;
    }
    if o.max_adversarial.is_some() {
        m.bounds.max_adversarial = o.max_adversarial;
    }
    if let Some(n) = o.max_states {
        m.bounds.max_states = n;
    }
    if let Some(n) = o.max_trace_len {
        m.bounds.max_trace_len = n;
    }
    if o.value_cap.is_some() {
        m.bounds.value_cap = o.value_cap;
    }
    let a = match o.range {
        Some(0) => return Err(Failure::usage("error: --range must be at least 1")),
        Some(r) => a.with_uniform_range(r),
        None => a.clone(),
    };
    let reading = if o.literal { KnowledgeReading::Literal } else { KnowledgeReading::Viable };
    Ok((a, m, OracleOptions { reading, ..Default::default() }))
}

fn verdict_text(v: Verdict, exhaustive: bool, style: Style) -> String {
    match v {
        Verdict::Holds => style.good("holds"),
        Verdict::Fails if exhaustive => style.bad("fails"),
        Verdict::Fails => style.bad("fails within bounds"),
        Verdict::HoldsWithinBounds => style.note("holds within bounds"),
    }
}

pub fn verify(args: &VerifyArgs, style: Style) -> Outcome {
    let b = load(&args.path, args.json)?;
    let model = model_of(&b)?;
    let (a, model, opts) = bounded(&b.architecture, &model, &args.bounds)?;
    consistent(&a)?;
    let goals = select_goals(&args.path, &b, &a, &args.goal, args.json)?;
    if goals.is_empty() {
        return Err(Failure::usage("error: the bundle has no goals; pass --goal"));
    }
    let o = Oracle::new(&a, &model, opts);
    let verdicts: Vec<_> = goals.iter().map(|g| o.holds(g)).collect();
    let all = verdicts.iter().all(|v| v.holds());
    let exp = o.exploration();
    if args.json {
        print_json(&json!({
            "architecture": a.name,
            "states": exp.len(),
            "exhaustive": exp.exhaustive(),
            "all_hold": all,
            "goals": verdicts,
        }));
    } else {
        let label = if exp.exhaustive() { "exhaustive" } else { "truncated by bounds" };
        out!("{}: {} states explored ({label})", a.name, exp.len());
        for (i, v) in verdicts.iter().enumerate() {
            out!("{} {}", style.bold(&format!("goal {}:", i + 1)), v.formula);
            out!("  {}", verdict_text(v.verdict, v.exhaustive, style));
            if let Some(w) = &v.witness {
                out!("  witness: {}", w.note);
                for e in &w.trace {
                    out!("    {e}");
                }
            }
        }
    }
    Ok(if all { Exit::Success } else { Exit::GoalFailed })
}

fn report_rows(r: &CrosscheckReport, style: Style) -> String {
    let mut out = String::new();
    for line in r.to_string().lines() {
        let painted = if line.contains("SOUNDNESS") {
            style.bad(line)
        } else if line.contains("completeness gap") {
            style.note(line)
        } else {
            line.to_string()
        };
        let _ = writeln!(out, "{painted}");
    }
    out
}

pub fn crosscheck(args: &CrosscheckArgs, style: Style) -> Outcome {
    let popts = ProverOptions { mutation: mutation(args.mutate), ..Default::default() };
    let reports: Vec<(Option<u64>, CrosscheckReport)> = match (&args.path, args.random) {
        (Some(path), _) => {
            let b = load(path, args.json)?;
            let model = model_of(&b)?;
            let (a, model, oopts) = bounded(&b.architecture, &model, &args.bounds)?;
            consistent(&a)?;
            let mut goals = select_goals(path, &b, &a, &args.goal, args.json)?;
            if args.family || goals.is_empty() {
                goals.extend(oracle::formula_family(&a));
            }
            vec![(None, oracle::crosscheck(&a, &goals, &model, popts, oopts))]
        }
        (None, Some(k)) => {
            let mut out = Vec::new();
            for g in batch(args.seed, k) {
                let (a, model, oopts) = bounded(&g.architecture, &g.model, &args.bounds)?;
                let goals = oracle::formula_family(&a);
                out.push((Some(g.seed), oracle::crosscheck(&a, &goals, &model, popts, oopts)));
            }
            out
        }
        (None, None) => return Err(Failure::usage("error: pass a bundle path or --random K")),
    };
    let sum = |f: fn(&CrosscheckReport) -> usize| reports.iter().map(|(_, r)| f(r)).sum::<usize>();
    let soundness = sum(|r| r.soundness_discrepancies);
    let gaps = sum(|r| r.completeness_gaps);
    let unclassified = sum(|r| r.unclassified_gaps);
    let goals = sum(|r| r.goals.len());
    let agree = sum(|r| r.goals.iter().filter(|g| g.agreement == Agreement::Agree).count());
    if args.json {
        let rows: Vec<_> = reports.iter().map(|(seed, r)| json!({ "seed": seed, "report": r })).collect();
        print_json(&json!({
            "first_seed": args.random.map(|_| args.seed),
            "architectures": rows,
            "goals": goals,
            "agree": agree,
            "soundness_discrepancies": soundness,
            "completeness_gaps": gaps,
            "unclassified_gaps": unclassified,
        }));
    } else if args.random.is_some() {
        for (seed, r) in &reports {
            let seed = seed.expect("generated reports carry seeds");
            out!(
                "seed {seed}: {} goals, {} states, {} soundness, {} gaps ({} unclassified)",
                r.goals.len(),
                r.states,
                r.soundness_discrepancies,
                r.completeness_gaps,
                r.unclassified_gaps
            );
            if r.soundness_discrepancies + r.unclassified_gaps > 0 {
                out!("{}", report_rows(r, style).trim_end());
            }
        }
    } else {
        out!("{}", report_rows(&reports[0].1, style).trim_end());
    }
    if !args.json && reports.len() > 1 {
        let line = format!(
            "total: {} architectures, {goals} goals, {agree} agree, {soundness} soundness discrepancies, {gaps} completeness gaps ({unclassified} unclassified)",
            reports.len()
        );
        out!("{}", if soundness > 0 { style.bad(&line) } else { style.good(&line) });
    }
    Ok(if soundness > 0 { Exit::GoalFailed } else { Exit::Success })
}
