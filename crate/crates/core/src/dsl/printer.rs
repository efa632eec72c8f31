//! Canonical pretty-printer. Output reparses to a structurally equal bundle.

use std::fmt::Write;

use super::Bundle;
use crate::model::*;

fn eq_block(eqs: &[Equation]) -> String {
    if eqs.is_empty() {
        return "{ }".into();
    }
    let body: Vec<String> = eqs.iter().map(|e| format!("{e};")).collect();
    format!("{{ {} }}", body.join(" "))
}

fn attest(a: &Attestation) -> String {
    format!("attest {} {}", a.author, eq_block(&a.equations))
}

fn statement(s: &Statement) -> String {
    match s {
        Statement::Attest(a) => attest(a),
        Statement::Proof(p) => {
            let items: Vec<String> = p
                .items
                .iter()
                .map(|i| match i {
                    ProofItem::Eq(e) => format!("{e};"),
                    ProofItem::Attest(a) => format!("{};", attest(a)),
                })
                .collect();
            if items.is_empty() {
                format!("proof {} {{ }}", p.author)
            } else {
                format!("proof {} {{ {} }}", p.author, items.join(" "))
            }
        }
    }
}

fn var_list(vs: &[VarRef]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn relation(r: &Relation) -> String {
    match r {
        Relation::Has { owner, var } => format!("has {owner} ({var});"),
        Relation::Receive { receiver, sender, statements, payload } => {
            let st: Vec<String> = statements.iter().map(statement).collect();
            let body = if st.is_empty() { "{ }".to_string() } else { format!("{{ {} }}", st.join("; ")) };
            let vars = if payload.is_empty() { "{ }".to_string() } else { format!("{{ {} }}", var_list(payload)) };
            format!("receive {receiver} from {sender}\n    {body}\n    vars {vars};")
        }
        Relation::Compute { owner, eq } => format!("compute {owner} ({eq});"),
        Relation::Check { owner, eqs } => format!("check {owner} {};", eq_block(eqs)),
        Relation::VerifyProof { owner, proof } => {
            format!("verify_proof {owner} ({});", statement(&Statement::Proof(proof.clone())))
        }
        Relation::VerifyAttest { owner, attest: a } => format!("verify_attest {owner} ({});", attest(a)),
        Relation::Spotcheck { checker, source, array, index, eqs } => {
            format!("spotcheck {checker} from {source} ({array}[{index}], {});", eq_block(eqs))
        }
        Relation::Trust { truster, trustee } => format!("trust {truster} {trustee};"),
    }
}

fn expr(e: &Expr) -> String {
    fn go(e: &Expr, prec: u8) -> String {
        match e {
            Expr::Int(n) => n.to_string(),
            Expr::Param(p) => p.clone(),
            Expr::Call(f, args) => format!("{f}({})", args.iter().map(|a| go(a, 0)).collect::<Vec<_>>().join(", ")),
            Expr::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                };
                // left-associative: the right operand needs parens at equal precedence
                let s = format!("{} {sym} {}", go(a, p), go(b, p + 1));
                if p < prec {
                    format!("({s})")
                } else {
                    s
                }
            }
        }
    }
    go(e, 0)
}

fn formula(f: &Formula) -> String {
    match f {
        Formula::And(a, b) => {
            let rhs = if matches!(**b, Formula::And(..)) { format!("({})", formula(b)) } else { formula(b) };
            format!("{} & {rhs}", formula(a))
        }
        other => other.to_string(),
    }
}

pub fn pretty_print(b: &Bundle) -> String {
    let a = &b.architecture;
    let mut out = String::new();
    let _ = writeln!(out, "architecture {} {{", a.name);
    if !a.components.is_empty() {
        let _ = writeln!(out, "  component {};", a.components.join(" "));
    }
    for d in &a.arrays {
        let _ = writeln!(out, "  array {}[{}];", d.name, d.range);
    }
    for s in &a.scalars {
        let _ = writeln!(out, "  var {s};");
    }
    for f in &a.functions {
        let _ = writeln!(out, "  fun {}/{};", f.name, f.arity);
    }
    for r in &a.relations {
        let _ = writeln!(out, "  {}", relation(r));
    }
    for d in &a.deps {
        let _ = writeln!(out, "  dep {}: {} <- {{ {} }};", d.component, d.target, var_list(&d.sources));
    }
    for r in &a.rules {
        let _ =
            writeln!(out, "  deduce {} rule {}: {} => {};", r.component, r.name, eq_block(&r.premises), r.conclusion);
    }
    if let Some(svc) = &a.service {
        let _ = writeln!(out, "  service {};", eq_block(svc));
    }
    out.push_str("}\n");

    if let Some(m) = &b.model {
        out.push_str("model {\n");
        let _ = writeln!(out, "  domain {}..{};", m.interp.domain_lo, m.interp.domain_hi);
        for (name, f) in &m.interp.functions {
            match f {
                FunInterp::Expr { params, body } => {
                    let _ = writeln!(out, "  fun {name}({}) = {};", params.join(", "), expr(body));
                }
                FunInterp::Table { entries } => {
                    let arity = entries.keys().next().map_or(1, |k| k.len());
                    let params: Vec<String> = (0..arity).map(|i| format!("a{i}")).collect();
                    let rows: Vec<String> = entries
                        .iter()
                        .map(|(k, v)| {
                            let key = if k.len() == 1 {
                                k[0].to_string()
                            } else {
                                format!("({})", k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
                            };
                            format!("{key} -> {v}")
                        })
                        .collect();
                    let _ = writeln!(out, "  fun {name}({}) = table {{ {} }};", params.join(", "), rows.join(", "));
                }
            }
        }
        let d = EnumBounds::default();
        if let Some(n) = m.bounds.max_adversarial {
            let _ = writeln!(out, "  maxAdversarialComputes {n};");
        }
        if m.bounds.max_trace_len != d.max_trace_len {
            let _ = writeln!(out, "  maxTraceLength {};", m.bounds.max_trace_len);
        }
        if m.bounds.max_states != d.max_states {
            let _ = writeln!(out, "  maxStates {};", m.bounds.max_states);
        }
        if let Some(n) = m.bounds.value_cap {
            let _ = writeln!(out, "  valueCap {n};");
        }
        out.push_str("}\n");
    }

    if !b.goals.is_empty() {
        out.push_str("goals {\n");
        for g in &b.goals {
            let _ = writeln!(out, "  {};", formula(g));
        }
        out.push_str("}\n");
    }
    out
}
