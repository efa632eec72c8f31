use std::collections::BTreeSet;

use crate::model::*;

fn architecture_equations(a: &Architecture) -> BTreeSet<Equation> {
    let mut out = BTreeSet::new();
    let attest = |at: &Attestation, out: &mut BTreeSet<Equation>| out.extend(at.equations.iter().cloned());
    for r in &a.relations {
        match r {
            Relation::Compute { eq, .. } => {
                out.insert(eq.clone());
            }
            Relation::Check { eqs, .. } | Relation::Spotcheck { eqs, .. } => out.extend(eqs.iter().cloned()),
            Relation::VerifyProof { proof, .. } => {
                out.extend(proof.equations().cloned());
                proof.attestations().for_each(|at| attest(at, &mut out));
            }
            Relation::VerifyAttest { attest: at, .. } => attest(at, &mut out),
            Relation::Receive { statements, .. } => {
                for s in statements {
                    match s {
                        Statement::Proof(p) => {
                            out.extend(p.equations().cloned());
                            p.attestations().for_each(|at| attest(at, &mut out));
                        }
                        Statement::Attest(at) => attest(at, &mut out),
                    }
                }
            }
            _ => {}
        }
    }
    out.extend(a.service.iter().flatten().cloned());
    out
}

/// Every possession atom over variables and array elements, and every knowledge and belief
/// atom over a single equation occurring in the architecture, for every component.
pub fn formula_family(a: &Architecture) -> Vec<Formula> {
    let mut refs: Vec<VarRef> = Vec::new();
    for v in a.variables() {
        refs.push(VarRef::whole(v.clone()));
        for k in 0..a.range_of(&v).unwrap_or(0) {
            refs.push(VarRef::at(v.clone(), k));
        }
    }
    let eqs = architecture_equations(a);
    let mut out = Vec::new();
    for c in &a.components {
        for v in &refs {
            out.push(Formula::HasAll { component: c.clone(), var: v.clone() });
            out.push(Formula::HasNone { component: c.clone(), var: v.clone() });
            out.push(Formula::HasOne { component: c.clone(), var: v.clone() });
        }
        for e in &eqs {
            out.push(Formula::Knows { component: c.clone(), eqs: vec![e.clone()] });
            out.push(Formula::Believes { component: c.clone(), eqs: vec![e.clone()] });
        }
    }
    out
}
