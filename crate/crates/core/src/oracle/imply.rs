//! Semantic implication between conjunctions of ground equations over the finite domain.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::*;
use crate::prover::mirror;

/// Valuations beyond this many are not enumerated; the implication is then reported false.
pub const MAX_VALUATIONS: u64 = 1 << 20;

fn slots(e: &Equation, a: &Architecture) -> BTreeSet<Slot> {
    e.var_refs().iter().flat_map(|v| a.slots_of(v)).collect()
}

/// Whether the conjunction of `facts` implies every equation of `goal` under every valuation
/// of their variables over the interpretation's domain. Facts that fail to evaluate make a
/// valuation irrelevant. Only facts sharing variables (transitively) with a goal equation
/// take part.
pub fn implies(facts: &[Equation], goal: &[Equation], a: &Architecture, interp: &Interpretation) -> bool {
    let fact_set: BTreeSet<&Equation> = facts.iter().collect();
    goal.iter().all(|g| fact_set.contains(g) || fact_set.contains(&mirror(g)) || entails(facts, g, a, interp))
}

fn entails(facts: &[Equation], g: &Equation, a: &Architecture, interp: &Interpretation) -> bool {
    let fs: Vec<(BTreeSet<Slot>, &Equation)> = facts.iter().map(|f| (slots(f, a), f)).collect();
    let mut vars = slots(g, a);
    let mut used = vec![false; fs.len()];
    loop {
        let mut grew = false;
        for (i, (s, _)) in fs.iter().enumerate() {
            if !used[i] && !s.is_disjoint(&vars) {
                used[i] = true;
                vars.extend(s.iter().cloned());
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let relevant: Vec<&Equation> = fs.iter().zip(&used).filter(|(_, u)| **u).map(|((_, f), _)| *f).collect();
    let domain: Vec<i64> = interp.domain().collect();
    let vars: Vec<Slot> = vars.into_iter().collect();
    let total = (domain.len() as u64).checked_pow(vars.len() as u32);
    if total.is_none_or(|t| t > MAX_VALUATIONS) {
        return false;
    }
    let mut digits = vec![0usize; vars.len()];
    loop {
        let val: BTreeMap<Slot, i64> = vars.iter().cloned().zip(digits.iter().map(|d| domain[*d])).collect();
        let antecedent = relevant.iter().all(|f| matches!(eval_eq(f, &val, interp, a), Ok(Truth::True)));
        if antecedent && !matches!(eval_eq(g, &val, interp, a), Ok(Truth::True)) {
            return false;
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return true;
            }
            digits[i] += 1;
            if digits[i] < domain.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}
