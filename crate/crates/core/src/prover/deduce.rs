//! Forward chaining of component deduction rules.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::model::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeductionBudget {
    /// Maximum number of rule-application rounds.
    pub depth: usize,
    /// Maximum number of facts held by a closure.
    pub max_facts: usize,
}

impl Default for DeductionBudget {
    fn default() -> Self {
        DeductionBudget { depth: 4, max_facts: 10_000 }
    }
}

impl DeductionBudget {
    pub fn with_depth(depth: usize) -> Self {
        DeductionBudget { depth, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Position in the base fact list.
    Base(usize),
    Rule {
        rule: String,
        premises: Vec<usize>,
    },
}

/// Facts reachable from a base set; `exhausted` is set when rules could still fire.
#[derive(Clone, Debug, Default)]
pub struct Closure {
    pub facts: Vec<Equation>,
    pub origins: Vec<Origin>,
    index: HashMap<Equation, usize>,
    pub exhausted: bool,
}

impl Closure {
    pub fn position(&self, e: &Equation) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &Equation) -> bool {
        self.index.contains_key(e)
    }

    fn push(&mut self, e: Equation, o: Origin) -> bool {
        if self.index.contains_key(&e) {
            return false;
        }
        self.index.insert(e.clone(), self.facts.len());
        self.facts.push(e);
        self.origins.push(o);
        true
    }
}

type Binding = BTreeMap<String, Term>;

fn match_term(pat: &Term, t: &Term, b: &mut Binding) -> bool {
    match (pat, t) {
        (Term::Meta(m), _) => match b.get(m) {
            Some(bound) => bound == t,
            None => {
                b.insert(m.clone(), t.clone());
                true
            }
        },
        (Term::App(f, ps), Term::App(g, ts)) => {
            f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| match_term(p, t, b))
        }
        _ => pat == t,
    }
}

fn match_eq(pat: &Equation, e: &Equation, b: &Binding) -> Option<Binding> {
    if pat.rel != e.rel {
        return None;
    }
    let mut nb = b.clone();
    (match_term(&pat.lhs, &e.lhs, &mut nb) && match_term(&pat.rhs, &e.rhs, &mut nb)).then_some(nb)
}

fn subst(t: &Term, b: &Binding) -> Term {
    match t {
        Term::Meta(m) => b.get(m).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| subst(a, b)).collect()),
        _ => t.clone(),
    }
}

fn subst_eq(e: &Equation, b: &Binding) -> Equation {
    Equation::new(subst(&e.lhs, b), e.rel, subst(&e.rhs, b))
}

/// All instances of `rule` over facts `0..limit`, as (conclusion, premise positions).
fn instances(rule: &DeductionRule, facts: &[Equation], limit: usize) -> Vec<(Equation, Vec<usize>)> {
    fn go(
        rule: &DeductionRule,
        facts: &[Equation],
        limit: usize,
        at: usize,
        b: Binding,
        used: &mut Vec<usize>,
        out: &mut Vec<(Equation, Vec<usize>)>,
    ) {
        if at == rule.premises.len() {
            out.push((subst_eq(&rule.conclusion, &b), used.clone()));
            return;
        }
        for (i, f) in facts[..limit].iter().enumerate() {
            if let Some(nb) = match_eq(&rule.premises[at], f, &b) {
                used.push(i);
                go(rule, facts, limit, at + 1, nb, used, out);
                used.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(rule, facts, limit, 0, Binding::new(), &mut Vec::new(), &mut out);
    out
}

/// Closes `base` under `rules` in rounds; each round fires every rule on the facts present
/// at its start.
pub fn close(base: &[Equation], rules: &[&DeductionRule], budget: DeductionBudget) -> Closure {
    let mut c = Closure::default();
    for (i, e) in base.iter().enumerate() {
        c.push(e.clone(), Origin::Base(i));
    }
    if rules.is_empty() {
        return c;
    }
    let fresh = |c: &Closure| -> Vec<(Equation, Origin)> {
        let limit = c.facts.len();
        let mut out: Vec<(Equation, Origin)> = Vec::new();
        for r in rules {
            for (e, premises) in instances(r, &c.facts, limit) {
                if !c.contains(&e) && !out.iter().any(|(x, _)| *x == e) {
                    out.push((e, Origin::Rule { rule: r.name.clone(), premises }));
                }
            }
        }
        out
    };
    for _ in 0..budget.depth {
        let new = fresh(&c);
        if new.is_empty() {
            return c;
        }
        for (e, o) in new {
            if c.facts.len() >= budget.max_facts {
                c.exhausted = true;
                return c;
            }
            c.push(e, o);
        }
    }
    c.exhausted = !fresh(&c).is_empty();
    c
}
