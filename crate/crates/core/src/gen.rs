//! Seeded random architectures for property runs.
//!
//! The space: two or three components `A`, `B`, `C`; up to two arrays (`X`, `Y`, range 1 or 2)
//! and up to two scalars (`u`, `w`); unary `f` and binary `g` with expression
//! interpretations over the domain {0, 1}; at most six relations drawn from has, compute,
//! receive (with optional attestation or proof of a sender equation), check, verify,
//! spotcheck and trust; at most one Dep entry. No deduction rules and no service. Only
//! consistent architectures are returned. Each architecture is printed and reparsed, so it
//! is also well formed.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::consistency::check_architecture;
use crate::dsl::{parse_bundle, pretty_print, Bundle};
use crate::model::*;

pub const MAX_COMPONENTS: usize = 3;
pub const MAX_ARRAYS: usize = 2;
pub const MAX_RELATIONS: usize = 6;

/// A generated bundle together with the seed that reproduces it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generated {
    pub seed: u64,
    pub architecture: Architecture,
    pub model: Model,
}

impl Generated {
    pub fn source(&self) -> String {
        pretty_print(&Bundle {
            architecture: self.architecture.clone(),
            model: Some(self.model.clone()),
            goals: vec![],
        })
    }
}

struct Builder<'r> {
    rng: &'r mut ChaCha8Rng,
    comps: Vec<String>,
    ranges: Vec<(String, usize)>,
    scalars: Vec<String>,
    relations: Vec<Relation>,
    obtains: Vec<BTreeSet<String>>,
    introduced: BTreeSet<String>,
}

fn var(v: &str) -> Term {
    Term::Var(VarRef::whole(v))
}

fn at(v: &str, k: &str) -> Term {
    Term::Var(VarRef::indexed(v, k))
}

impl Builder<'_> {
    fn ci(&self, c: &str) -> usize {
        self.comps.iter().position(|x| x == c).unwrap()
    }

    fn is_array(&self, v: &str) -> bool {
        self.ranges.iter().any(|(n, _)| n == v)
    }

    fn vars(&self) -> Vec<String> {
        self.ranges.iter().map(|(n, _)| n.clone()).chain(self.scalars.iter().cloned()).collect()
    }

    fn comp(&mut self) -> String {
        self.comps.choose(self.rng).unwrap().clone()
    }

    fn fresh(&mut self) -> Option<String> {
        let free: Vec<String> = self.vars().into_iter().filter(|v| !self.introduced.contains(v)).collect();
        free.choose(self.rng).cloned()
    }

    fn owned(&mut self, c: &str) -> Option<String> {
        let o: Vec<String> = self.obtains[self.ci(c)].iter().cloned().collect();
        o.choose(self.rng).cloned()
    }

    /// A right-hand side over variables `c` obtains, usable to define `target`.
    fn rhs(&mut self, c: &str, target: &str) -> Option<Term> {
        let src = self.owned(c)?;
        if src == target {
            return None;
        }
        let t_arr = self.is_array(target);
        let s_arr = self.is_array(&src);
        let idx = |v: &str, arr: bool| if arr { at(v, "t") } else { var(v) };
        Some(match (t_arr, s_arr) {
            (false, true) if self.rng.gen_bool(0.5) => Term::Iter("+".into(), src),
            (true, true) if self.range(target) != self.range(&src) => return None,
            _ => {
                let a = idx(&src, s_arr && t_arr);
                if s_arr && !t_arr {
                    Term::Iter("+".into(), src)
                } else if self.rng.gen_bool(0.3) {
                    let other = self.owned(c)?;
                    if self.is_array(&other) && !t_arr {
                        Term::app("g", vec![a, Term::Iter("+".into(), other)])
                    } else if self.is_array(&other) && self.range(&other) != self.range(target) {
                        return None;
                    } else {
                        Term::app("g", vec![a, idx(&other, self.is_array(&other))])
                    }
                } else {
                    Term::app("f", vec![a])
                }
            }
        })
    }

    fn range(&self, v: &str) -> usize {
        self.ranges.iter().find(|(n, _)| n == v).map_or(0, |(_, r)| *r)
    }

    fn lhs(&self, v: &str) -> VarRef {
        if self.is_array(v) {
            VarRef::indexed(v, "t")
        } else {
            VarRef::whole(v)
        }
    }

    /// Equations some component states about its own computations.
    fn computed_by(&self, c: &str) -> Vec<Equation> {
        self.relations
            .iter()
            .filter_map(|r| match r {
                Relation::Compute { owner, eq } if owner == c => Some(eq.clone()),
                _ => None,
            })
            .collect()
    }

    fn received_statements(&self, c: &str) -> Vec<Statement> {
        self.relations
            .iter()
            .filter_map(|r| match r {
                Relation::Receive { receiver, statements, .. } if receiver == c => Some(statements.clone()),
                _ => None,
            })
            .flatten()
            .collect()
    }

    fn step(&mut self) -> Option<Relation> {
        let c = self.comp();
        match self.rng.gen_range(0..9) {
            0 | 1 => {
                let v = self.fresh()?;
                self.introduced.insert(v.clone());
                let i = self.ci(&c);
                self.obtains[i].insert(v.clone());
                Some(Relation::Has { owner: c, var: VarRef::whole(v) })
            }
            2 | 3 => {
                let v = self.fresh()?;
                let rhs = self.rhs(&c, &v)?;
                self.introduced.insert(v.clone());
                let i = self.ci(&c);
                self.obtains[i].insert(v.clone());
                Some(Relation::Compute { owner: c, eq: Equation::eq(Term::Var(self.lhs(&v)), rhs) })
            }
            4 | 5 => {
                let s = self.comp();
                if s == c {
                    return None;
                }
                let mut payload = Vec::new();
                if self.rng.gen_bool(0.8) {
                    let v = self.owned(&s)?;
                    if self.obtains[self.ci(&c)].contains(&v) {
                        return None;
                    }
                    payload.push(VarRef::whole(v));
                }
                let mut statements = Vec::new();
                let eqs = self.computed_by(&s);
                if let Some(e) = eqs.choose(self.rng).cloned() {
                    if self.rng.gen_bool(0.6) {
                        statements.push(if self.rng.gen_bool(0.5) {
                            Statement::Attest(Attestation { author: s.clone(), equations: vec![e] })
                        } else {
                            Statement::Proof(ProofStatement { author: s.clone(), items: vec![ProofItem::Eq(e)] })
                        });
                    }
                }
                if payload.is_empty() && statements.is_empty() {
                    return None;
                }
                for p in &payload {
                    let i = self.ci(&c);
                    self.obtains[i].insert(p.name.clone());
                }
                Some(Relation::Receive { receiver: c, sender: s, statements, payload })
            }
            6 => {
                let st = self.received_statements(&c);
                match st.choose(self.rng)?.clone() {
                    Statement::Proof(p) => Some(Relation::VerifyProof { owner: c, proof: p }),
                    Statement::Attest(a) => Some(Relation::VerifyAttest { owner: c, attest: a }),
                }
            }
            7 => {
                let v = self.owned(&c)?;
                let eq = if self.rng.gen_bool(0.5) {
                    let lhs = if self.is_array(&v) { Term::Iter("+".into(), v) } else { var(&v) };
                    Equation::new(
                        lhs,
                        *[Rel::Eq, Rel::Le, Rel::Gt].choose(self.rng).unwrap(),
                        Term::Const(self.rng.gen_range(0..2)),
                    )
                } else {
                    let all: Vec<Equation> = self
                        .relations
                        .iter()
                        .filter_map(|r| match r {
                            Relation::Compute { eq, .. } => Some(eq.clone()),
                            _ => None,
                        })
                        .collect();
                    all.choose(self.rng)?.clone()
                };
                Some(Relation::Check { owner: c, eqs: vec![eq] })
            }
            _ => {
                if self.rng.gen_bool(0.5) {
                    let d = self.comp();
                    return (d != c).then_some(Relation::Trust { truster: c, trustee: d });
                }
                let s = self.comp();
                let arrays: Vec<String> =
                    self.obtains[self.ci(&s)].iter().filter(|v| self.is_array(v)).cloned().collect();
                let x = arrays.choose(self.rng)?.clone();
                let y = self.owned(&c)?;
                if y == x || self.is_array(&y) && self.range(&y) != self.range(&x) {
                    return None;
                }
                let lhs = if self.is_array(&y) { at(&y, "k") } else { var(&y) };
                let eq = Equation::eq(lhs, Term::app("f", vec![at(&x, "k")]));
                Some(Relation::Spotcheck { checker: c, source: s, array: x, index: "k".into(), eqs: vec![eq] })
            }
        }
    }
}

fn interpretation(rng: &mut ChaCha8Rng) -> Interpretation {
    let p = |s: &str| Box::new(Expr::Param(s.into()));
    let f = match rng.gen_range(0..3) {
        0 => Expr::Param("a".into()),
        1 => Expr::Bin(BinOp::Sub, Box::new(Expr::Int(1)), p("a")),
        _ => Expr::Int(0),
    };
    let g =
        if rng.gen_bool(0.5) { Expr::Bin(BinOp::Add, p("a"), p("b")) } else { Expr::Bin(BinOp::Mul, p("a"), p("b")) };
    Interpretation::new(0, 1)
        .with_fun("f", FunInterp::Expr { params: vec!["a".into()], body: f })
        .with_fun("g", FunInterp::Expr { params: vec!["a".into(), "b".into()], body: g })
}

fn attempt(rng: &mut ChaCha8Rng, name: &str) -> Option<(Architecture, Model)> {
    let ncomp = rng.gen_range(2..=MAX_COMPONENTS);
    let comps: Vec<String> = ["A", "B", "C"][..ncomp].iter().map(|s| s.to_string()).collect();
    let narr = rng.gen_range(0..=MAX_ARRAYS);
    let ranges: Vec<(String, usize)> =
        ["X", "Y"][..narr].iter().map(|n| (n.to_string(), rng.gen_range(1..=2))).collect();
    let nsc = rng.gen_range(usize::from(narr == 0)..=2);
    let scalars: Vec<String> = ["u", "w"][..nsc].iter().map(|s| s.to_string()).collect();
    let target = rng.gen_range(2..=MAX_RELATIONS);
    let mut b = Builder {
        obtains: vec![BTreeSet::new(); ncomp],
        rng,
        comps,
        ranges,
        scalars,
        relations: Vec::new(),
        introduced: BTreeSet::new(),
    };
    for _ in 0..40 {
        if b.relations.len() >= target {
            break;
        }
        if let Some(r) = b.step() {
            if !b.relations.contains(&r) {
                b.relations.push(r);
            }
        }
    }
    let mut deps = Vec::new();
    if b.rng.gen_bool(0.3) {
        let c = b.comp();
        let vars = b.vars();
        let t = vars.choose(b.rng)?.clone();
        let s = vars.choose(b.rng)?.clone();
        if t != s && b.is_array(&t) == b.is_array(&s) && b.range(&t) == b.range(&s) {
            deps.push(DepEntry { component: c, target: VarRef::whole(t), sources: vec![VarRef::whole(s)] });
        }
    }
    let a = Architecture {
        name: name.to_string(),
        components: b.comps.clone(),
        arrays: b.ranges.iter().map(|(n, r)| ArrayDecl { name: n.clone(), range: *r }).collect(),
        scalars: b.scalars.clone(),
        functions: vec![FunDecl { name: "f".into(), arity: 1 }, FunDecl { name: "g".into(), arity: 2 }],
        relations: b.relations,
        deps,
        rules: vec![],
        service: None,
    };
    let model = Model { interp: interpretation(b.rng), bounds: EnumBounds::default() };
    let src = pretty_print(&Bundle { architecture: a, model: Some(model), goals: vec![] });
    let parsed = parse_bundle(&src).ok()?;
    let a = parsed.architecture;
    check_architecture(&a).is_pass().then(|| (a, parsed.model.unwrap()))
}

/// The consistent architecture for `seed`.
pub fn generate(seed: u64) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some((architecture, model)) = attempt(&mut rng, &format!("random_{seed}")) {
            return Generated { seed, architecture, model };
        }
    }
}

/// `count` architectures with seeds `seed`, `seed + 1`, ...
pub fn batch(seed: u64, count: usize) -> Vec<Generated> {
    (0..count as u64).map(|i| generate(seed.wrapping_add(i))).collect()
}
