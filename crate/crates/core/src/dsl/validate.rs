//! Declaration, arity and index checks applied after parsing.

use std::collections::BTreeSet;

use super::diag::{DiagKind, SourceDiagnostic, Span};
use super::parser::Spans;
use super::Bundle;
use crate::model::*;

struct Ctx<'a> {
    arch: &'a Architecture,
    diags: Vec<SourceDiagnostic>,
}

impl Ctx<'_> {
    fn error(&mut self, kind: DiagKind, span: Span, msg: impl Into<String>) {
        self.diags.push(SourceDiagnostic::error(kind, span, msg));
    }

    fn component(&mut self, c: &str, span: Span) {
        if !self.arch.has_component(c) {
            self.error(DiagKind::Undeclared, span, format!("undeclared component `{c}`"));
        }
    }

    /// `whole_array_ok`: a bare array name is accepted (relation operands, goals, deps).
    fn var_ref(&mut self, v: &VarRef, span: Span, whole_array_ok: bool) {
        let range = self.arch.range_of(&v.name);
        match (&v.index, range) {
            (_, None) if !self.arch.is_scalar(&v.name) => {
                self.error(DiagKind::Undeclared, span, format!("undeclared variable `{}`", v.name))
            }
            (Some(_), None) => {
                self.error(DiagKind::Undeclared, span, format!("`{}` is a scalar, not an array", v.name))
            }
            (Some(Index::Lit(k)), Some(r)) if *k >= r => {
                self.error(DiagKind::IndexRange, span, format!("index {k} out of range for `{}` (range {r})", v.name))
            }
            (None, Some(_)) if !whole_array_ok => {
                self.error(DiagKind::Undeclared, span, format!("array `{}` used without an index", v.name))
            }
            _ => {}
        }
    }

    fn term(&mut self, t: &Term, span: Span, allow_meta: bool) {
        match t {
            Term::Var(v) => self.var_ref(v, span, false),
            Term::Const(_) => {}
            Term::Meta(m) => {
                if !allow_meta {
                    self.error(DiagKind::Syntax, span, format!("metavariable `?{m}` outside a deduction rule"));
                }
            }
            Term::App(f, args) => {
                match self.arch.arity_of(f) {
                    None => self.error(DiagKind::Undeclared, span, format!("undeclared function `{f}`")),
                    Some(n) if n != args.len() => self.error(
                        DiagKind::Arity,
                        span,
                        format!("function `{f}` is declared with arity {n} but applied to {} argument(s)", args.len()),
                    ),
                    _ => {}
                }
                for a in args {
                    self.term(a, span, allow_meta);
                }
            }
            Term::Iter(f, x) => {
                if !is_builtin(f) {
                    match self.arch.arity_of(f) {
                        None => self.error(DiagKind::Undeclared, span, format!("undeclared function `{f}`")),
                        Some(2) => {}
                        Some(n) => self.error(
                            DiagKind::Arity,
                            span,
                            format!("`iter` needs a binary function but `{f}` has arity {n}"),
                        ),
                    }
                }
                if !self.arch.is_array(x) {
                    self.error(DiagKind::Undeclared, span, format!("`iter` over `{x}`, which is not a declared array"));
                }
            }
        }
    }

    fn equation(&mut self, e: &Equation, span: Span, allow_meta: bool) {
        let before = self.diags.len();
        self.term(&e.lhs, span, allow_meta);
        self.term(&e.rhs, span, allow_meta);
        if before == self.diags.len() {
            let vars = e.index_vars();
            if vars.len() > 1 {
                self.error(
                    DiagKind::IndexRange,
                    span,
                    format!("equation `{e}` mixes index variables {vars:?}; at most one is allowed"),
                );
            } else if let Some(k) = vars.iter().next() {
                if let Err(err) = index_range(e, k, self.arch) {
                    self.error(DiagKind::IndexRange, span, err.to_string());
                }
            }
        }
    }

    fn equations(&mut self, eqs: &[Equation], span: Span) {
        for e in eqs {
            self.equation(e, span, false);
        }
    }

    fn attest(&mut self, a: &Attestation, span: Span) {
        self.component(&a.author, span);
        self.equations(&a.equations, span);
    }

    fn statement(&mut self, s: &Statement, span: Span) {
        match s {
            Statement::Attest(a) => self.attest(a, span),
            Statement::Proof(p) => {
                self.component(&p.author, span);
                for i in &p.items {
                    match i {
                        ProofItem::Eq(e) => self.equation(e, span, false),
                        ProofItem::Attest(a) => self.attest(a, span),
                    }
                }
            }
        }
    }

    fn formula(&mut self, f: &Formula, span: Span) {
        match f {
            Formula::HasAll { component, var }
            | Formula::HasNone { component, var }
            | Formula::HasOne { component, var } => {
                self.component(component, span);
                self.var_ref(var, span, true);
            }
            Formula::Knows { component, eqs } | Formula::Believes { component, eqs } => {
                self.component(component, span);
                if eqs.is_empty() {
                    self.error(DiagKind::Syntax, span, "K/B goals need at least one equation");
                }
                self.equations(eqs, span);
            }
            Formula::And(a, b) => {
                self.formula(a, span);
                self.formula(b, span);
            }
        }
    }
}

fn dedup<T: Clone + Ord>(items: &mut Vec<T>) -> bool {
    let mut seen = BTreeSet::new();
    let before = items.len();
    items.retain(|x| seen.insert(x.clone()));
    items.len() != before
}

pub(crate) fn validate(mut bundle: Bundle, spans: &Spans) -> (Bundle, Vec<SourceDiagnostic>) {
    let mut warnings = Vec::new();
    for (i, r) in bundle.architecture.relations.iter_mut().enumerate() {
        if let Relation::Receive { statements, payload, .. } = r {
            if dedup(statements) || dedup(payload) {
                warnings.push(SourceDiagnostic::warning(
                    DiagKind::Duplicate,
                    spans.relation(i),
                    "duplicate statements or variables in `receive` were merged",
                ));
            }
        }
    }
    let arch = &bundle.architecture;
    let mut cx = Ctx { arch, diags: Vec::new() };

    let mut names = BTreeSet::new();
    for n in arch
        .components
        .iter()
        .chain(arch.arrays.iter().map(|a| &a.name))
        .chain(arch.scalars.iter())
        .chain(arch.functions.iter().map(|f| &f.name))
    {
        if !names.insert(n.as_str()) {
            cx.error(DiagKind::Duplicate, spans.decl(n), format!("`{n}` is declared more than once"));
        }
    }
    for a in &arch.arrays {
        if a.range == 0 {
            cx.error(DiagKind::IndexRange, spans.decl(&a.name), format!("array `{}` must have range >= 1", a.name));
        }
    }
    for f in &arch.functions {
        if matches!(f.name.as_str(), "iter" | "table") {
            cx.error(DiagKind::Syntax, spans.decl(&f.name), format!("`{}` is reserved", f.name));
        }
    }

    for (i, r) in arch.relations.iter().enumerate() {
        let sp = spans.relation(i);
        cx.component(r.owner(), sp);
        match r {
            Relation::Has { var, .. } => cx.var_ref(var, sp, true),
            Relation::Receive { sender, statements, payload, .. } => {
                cx.component(sender, sp);
                statements.iter().for_each(|s| cx.statement(s, sp));
                payload.iter().for_each(|v| cx.var_ref(v, sp, true));
                let ks: BTreeSet<&str> = payload.iter().filter_map(|v| v.index_var()).collect();
                if ks.len() > 1 {
                    cx.error(DiagKind::IndexRange, sp, "payload mixes several index variables");
                }
            }
            Relation::Compute { eq, .. } => {
                cx.equation(eq, sp, false);
                if eq.rel != Rel::Eq || !matches!(eq.lhs, Term::Var(_)) {
                    cx.error(DiagKind::Syntax, sp, "compute needs an equation `variable = term`");
                }
            }
            Relation::Check { eqs, .. } => cx.equations(eqs, sp),
            Relation::VerifyProof { proof, .. } => cx.statement(&Statement::Proof(proof.clone()), sp),
            Relation::VerifyAttest { attest, .. } => cx.attest(attest, sp),
            Relation::Spotcheck { source, array, index, eqs, .. } => {
                cx.component(source, sp);
                if !arch.is_array(array) {
                    cx.error(DiagKind::Undeclared, sp, format!("spotcheck target `{array}` is not a declared array"));
                }
                cx.equations(eqs, sp);
                for e in eqs {
                    if e.index_vars().iter().any(|k| k != index) {
                        cx.error(DiagKind::IndexRange, sp, format!("spotcheck equations may only use index `{index}`"));
                    }
                }
            }
            Relation::Trust { trustee, .. } => cx.component(trustee, sp),
        }
    }

    for (i, d) in arch.deps.iter().enumerate() {
        let sp = spans.dep(i);
        cx.component(&d.component, sp);
        cx.var_ref(&d.target, sp, true);
        d.sources.iter().for_each(|v| cx.var_ref(v, sp, true));
        let ks: BTreeSet<&str> = std::iter::once(&d.target).chain(&d.sources).filter_map(|v| v.index_var()).collect();
        if ks.len() > 1 {
            cx.error(DiagKind::IndexRange, sp, "dep entry mixes several index variables");
        }
    }

    for (i, r) in arch.rules.iter().enumerate() {
        let sp = spans.rule(i);
        cx.component(&r.component, sp);
        for e in r.premises.iter().chain(std::iter::once(&r.conclusion)) {
            cx.equation(e, sp, true);
        }
        let premise_metas: BTreeSet<String> = r.premises.iter().flat_map(|e| e.metas()).collect();
        for m in r.conclusion.metas() {
            if !premise_metas.contains(&m) {
                cx.error(
                    DiagKind::Semantic,
                    sp,
                    format!("metavariable `?{m}` of rule `{}` occurs in no premise", r.name),
                );
            }
        }
    }

    if let Some(svc) = &arch.service {
        cx.equations(svc, spans.service());
    }

    if let Some(m) = &bundle.model {
        let sp = spans.model();
        if m.interp.domain_lo > m.interp.domain_hi {
            cx.error(DiagKind::Semantic, sp, "empty value domain");
        }
        for f in &arch.functions {
            match m.interp.functions.get(&f.name) {
                None => cx.error(DiagKind::Undeclared, sp, format!("model gives no interpretation for `{}`", f.name)),
                Some(fi) if fi.arity().is_some_and(|a| a != f.arity) => {
                    cx.error(DiagKind::Arity, sp, format!("interpretation of `{}` has the wrong arity", f.name))
                }
                _ => {}
            }
        }
        for name in m.interp.functions.keys() {
            if arch.arity_of(name).is_none() {
                cx.error(DiagKind::Undeclared, sp, format!("model interprets undeclared function `{name}`"));
            }
        }
        if m.bounds.max_states == 0 || m.bounds.max_trace_len == 0 || m.bounds.value_cap == Some(0) {
            cx.error(DiagKind::Semantic, sp, "enumeration bounds must be positive");
        }
    }

    for (i, g) in bundle.goals.iter().enumerate() {
        cx.formula(g, spans.goal(i));
    }

    let mut diags = cx.diags;
    diags.extend(warnings);
    (bundle, diags)
}
