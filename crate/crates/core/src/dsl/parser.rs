//! Recursive-descent parser for `.parch` bundles.

use std::collections::BTreeMap;

use super::diag::{DiagKind, SourceDiagnostic, Span};
use super::lexer::{lex, Tok, Token};
use super::Bundle;
use crate::model::*;

type PResult<T> = Result<T, ()>;

/// Source spans of parsed items, parallel to the vectors of the architecture.
#[derive(Default)]
pub(crate) struct Spans {
    relations: Vec<Span>,
    deps: Vec<Span>,
    rules: Vec<Span>,
    goals: Vec<Span>,
    service: Option<Span>,
    model: Option<Span>,
    decls: BTreeMap<String, Span>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<SourceDiagnostic>,
}

const CURRENT_VERSION: i64 = 1;

/// Parses a bundle, returning warnings alongside the result on success.
pub fn parse_bundle_with_warnings(src: &str) -> Result<(Bundle, Vec<SourceDiagnostic>), Vec<SourceDiagnostic>> {
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let (toks, mut diags) = lex(src);
    let mut p = Parser { toks, pos: 0, diags: Vec::new() };
    let parsed = p.file();
    diags.append(&mut p.diags);
    let Some((bundle, spans)) = parsed else {
        return Err(diags);
    };
    if diags.iter().any(|d| d.severity == super::Severity::Error) {
        return Err(diags);
    }
    let (bundle, mut more) = super::validate::validate(bundle, &spans);
    diags.append(&mut more);
    if diags.iter().any(|d| d.severity == super::Severity::Error) {
        Err(diags)
    } else {
        Ok((bundle, diags))
    }
}

/// Parses a single equation with no declarations in scope.
pub fn parse_equation(src: &str) -> Result<Equation, String> {
    let (toks, diags) = lex(src);
    if let Some(d) = diags.first() {
        return Err(d.to_string());
    }
    let mut p = Parser { toks, pos: 0, diags: Vec::new() };
    match p.equation() {
        Ok(e) if matches!(p.peek(), Tok::Eof) => Ok(e),
        Ok(_) => Err(format!("trailing input in `{src}`")),
        Err(()) => Err(p.diags.first().map_or_else(|| format!("bad equation `{src}`"), |d| d.to_string())),
    }
}

impl Spans {
    pub(crate) fn relation(&self, i: usize) -> Span {
        self.relations[i]
    }
    pub(crate) fn dep(&self, i: usize) -> Span {
        self.deps[i]
    }
    pub(crate) fn rule(&self, i: usize) -> Span {
        self.rules[i]
    }
    pub(crate) fn goal(&self, i: usize) -> Span {
        self.goals[i]
    }
    pub(crate) fn service(&self) -> Span {
        self.service.unwrap_or(Span::point(1, 1))
    }
    pub(crate) fn model(&self) -> Span {
        self.model.unwrap_or(Span::point(1, 1))
    }
    pub(crate) fn decl(&self, name: &str) -> Span {
        self.decls.get(name).copied().unwrap_or(Span::point(1, 1))
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn err<T>(&mut self, msg: impl Into<String>) -> PResult<T> {
        let found = Self::describe(self.peek());
        let span = self.span();
        self.diags.push(SourceDiagnostic::error(DiagKind::Syntax, span, format!("{}, found {found}", msg.into())));
        Err(())
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.at_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{k}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym("-");
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(if neg { -n } else { n })
            }
            _ => self.err("expected integer"),
        }
    }

    fn nat(&mut self) -> PResult<usize> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n as usize)
            }
            _ => self.err("expected natural number"),
        }
    }

    /// Skips to just past the next `;` at the current nesting level, or up to an unmatched `}`.
    fn sync(&mut self) {
        let mut depth = 0i32;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Sym("{") | Tok::Sym("(") | Tok::Sym("[") => depth += 1,
                Tok::Sym("}") | Tok::Sym(")") | Tok::Sym("]") => {
                    if depth == 0 {
                        if self.at_sym("}") {
                            return;
                        }
                        self.bump();
                        continue;
                    }
                    depth -= 1;
                    if depth == 0 && self.at_sym("}") {
                        self.bump();
                        if self.at_sym(";") {
                            self.bump();
                        }
                        return;
                    }
                }
                Tok::Sym(";") if depth == 0 => {
                    self.bump();
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn file(&mut self) -> Option<(Bundle, Spans)> {
        let mut spans = Spans::default();
        if self.at_kw("version") {
            self.bump();
            let sp = self.span();
            if let Ok(v) = self.int() {
                if v != CURRENT_VERSION {
                    self.diags.push(SourceDiagnostic::error(
                        DiagKind::Syntax,
                        sp,
                        format!("unsupported format version {v} (expected {CURRENT_VERSION})"),
                    ));
                }
            }
            let _ = self.expect_sym(";");
        }
        let arch = self.architecture(&mut spans).ok()?;
        let mut model = None;
        let mut goals = Vec::new();
        loop {
            if self.at_kw("model") {
                spans.model = Some(self.span());
                self.bump();
                if model.is_some() {
                    let sp = self.prev_span();
                    self.diags.push(SourceDiagnostic::error(DiagKind::Duplicate, sp, "duplicate `model` section"));
                }
                model = self.model().ok();
            } else if self.at_kw("goals") {
                self.bump();
                self.goals(&mut goals, &mut spans);
            } else if matches!(self.peek(), Tok::Eof) {
                break;
            } else {
                let _ = self.err::<()>("expected `model`, `goals` or end of input");
                self.bump();
                self.sync();
            }
        }
        Some((Bundle { architecture: arch, model, goals }, spans))
    }

    fn architecture(&mut self, spans: &mut Spans) -> PResult<Architecture> {
        self.expect_kw("architecture")?;
        let name = self.ident()?;
        self.expect_sym("{")?;
        let mut a = Architecture { name, ..Default::default() };
        while !self.at_sym("}") && !matches!(self.peek(), Tok::Eof) {
            let start = self.span();
            if self.item(&mut a, spans, start).is_err() {
                self.sync();
            }
        }
        self.expect_sym("}")?;
        Ok(a)
    }

    fn item(&mut self, a: &mut Architecture, spans: &mut Spans, start: Span) -> PResult<()> {
        let kw = match self.peek().clone() {
            Tok::Ident(k) => k,
            _ => return self.err("expected an architecture statement"),
        };
        self.bump();
        let mut push_rel = |p: &mut Parser, r: Relation| {
            a.relations.push(r);
            spans.relations.push(start.to(p.prev_span()));
        };
        match kw.as_str() {
            "component" => {
                loop {
                    let sp = self.span();
                    let c = self.ident()?;
                    spans.decls.entry(c.clone()).or_insert(sp);
                    a.components.push(c);
                    if !matches!(self.peek(), Tok::Ident(_)) {
                        break;
                    }
                }
                self.expect_sym(";")
            }
            "array" => {
                loop {
                    let sp = self.span();
                    let n = self.ident()?;
                    self.expect_sym("[")?;
                    let r = self.nat()?;
                    self.expect_sym("]")?;
                    spans.decls.entry(n.clone()).or_insert(sp);
                    a.arrays.push(ArrayDecl { name: n, range: r });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(";")
            }
            "var" => {
                loop {
                    let sp = self.span();
                    let n = self.ident()?;
                    spans.decls.entry(n.clone()).or_insert(sp);
                    a.scalars.push(n);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(";")
            }
            "fun" => {
                loop {
                    let sp = self.span();
                    let n = self.ident()?;
                    self.expect_sym("/")?;
                    let ar = self.nat()?;
                    spans.decls.entry(n.clone()).or_insert(sp);
                    a.functions.push(FunDecl { name: n, arity: ar });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(";")
            }
            "has" => {
                let owner = self.ident()?;
                self.expect_sym("(")?;
                let var = self.var_ref()?;
                self.expect_sym(")")?;
                self.expect_sym(";")?;
                push_rel(self, Relation::Has { owner, var });
                Ok(())
            }
            "compute" => {
                let owner = self.ident()?;
                self.expect_sym("(")?;
                let eq = self.equation()?;
                self.expect_sym(")")?;
                self.expect_sym(";")?;
                push_rel(self, Relation::Compute { owner, eq });
                Ok(())
            }
            "check" => {
                let owner = self.ident()?;
                let eqs = self.eq_block()?;
                self.eat_sym(";");
                push_rel(self, Relation::Check { owner, eqs });
                Ok(())
            }
            "receive" => {
                let receiver = self.ident()?;
                self.expect_kw("from")?;
                let sender = self.ident()?;
                self.expect_sym("{")?;
                let mut statements = Vec::new();
                while !self.at_sym("}") {
                    statements.push(self.statement()?);
                    self.eat_sym(";");
                }
                self.expect_sym("}")?;
                self.expect_kw("vars")?;
                self.expect_sym("{")?;
                let mut payload = Vec::new();
                while !self.at_sym("}") {
                    payload.push(self.var_ref()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym("}")?;
                self.expect_sym(";")?;
                push_rel(self, Relation::Receive { receiver, sender, statements, payload });
                Ok(())
            }
            "verify_proof" => {
                let owner = self.ident()?;
                self.expect_sym("(")?;
                let proof = match self.statement()? {
                    Statement::Proof(p) => p,
                    Statement::Attest(_) => return self.err("expected `proof` statement"),
                };
                self.expect_sym(")")?;
                self.expect_sym(";")?;
                push_rel(self, Relation::VerifyProof { owner, proof });
                Ok(())
            }
            "verify_attest" => {
                let owner = self.ident()?;
                self.expect_sym("(")?;
                let attest = match self.statement()? {
                    Statement::Attest(a) => a,
                    Statement::Proof(_) => return self.err("expected `attest` statement"),
                };
                self.expect_sym(")")?;
                self.expect_sym(";")?;
                push_rel(self, Relation::VerifyAttest { owner, attest });
                Ok(())
            }
            "spotcheck" => {
                let checker = self.ident()?;
                self.expect_kw("from")?;
                let source = self.ident()?;
                self.expect_sym("(")?;
                let array = self.ident()?;
                self.expect_sym("[")?;
                let index = self.ident()?;
                self.expect_sym("]")?;
                self.expect_sym(",")?;
                let eqs = self.eq_block()?;
                self.expect_sym(")")?;
                self.expect_sym(";")?;
                push_rel(self, Relation::Spotcheck { checker, source, array, index, eqs });
                Ok(())
            }
            "trust" => {
                let truster = self.ident()?;
                let trustee = self.ident()?;
                self.expect_sym(";")?;
                push_rel(self, Relation::Trust { truster, trustee });
                Ok(())
            }
            "dep" => {
                let component = self.ident()?;
                self.expect_sym(":")?;
                let target = self.var_ref()?;
                self.expect_sym("<-")?;
                self.expect_sym("{")?;
                let mut sources = Vec::new();
                while !self.at_sym("}") {
                    sources.push(self.var_ref()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym("}")?;
                self.expect_sym(";")?;
                a.deps.push(DepEntry { component, target, sources });
                spans.deps.push(start.to(self.prev_span()));
                Ok(())
            }
            "deduce" => {
                let component = self.ident()?;
                self.expect_kw("rule")?;
                let name = self.ident()?;
                self.expect_sym(":")?;
                let premises = self.eq_block()?;
                self.expect_sym("=>")?;
                let conclusion = self.equation()?;
                self.expect_sym(";")?;
                a.rules.push(DeductionRule { component, name, premises, conclusion });
                spans.rules.push(start.to(self.prev_span()));
                Ok(())
            }
            "service" => {
                let eqs = self.eq_block()?;
                self.eat_sym(";");
                if a.service.is_some() {
                    self.diags.push(SourceDiagnostic::error(DiagKind::Duplicate, start, "duplicate `service` block"));
                }
                a.service = Some(eqs);
                spans.service = Some(start.to(self.prev_span()));
                Ok(())
            }
            other => {
                self.diags.push(SourceDiagnostic::error(
                    DiagKind::Syntax,
                    start,
                    format!("unknown architecture statement `{other}`"),
                ));
                Err(())
            }
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        if self.at_kw("attest") {
            self.bump();
            let author = self.ident()?;
            let equations = self.eq_block()?;
            Ok(Statement::Attest(Attestation { author, equations }))
        } else if self.at_kw("proof") {
            self.bump();
            let author = self.ident()?;
            self.expect_sym("{")?;
            let mut items = Vec::new();
            while !self.at_sym("}") {
                if self.at_kw("attest") {
                    match self.statement()? {
                        Statement::Attest(a) => items.push(ProofItem::Attest(a)),
                        Statement::Proof(_) => unreachable!(),
                    }
                    self.eat_sym(";");
                } else if self.at_kw("proof") {
                    return self.err("proofs cannot be nested; expected equation or `attest`");
                } else {
                    items.push(ProofItem::Eq(self.equation()?));
                    if !self.eat_sym(";") {
                        break;
                    }
                }
            }
            self.expect_sym("}")?;
            Ok(Statement::Proof(ProofStatement { author, items }))
        } else {
            self.err("expected `attest` or `proof`")
        }
    }

    /// `{ eq; eq; ... }` with an optional trailing `;`.
    fn eq_block(&mut self) -> PResult<Vec<Equation>> {
        self.expect_sym("{")?;
        let mut eqs = Vec::new();
        while !self.at_sym("}") {
            eqs.push(self.equation()?);
            if !self.eat_sym(";") {
                break;
            }
        }
        self.expect_sym("}")?;
        Ok(eqs)
    }

    fn equation(&mut self) -> PResult<Equation> {
        let lhs = self.term()?;
        let rel = match self.peek() {
            Tok::Sym("=") => Rel::Eq,
            Tok::Sym("<") => Rel::Lt,
            Tok::Sym(">") => Rel::Gt,
            Tok::Sym("<=") => Rel::Le,
            Tok::Sym(">=") => Rel::Ge,
            _ => return self.err("expected relation (`=`, `<`, `>`, `<=`, `>=`)"),
        };
        self.bump();
        let rhs = self.term()?;
        Ok(Equation { lhs, rel, rhs })
    }

    fn var_ref(&mut self) -> PResult<VarRef> {
        let name = self.ident()?;
        let index = if self.eat_sym("[") {
            let i = match self.peek().clone() {
                Tok::Ident(s) => {
                    self.bump();
                    Index::Var(s)
                }
                Tok::Int(n) => {
                    self.bump();
                    Index::Lit(n as usize)
                }
                _ => return self.err("expected index variable or natural number"),
            };
            self.expect_sym("]")?;
            Some(i)
        } else {
            None
        };
        Ok(VarRef { name, index })
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Int(_) | Tok::Sym("-") => Ok(Term::Const(self.int()?)),
            Tok::Sym("?") => {
                self.bump();
                Ok(Term::Meta(self.ident()?))
            }
            Tok::Sym(op @ ("+" | "*"))
                if matches!(self.toks.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Sym("("))) =>
            {
                self.bump();
                self.bump();
                let mut args = Vec::new();
                while !self.at_sym(")") {
                    args.push(self.term()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(")")?;
                Ok(Term::App(op.to_string(), args))
            }
            Tok::Ident(name) if name == "iter" => {
                self.bump();
                self.expect_sym("(")?;
                let op = match self.peek().clone() {
                    Tok::Sym("+") => {
                        self.bump();
                        BUILTIN_PLUS.to_string()
                    }
                    Tok::Sym("*") => {
                        self.bump();
                        BUILTIN_TIMES.to_string()
                    }
                    Tok::Ident(f) => {
                        self.bump();
                        f
                    }
                    _ => return self.err("expected `+`, `*` or a function name"),
                };
                self.expect_sym(",")?;
                let x = self.ident()?;
                self.expect_sym(")")?;
                Ok(Term::Iter(op, x))
            }
            Tok::Ident(name) => {
                if matches!(self.toks.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Sym("("))) {
                    self.bump();
                    self.bump();
                    let mut args = Vec::new();
                    while !self.at_sym(")") {
                        args.push(self.term()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.expect_sym(")")?;
                    Ok(Term::App(name, args))
                } else {
                    Ok(Term::Var(self.var_ref()?))
                }
            }
            _ => self.err("expected term"),
        }
    }

    fn model(&mut self) -> PResult<Model> {
        self.expect_sym("{")?;
        let mut interp = Interpretation::new(0, 1);
        let mut bounds = EnumBounds::default();
        while !self.at_sym("}") && !matches!(self.peek(), Tok::Eof) {
            if self.model_item(&mut interp, &mut bounds).is_err() {
                self.sync();
            }
        }
        self.expect_sym("}")?;
        Ok(Model { interp, bounds })
    }

    fn model_item(&mut self, interp: &mut Interpretation, bounds: &mut EnumBounds) -> PResult<()> {
        let kw = self.ident()?;
        match kw.as_str() {
            "domain" => {
                interp.domain_lo = self.int()?;
                self.expect_sym("..")?;
                interp.domain_hi = self.int()?;
            }
            "fun" => {
                let name = self.ident()?;
                self.expect_sym("(")?;
                let mut params = Vec::new();
                while !self.at_sym(")") {
                    params.push(self.ident()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(")")?;
                self.expect_sym("=")?;
                let f = if self.at_kw("table") {
                    self.bump();
                    self.expect_sym("{")?;
                    let mut entries = BTreeMap::new();
                    while !self.at_sym("}") {
                        let key = if self.eat_sym("(") {
                            let mut k = Vec::new();
                            while !self.at_sym(")") {
                                k.push(self.int()?);
                                if !self.eat_sym(",") {
                                    break;
                                }
                            }
                            self.expect_sym(")")?;
                            k
                        } else {
                            vec![self.int()?]
                        };
                        self.expect_sym("->")?;
                        let v = self.int()?;
                        if key.len() != params.len() {
                            let sp = self.prev_span();
                            self.diags.push(SourceDiagnostic::error(
                                DiagKind::Arity,
                                sp,
                                format!(
                                    "table entry for `{name}` has {} argument(s), expected {}",
                                    key.len(),
                                    params.len()
                                ),
                            ));
                        }
                        entries.insert(key, v);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.expect_sym("}")?;
                    FunInterp::Table { entries }
                } else {
                    FunInterp::Expr { body: self.expr()?, params }
                };
                if let FunInterp::Table { entries } = &f {
                    if entries.is_empty() {
                        return self.err("empty table");
                    }
                }
                interp.functions.insert(name, f);
            }
            "maxAdversarialComputes" => bounds.max_adversarial = Some(self.nat()?),
            "maxTraceLength" => bounds.max_trace_len = self.nat()?,
            "maxStates" => bounds.max_states = self.nat()?,
            "valueCap" => bounds.value_cap = Some(self.nat()?),
            other => {
                let sp = self.prev_span();
                self.diags.push(SourceDiagnostic::error(
                    DiagKind::Syntax,
                    sp,
                    format!("unknown model setting `{other}`"),
                ));
                return Err(());
            }
        }
        self.expect_sym(";")
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_product()?;
        loop {
            let op = if self.eat_sym("+") {
                BinOp::Add
            } else if self.eat_sym("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.expr_product()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn expr_product(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_atom()?;
        while self.eat_sym("*") {
            let rhs = self.expr_atom()?;
            lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn expr_atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(_) | Tok::Sym("-") => Ok(Expr::Int(self.int()?)),
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat_sym("(") {
                    let mut args = Vec::new();
                    while !self.at_sym(")") {
                        args.push(self.expr()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.expect_sym(")")?;
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Param(name))
                }
            }
            _ => self.err("expected expression"),
        }
    }

    fn goals(&mut self, goals: &mut Vec<Formula>, spans: &mut Spans) {
        if self.expect_sym("{").is_err() {
            self.sync();
            return;
        }
        while !self.at_sym("}") && !matches!(self.peek(), Tok::Eof) {
            let start = self.span();
            match self.formula() {
                Ok(f) if self.at_sym("}") || self.expect_sym(";").is_ok() => {
                    goals.push(f);
                    spans.goals.push(start.to(self.prev_span()));
                }
                _ => self.sync(),
            }
        }
        let _ = self.expect_sym("}");
    }

    fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.atom()?;
        while self.eat_sym("&") {
            let g = self.atom()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    fn atom(&mut self) -> PResult<Formula> {
        if self.eat_sym("(") {
            let f = self.formula()?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        let kw = self.ident()?;
        let component = self.ident()?;
        match kw.as_str() {
            "hasall" | "hasnone" | "hasone" => {
                self.expect_sym("(")?;
                let var = self.var_ref()?;
                self.expect_sym(")")?;
                Ok(match kw.as_str() {
                    "hasall" => Formula::HasAll { component, var },
                    "hasnone" => Formula::HasNone { component, var },
                    _ => Formula::HasOne { component, var },
                })
            }
            "K" => Ok(Formula::Knows { component, eqs: self.eq_block()? }),
            "B" => Ok(Formula::Believes { component, eqs: self.eq_block()? }),
            _ => {
                let sp = self.prev_span();
                self.diags.push(SourceDiagnostic::error(
                    DiagKind::Syntax,
                    sp,
                    format!("unknown goal `{kw}` (expected hasall, hasnone, hasone, K or B)"),
                ));
                Err(())
            }
        }
    }
}
