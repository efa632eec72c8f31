use super::diag::{DiagKind, SourceDiagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// Punctuation and operators, stored as their source text.
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// Longest first.
const SYMBOLS: &[&str] = &[
    "<=", ">=", "<-", "=>", "->", "..", "{", "}", "(", ")", "[", "]", ";", ",", ":", "=", "<", ">", "?", "&", "+", "*",
    "-", "/",
];

pub fn lex(src: &str) -> (Vec<Token>, Vec<SourceDiagnostic>) {
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            toks.push(Token { tok: Tok::Ident(s), span: span(start, line, col) });
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            let sp = span(start, line, col);
            match s.parse::<i64>() {
                Ok(n) => toks.push(Token { tok: Tok::Int(n), span: sp }),
                Err(_) => diags.push(SourceDiagnostic::error(
                    DiagKind::Lexical,
                    sp,
                    format!("integer literal `{s}` too large"),
                )),
            }
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        if let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            i += sym.len();
            col += sym.len();
            toks.push(Token { tok: Tok::Sym(sym), span: span(start, line, col) });
            continue;
        }
        diags.push(SourceDiagnostic::error(
            DiagKind::Lexical,
            Span::point(line, col),
            format!("unexpected character `{c}`"),
        ));
        i += 1;
        col += 1;
    }
    toks.push(Token { tok: Tok::Eof, span: Span::point(line, col) });
    (toks, diags)
}

fn span(start: (usize, usize), line: usize, col: usize) -> Span {
    Span { line: start.0, col: start.1, end_line: line, end_col: col }
}
