//! Lexer and recursive-descent parser for system definitions.
//!
//! ```text
//! dim 2;
//! param xi = 0.1, k = 1;
//! X = [-(y-1)^3, x^3 - xi*(x^4 + (y-1)^4 - 1)];
//! H = y;
//! W = [k, 0];
//! ```
//!
//! `dim` comes first; the remaining statements appear in any order and the
//! final `;` is optional. `#` starts a comment running to end of line.
//! Precedence, loosest first: `+ -`, `* /`, unary `-`, `^` (integer
//! exponent only, not chainable).

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::ast::{BinOp, Expr, Func, Names};
use super::system::{ExpressionSystem, ParamDecl};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken { found: String, expected: &'static str },
    BadNumber(String),
    InvalidDimension(String),
    UndeclaredIdentifier(String),
    ReservedName(String),
    DuplicateParameter(String),
    DuplicateStatement(&'static str),
    MissingStatement(&'static str),
    DimensionMismatch { field: &'static str, expected: usize, found: usize },
    ChainedExponent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number {s:?}"),
            ParseErrorKind::InvalidDimension(s) => {
                write!(f, "dimension must be an integer >= 2, got {s}")
            }
            ParseErrorKind::UndeclaredIdentifier(s) => write!(f, "undeclared identifier `{s}`"),
            ParseErrorKind::ReservedName(s) => write!(f, "`{s}` is reserved"),
            ParseErrorKind::DuplicateParameter(s) => write!(f, "parameter `{s}` declared twice"),
            ParseErrorKind::DuplicateStatement(s) => write!(f, "`{s}` defined twice"),
            ParseErrorKind::MissingStatement(s) => write!(f, "missing `{s}` statement"),
            ParseErrorKind::DimensionMismatch { field, expected, found } => {
                write!(f, "{field} has {found} components but dim is {expected}")
            }
            ParseErrorKind::ChainedExponent => {
                f.write_str("chained `^` is ambiguous; add parentheses")
            }
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    text: String,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
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
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let v = text.parse::<f64>().map_err(|_| ParseError {
                kind: ParseErrorKind::BadNumber(text.clone()),
                line: start_line,
                col: start_col,
            })?;
            out.push(Token { tok: Tok::Num(v), text, line: start_line, col: start_col });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(text.clone()), text, line: start_line, col: start_col });
            continue;
        }
        if "+-*/^()[],;=".contains(c) {
            out.push(Token { tok: Tok::Sym(c), text: c.to_string(), line, col });
            i += 1;
            col += 1;
            continue;
        }
        return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(c), line, col });
    }
    out.push(Token { tok: Tok::Eof, text: String::new(), line, col });
    Ok(out)
}

struct ParamRef {
    name: String,
    line: usize,
    col: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vars: Vec<String>,
    refs: Vec<ParamRef>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(t: &Token, kind: ParseErrorKind) -> ParseError {
        ParseError { kind, line: t.line, col: t.col }
    }

    fn unexpected(t: &Token, expected: &'static str) -> ParseError {
        Self::err_at(t, ParseErrorKind::UnexpectedToken { found: t.tok.to_string(), expected })
    }

    fn expect_sym(&mut self, c: char, expected: &'static str) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(t)
        } else {
            Err(Self::unexpected(&t, expected))
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.is_sym('+') {
                BinOp::Add
            } else if self.is_sym('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            self.next();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.is_sym('*') {
                BinOp::Mul
            } else if self.is_sym('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.is_sym('-') {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.is_sym('+') {
            self.next();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if !self.is_sym('^') {
            return Ok(base);
        }
        self.next();
        let negative = if self.is_sym('-') {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        let e = match t.tok {
            Tok::Num(v) if libm::trunc(v) == v && !t.text.contains(['.', 'e', 'E']) && v <= i32::MAX as f64 => {
                v as i32
            }
            _ => return Err(Self::unexpected(&t, "integer exponent")),
        };
        if self.is_sym('^') {
            return Err(Self::err_at(self.peek(), ParseErrorKind::ChainedExponent));
        }
        Ok(Expr::Pow(Box::new(base), if negative { -e } else { e }))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Num(v) => Ok(Expr::Const(*v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')', "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(name) {
                    self.expect_sym('(', "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect_sym(')', "`)`")?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if let Some(i) = self.vars.iter().position(|v| v == name) {
                    return Ok(Expr::Var(i));
                }
                let idx = self.refs.len();
                self.refs.push(ParamRef { name: name.clone(), line: t.line, col: t.col });
                Ok(Expr::Param(idx))
            }
            _ => Err(Self::unexpected(&t, "expression")),
        }
    }

    fn expr_list(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_sym('[', "`[`")?;
        let mut items = alloc::vec![self.expr()?];
        while self.is_sym(',') {
            self.next();
            items.push(self.expr()?);
        }
        self.expect_sym(']', "`,` or `]`")?;
        Ok(items)
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let neg = if self.is_sym('-') {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        match t.tok {
            Tok::Num(v) => Ok(if neg { -v } else { v }),
            _ => Err(Self::unexpected(&t, "number")),
        }
    }
}

fn is_reserved(name: &str, vars: &[String]) -> bool {
    Func::from_name(name).is_some()
        || vars.iter().any(|v| v == name)
        || matches!(name, "dim" | "param" | "X" | "H" | "W")
}

/// Remaps parse-time parameter references to declaration indices.
fn resolve(e: &mut Expr, map: &[usize]) {
    match e {
        Expr::Param(i) => *i = map[*i],
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => resolve(a, map),
        Expr::Binary(_, l, r) => {
            resolve(l, map);
            resolve(r, map);
        }
        Expr::Const(_) | Expr::Var(_) => {}
    }
}

pub(crate) fn parse_system(source: &str) -> Result<ExpressionSystem, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser { toks, pos: 0, vars: Vec::new(), refs: Vec::new() };

    let t = p.next();
    if t.tok != Tok::Ident("dim".into()) {
        return Err(Parser::unexpected(&t, "`dim` statement"));
    }
    let t = p.next();
    let dim = match t.tok {
        Tok::Num(v) if libm::trunc(v) == v && (2.0..=1e6).contains(&v) => v as usize,
        _ => return Err(Parser::err_at(&t, ParseErrorKind::InvalidDimension(t.text.clone()))),
    };
    p.vars = Names::variables(dim);

    let mut params: Vec<ParamDecl> = Vec::new();
    let mut field: Option<(Vec<Expr>, Token)> = None;
    let mut boundary: Option<Expr> = None;
    let mut reset: Option<(Vec<Expr>, Token)> = None;

    loop {
        if p.peek().tok == Tok::Eof {
            break;
        }
        p.expect_sym(';', "`;`")?;
        if p.peek().tok == Tok::Eof {
            break;
        }
        let head = p.next();
        let Tok::Ident(kw) = &head.tok else {
            return Err(Parser::unexpected(&head, "statement"));
        };
        match kw.as_str() {
            "param" => loop {
                let nt = p.next();
                let Tok::Ident(name) = &nt.tok else {
                    return Err(Parser::unexpected(&nt, "parameter name"));
                };
                if is_reserved(name, &p.vars) {
                    return Err(Parser::err_at(&nt, ParseErrorKind::ReservedName(name.clone())));
                }
                if params.iter().any(|d| &d.name == name) {
                    return Err(Parser::err_at(&nt, ParseErrorKind::DuplicateParameter(name.clone())));
                }
                p.expect_sym('=', "`=`")?;
                let default = p.signed_number()?;
                params.push(ParamDecl { name: name.clone(), default });
                if p.is_sym(',') {
                    p.next();
                } else {
                    break;
                }
            },
            "X" | "W" => {
                p.expect_sym('=', "`=`")?;
                let list = p.expr_list()?;
                let slot = if kw == "X" { &mut field } else { &mut reset };
                if slot.is_some() {
                    return Err(Parser::err_at(
                        &head,
                        ParseErrorKind::DuplicateStatement(if kw == "X" { "X" } else { "W" }),
                    ));
                }
                *slot = Some((list, head.clone()));
            }
            "H" => {
                p.expect_sym('=', "`=`")?;
                let e = p.expr()?;
                if boundary.is_some() {
                    return Err(Parser::err_at(&head, ParseErrorKind::DuplicateStatement("H")));
                }
                boundary = Some(e);
            }
            _ => return Err(Parser::unexpected(&head, "`param`, `X`, `H` or `W`")),
        }
    }

    let end = p.peek().clone();
    let (mut field, field_tok) =
        field.ok_or_else(|| Parser::err_at(&end, ParseErrorKind::MissingStatement("X")))?;
    let mut boundary = boundary.ok_or_else(|| Parser::err_at(&end, ParseErrorKind::MissingStatement("H")))?;
    if field.len() != dim {
        return Err(Parser::err_at(
            &field_tok,
            ParseErrorKind::DimensionMismatch { field: "X", expected: dim, found: field.len() },
        ));
    }
    let mut reset = match reset {
        Some((w, tok)) => {
            if w.len() != dim {
                return Err(Parser::err_at(
                    &tok,
                    ParseErrorKind::DimensionMismatch { field: "W", expected: dim, found: w.len() },
                ));
            }
            w
        }
        None => alloc::vec![Expr::Const(0.0); dim],
    };

    let mut map = Vec::with_capacity(p.refs.len());
    for r in &p.refs {
        match params.iter().position(|d| d.name == r.name) {
            Some(i) => map.push(i),
            None => {
                return Err(ParseError {
                    kind: ParseErrorKind::UndeclaredIdentifier(r.name.clone()),
                    line: r.line,
                    col: r.col,
                })
            }
        }
    }
    for e in field.iter_mut().chain(reset.iter_mut()).chain(core::iter::once(&mut boundary)) {
        resolve(e, &map);
    }

    Ok(ExpressionSystem::from_parts(dim, field, boundary, reset, params))
}
