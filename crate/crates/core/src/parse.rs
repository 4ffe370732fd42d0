//! Text to [`Expr`].
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, integer literals,
//! identifiers and the calls `ln exp sin cos atan`. Multiplication must be
//! written out: `2*x`, never `2x`. `^` is right-associative and binds tighter
//! than unary minus, so `-x^2` is `-(x^2)` and `2^3^2` is `2^9`.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::expr::{canonicalize, Expr, Func, Symbol};
use crate::rational::Rational;

/// Byte range `[start, end)` in the parsed input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize)]
#[error("{message} at {span}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
        }
    }

    /// The input with a caret line under the offending span.
    pub fn pointer(&self, input: &str) -> String {
        let width = (self.span.end - self.span.start).max(1);
        format!(
            "{input}\n{}{}",
            " ".repeat(input[..self.span.start.min(input.len())].chars().count()),
            "^".repeat(width)
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = input[i..].chars().next().unwrap();
        let start = i;
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                return Err(ParseError::new(
                    SourceSpan::new(start, i + 1),
                    "decimal literals are not supported; write a fraction like 3/2",
                ));
            }
            let n: BigInt = input[start..i].parse().expect("digits");
            out.push((Tok::Num(n), SourceSpan::new(start, i)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(input[start..i].to_string()), SourceSpan::new(start, i)));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(ParseError::new(
                    SourceSpan::new(start, start + other.len_utf8()),
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        i += c.len_utf8();
        out.push((tok, SourceSpan::new(start, i)));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    len: usize,
}

// binding powers
const BP_ADD: u8 = 10;
const BP_MUL: u8 = 20;
const BP_NEG: u8 = 30;
const BP_POW: u8 = 40;

impl Parser {
    fn peek(&self) -> Option<&(Tok, SourceSpan)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<(Tok, SourceSpan)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eof_span(&self) -> SourceSpan {
        SourceSpan::new(self.len, self.len)
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        while let Some((tok, span)) = self.peek().cloned() {
            let (lbp, rbp) = match tok {
                Tok::Plus | Tok::Minus => (BP_ADD, BP_ADD + 1),
                Tok::Star | Tok::Slash => (BP_MUL, BP_MUL + 1),
                // right associative
                Tok::Caret => (BP_POW + 1, BP_POW),
                Tok::RParen => break,
                Tok::Num(_) | Tok::Ident(_) | Tok::LParen => {
                    return Err(ParseError::new(
                        span,
                        format!(
                            "expected an operator before {}; implicit multiplication is not supported, insert `*`",
                            tok.describe()
                        ),
                    ))
                }
            };
            if lbp < min_bp {
                break;
            }
            self.pos += 1;
            let rhs = if tok == Tok::Caret {
                self.exponent(rbp)?
            } else {
                self.expr(rbp)?
            };
            lhs = match tok {
                Tok::Plus => Expr::Add(vec![lhs, rhs]),
                Tok::Minus => Expr::Add(vec![lhs, Expr::Mul(vec![Expr::int(-1), rhs])]),
                Tok::Star => Expr::Mul(vec![lhs, rhs]),
                Tok::Slash => Expr::Mul(vec![lhs, Expr::raw_pow(rhs, Expr::int(-1))]),
                Tok::Caret => Expr::raw_pow(lhs, rhs),
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    /// Exponents may carry their own sign: `x^-2`.
    fn exponent(&mut self, rbp: u8) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Some((Tok::Minus, _))) {
            self.pos += 1;
            let inner = self.expr(BP_POW)?;
            return Ok(Expr::Mul(vec![Expr::int(-1), inner]));
        }
        self.expr(rbp)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let Some((tok, span)) = self.next() else {
            return Err(ParseError::new(self.eof_span(), "unexpected end of input"));
        };
        match tok {
            Tok::Num(n) => Ok(Expr::Const(Rational::integer(n))),
            Tok::Minus => {
                let inner = self.expr(BP_NEG)?;
                Ok(Expr::Mul(vec![Expr::int(-1), inner]))
            }
            Tok::Plus => self.expr(BP_NEG),
            Tok::LParen => {
                let inner = self.expr(0)?;
                match self.next() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    Some((t, s)) => Err(ParseError::new(s, format!("expected `)`, found {}", t.describe()))),
                    None => Err(ParseError::new(span, "unbalanced parenthesis: missing `)`")),
                }
            }
            Tok::Ident(name) => {
                let is_call = matches!(self.peek(), Some((Tok::LParen, _)));
                match (Func::from_name(&name), is_call) {
                    (Some(f), true) => {
                        self.pos += 1;
                        let arg = self.expr(0)?;
                        match self.next() {
                            Some((Tok::RParen, _)) => Ok(Expr::raw_fun(f, arg)),
                            Some((t, s)) => Err(ParseError::new(
                                s,
                                format!("expected `)` to close {name}(, found {}", t.describe()),
                            )),
                            None => Err(ParseError::new(span, format!("unbalanced parenthesis in call to {name}"))),
                        }
                    }
                    (Some(_), false) => Err(ParseError::new(
                        span,
                        format!("function `{name}` needs a parenthesized argument"),
                    )),
                    (None, true) => Err(ParseError::new(
                        span,
                        format!("unknown function `{name}`; expected one of ln, exp, sin, cos, atan"),
                    )),
                    (None, false) => Ok(Expr::Sym(Symbol::new(&name))),
                }
            }
            Tok::RParen => Err(ParseError::new(span, "unbalanced parenthesis: unexpected `)`")),
            other => Err(ParseError::new(span, format!("expected an operand, found {}", other.describe()))),
        }
    }
}

/// Parses and canonicalizes.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError::new(SourceSpan::new(0, text.len()), "empty input"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.len(),
    };
    let e = p.expr(0)?;
    if let Some((t, s)) = p.peek().cloned() {
        let msg = match t {
            Tok::RParen => "unbalanced parenthesis: unexpected `)`".to_string(),
            other => format!("unexpected {}", other.describe()),
        };
        return Err(ParseError::new(s, msg));
    }
    Ok(canonicalize(&e))
}
