//! The expression tree, its total order and the arithmetic operators.
//!
//! Every constructor that is not spelled `raw_*` returns a canonical
//! expression; see [`canonicalize`] for the normal form.

pub(crate) mod canon;
pub(crate) mod expand;
mod query;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::rational::Rational;

pub use canon::canonicalize;
pub use expand::{collect, expand, gather};
pub use query::{constant_ratio, equals, ComplexityScore, Monomials};

/// A variable name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// The whitelisted elementary functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Func {
    Atan,
    Cos,
    Exp,
    Ln,
    Sin,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Ln, Func::Exp, Func::Sin, Func::Cos, Func::Atan];

    pub fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Func::Ln => x.ln(),
            Func::Exp => x.exp(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Atan => x.atan(),
        }
    }
}

/// An immutable expression over exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Fun(Func, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(Rational::integer(n))
    }

    pub fn rational(numer: i64, denom: i64) -> Expr {
        Expr::Const(Rational::new(numer, denom))
    }

    pub fn constant(r: Rational) -> Expr {
        Expr::Const(r)
    }

    pub fn zero() -> Expr {
        Expr::Const(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Rational::one())
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(Symbol::new(name))
    }

    pub fn symbol(s: &Symbol) -> Expr {
        Expr::Sym(s.clone())
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        canon::add(terms.into_iter().collect())
    }

    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        canon::mul(factors.into_iter().collect())
    }

    pub fn pow(&self, exponent: Expr) -> Expr {
        canon::pow(self.clone(), exponent)
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(Expr::int(n))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn apply(func: Func, arg: Expr) -> Expr {
        canon::fun(func, arg)
    }

    pub fn ln(arg: Expr) -> Expr {
        Expr::apply(Func::Ln, arg)
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::apply(Func::Exp, arg)
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::apply(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::apply(Func::Cos, arg)
    }

    pub fn atan(arg: Expr) -> Expr {
        Expr::apply(Func::Atan, arg)
    }

    /// Builds a `Pow` node without any simplification.
    pub fn raw_pow(base: Expr, exponent: Expr) -> Expr {
        Expr::Pow(Box::new(base), Box::new(exponent))
    }

    /// Builds a `Fun` node without any simplification.
    pub fn raw_fun(func: Func, arg: Expr) -> Expr {
        Expr::Fun(func, Box::new(arg))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(r) if r.is_one())
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Expr::Const(_))
    }

    /// Splits a canonical expression into its rational coefficient and the rest.
    pub fn split_coefficient(&self) -> (Rational, Expr) {
        match self {
            Expr::Const(r) => (r.clone(), Expr::one()),
            Expr::Mul(fs) => match fs.first() {
                Some(Expr::Const(c)) => {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let rest = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        Expr::Mul(rest)
                    };
                    (c.clone(), rest)
                }
                _ => (Rational::one(), self.clone()),
            },
            _ => (Rational::one(), self.clone()),
        }
    }

    /// Factors of a product (a non-product is its own single factor).
    pub fn factors(&self) -> Vec<Expr> {
        match self {
            Expr::Mul(fs) => fs.clone(),
            other => vec![other.clone()],
        }
    }

    /// Terms of a sum (a non-sum is its own single term).
    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Add(ts) => ts.clone(),
            other => vec![other.clone()],
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Expr::Const(_) => 0,
            Expr::Sym(_) => 1,
            Expr::Pow(..) => 2,
            Expr::Fun(..) => 3,
            Expr::Mul(_) => 4,
            Expr::Add(_) => 5,
        }
    }

    /// Visits every node in pre-order.
    pub fn walk(&self, visit: &mut dyn FnMut(&Expr)) {
        visit(self);
        match self {
            Expr::Const(_) | Expr::Sym(_) => {}
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.walk(visit)),
            Expr::Pow(b, e) => {
                b.walk(visit);
                e.walk(visit);
            }
            Expr::Fun(_, a) => a.walk(visit),
        }
    }
}

fn cmp_slices(a: &[Expr], b: &[Expr]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

fn split_mul_coeff(fs: &[Expr]) -> (Option<&Rational>, &[Expr]) {
    match fs.first() {
        Some(Expr::Const(c)) => (Some(c), &fs[1..]),
        _ => (None, fs),
    }
}

/// Const < Sym < Pow < Fun < Mul < Add; products compare by their
/// non-coefficient factors before the coefficient so like terms sit together.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_rank = self.rank().cmp(&other.rank());
        if by_rank != Ordering::Equal {
            return by_rank;
        }
        match (self, other) {
            (Expr::Const(a), Expr::Const(b)) => a.cmp(b),
            (Expr::Sym(a), Expr::Sym(b)) => a.cmp(b),
            (Expr::Pow(b1, e1), Expr::Pow(b2, e2)) => b1.cmp(b2).then_with(|| e1.cmp(e2)),
            (Expr::Fun(f1, a1), Expr::Fun(f2, a2)) => {
                f1.name().cmp(f2.name()).then_with(|| a1.cmp(a2))
            }
            (Expr::Mul(a), Expr::Mul(b)) => {
                let (ca, ra) = split_mul_coeff(a);
                let (cb, rb) = split_mul_coeff(b);
                cmp_slices(ra, rb)
                    .then_with(|| ca.cmp(&cb))
                    .then_with(|| cmp_slices(a, b))
            }
            (Expr::Add(a), Expr::Add(b)) => cmp_slices(a, b),
            _ => unreachable!("ranks matched"),
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(r) => write!(f, "{r}"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Add(ts) => f.debug_tuple("Add").field(ts).finish(),
            Expr::Mul(fs) => f.debug_tuple("Mul").field(fs).finish(),
            Expr::Pow(b, e) => f.debug_tuple("Pow").field(b).field(e).finish(),
            Expr::Fun(func, a) => write!(f, "{}({:?})", func.name(), a),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::render(self, crate::render::Format::Ascii))
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Self {
        Expr::Const(r)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        canon::add(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        canon::add(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        canon::mul(vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        canon::mul(vec![self, rhs.recip()])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        canon::mul(vec![Expr::int(-1), self])
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &'a Expr) -> Expr {
        self.clone() + rhs.clone()
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &'a Expr) -> Expr {
        self.clone() - rhs.clone()
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &'a Expr) -> Expr {
        self.clone() * rhs.clone()
    }
}

impl<'a> Div<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn div(self, rhs: &'a Expr) -> Expr {
        self.clone() / rhs.clone()
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}
