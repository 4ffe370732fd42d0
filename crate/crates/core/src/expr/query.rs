//! Structural queries: equality, proportionality, substitution, evaluation
//! and the difficulty score.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::canon::canonicalize;
use super::expand::expand;
use super::{Expr, Symbol};
use crate::rational::Rational;

/// `a` and `b` are equal iff `a - b` expands to zero.
///
/// This is syntactic: no trigonometric or logarithmic identity is used, so
/// `sin(2*x)` and `2*sin(x)*cos(x)` compare unequal.
pub fn equals(a: &Expr, b: &Expr) -> bool {
    a == b || expand(&(a - b)).is_zero()
}

/// A sum of monomials keyed by the non-rational part of each term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomials(pub BTreeMap<Expr, Rational>);

impl Monomials {
    pub fn of(e: &Expr) -> Monomials {
        let mut map = BTreeMap::new();
        let expanded = expand(e);
        if expanded.is_zero() {
            return Monomials(map);
        }
        for t in expanded.terms() {
            let (c, rest) = t.split_coefficient();
            map.insert(rest, c);
        }
        Monomials(map)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_expr(&self) -> Expr {
        Expr::sum(
            self.0
                .iter()
                .map(|(rest, c)| Expr::Const(c.clone()) * rest.clone()),
        )
    }
}

/// The rational `k` with `a = k*b`, if one exists. `None` when `b` is zero.
pub fn constant_ratio(a: &Expr, b: &Expr) -> Option<Rational> {
    let ma = Monomials::of(a);
    let mb = Monomials::of(b);
    let (key, cb) = mb.0.iter().next()?;
    let k = match ma.0.get(key) {
        Some(ca) => ca / cb,
        None => Rational::zero(),
    };
    if k.is_zero() {
        return ma.is_empty().then_some(k);
    }
    if ma.0.len() != mb.0.len() {
        return None;
    }
    for (rest, cb) in &mb.0 {
        match ma.0.get(rest) {
            Some(ca) if *ca == &k * cb => {}
            _ => return None,
        }
    }
    Some(k)
}

impl Expr {
    pub fn free_of(&self, sym: &Symbol) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Sym(s) => s != sym,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().all(|x| x.free_of(sym)),
            Expr::Pow(b, e) => b.free_of(sym) && e.free_of(sym),
            Expr::Fun(_, a) => a.free_of(sym),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.walk(&mut |n| {
            if let Expr::Sym(s) = n {
                out.insert(s.clone());
            }
        });
        out
    }

    /// Replaces every occurrence of `sym` and canonicalizes the result.
    pub fn substitute(&self, sym: &Symbol, replacement: &Expr) -> Expr {
        canonicalize(&self.replace(sym, replacement))
    }

    fn replace(&self, sym: &Symbol, replacement: &Expr) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Sym(s) if s == sym => replacement.clone(),
            Expr::Sym(_) => self.clone(),
            Expr::Add(ts) => Expr::Add(ts.iter().map(|t| t.replace(sym, replacement)).collect()),
            Expr::Mul(fs) => Expr::Mul(fs.iter().map(|f| f.replace(sym, replacement)).collect()),
            Expr::Pow(b, e) => Expr::raw_pow(b.replace(sym, replacement), e.replace(sym, replacement)),
            Expr::Fun(f, a) => Expr::raw_fun(*f, a.replace(sym, replacement)),
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Double-precision value with symbols bound by `env`; unbound symbols are NaN.
    pub fn eval(&self, env: &dyn Fn(&Symbol) -> Option<f64>) -> f64 {
        match self {
            Expr::Const(r) => r.to_f64(),
            Expr::Sym(s) => env(s).unwrap_or(f64::NAN),
            Expr::Add(ts) => ts.iter().map(|t| t.eval(env)).sum(),
            Expr::Mul(fs) => fs.iter().map(|f| f.eval(env)).product(),
            Expr::Pow(b, e) => {
                let base = b.eval(env);
                match e.as_const().and_then(Rational::to_i64) {
                    Some(n) if n.abs() <= i32::MAX as i64 => base.powi(n as i32),
                    _ => base.powf(e.eval(env)),
                }
            }
            Expr::Fun(f, a) => f.eval(a.eval(env)),
        }
    }

    /// Evaluates with a single bound symbol.
    pub fn eval_at(&self, sym: &Symbol, value: f64) -> f64 {
        self.eval(&|s| (s == sym).then_some(value))
    }

    /// Degree of `var` in the polynomial parts of the tree (function
    /// arguments are not polynomial positions).
    pub fn poly_degree(&self, var: &Symbol) -> u64 {
        match self {
            Expr::Sym(s) if s == var => 1,
            Expr::Pow(b, e) => match e.as_const().and_then(Rational::to_i64) {
                Some(k) if k > 0 => b.poly_degree(var).saturating_mul(k as u64),
                _ => 0,
            },
            Expr::Add(ts) => ts.iter().map(|t| t.poly_degree(var)).max().unwrap_or(0),
            Expr::Mul(fs) => fs.iter().map(|f| f.poly_degree(var)).sum(),
            _ => 0,
        }
    }

    pub fn complexity(&self, var: &Symbol) -> ComplexityScore {
        ComplexityScore::new(self.node_count(), self.poly_degree(var))
    }
}

/// Difficulty of an integrand: node count plus four per polynomial degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ComplexityScore {
    pub node_count: u64,
    pub max_poly_degree: u64,
    pub score: u64,
}

impl ComplexityScore {
    pub const DEGREE_WEIGHT: u64 = 4;

    pub fn new(node_count: usize, max_poly_degree: u64) -> Self {
        let node_count = node_count as u64;
        ComplexityScore {
            node_count,
            max_poly_degree,
            score: node_count + Self::DEGREE_WEIGHT * max_poly_degree,
        }
    }
}

impl PartialOrd for ComplexityScore {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ComplexityScore {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.score
            .cmp(&other.score)
            .then(self.max_poly_degree.cmp(&other.max_poly_degree))
            .then(self.node_count.cmp(&other.node_count))
    }
}
