//! Full distribution into a sum of monomials, and its partial inverse.

use std::collections::BTreeMap;

use super::canon::{add, fun, mul, pow};
use super::{Expr, Symbol};
use crate::rational::Rational;

/// Positive integer powers of sums above this are left unexpanded.
const MAX_EXPAND_POWER: i64 = 24;
/// Distribution stops once a product would produce more terms than this.
const MAX_TERMS: usize = 20_000;

/// Distributes every product over every sum and multiplies out small positive
/// integer powers of sums. Univariate polynomial fractions are reduced so that
/// the numerator degree stays below the denominator degree.
///
/// The result is canonical; two expressions that are equal as rational
/// functions of polynomial and elementary atoms expand to the same tree in
/// the common cases this crate produces.
pub fn expand(e: &Expr) -> Expr {
    let raw = expand_inner(e);
    reduce_fractions(raw)
}

fn expand_inner(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Sym(_) => e.clone(),
        Expr::Add(ts) => add(ts.iter().map(expand_inner).collect()),
        Expr::Mul(fs) => distribute(fs.iter().map(expand_inner).collect()),
        Expr::Pow(b, x) => {
            let b = expand_inner(b);
            let x = expand_inner(x);
            expand_power(pow(b, x))
        }
        Expr::Fun(f, a) => fun(*f, expand_inner(a)),
    }
}

fn positive_small_power(e: &Expr) -> Option<(Vec<Expr>, i64)> {
    match e {
        Expr::Pow(b, x) => match (&**b, x.as_const().and_then(Rational::to_i64)) {
            (Expr::Add(ts), Some(n)) if n > 1 && n <= MAX_EXPAND_POWER => Some((ts.clone(), n)),
            _ => None,
        },
        _ => None,
    }
}

/// Multiplies out a canonical power result if it hides a positive power of a sum.
fn expand_power(p: Expr) -> Expr {
    if let Some((terms, n)) = positive_small_power(&p) {
        let base = Expr::Add(terms);
        return distribute(vec![base; n as usize]);
    }
    match &p {
        Expr::Mul(fs) if fs.iter().any(|f| positive_small_power(f).is_some()) => {
            distribute(fs.iter().cloned().map(expand_power).collect())
        }
        _ => p,
    }
}

fn distribute(parts: Vec<Expr>) -> Expr {
    let mut acc: Vec<Expr> = vec![Expr::one()];
    let mut overflow = false;
    for part in &parts {
        let terms = part.terms();
        if acc.len().saturating_mul(terms.len()) > MAX_TERMS {
            overflow = true;
            break;
        }
        let mut next = Vec::with_capacity(acc.len() * terms.len());
        for a in &acc {
            for t in &terms {
                next.push(mul(vec![a.clone(), t.clone()]));
            }
        }
        acc = add(next).terms();
    }
    if overflow {
        return mul(parts);
    }
    add(acc)
}

/// Univariate polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn trim(mut self) -> Self {
        while self.0.len() > 1 && self.0.last().is_some_and(Rational::is_zero) {
            self.0.pop();
        }
        self
    }

    /// `(quotient, remainder)` of polynomial long division.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree();
        let lead = divisor.0[dd].clone();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (Poly(vec![Rational::zero()]), Poly(rem).trim());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = &rem[k] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in divisor.0.iter().enumerate() {
                rem[k - dd + j] = &rem[k - dd + j] - &(&c * dj);
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd.max(1));
        (Poly(quot).trim(), Poly(rem).trim())
    }

    pub fn to_expr(&self, var: &Symbol) -> Expr {
        add(self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                mul(vec![
                    Expr::Const(c.clone()),
                    pow(Expr::Sym(var.clone()), Expr::int(k as i64)),
                ])
            })
            .collect())
    }

    /// Reads an expanded polynomial in `var` with rational coefficients.
    pub fn from_expr(e: &Expr, var: &Symbol) -> Option<Poly> {
        let mut coeffs: Vec<Rational> = Vec::new();
        for t in e.terms() {
            let (c, rest) = t.split_coefficient();
            let k = match &rest {
                Expr::Const(r) if r.is_one() => 0,
                Expr::Sym(s) if s == var => 1,
                Expr::Pow(b, x) => match (&**b, x.as_const().and_then(Rational::to_i64)) {
                    (Expr::Sym(s), Some(k)) if s == var && k > 0 => k as usize,
                    _ => return None,
                },
                _ => return None,
            };
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rational::zero());
            }
            coeffs[k] = &coeffs[k] + &c;
        }
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        Some(Poly(coeffs).trim())
    }
}

/// The unique symbol of an expression, if it has exactly one.
fn sole_symbol(e: &Expr) -> Option<Symbol> {
    let mut found: Option<Symbol> = None;
    let mut many = false;
    e.walk(&mut |n| {
        if let Expr::Sym(s) = n {
            match &found {
                None => found = Some(s.clone()),
                Some(f) if f != s => many = true,
                _ => {}
            }
        }
    });
    if many {
        None
    } else {
        found
    }
}

/// Finds `s^k * Q^-m` with `Q` univariate in `s` and `k >= deg Q`, and rewrites
/// it as `S * Q^(1-m) + R * Q^-m` where `s^k = S*Q + R`.
fn reduce_monomial(term: &Expr) -> Option<Expr> {
    let factors = term.factors();
    for (qi, f) in factors.iter().enumerate() {
        let Expr::Pow(q, m) = f else { continue };
        let Some(m) = m.as_const().and_then(Rational::to_i64) else {
            continue;
        };
        if m >= 0 || !matches!(**q, Expr::Add(_)) {
            continue;
        }
        let Some(s) = sole_symbol(q) else { continue };
        let Some(qpoly) = Poly::from_expr(q, &s) else {
            continue;
        };
        if qpoly.degree() == 0 {
            continue;
        }
        let power_of_s = factors.iter().enumerate().find_map(|(i, g)| match g {
            Expr::Sym(t) if *t == s => Some((i, 1usize)),
            Expr::Pow(b, x) => match (&**b, x.as_const().and_then(Rational::to_i64)) {
                (Expr::Sym(t), Some(k)) if *t == s && k > 0 => Some((i, k as usize)),
                _ => None,
            },
            _ => None,
        });
        let Some((si, k)) = power_of_s else { continue };
        if k < qpoly.degree() {
            continue;
        }
        let mut numer = vec![Rational::zero(); k + 1];
        numer[k] = Rational::one();
        let (quot, rem) = Poly(numer).div_rem(&qpoly);
        let rest: Vec<Expr> = factors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != qi && *i != si)
            .map(|(_, g)| g.clone())
            .collect();
        let q_expr = (**q).clone();
        let replaced = add(vec![
            distribute(vec![quot.to_expr(&s), pow(q_expr.clone(), Expr::int(m + 1))]),
            distribute(vec![rem.to_expr(&s), pow(q_expr, Expr::int(m))]),
        ]);
        let mut parts = rest;
        parts.push(replaced);
        return Some(distribute(parts));
    }
    None
}

fn reduce_fractions(e: Expr) -> Expr {
    let mut current = e;
    // each rewrite lowers a numerator degree or a denominator multiplicity
    for _ in 0..64 {
        let terms = current.terms();
        let mut changed = false;
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            match reduce_monomial(&t) {
                Some(r) => {
                    changed = true;
                    out.push(r);
                }
                None => out.push(t),
            }
        }
        if !changed {
            return current;
        }
        current = add(out);
    }
    current
}

fn rational_power(f: &Expr) -> (Expr, Rational) {
    match f {
        Expr::Pow(b, x) => match x.as_const() {
            Some(r) => ((**b).clone(), r.clone()),
            None => (f.clone(), Rational::one()),
        },
        other => (other.clone(), Rational::one()),
    }
}

/// Expands, then pulls non-polynomial factors shared by every term out of the
/// sum, e.g. `2*x^2*ln(x) - x*ln(x)` becomes `ln(x) * (2*x^2 - x)`.
/// Symbol powers and radicals stay inside.
pub fn collect(e: &Expr) -> Expr {
    let expanded = expand(e);
    let Expr::Add(terms) = &expanded else {
        return expanded;
    };
    let maps: Vec<BTreeMap<Expr, Rational>> = terms
        .iter()
        .map(|t| {
            let (_, rest) = t.split_coefficient();
            let mut m = BTreeMap::new();
            for f in rest.factors() {
                if f.is_one() {
                    continue;
                }
                let (b, x) = rational_power(&f);
                if matches!(b, Expr::Sym(_) | Expr::Const(_)) {
                    continue;
                }
                m.insert(b, x);
            }
            m
        })
        .collect();
    let mut common: Vec<(Expr, Rational)> = Vec::new();
    for (base, x0) in &maps[0] {
        let mut exps = vec![x0.clone()];
        for m in &maps[1..] {
            match m.get(base) {
                Some(x) => exps.push(x.clone()),
                None => break,
            }
        }
        if exps.len() != maps.len() {
            continue;
        }
        let chosen = if exps.iter().all(Rational::is_positive) {
            exps.into_iter().min().unwrap()
        } else if exps.iter().all(Rational::is_negative) {
            exps.into_iter().max().unwrap()
        } else {
            continue;
        };
        common.push((base.clone(), chosen));
    }
    if common.is_empty() {
        return expanded;
    }
    let divisor: Vec<Expr> = common
        .iter()
        .map(|(b, x)| pow(b.clone(), Expr::Const(-x)))
        .collect();
    let inner = add(terms
        .iter()
        .map(|t| {
            let mut fs = divisor.clone();
            fs.push(t.clone());
            mul(fs)
        })
        .collect());
    let mut fs: Vec<Expr> = common
        .into_iter()
        .map(|(b, x)| pow(b, Expr::Const(x)))
        .collect();
    fs.push(inner);
    mul(fs)
}

/// Expands, then groups terms by their factors that are not polynomial in
/// `var`, giving `Σ P_k(var) * T_k`. `(3x - x^2)*cos(x) + 2*cos(x)` becomes
/// `(3x - x^2 + 2)*cos(x)`.
pub fn gather(e: &Expr, var: &Symbol) -> Expr {
    // a factor common to every term is kept outside
    if let Expr::Mul(fs) = collect(e) {
        if let Some(pos) = fs.iter().position(|f| matches!(f, Expr::Add(_))) {
            let mut outer = fs.clone();
            let inner = outer.remove(pos);
            if outer.iter().any(|f| !f.free_of(var) && !matches!(f, Expr::Sym(_) | Expr::Pow(..))) {
                return mul(vec![mul(outer), gather_terms(&inner, var)]);
            }
        }
    }
    gather_terms(e, var)
}

fn gather_terms(e: &Expr, var: &Symbol) -> Expr {
    let expanded = expand(e);
    let mut groups: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
    for t in expanded.terms() {
        let (poly, rest): (Vec<Expr>, Vec<Expr>) = t.factors().into_iter().partition(|f| match f {
            Expr::Const(_) | Expr::Sym(_) => true,
            Expr::Pow(b, x) => matches!(**b, Expr::Sym(_)) && x.as_const().is_some_and(|k| k.is_integer() && k.is_positive()),
            other => other.free_of(var),
        });
        groups.entry(mul(rest)).or_default().push(mul(poly));
    }
    add(groups.into_iter().map(|(key, coeffs)| mul(vec![key, add(coeffs)])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::sym("x")
    }

    #[test]
    fn square_of_binomial() {
        let e = (x() + Expr::int(1)).powi(2);
        let want = Expr::sum([x().powi(2), Expr::int(2) * x(), Expr::int(1)]);
        assert_eq!(expand(&e), want);
    }

    #[test]
    fn fraction_reduction() {
        let q = Expr::sum([x().powi(2), Expr::int(4) * x(), Expr::int(7)]);
        let e = x().powi(2) / q.clone();
        let want = Expr::int(1) - (Expr::int(4) * x() + Expr::int(7)) / q;
        assert_eq!(expand(&e), expand(&want));
    }

    #[test]
    fn collect_pulls_log() {
        let lnx = Expr::ln(x());
        let e = Expr::int(2) * x().powi(2) * lnx.clone() - x() * lnx.clone();
        let c = collect(&e);
        let want = lnx * (Expr::int(2) * x().powi(2) - x());
        assert_eq!(c, want);
    }

    #[test]
    fn division() {
        let p = Poly(vec![Rational::zero(), Rational::zero(), Rational::one()]);
        let q = Poly(vec![Rational::integer(7), Rational::integer(4), Rational::one()]);
        let (quot, rem) = p.div_rem(&q);
        assert_eq!(quot, Poly(vec![Rational::one()]));
        assert_eq!(rem, Poly(vec![Rational::integer(-7), Rational::integer(-4)]));
    }
}
