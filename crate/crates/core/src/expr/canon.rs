//! Canonical smart constructors.
//!
//! The normal form produced here:
//! - sums and products are flattened, sorted, and hold at most one constant
//!   (the constant leads a product and is never 1);
//! - like terms and like factors are combined, rational arithmetic is folded;
//! - `x^0`, `x^1` and products containing zero do not occur; `0^q` with
//!   `q < 0` is always written `0^-1`;
//! - a rational times a single sum is distributed; sums that share a product
//!   with other factors are made monic instead;
//! - exponentials in a product merge into one, `exp(a)^k` becomes `exp(k*a)`;
//! - a sum raised to an integer power is also made monic in its leading term
//!   (highest total degree, then greatest in the order), pulling the
//!   content into the coefficient;
//! - positive rational bases under fractional exponents are reduced to a
//!   coefficient times a power-free radical.
//!
//! `ln(exp(a))` and `exp(ln(a))` are left as written, and no trigonometric
//! identity is applied.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::{Expr, Func};
use crate::rational::Rational;

/// Largest integer exponent folded exactly on a rational base.
const MAX_FOLD_EXPONENT: i64 = 4096;

/// Rebuilds `e` bottom-up through the canonical constructors.
pub fn canonicalize(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Sym(_) => e.clone(),
        Expr::Add(ts) => add(ts.iter().map(canonicalize).collect()),
        Expr::Mul(fs) => mul(fs.iter().map(canonicalize).collect()),
        Expr::Pow(b, x) => pow(canonicalize(b), canonicalize(x)),
        Expr::Fun(f, a) => fun(*f, canonicalize(a)),
    }
}

fn push_term(t: Expr, constant: &mut Rational, groups: &mut BTreeMap<Expr, Rational>) {
    match t {
        Expr::Add(ts) => {
            for t in ts {
                push_term(t, constant, groups);
            }
        }
        Expr::Const(c) => *constant = &*constant + &c,
        other => {
            let (c, rest) = other.split_coefficient();
            let slot = groups.entry(rest).or_insert_with(Rational::zero);
            *slot = &*slot + &c;
        }
    }
}

fn with_coefficient(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest {
        Expr::Mul(fs) => {
            let mut out = Vec::with_capacity(fs.len() + 1);
            out.push(Expr::Const(c));
            out.extend(fs);
            Expr::Mul(out)
        }
        other => Expr::Mul(vec![Expr::Const(c), other]),
    }
}

/// Canonical sum of canonical terms.
pub(crate) fn add(terms: Vec<Expr>) -> Expr {
    let mut constant = Rational::zero();
    let mut groups = BTreeMap::new();
    for t in terms {
        push_term(t, &mut constant, &mut groups);
    }
    let mut out: Vec<Expr> = groups
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(rest, c)| with_coefficient(c, rest))
        .collect();
    if !constant.is_zero() {
        out.push(Expr::Const(constant.clone()));
    }
    out.sort();
    match out.len() {
        0 => Expr::Const(constant),
        1 => out.pop().unwrap(),
        _ => Expr::Add(out),
    }
}

#[derive(Default)]
struct Factors {
    coeff: Option<Rational>,
    powers: BTreeMap<Expr, Vec<Expr>>,
    exp_args: Vec<Expr>,
}

impl Factors {
    fn scale(&mut self, c: &Rational) {
        let cur = self.coeff.take().unwrap_or_else(Rational::one);
        self.coeff = Some(&cur * c);
    }

    fn push(&mut self, f: Expr) {
        match f {
            Expr::Mul(fs) => fs.into_iter().for_each(|f| self.push(f)),
            Expr::Const(c) => self.scale(&c),
            Expr::Fun(Func::Exp, a) => self.exp_args.push(*a),
            Expr::Pow(b, e) => self.powers.entry(*b).or_default().push(*e),
            Expr::Add(ts) => {
                let (lead, m) = monic(ts);
                self.scale(&lead);
                self.powers.entry(m).or_default().push(Expr::one());
            }
            other => self.powers.entry(other).or_default().push(Expr::one()),
        }
    }
}

/// Canonical product of canonical factors.
pub(crate) fn mul(factors: Vec<Expr>) -> Expr {
    let mut acc = Factors::default();
    for f in factors {
        acc.push(f);
    }
    let mut coeff = acc.coeff.unwrap_or_else(Rational::one);
    if coeff.is_zero() {
        return Expr::zero();
    }
    let mut out: Vec<Expr> = Vec::new();
    let absorb = |f: Expr, coeff: &mut Rational, out: &mut Vec<Expr>| match f {
        Expr::Const(c) => *coeff = &*coeff * &c,
        Expr::Mul(fs) => {
            for f in fs {
                match f {
                    Expr::Const(c) => *coeff = &*coeff * &c,
                    other => out.push(other),
                }
            }
        }
        other => out.push(other),
    };
    for (base, exps) in acc.powers {
        let e = add(exps);
        absorb(pow(base, e), &mut coeff, &mut out);
    }
    if !acc.exp_args.is_empty() {
        absorb(fun(Func::Exp, add(acc.exp_args)), &mut coeff, &mut out);
    }
    if coeff.is_zero() {
        return Expr::zero();
    }
    out.sort();
    if out.is_empty() {
        return Expr::Const(coeff);
    }
    if out.len() == 1 {
        if coeff.is_one() {
            return out.pop().unwrap();
        }
        if let Expr::Add(ts) = &out[0] {
            return add(
                ts.iter()
                    .map(|t| mul(vec![Expr::Const(coeff.clone()), t.clone()]))
                    .collect(),
            );
        }
    }
    if !coeff.is_one() {
        out.insert(0, Expr::Const(coeff));
    }
    Expr::Mul(out)
}

fn small_integer(e: &Expr) -> Option<i64> {
    e.as_const().and_then(Rational::to_i64)
}

/// Canonical power of canonical operands.
pub(crate) fn pow(base: Expr, exponent: Expr) -> Expr {
    if exponent.is_zero() {
        return Expr::one();
    }
    if exponent.is_one() {
        return base;
    }
    if base.is_one() {
        return Expr::one();
    }
    let int_exp = small_integer(&exponent);
    match base {
        Expr::Const(b) => match &exponent {
            Expr::Const(q) if q.is_integer() => match int_exp {
                _ if b.is_zero() && q.is_negative() => undefined(),
                Some(n) if n.abs() <= MAX_FOLD_EXPONENT => Expr::Const(b.pow(n as i32)),
                _ => Expr::raw_pow(Expr::Const(b), exponent),
            },
            Expr::Const(q) => radical(&b, q),
            _ => Expr::raw_pow(Expr::Const(b), exponent),
        },
        Expr::Pow(inner_base, inner_exp) if int_exp.is_some() => {
            pow(*inner_base, mul(vec![*inner_exp, exponent]))
        }
        Expr::Mul(fs) if int_exp.is_some() => {
            mul(fs.into_iter().map(|f| pow(f, exponent.clone())).collect())
        }
        Expr::Fun(Func::Exp, a) => fun(Func::Exp, mul(vec![*a, exponent])),
        Expr::Add(ts) if int_exp.is_some() => {
            let (lead, monic) = monic(ts);
            if lead.is_one() {
                return Expr::raw_pow(monic, exponent);
            }
            mul(vec![pow(Expr::Const(lead), exponent.clone()), pow(monic, exponent)])
        }
        other => Expr::raw_pow(other, exponent),
    }
}

/// Splits a canonical sum into its leading coefficient and the sum divided
/// by it. The leading term has the highest total degree, then is greatest in
/// the order.
fn monic(ts: Vec<Expr>) -> (Rational, Expr) {
    let lead = ts
        .iter()
        .filter(|t| !t.is_const())
        .map(|t| t.split_coefficient())
        .max_by(|(_, a), (_, b)| total_degree(a).cmp(&total_degree(b)).then_with(|| a.cmp(b)))
        .map(|(c, _)| c)
        .unwrap_or_else(Rational::one);
    if lead.is_one() {
        return (lead, Expr::Add(ts));
    }
    let inv = Expr::Const(lead.recip());
    let monic = add(ts.into_iter().map(|t| mul(vec![inv.clone(), t])).collect());
    (lead, monic)
}

/// Sum of the rational exponents of bare symbols in a monomial.
pub(crate) fn total_degree(t: &Expr) -> Rational {
    t.factors()
        .iter()
        .map(|f| match f {
            Expr::Sym(_) => Rational::one(),
            Expr::Pow(b, x) => match (&**b, x.as_const()) {
                (Expr::Sym(_), Some(q)) => q.clone(),
                _ => Rational::zero(),
            },
            _ => Rational::zero(),
        })
        .fold(Rational::zero(), |a, b| &a + &b)
}

/// Every `0^q` with `q < 0` is kept as this one form.
fn undefined() -> Expr {
    Expr::raw_pow(Expr::zero(), Expr::int(-1))
}

/// `b^q` for a rational base and a non-integer rational exponent.
fn radical(b: &Rational, q: &Rational) -> Expr {
    if b.is_zero() {
        return if q.is_positive() { Expr::zero() } else { undefined() };
    }
    if b.is_negative() {
        return Expr::raw_pow(Expr::Const(b.clone()), Expr::Const(q.clone()));
    }
    if b.is_integer() {
        return integer_radical(b.numer(), q);
    }
    mul(vec![
        integer_radical(b.numer(), q),
        integer_radical(b.denom(), &-q),
    ])
}

/// Largest integer for which perfect-power extraction is attempted.
const MAX_FACTOR: u64 = 1_000_000_000_000;

fn integer_radical(n: &BigInt, q: &Rational) -> Expr {
    if n.is_one() {
        return Expr::one();
    }
    let whole = q.floor();
    let frac = q - &Rational::integer(whole.clone());
    let d = frac.denom().to_u32().unwrap_or(0);
    let a = frac.numer().to_i64().unwrap_or(0);
    let whole = whole.to_i64().unwrap_or(0);
    let n_rat = Rational::integer(n.clone());
    let too_big = whole.abs() > MAX_FOLD_EXPONENT || d == 0 || a == 0;
    if too_big {
        return Expr::raw_pow(Expr::Const(n_rat), Expr::Const(q.clone()));
    }
    let mut coeff = n_rat.pow(whole as i32);
    let (outside, inside) = match n.to_u64() {
        Some(v) if v <= MAX_FACTOR => extract_power(v, d),
        _ => (1, n.to_u64().unwrap_or(0)),
    };
    if inside == 0 {
        // n did not fit into u64; leave the fractional part untouched
        return mul(vec![
            Expr::Const(coeff),
            Expr::raw_pow(Expr::Const(n_rat), Expr::Const(frac)),
        ]);
    }
    coeff = &coeff * &Rational::integer(outside).pow(a as i32);
    let rad = if inside == 1 {
        Expr::one()
    } else {
        Expr::raw_pow(Expr::Const(Rational::integer(inside)), Expr::Const(frac))
    };
    if rad.is_one() {
        Expr::Const(coeff)
    } else if coeff.is_one() {
        rad
    } else {
        Expr::Mul(vec![Expr::Const(coeff), rad])
    }
}

/// Writes `n = outside^d * inside` with `inside` free of `d`-th powers.
fn extract_power(mut n: u64, d: u32) -> (u64, u64) {
    let mut outside = 1u64;
    let mut inside = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut k = 0u32;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            outside *= p.pow(k / d);
            inside *= p.pow(k % d);
        }
        p += 1;
    }
    if n > 1 {
        if d == 1 {
            outside *= n;
        } else {
            inside *= n;
        }
    }
    (outside, inside)
}

/// Canonical function application; folds the exact special values only.
pub(crate) fn fun(f: Func, arg: Expr) -> Expr {
    match (&f, arg.as_const()) {
        (Func::Exp, Some(c)) if c.is_zero() => Expr::one(),
        (Func::Sin | Func::Atan, Some(c)) if c.is_zero() => Expr::zero(),
        (Func::Cos, Some(c)) if c.is_zero() => Expr::one(),
        (Func::Ln, Some(c)) if c.is_one() => Expr::zero(),
        _ => Expr::raw_fun(f, arg),
    }
}
