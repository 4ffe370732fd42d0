//! Seeded generators shared by the property, fuzz and acceptance tests.
#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use tabula::{Expr, Func, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn x() -> Expr {
    Expr::sym("x")
}

pub fn rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.random_range(-6i64..=6), rng.random_range(1i64..=4))
}

pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let r = rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

const FUNCS: [Func; 5] = [Func::Atan, Func::Cos, Func::Exp, Func::Ln, Func::Sin];

/// A tree built from raw constructors, so it is usually not canonical.
pub fn raw_expr(rng: &mut impl Rng, depth: u32, symbols: &[&str]) -> Expr {
    if depth == 0 || rng.random_bool(0.3) {
        return if rng.random_bool(0.4) {
            Expr::Const(rational(rng))
        } else {
            Expr::sym(symbols[rng.random_range(0..symbols.len())])
        };
    }
    match rng.random_range(0..4) {
        0 => Expr::Add((0..rng.random_range(2..=3)).map(|_| raw_expr(rng, depth - 1, symbols)).collect()),
        1 => Expr::Mul((0..rng.random_range(2..=3)).map(|_| raw_expr(rng, depth - 1, symbols)).collect()),
        2 => {
            let exponent = [Expr::int(2), Expr::int(3), Expr::int(-1), Expr::rational(1, 2)][rng.random_range(0..4)].clone();
            Expr::raw_pow(raw_expr(rng, depth - 1, symbols), exponent)
        }
        _ => Expr::raw_fun(FUNCS[rng.random_range(0..5)], raw_expr(rng, depth - 1, symbols)),
    }
}

/// A canonical expression over the whitelist.
pub fn expr(rng: &mut impl Rng, depth: u32, symbols: &[&str]) -> Expr {
    tabula::canonicalize(&raw_expr(rng, depth, symbols))
}

/// `Σ c_k x^k` with degree at most `deg`, not identically zero.
pub fn polynomial(rng: &mut impl Rng, deg: u32) -> Expr {
    loop {
        let p = Expr::sum((0..=deg).map(|k| Expr::constant(rational(rng)) * x().powi(k as i64)));
        if !p.is_zero() {
            return p;
        }
    }
}

/// `sin(a x)`, `cos(a x)` or `exp(a x)` with `a` a nonzero rational.
pub fn kernel(rng: &mut impl Rng) -> Expr {
    let arg = Expr::constant(nonzero_rational(rng)) * x();
    match rng.random_range(0..3) {
        0 => Expr::sin(arg),
        1 => Expr::cos(arg),
        _ => Expr::exp(arg),
    }
}

/// Polynomial of degree at most 4 times a kernel.
pub fn poly_kernel(rng: &mut impl Rng) -> Expr {
    let deg = rng.random_range(0..=4);
    polynomial(rng, deg) * kernel(rng)
}

/// Integrands the engine is expected to handle: the polynomial-kernel family,
/// polynomial times powers of ln, exponential times trig, trig times trig.
pub fn integrable(rng: &mut impl Rng) -> Expr {
    match rng.random_range(0..5) {
        0 | 1 => poly_kernel(rng),
        2 => {
            let deg = rng.random_range(0..=2);
            let k = rng.random_range(1..=2);
            polynomial(rng, deg) * Expr::ln(x()).powi(k)
        }
        3 => {
            let p = Expr::constant(nonzero_rational(rng)) * x();
            let q = Expr::constant(nonzero_rational(rng)) * x();
            let trig = if rng.random_bool(0.5) { Expr::sin(q) } else { Expr::cos(q) };
            Expr::exp(p) * trig
        }
        _ => {
            let p = Expr::int(rng.random_range(1..=4)) * x();
            let q = Expr::int(rng.random_range(5..=8)) * x();
            let left = if rng.random_bool(0.5) { Expr::sin(p) } else { Expr::cos(p) };
            let right = if rng.random_bool(0.5) { Expr::sin(q) } else { Expr::cos(q) };
            left * right
        }
    }
}

/// Evaluates at `n` points spread over `(0.1, 3.0)` with `y` fixed at 0.7.
pub fn samples(e: &Expr, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let xv = 0.1 + 2.9 * (i as f64 + 0.5) / n as f64;
            e.eval(&|s| match s.as_str() {
                "x" => Some(xv),
                "y" => Some(0.7),
                "t" => Some(0.3),
                _ => None,
            })
        })
        .collect()
}

/// True when the two agree wherever both are finite, relative to
/// `max(|a|, |b|, 1)`, and at least one point was finite.
pub fn agree(a: &Expr, b: &Expr, tol: f64) -> bool {
    let (va, vb) = (samples(a, 20), samples(b, 20));
    let mut seen = false;
    for (p, q) in va.iter().zip(&vb) {
        if !p.is_finite() || !q.is_finite() {
            continue;
        }
        seen = true;
        if (p - q).abs() > tol * p.abs().max(q.abs()).max(1.0) {
            return false;
        }
    }
    seen
}

/// Like [`agree`], but also passes when neither side is finite anywhere, as
/// for constants such as `(-2/3)^(1/2)`.
pub fn agree_where_defined(a: &Expr, b: &Expr, tol: f64) -> bool {
    let defined = |e: &Expr| samples(e, 20).iter().any(|v| v.is_finite());
    if !defined(a) && !defined(b) {
        return true;
    }
    agree(a, b, tol)
}
