mod common;

use common::{agree_where_defined, expr, nonzero_rational, rational, rng, x};
use proptest::prelude::*;
use rand::Rng;
use tabula::calculus::{antiderivative, antiderivative_with_constant, differentiate, RuleName};
use tabula::{canonicalize, equals, parse, Expr, Rational, Symbol};

fn var() -> Symbol {
    Symbol::new("x")
}

/// Nonzero rational other than `-1`, used as an exponent.
fn exponent(r: &mut impl Rng) -> Rational {
    loop {
        let q = nonzero_rational(r);
        if q != Rational::integer(-1) && !q.is_one() {
            return q;
        }
    }
}

fn linear_arg(r: &mut impl Rng) -> Expr {
    Expr::constant(nonzero_rational(r)) * x() + Expr::constant(rational(r))
}

/// An irreducible monic quadratic `x^2 + p x + q`.
fn quadratic(r: &mut impl Rng) -> Expr {
    let p = rational(r);
    let q = &(&p * &p) / &Rational::integer(4) + Rational::new(r.random_range(1i64..=9), r.random_range(1i64..=3));
    x().powi(2) + Expr::constant(p) * x() + Expr::constant(q)
}

/// An integrand the named rule should claim at the top level.
fn instance(rule: RuleName, r: &mut impl Rng) -> Expr {
    match rule {
        RuleName::Power => x().pow(Expr::constant(exponent(r))),
        RuleName::Recip => x().recip(),
        RuleName::ExpLinear => Expr::exp(linear_arg(r)),
        RuleName::SinLinear => Expr::sin(linear_arg(r)),
        RuleName::CosLinear => Expr::cos(linear_arg(r)),
        RuleName::ShiftedPower => {
            // a positive shift keeps fractional powers real on the sample range
            let shift = Expr::constant(nonzero_rational(r).abs());
            let q = if r.random_bool(0.2) { Rational::integer(-1) } else { exponent(r) };
            (x() + shift).pow(Expr::constant(q))
        }
        RuleName::LinearOverQuadratic => {
            let d = Expr::constant(rational(r));
            (x() + d) * quadratic(r).recip()
        }
        RuleName::AtanRule => quadratic(r).recip(),
        RuleName::Constant => expr(r, 2, &["y"]),
        RuleName::SumSplit => {
            let a = instance(RuleName::Power, r);
            let b = instance([RuleName::ExpLinear, RuleName::SinLinear, RuleName::CosLinear][r.random_range(0..3)], r);
            a + b
        }
        RuleName::ConstFactor => {
            let inner = instance([RuleName::Power, RuleName::ExpLinear, RuleName::AtanRule][r.random_range(0..3)], r);
            let c = if r.random_bool(0.5) {
                Expr::constant(exponent(r))
            } else {
                Expr::sym("y")
            };
            c * inner
        }
    }
}

fn check_rule(rule: RuleName) {
    let mut r = rng(rule as u64 + 17);
    let mut hits = 0;
    for _ in 0..1000 {
        let e = instance(rule, &mut r);
        if e.free_of(&var()) && rule != RuleName::Constant {
            continue;
        }
        let hit = antiderivative(&e, &var()).unwrap_or_else(|| panic!("no rule for {e}"));
        if hit.rule_name != rule {
            continue;
        }
        let d = differentiate(&hit.antiderivative, &var());
        assert!(equals(&d, &e), "{rule}: d/dx {} = {d}, not {e}", hit.antiderivative);
        assert!(agree_where_defined(&d, &e, 1e-10), "{rule}: numeric mismatch for {e}");
        hits += 1;
        if hits == 250 {
            return;
        }
    }
    panic!("{rule}: only {hits} instances hit");
}

macro_rules! rule_tests {
    ($($name:ident => $rule:expr),* $(,)?) => {
        $(#[test] fn $name() { check_rule($rule); })*
    };
}

rule_tests! {
    power_rule => RuleName::Power,
    recip_rule => RuleName::Recip,
    exp_linear_rule => RuleName::ExpLinear,
    sin_linear_rule => RuleName::SinLinear,
    cos_linear_rule => RuleName::CosLinear,
    shifted_power_rule => RuleName::ShiftedPower,
    linear_over_quadratic_rule => RuleName::LinearOverQuadratic,
    atan_rule => RuleName::AtanRule,
    constant_rule => RuleName::Constant,
    sum_split_rule => RuleName::SumSplit,
    const_factor_rule => RuleName::ConstFactor,
}

#[test]
fn every_rule_has_a_test() {
    assert_eq!(RuleName::ALL.len(), 11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn differentiate_is_linear(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e1, e2) = (expr(&mut r, 3, &["x", "y"]), expr(&mut r, 3, &["x", "y"]));
        let a = Expr::constant(rational(&mut r));
        let lhs = differentiate(&(a.clone() * e1.clone() + e2.clone()), &var());
        let rhs = a * differentiate(&e1, &var()) + differentiate(&e2, &var());
        prop_assert!(equals(&lhs, &rhs));
    }

    #[test]
    fn differentiate_returns_canonical_trees(seed in any::<u64>()) {
        let e = expr(&mut rng(seed), 4, &["x", "y"]);
        let d = differentiate(&e, &var());
        prop_assert_eq!(canonicalize(&d), d);
    }
}

#[test]
fn table_entries() {
    let p = |s: &str| parse(s).unwrap();
    let d = |s: &str| differentiate(&p(s), &var());
    assert_eq!(d("ln(x)"), p("1/x"));
    assert!(equals(&d("ln(x)^2"), &p("(2/x)*ln(x)")));
    assert!(equals(&d("sin(2*x)"), &p("2*cos(2*x)")));
    let a = |s: &str| antiderivative(&p(s), &var()).map(|h| h.antiderivative);
    assert!(equals(&a("sin(2*x)").unwrap(), &p("-(1/2)*cos(2*x)")));
    assert!(equals(&a("3*x^2 - x").unwrap(), &p("x^3 - x^2/2")));
    assert_eq!(a("ln(x)"), None);
}

#[test]
fn pinned_antiderivatives() {
    let p = |s: &str| parse(s).unwrap();
    let t = Symbol::new("t");
    assert_eq!(antiderivative_with_constant(&p("-1"), &t, &p("x")), Some(p("x - t")));
    let second = antiderivative(&p("x - t"), &t).unwrap().antiderivative;
    assert_eq!(second, p("-(x - t)^2/2"));
    assert_eq!(antiderivative_with_constant(&p("cos(x)"), &var(), &Expr::zero()), Some(p("sin(x)")));
}
