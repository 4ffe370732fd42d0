mod common;

use common::{integrable, rng};
use tabula::ibp::IntegralProblem;
use tabula::showcase::{
    asymptotic_identity_check, beta_identity, definite, quad, quad_fn, registry_len, run_corpus, run_examples, taylor,
    DEFAULT_TOL,
};
use tabula::calculus::RuleTable;
use tabula::{equals, parse, Expr, Rational, Symbol};

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

#[test]
fn quadrature_of_known_integrals() {
    let x = Symbol::new("x");
    let r = quad(&p("sin(x)"), &x, 0.0, std::f64::consts::PI, DEFAULT_TOL).unwrap();
    assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
    let r = quad(&p("exp(-x)"), &x, 0.0, f64::INFINITY, DEFAULT_TOL).unwrap();
    assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
    let r = quad_fn(|t| 1.0 / (1.0 + t * t), 0.0, 1.0, DEFAULT_TOL).unwrap();
    assert!((r.value - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
}

/// The symbolic definite integral and quadrature are independent routes to
/// the same number.
#[test]
fn definite_integrals_match_quadrature() {
    let mut r = rng(23);
    let x = Symbol::new("x");
    let (a, b) = (Rational::new(1, 2), Rational::integer(2));
    let mut compared = 0;
    for _ in 0..200 {
        let f = integrable(&mut r);
        let problem = IntegralProblem::new(f.clone(), "x");
        let Ok(exact) = definite(&problem, &Expr::constant(a.clone()), &Expr::constant(b.clone())) else {
            continue;
        };
        let Ok(numeric) = quad(&f, &x, a.to_f64(), b.to_f64(), 1e-12) else {
            continue;
        };
        let exact = exact.eval(&|_| None);
        let tol = (10.0 * numeric.error_estimate).max(1e-9) * exact.abs().max(1.0);
        assert!((exact - numeric.value).abs() <= tol, "{f}: {exact} vs {}", numeric.value);
        compared += 1;
    }
    assert!(compared >= 100, "only {compared} comparisons");
}

/// `∫_0^1 (1-s)^n s^(b-1) ds = (b-1)! n! / (n+b)!`, and `beta_identity`
/// is that value scaled by `n^b`.
#[test]
fn beta_integrals() {
    let s = Symbol::new("s");
    for n in 1..=4usize {
        for b in 1..=4usize {
            let f = p(&format!("(1 - s)^{n}*s^{}", b - 1));
            let oracle = Rational::new(factorial(b - 1) * factorial(n), factorial(n + b));
            let exact = definite(&IntegralProblem::new(f.clone(), "s"), &Expr::zero(), &Expr::one()).unwrap();
            assert_eq!(exact, Expr::constant(oracle.clone()), "n = {n}, b = {b}");
            let scaled = oracle * Rational::integer(n as i64).pow(b as i32);
            assert_eq!(beta_identity(n as u32, b as u32), scaled);
            let numeric = quad(&f, &s, 0.0, 1.0, 1e-12).unwrap().value;
            assert!((numeric - exact.eval(&|_| None)).abs() < 1e-12);
        }
    }
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

#[test]
fn taylor_polynomials_match_the_series() {
    let t = taylor(&p("exp(t)"), &Rational::zero(), 4).unwrap();
    let series = Expr::sum((0..=4).map(|k| Expr::constant(Rational::new(1, factorial(k))) * p("x").powi(k as i64)));
    assert!(equals(&t.polynomial, &series));

    let t = taylor(&p("sin(t)"), &Rational::zero(), 5).unwrap();
    let series = Expr::sum([1usize, 3, 5].iter().map(|&k| {
        let sign = if k % 4 == 1 { 1 } else { -1 };
        Expr::constant(Rational::new(sign, factorial(k))) * p("x").powi(k as i64)
    }));
    assert!(equals(&t.polynomial, &series));
}

#[test]
fn taylor_identity_holds_off_center() {
    let t = taylor(&p("cos(t)"), &Rational::integer(1), 3).unwrap();
    assert!(t.boundary_terms_at_x().iter().all(Expr::is_zero));
    for x in [0.2, 1.7, 2.5] {
        assert!(t.check(x).unwrap() < 1e-8);
    }
}

#[test]
fn asymptotic_remainders_alternate_in_sign() {
    for n in 1..=4 {
        let c = asymptotic_identity_check(10.0, n).unwrap();
        let expected = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(c.remainder.signum(), expected, "n = {n}: {}", c.remainder);
        assert!(c.error < 1e-8);
    }
}

#[test]
fn more_terms_help_at_large_x() {
    let gap = |n| {
        let c = asymptotic_identity_check(10.0, n).unwrap();
        (c.integral - c.partial_sum).abs()
    };
    assert!(gap(4) < gap(1));
}

#[test]
fn corpus_passes() {
    let report = run_corpus();
    assert!(report.all_passed(), "{}", report.text());
    assert_eq!(report.text().lines().count(), report.items.len());
}

#[test]
fn example_registry() {
    let items = run_examples(&RuleTable::default());
    assert_eq!(items.len(), registry_len());
    let failing: Vec<_> = items.iter().filter(|i| !i.passed).map(|i| i.to_string()).collect();
    assert!(failing.is_empty(), "{failing:?}");
    let mut ids: Vec<_> = items.iter().map(|i| &i.id).collect();
    ids.dedup();
    assert_eq!(ids.len(), items.len());
}
