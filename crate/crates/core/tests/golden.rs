use std::time::{Duration, Instant};

use tabula::ibp::{auto_integrate, verify, IntegralProblem, Policy};
use tabula::{equals, parse, Expr, Format};

fn integrate(f: &str) -> tabula::ibp::DerivationTrace {
    let start = Instant::now();
    let trace = auto_integrate(&IntegralProblem::new(parse(f).unwrap(), "x"), &Policy::default()).unwrap();
    assert!(start.elapsed() < Duration::from_secs(1), "{f} took {:?}", start.elapsed());
    assert!(verify(&trace).passed, "{f}");
    trace
}

fn same(a: &Expr, b: &str) -> bool {
    equals(a, &parse(b).unwrap())
}

#[test]
fn logarithm() {
    let t = integrate("ln(x)");
    assert!(same(&t.antiderivative, "x*ln(x) - x"));
    assert_eq!(t.render_result(Format::Ascii), "x*ln(x) - x + C");
}

#[test]
fn exponential_times_sine() {
    let t = integrate("exp(3*x)*sin(2*x)");
    assert!(same(&t.antiderivative, "exp(3*x)/13*(3*sin(2*x) - 2*cos(2*x))"));
    assert_eq!(t.root.tables().len(), 1);
    assert_eq!(
        t.render_result(Format::Ascii),
        "(1/13)*(3*sin(2*x) - 2*cos(2*x))*exp(3*x) + C"
    );
}

#[test]
fn polynomial_times_sine() {
    let t = integrate("(x^2 - 3*x)*sin(x)");
    assert!(same(&t.antiderivative, "(3*x - x^2)*cos(x) + (2*x - 3)*sin(x) + 2*cos(x)"));
    assert_eq!(t.root.tables().len(), 1);
}

#[test]
fn sine_times_cosine() {
    let t = integrate("sin(2*x)*cos(5*x)");
    assert_eq!(
        t.render_result(Format::Ascii),
        "(5/21)*sin(2*x)*sin(5*x) + (2/21)*cos(2*x)*cos(5*x) + C"
    );
}

#[test]
fn polynomial_times_log_squared() {
    let t = integrate("(3*x^2 - x)*ln(x)^2");
    assert!(same(
        &t.antiderivative,
        "(x^3 - x^2/2)*ln(x)^2 + (x^2/2 - 2*x^3/3)*ln(x) + 2*x^3/9 - x^2/4"
    ));
    assert_eq!(t.root.recursions(), 1);
}

#[test]
fn log_cubed() {
    let t = integrate("ln(x)^3");
    assert!(same(&t.antiderivative, "x*ln(x)^3 - 3*x*ln(x)^2 + 6*x*ln(x) - 6*x"));
    assert_eq!(t.root.recursions(), 2);
}

/// `x Σ_{k=0..n} (-1)^(n-k) n!/k! ln(x)^k`, written out term by term.
fn log_power_antiderivative(n: i64) -> String {
    let fact = |k: i64| (1..=k).product::<i64>();
    (0..=n)
        .map(|k| {
            let c = if (n - k) % 2 == 0 { 1 } else { -1 } * fact(n) / fact(k);
            format!("({c})*x*ln(x)^{k}")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[test]
fn log_powers() {
    for n in 1..=6 {
        let t = integrate(&format!("ln(x)^{n}"));
        assert!(same(&t.antiderivative, &log_power_antiderivative(n)), "n = {n}");
    }
}

#[test]
fn exercises() {
    assert!(same(&integrate("x*sin(x)").antiderivative, "sin(x) - x*cos(x)"));
    integrate("x^2*exp(x)*sin(x)");
    let t = integrate("ln(x^2 + 4*x + 7)");
    assert!(t.antiderivative.symbols().len() == 1);
}

#[test]
fn constant_name_avoids_clashes() {
    let t = auto_integrate(&IntegralProblem::new(parse("C*x").unwrap(), "x"), &Policy::default()).unwrap();
    assert_eq!(t.constant.as_str(), "C0");
    assert!(t.render_result(Format::Ascii).ends_with("+ C0"));
}

#[test]
fn trace_lists_every_table() {
    let t = integrate("(3*x^2 - x)*ln(x)^2");
    let text = t.render_trace(Format::Ascii);
    assert_eq!(text.matches("sign u").count(), t.root.tables().len());
    assert!(text.contains("simpler"));
}
