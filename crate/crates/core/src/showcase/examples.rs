use super::asymptotic::asymptotic_identity_check;
use super::corpus::{run_corpus_with, ItemResult};
use super::taylor::taylor;
use crate::calculus::RuleTable;
use crate::expr::{equals, Expr};
use crate::ibp::{auto_integrate, verify, IntegralProblem, Outcome, Policy, Split, Table};
use crate::parse::parse;
use crate::rational::Rational;

/// `x Σ_{k=0..n} (-1)^(n-k) n!/k! ln(x)^k`, the antiderivative of `ln(x)^n`.
pub fn log_power_closed_form(n: u32) -> Expr {
    let x = Expr::sym("x");
    let sum = Expr::sum((0..=n).map(|k| {
        let sign = if (n - k).is_multiple_of(2) { 1 } else { -1 };
        let c = Rational::integer(sign) * Rational::factorial(n) / Rational::factorial(k);
        Expr::constant(c) * Expr::ln(x.clone()).powi(k as i64)
    }));
    x * sum
}

/// The worked results: integrand and antiderivative without the constant.
pub const WORKED: [(&str, &str, &str); 5] = [
    ("example-1", "ln(x)", "x*ln(x) - x"),
    ("example-2", "exp(3*x)*sin(2*x)", "exp(3*x)/13*(3*sin(2*x) - 2*cos(2*x))"),
    ("eq-2", "(x^2 - 3*x)*sin(x)", "(3*x - x^2)*cos(x) + (2*x - 3)*sin(x) + 2*cos(x)"),
    ("example-4", "sin(2*x)*cos(5*x)", "(5/21)*sin(2*x)*sin(5*x) + (2/21)*cos(2*x)*cos(5*x)"),
    (
        "example-5",
        "(3*x^2 - x)*ln(x)^2",
        "(x^3 - x^2/2)*ln(x)^2 + (x^2/2 - 2*x^3/3)*ln(x) + 2*x^3/9 - x^2/4",
    ),
];

fn golden(id: &str, integrand: &str, expected: &Expr, recursions: Option<usize>, rules: &RuleTable) -> ItemResult {
    let problem = IntegralProblem::new(parse(integrand).expect("well-formed"), "x");
    let policy = Policy {
        rules: *rules,
        ..Policy::default()
    };
    let trace = match auto_integrate(&problem, &policy) {
        Ok(t) => t,
        Err(e) => return ItemResult::new(id, false, None, e.to_string()),
    };
    let report = verify(&trace);
    let matches = equals(&trace.antiderivative, expected);
    let shape = recursions.is_none_or(|r| trace.root.recursions() == r);
    ItemResult::new(
        id,
        matches && shape && report.passed,
        report.max_relative_error,
        trace.render_result(crate::render::Format::Ascii),
    )
}

fn bad_split() -> ItemResult {
    let id = "example-3-bad-split";
    let problem = IntegralProblem::new(parse("(x^2 - 3*x)*sin(x)").expect("well-formed"), "x");
    let split = Split::new(Expr::sin(Expr::sym("x")), parse("x^2 - 3*x").expect("well-formed"));
    let outcome = Table::new(problem, split)
        .ok()
        .and_then(|t| t.step().ok())
        .and_then(|t| t.classify().ok());
    match outcome {
        Some(Outcome::Harder {
            original_score,
            residual_score,
            ..
        }) if residual_score > original_score => ItemResult::new(id, true, None, "harder at the first row"),
        other => ItemResult::new(id, false, None, format!("{other:?}")),
    }
}

fn taylor_item(n: usize, x: f64) -> ItemResult {
    let id = format!("taylor-sin-n{n}-x{x}");
    let f = Expr::sin(Expr::sym("t"));
    match taylor(&f, &Rational::zero(), n) {
        Ok(r) => {
            let boundary = r.boundary_terms_at_x().iter().all(Expr::is_zero);
            match r.check(x) {
                Ok(err) => ItemResult::new(id, boundary && err < 1e-8, Some(err), ""),
                Err(e) => ItemResult::new(id, false, None, e.to_string()),
            }
        }
        Err(e) => ItemResult::new(id, false, None, e.to_string()),
    }
}

fn asymptotic_item(x: f64, n: usize) -> ItemResult {
    let id = format!("asymptotic-x{x}-n{n}");
    match asymptotic_identity_check(x, n) {
        Ok(c) => ItemResult::new(id, c.error < 1e-8, Some(c.error), ""),
        Err(e) => ItemResult::new(id, false, None, e.to_string()),
    }
}

/// Every registered item, in a fixed order.
pub fn run_examples(rules: &RuleTable) -> Vec<ItemResult> {
    let mut out = Vec::new();
    for (id, integrand, expected) in WORKED {
        let recursions = (id == "example-5").then_some(1);
        let expected = parse(expected).expect("well-formed");
        out.push(golden(id, integrand, &expected, recursions, rules));
    }
    out.push(bad_split());
    for n in 1..=6u32 {
        let integrand = format!("ln(x)^{n}");
        out.push(golden(&format!("eq-3-n{n}"), &integrand, &log_power_closed_form(n), None, rules));
    }
    for n in [2, 4, 6] {
        for x in [0.5, 1.3, 2.0] {
            out.push(taylor_item(n, x));
        }
    }
    for x in [10.0, 20.0, 50.0] {
        for n in 1..=4 {
            out.push(asymptotic_item(x, n));
        }
    }
    out.extend(run_corpus_with(rules).items);
    out
}

/// Number of lines [`run_examples`] produces.
pub fn registry_len() -> usize {
    WORKED.len() + 1 + 6 + 9 + 12 + 12 + 1 + 1 + 9
}
