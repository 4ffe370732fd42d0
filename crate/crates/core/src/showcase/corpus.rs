use std::fmt;

use serde::Serialize;

use super::definite::definite_with;
use crate::calculus::RuleTable;
use crate::expr::Expr;
use crate::ibp::{auto_integrate, verify, IntegralProblem, Policy};
use crate::parse::parse;
use crate::rational::Rational;

/// Outcome of one registered check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItemResult {
    pub id: String,
    pub passed: bool,
    /// Largest numeric error observed, when the check measured one.
    pub max_error: Option<f64>,
    pub detail: String,
}

impl ItemResult {
    pub fn new(id: impl Into<String>, passed: bool, max_error: Option<f64>, detail: impl Into<String>) -> Self {
        ItemResult {
            id: id.into(),
            passed,
            max_error,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for ItemResult {
    /// `id PASS|FAIL error`, with `-` when no error was measured.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        match self.max_error {
            Some(e) => write!(f, "{} {status} {e:.3e}", self.id),
            None => write!(f, "{} {status} -", self.id),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusReport {
    /// Sorted by id.
    pub items: Vec<ItemResult>,
}

impl CorpusReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    /// One line per item.
    pub fn text(&self) -> String {
        self.items.iter().map(|i| format!("{i}\n")).collect()
    }
}

/// Integrates and verifies `integrand` in `x`.
fn integrate_item(id: String, integrand: &str, rules: &RuleTable) -> ItemResult {
    let f = parse(integrand).expect("corpus integrands parse");
    let problem = IntegralProblem::new(f, "x");
    let policy = Policy {
        rules: *rules,
        ..Policy::default()
    };
    match auto_integrate(&problem, &policy) {
        Ok(trace) => {
            let report = verify(&trace);
            let detail = trace.render_result(crate::render::Format::Ascii);
            ItemResult::new(id, report.passed, report.max_relative_error, detail)
        }
        Err(e) => ItemResult::new(id, false, None, e.to_string()),
    }
}

/// `n! n^b / (b (b+1) ... (b+n))`.
pub fn beta_identity(n: u32, b: u32) -> Rational {
    let denominator = (0..=n).fold(Rational::one(), |acc, k| acc * Rational::integer(b + k));
    Rational::factorial(n) * Rational::integer(n).pow(b as i32) / denominator
}

fn beta_item(n: u32, b: u32, rules: &RuleTable) -> ItemResult {
    let id = format!("exercise-4-n{n}-b{b}");
    let f = parse(&format!("(1 - s)^{n}*s^{}", b - 1)).expect("well-formed");
    let problem = IntegralProblem::new(f, "s");
    let policy = Policy {
        rules: *rules,
        ..Policy::default()
    };
    let scale = Expr::int(n as i64).powi(b as i64);
    match definite_with(&problem, &Expr::zero(), &Expr::one(), &policy) {
        Ok(value) => {
            let got = scale * value;
            let want = beta_identity(n, b);
            let error = match got.as_const() {
                Some(c) => (c.clone() - want.clone()).abs().to_f64(),
                None => f64::INFINITY,
            };
            ItemResult::new(id, error < 1e-9, Some(error), format!("{got} vs {want}"))
        }
        Err(e) => ItemResult::new(id, false, None, e.to_string()),
    }
}

pub fn run_corpus() -> CorpusReport {
    run_corpus_with(&RuleTable::standard())
}

/// Exercises: `x^n sin(a x)` for `n <= 4`, `a <= 3`; `x^2 e^x sin x`;
/// `ln(x^2 + 4x + 7)`; and `n^b ∫_0^1 (1-s)^n s^(b-1) ds` for `n, b <= 3`.
pub fn run_corpus_with(rules: &RuleTable) -> CorpusReport {
    let mut items = Vec::new();
    for n in 1..=4 {
        for a in 1..=3 {
            items.push(integrate_item(
                format!("exercise-1-n{n}-a{a}"),
                &format!("x^{n}*sin({a}*x)"),
                rules,
            ));
        }
    }
    items.push(integrate_item("exercise-2".into(), "x^2*exp(x)*sin(x)", rules));
    items.push(integrate_item("exercise-3".into(), "ln(x^2 + 4*x + 7)", rules));
    for n in 1..=3 {
        for b in 1..=3 {
            items.push(beta_item(n, b, rules));
        }
    }
    items.sort_by(|a, b| a.id.cmp(&b.id));
    CorpusReport { items }
}
