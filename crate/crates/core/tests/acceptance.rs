//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use tabula::calculus::differentiate;
use tabula::ibp::{auto_integrate, suggest_splits, verify, IntegralProblem, Outcome, Policy, Split, Table};
use tabula::showcase::{asymptotic_identity_check, asymptotic_table, beta_identity, definite, taylor};
use tabula::{equals, parse, Expr, Rational, Symbol};

type Check = fn() -> Result<String, String>;

fn p(s: &str) -> Expr {
    parse(s).expect("well-formed")
}

fn problem(f: &str) -> IntegralProblem {
    IntegralProblem::new(p(f), "x")
}

fn fact(k: u32) -> i64 {
    (1..=k as i64).product()
}

/// `∫ ln(x)^n dx` written out term by term, independent of the library's
/// own closed form.
fn log_power(n: u32) -> Expr {
    let terms: Vec<String> = (0..=n)
        .map(|k| {
            let sign = if (n - k).is_multiple_of(2) { 1 } else { -1 };
            format!("({})*x*ln(x)^{k}", sign * fact(n) / fact(k))
        })
        .collect();
    p(&terms.join(" + "))
}

fn golden_set() -> Vec<(String, String, Expr)> {
    let mut set = vec![
        ("example 1".into(), "ln(x)".into(), p("x*ln(x) - x")),
        (
            "example 2".into(),
            "exp(3*x)*sin(2*x)".into(),
            p("(exp(3*x)/13)*(3*sin(2*x) - 2*cos(2*x))"),
        ),
        (
            "polynomial times sine".into(),
            "(x^2 - 3*x)*sin(x)".into(),
            p("(3*x - x^2)*cos(x) + (2*x - 3)*sin(x) + 2*cos(x)"),
        ),
        (
            "example 4".into(),
            "sin(2*x)*cos(5*x)".into(),
            p("(5/21)*sin(2*x)*sin(5*x) + (2/21)*cos(2*x)*cos(5*x)"),
        ),
        (
            "example 5".into(),
            "(3*x^2 - x)*ln(x)^2".into(),
            p("(x^3 - x^2/2)*ln(x)^2 + (x^2/2 - 2*x^3/3)*ln(x) + 2*x^3/9 - x^2/4"),
        ),
    ];
    for n in 1..=6 {
        set.push((format!("ln(x)^{n}"), format!("ln(x)^{n}"), log_power(n)));
    }
    set
}

fn golden() -> Result<String, String> {
    let mut slowest = Duration::ZERO;
    for (name, f, want) in golden_set() {
        let start = Instant::now();
        let trace = auto_integrate(&problem(&f), &Policy::default()).map_err(|e| format!("{name}: {e}"))?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        if !equals(&trace.antiderivative, &want) {
            return Err(format!("{name}: got {}", trace.antiderivative));
        }
        if elapsed >= Duration::from_secs(1) {
            return Err(format!("{name}: took {elapsed:?}"));
        }
        if name == "example 5" && trace.root.recursions() != 1 {
            return Err(format!("{name}: {} recursive tables", trace.root.recursions()));
        }
    }
    Ok(format!("11 results, slowest {slowest:?}"))
}

fn step_invariant() -> Result<String, String> {
    let mut r = common::rng(1);
    let x = Symbol::new("x");
    let mut checks = 0;
    for _ in 0..500 {
        let f = common::poly_kernel(&mut r);
        let prob = IntegralProblem::new(f.clone(), "x");
        let splits = suggest_splits(&prob);
        // a split of the integrand is always available: (f, 1)
        let split = if splits.is_empty() {
            Split::new(f.clone(), Expr::one())
        } else {
            splits[r.random_range(0..splits.len())].clone()
        };
        let mut t = Table::new(prob, split).map_err(|e| format!("{f}: {e}"))?;
        for _ in 0..r.random_range(1..=6) {
            let Ok(next) = t.step() else { break };
            t = next;
            let res = t.residual().map_err(|e| e.to_string())?;
            if !equals(&(differentiate(&t.partial_sum(), &x) + res.signed()), &f) {
                return Err(format!("{f} at row {}", t.rows.len()));
            }
            checks += 1;
        }
    }
    Ok(format!("500 integrands, {checks} rows checked"))
}

fn verification() -> Result<String, String> {
    let policy = Policy::default();
    for (name, f, _) in golden_set() {
        let trace = auto_integrate(&problem(&f), &policy).map_err(|e| format!("{name}: {e}"))?;
        if !verify(&trace).passed {
            return Err(format!("{name} failed verification"));
        }
    }
    let mut r = common::rng(2);
    let (mut successes, mut worst) = (0, 0.0f64);
    while successes < 200 {
        let f = common::integrable(&mut r);
        let Ok(trace) = auto_integrate(&IntegralProblem::new(f.clone(), "x"), &policy) else {
            continue;
        };
        let report = verify(&trace);
        if !report.passed {
            return Err(format!("{f}: {report:?}"));
        }
        worst = worst.max(report.max_relative_error.unwrap_or(0.0));
        successes += 1;
    }
    Ok(format!("golden set and 200 random successes, worst numeric error {worst:.1e}"))
}

fn taylor_remainder() -> Result<String, String> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in [2, 4, 6] {
        let result = taylor(&p("sin(t)"), &Rational::zero(), n).map_err(|e| e.to_string())?;
        if let Some(b) = result.boundary_terms_at_x().iter().find(|b| !b.is_zero()) {
            return Err(format!("n = {n}: boundary term {b}"));
        }
        for x in [0.5, 1.3, 2.0] {
            let err = result.check(x).map_err(|e| e.to_string())?;
            if err.is_nan() || err >= 1e-8 {
                return Err(format!("n = {n}, x = {x}: error {err:e}"));
            }
            worst = worst.max(err);
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(5) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("worst error {worst:.1e} in {elapsed:?}"))
}

fn asymptotic() -> Result<String, String> {
    let mut worst = 0.0f64;
    for x in [10.0, 20.0, 50.0] {
        for n in 1..=4 {
            let c = asymptotic_identity_check(x, n).map_err(|e| e.to_string())?;
            if c.error.is_nan() || c.error >= 1e-8 {
                return Err(format!("x = {x}, n = {n}: error {:e}", c.error));
            }
            worst = worst.max(c.error);
        }
    }
    // the coefficients come from the table: (-1)^(k-1) (k-1)! / x^k
    let t = Symbol::new("t");
    let table = asymptotic_table(4).map_err(|e| e.to_string())?;
    let sum = -table.partial_sum().substitute(&t, &Expr::sym("x"));
    if !equals(&sum, &p("1/x - 1/x^2 + 2/x^3 - 6/x^4")) {
        return Err(format!("partial sum {sum}"));
    }
    let f50 = asymptotic_identity_check(50.0, 2).map_err(|e| e.to_string())?.integral;
    let gap = (f50 - 1.0 / 50.0 + 1.0 / 2500.0).abs();
    let bound = 2.0 * 2.0 / 50f64.powi(3);
    if gap.is_nan() || gap >= bound {
        return Err(format!("|f(50) - 1/50 + 1/2500| = {gap:e} is not below {bound:e}"));
    }
    Ok(format!("worst error {worst:.1e}; f(50) gap {gap:.2e} < {bound:.2e}"))
}

fn corpus() -> Result<String, String> {
    let policy = Policy::default();
    let mut integrands: Vec<String> = Vec::new();
    for n in 1..=4 {
        for a in 1..=3 {
            integrands.push(format!("x^{n}*exp({a}*x)"));
            integrands.push(format!("x^{n}*sin({a}*x)"));
            integrands.push(format!("x^{n}*cos({a}*x)"));
        }
    }
    integrands.push("x^2*exp(x)*sin(x)".into());
    integrands.push("ln(x^2 + 4*x + 7)".into());
    for f in &integrands {
        let trace = auto_integrate(&problem(f), &policy).map_err(|e| format!("{f}: {e}"))?;
        if !verify(&trace).passed {
            return Err(format!("{f} failed verification"));
        }
    }
    for n in 1..=3u32 {
        for b in 1..=3u32 {
            let f = IntegralProblem::new(p(&format!("(1 - s)^{n}*s^{}", b - 1)), "s");
            let value = definite(&f, &Expr::zero(), &Expr::one()).map_err(|e| e.to_string())?;
            let got = Expr::int(n as i64).powi(b as i64) * value;
            let product: i64 = (0..=n as i64).map(|k| b as i64 + k).product();
            let want = Rational::new(fact(n) * (n as i64).pow(b), product);
            let err = got.as_const().map(|c| (c.clone() - want.clone()).abs().to_f64());
            if !err.is_some_and(|e| e < 1e-9) || beta_identity(n, b) != want {
                return Err(format!("n = {n}, b = {b}: {got} vs {want}"));
            }
        }
    }
    Ok(format!("{} integrands verified, 9 beta identities", integrands.len()))
}

fn bad_split() -> Result<String, String> {
    let t = Table::new(problem("(x^2 - 3*x)*sin(x)"), Split::new(p("sin(x)"), p("x^2 - 3*x")))
        .map_err(|e| e.to_string())?;
    let t = t.step().map_err(|e| e.to_string())?;
    match t.classify().map_err(|e| e.to_string())? {
        Outcome::Harder {
            original_score,
            residual_score,
            ..
        } if residual_score > original_score => Ok(format!("{residual_score:?} > {original_score:?}")),
        other => Err(format!("{other:?}")),
    }
}

fn termination() -> Result<String, String> {
    let mut r = common::rng(3);
    let policy = Policy::default();
    let (mut solved, mut exhausted) = (0, 0);
    let start = Instant::now();
    for _ in 0..1000 {
        let f = common::expr(&mut r, 3, &["x"]);
        match auto_integrate(&IntegralProblem::new(f.clone(), "x"), &policy) {
            Ok(trace) => {
                if trace.root.tables().len() > policy.max_tables || !verify(&trace).passed {
                    return Err(format!("{f}"));
                }
                solved += 1;
            }
            Err(_) => exhausted += 1,
        }
    }
    Ok(format!("{solved} solved, {exhausted} exhausted in {:?}", start.elapsed()))
}

const CHECKS: [(&str, Check); 8] = [
    ("golden results", golden),
    ("step invariant", step_invariant),
    ("verification", verification),
    ("taylor remainder", taylor_remainder),
    ("asymptotic identity", asymptotic),
    ("exercise corpus", corpus),
    ("bad split is harder", bad_split),
    ("termination", termination),
];

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in CHECKS {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
