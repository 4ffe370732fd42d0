use serde::Serialize;

use super::quad::{quad_fn, QuadError, DEFAULT_TOL};
use crate::expr::{expand, Expr, Symbol};
use crate::ibp::{IntegralProblem, Split, StepError, Table};

/// One evaluation of
/// `∫_x^∞ e^(x-t)/t dt = Σ_{k=1..n} (-1)^(k-1) (k-1)!/x^k + (-1)^n n! ∫_x^∞ e^(x-t)/t^(n+1) dt`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticCheck {
    pub x: f64,
    pub n: usize,
    /// Left side, by quadrature.
    pub integral: f64,
    /// The partial sum read off the table, as an expression in `x`.
    pub partial_sum_expr: Expr,
    pub partial_sum: f64,
    /// The signed residual integral, by quadrature.
    pub remainder: f64,
    /// `|integral - partial_sum - remainder|`.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum AsymptoticError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

fn t() -> Symbol {
    Symbol::new("t")
}

fn x() -> Symbol {
    Symbol::new("x")
}

/// The table for `∫ t^-1 e^(x-t) dt` with `u = 1/t`, stepped `n` times.
pub fn asymptotic_table(n: usize) -> Result<Table, StepError> {
    let (t, x) = (Expr::symbol(&t()), Expr::symbol(&x()));
    let u = t.recip();
    let dv = Expr::exp(x - t);
    let problem = IntegralProblem::new(&u * &dv, "t");
    let mut table = Table::new(problem, Split::new(u, dv)).expect("u * dv is the integrand");
    for _ in 0..n {
        table = table.step()?;
    }
    Ok(table)
}

/// Checks the exact identity at `x` with `n` terms. The upper limit of the
/// diagonal sum is dropped since every entry carries `e^(x-t)`.
pub fn asymptotic_identity_check(x_value: f64, n: usize) -> Result<AsymptoticCheck, AsymptoticError> {
    let (t, x) = (t(), x());
    let table = asymptotic_table(n)?;
    let partial_sum_expr = expand(&-table.partial_sum().substitute(&t, &Expr::symbol(&x)));
    let integrate = |e: &Expr| {
        let at = |tv: f64| {
            e.eval(&|s: &Symbol| {
                if *s == t {
                    Some(tv)
                } else if *s == x {
                    Some(x_value)
                } else {
                    None
                }
            })
        };
        quad_fn(at, x_value, f64::INFINITY, DEFAULT_TOL)
    };
    let integral = integrate(&table.problem.integrand)?.value;
    let remainder = match table.residual() {
        Ok(r) => integrate(&r.signed())?.value,
        Err(_) => integral,
    };
    let partial_sum = partial_sum_expr.eval_at(&x, x_value);
    Ok(AsymptoticCheck {
        x: x_value,
        n,
        integral,
        partial_sum_expr,
        partial_sum,
        remainder,
        error: (integral - partial_sum - remainder).abs(),
    })
}
