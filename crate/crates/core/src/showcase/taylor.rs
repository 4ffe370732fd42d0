use serde::Serialize;

use super::quad::{quad_fn, QuadError, DEFAULT_TOL};
use crate::calculus::{differentiate, RuleTable};
use crate::expr::{expand, Expr, Symbol};
use crate::ibp::{IntegralProblem, Split, StepError, Table};
use crate::rational::Rational;

/// Taylor's formula with integral remainder around `t = a`:
/// `f(x) = polynomial + ∫_a^x remainder_integrand dt`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TaylorResult {
    pub function: Expr,
    pub center: Rational,
    pub order: usize,
    /// In `x`, of degree at most `order`.
    pub polynomial: Expr,
    /// `f^(n+1)(t) (x - t)^n / n!`.
    pub remainder_integrand: Expr,
    /// The table for `∫ -f'(t) * (-1) dt` with `v_1 = x - t`.
    pub table: Table,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TaylorError {
    #[error("the function may only depend on t, found {0}")]
    ForeignSymbol(Symbol),
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

/// Expands `f(t)` around `a` to order `n`.
///
/// Integrates `f'(t) = (-f'(t)) * (-1)` by a table whose `dv` column is pinned
/// to `x - t`, `-(x - t)^2/2!`, `(x - t)^3/3!`, ... Every such entry vanishes
/// at `t = x`, so the diagonal sum contributes only its value at `t = a`.
pub fn taylor(f: &Expr, a: &Rational, n: usize) -> Result<TaylorResult, TaylorError> {
    let (t, x) = (t(), x());
    if let Some(s) = f.symbols().into_iter().find(|s| *s != t) {
        return Err(TaylorError::ForeignSymbol(s));
    }
    let rules = RuleTable::standard();
    let minus_one = Expr::int(-1);
    let shift = Expr::symbol(&x) - Expr::symbol(&t);
    let target = |k: usize| {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        Expr::int(sign) * shift.powi(k as i64) / Expr::constant(Rational::factorial(k as u32))
    };
    let mut pins = Vec::with_capacity(n);
    let mut previous = minus_one.clone();
    for k in 1..=n {
        let plain = rules
            .antiderivative(&previous, &t)
            .ok_or_else(|| StepError::NoRuleForDv { dv: previous.clone() })?
            .antiderivative;
        let wanted = target(k);
        let pin = expand(&(wanted.clone() - plain));
        debug_assert!(pin.free_of(&t), "pin {pin} depends on t");
        pins.push(pin);
        previous = wanted;
    }
    let derivative = differentiate(f, &t);
    let problem = IntegralProblem::new(derivative.clone(), t.clone());
    let split = Split::new(-derivative, minus_one);
    let mut table = Table::new(problem, split).expect("(-f') * (-1) = f'").with_pins(pins);
    for _ in 0..n {
        table = table.step_with(&rules)?;
    }
    let center = Expr::constant(a.clone());
    let last = table.last();
    let remainder_integrand = last.sign.apply(&(&last.u * &last.dv));
    let polynomial = expand(&(f.substitute(&t, &center) - table.partial_sum().substitute(&t, &center)));
    Ok(TaylorResult {
        function: f.clone(),
        center: a.clone(),
        order: n,
        polynomial,
        remainder_integrand,
        table,
    })
}

impl TaylorResult {
    /// The diagonal products `u_j v_j` at `t = x`.
    pub fn boundary_terms_at_x(&self) -> Vec<Expr> {
        let x = Expr::symbol(&x());
        self.table
            .rows
            .windows(2)
            .map(|w| (&w[0].u * &w[1].dv).substitute(&t(), &x))
            .collect()
    }

    /// `|f(x) - polynomial(x) - ∫_a^x remainder dt|`, the integral by quadrature.
    pub fn check(&self, x_sample: f64) -> Result<f64, QuadError> {
        let (t, x) = (t(), x());
        let exact = self.function.eval_at(&t, x_sample);
        let poly = self.polynomial.eval_at(&x, x_sample);
        let rem = &self.remainder_integrand;
        let integrand = |tv: f64| {
            rem.eval(&|s: &Symbol| {
                if *s == t {
                    Some(tv)
                } else if *s == x {
                    Some(x_sample)
                } else {
                    None
                }
            })
        };
        let remainder = quad_fn(integrand, self.center.to_f64(), x_sample, DEFAULT_TOL)?;
        Ok((exact - poly - remainder.value).abs())
    }
}

pub fn taylor_check(f: &Expr, a: &Rational, n: usize, x_sample: f64) -> Result<f64, TaylorError> {
    Ok(taylor(f, a, n)?.check(x_sample)?)
}
