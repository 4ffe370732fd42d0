use serde::Serialize;

use super::DerivationTrace;
use crate::calculus::differentiate;
use crate::expr::{equals, expand, Expr, Symbol};

/// Relative error below which the numeric check passes.
pub const NUMERIC_TOLERANCE: f64 = 1e-9;
const SAMPLES: usize = 20;
const LOW: f64 = 0.1;
const HIGH: f64 = 3.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    /// `d/dx F` and the integrand are equal after expansion.
    pub symbolic: bool,
    /// Largest `|F' - f| / max(|f|, 1)` over the sample points; `None` when
    /// the symbolic check already passed or no sample point was finite.
    pub max_relative_error: Option<f64>,
    pub passed: bool,
    /// `F' - f`, expanded, when the symbolic check failed.
    pub difference: Option<Expr>,
}

pub fn verify(trace: &DerivationTrace) -> VerificationReport {
    verify_antiderivative(&trace.antiderivative, &trace.problem.integrand, &trace.problem.var)
}

/// Checks `d/dvar antiderivative == integrand` symbolically, then numerically
/// at 20 points in (0.1, 3.0). Other symbols are bound to fixed values
/// between 0.35 and 0.95.
pub fn verify_antiderivative(antiderivative: &Expr, integrand: &Expr, var: &Symbol) -> VerificationReport {
    let derivative = differentiate(antiderivative, var);
    if equals(&derivative, integrand) {
        return VerificationReport {
            symbolic: true,
            max_relative_error: None,
            passed: true,
            difference: None,
        };
    }
    let others: Vec<Symbol> = antiderivative
        .symbols()
        .union(&integrand.symbols())
        .filter(|s| *s != var)
        .cloned()
        .collect();
    let mut worst: Option<f64> = None;
    for i in 0..SAMPLES {
        let x = LOW + (HIGH - LOW) * (i as f64 + 0.5) / SAMPLES as f64;
        let env = |s: &Symbol| {
            if s == var {
                return Some(x);
            }
            others.iter().position(|o| o == s).map(|k| 0.35 + 0.6 * ((k as f64 * 0.618_034) % 1.0))
        };
        let got = derivative.eval(&env);
        let want = integrand.eval(&env);
        if !got.is_finite() || !want.is_finite() {
            continue;
        }
        let err = (got - want).abs() / want.abs().max(1.0);
        worst = Some(worst.map_or(err, |w: f64| w.max(err)));
    }
    VerificationReport {
        symbolic: false,
        max_relative_error: worst,
        passed: worst.is_some_and(|w| w < NUMERIC_TOLERANCE),
        difference: Some(expand(&(derivative - integrand.clone()))),
    }
}
