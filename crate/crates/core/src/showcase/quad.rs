use serde::Serialize;

use crate::expr::{Expr, Symbol};

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Integrand evaluations allowed per call.
pub const EVALUATION_BUDGET: usize = 1_000_000;
/// The interval is cut into this many panels before any adaptive refinement.
pub const MIN_PANELS: usize = 8;
const MAX_DEPTH: u32 = 60;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of the Richardson error estimates of the accepted panels.
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("no convergence within {evaluations} evaluations")]
    NoConvergence { evaluations: usize },
}

/// `∫_a^b e d(var)` by adaptive Simpson. `b` may be `f64::INFINITY`, in which
/// case `t = a + s/(1-s)` maps the range onto `[0, 1)` and the integrand is
/// taken to vanish at `s = 1`. Other symbols evaluate as NaN, so they must be
/// substituted first.
pub fn quad(e: &Expr, var: &Symbol, a: f64, b: f64, tol: f64) -> Result<QuadResult, QuadError> {
    quad_fn(|x| e.eval_at(var, x), a, b, tol)
}

/// [`quad`] over a plain closure.
pub fn quad_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadResult, QuadError> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    if b == f64::INFINITY {
        let g = |s: f64| {
            if s >= 1.0 {
                return 0.0;
            }
            let w = 1.0 - s;
            f(a + s / w) / (w * w)
        };
        return Simpson::new(&g, tol).run(0.0, 1.0);
    }
    if b < a {
        let r = quad_fn(f, b, a, tol)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    Simpson::new(&f, tol).run(a, b)
}

struct Simpson<'a> {
    f: &'a dyn Fn(f64) -> f64,
    tol: f64,
    evaluations: usize,
    error: f64,
}

impl<'a> Simpson<'a> {
    fn new(f: &'a dyn Fn(f64) -> f64, tol: f64) -> Self {
        Simpson {
            f,
            tol,
            evaluations: 0,
            error: 0.0,
        }
    }

    fn eval(&mut self, x: f64) -> Result<f64, QuadError> {
        self.evaluations += 1;
        if self.evaluations > EVALUATION_BUDGET {
            return Err(QuadError::NoConvergence {
                evaluations: EVALUATION_BUDGET,
            });
        }
        let y = (self.f)(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    }

    fn run(mut self, a: f64, b: f64) -> Result<QuadResult, QuadError> {
        let h = (b - a) / MIN_PANELS as f64;
        let panel_tol = self.tol / MIN_PANELS as f64;
        let mut value = 0.0;
        let mut left = self.eval(a)?;
        for i in 0..MIN_PANELS {
            let lo = a + h * i as f64;
            let hi = if i + 1 == MIN_PANELS { b } else { lo + h };
            let mid = self.eval(0.5 * (lo + hi))?;
            let right = self.eval(hi)?;
            let whole = (hi - lo) / 6.0 * (left + 4.0 * mid + right);
            value += self.refine(lo, left, mid, hi, right, whole, panel_tol, 0)?;
            left = right;
        }
        Ok(QuadResult {
            value,
            error_estimate: self.error,
            evaluations: self.evaluations,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        fa: f64,
        fm: f64,
        b: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, QuadError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            self.error += delta.abs() / 15.0;
            return Ok(left + right + delta / 15.0);
        }
        if depth >= MAX_DEPTH || m <= a || m >= b {
            return Err(QuadError::NoConvergence {
                evaluations: self.evaluations,
            });
        }
        let l = self.refine(a, fa, flm, m, fm, left, tol / 2.0, depth + 1)?;
        let r = self.refine(m, fm, frm, b, fb, right, tol / 2.0, depth + 1)?;
        Ok(l + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = quad_fn(|s| (1.0 - s).powi(3) * s, 0.0, 1.0, DEFAULT_TOL).unwrap();
        assert!((r.value - 0.05).abs() < 1e-14);
        assert!(r.evaluations >= MIN_PANELS);
    }

    #[test]
    fn reversed_and_empty() {
        let r = quad_fn(f64::cos, 1.0, 0.0, DEFAULT_TOL).unwrap();
        assert!((r.value + 1f64.sin()).abs() < 1e-10);
        assert_eq!(quad_fn(f64::cos, 2.0, 2.0, DEFAULT_TOL).unwrap().value, 0.0);
    }

    #[test]
    fn infinite_range() {
        let r = quad_fn(|t| (-t).exp(), 0.0, f64::INFINITY, DEFAULT_TOL).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            quad_fn(|x| 1.0 / x, 0.0, 1.0, DEFAULT_TOL),
            Err(QuadError::NonFinite { .. })
        ));
        assert!(matches!(
            quad_fn(|x| (1.0 / x).sin(), 1e-9, 1.0, 1e-15),
            Err(QuadError::NoConvergence { .. })
        ));
    }
}
