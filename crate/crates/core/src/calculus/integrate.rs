use std::fmt;

use serde::Serialize;

use crate::expr::expand::Poly;
use crate::expr::{expand, Expr, Func, Symbol};
use crate::rational::Rational;

/// Which base rule produced an antiderivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleName {
    Power,
    Recip,
    ExpLinear,
    SinLinear,
    CosLinear,
    ShiftedPower,
    LinearOverQuadratic,
    AtanRule,
    Constant,
    SumSplit,
    ConstFactor,
}

impl RuleName {
    pub const ALL: [RuleName; 11] = [
        RuleName::Power,
        RuleName::Recip,
        RuleName::ExpLinear,
        RuleName::SinLinear,
        RuleName::CosLinear,
        RuleName::ShiftedPower,
        RuleName::LinearOverQuadratic,
        RuleName::AtanRule,
        RuleName::Constant,
        RuleName::SumSplit,
        RuleName::ConstFactor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleName::Power => "power",
            RuleName::Recip => "recip",
            RuleName::ExpLinear => "exp_linear",
            RuleName::SinLinear => "sin_linear",
            RuleName::CosLinear => "cos_linear",
            RuleName::ShiftedPower => "shifted_power",
            RuleName::LinearOverQuadratic => "linear_over_quadratic",
            RuleName::AtanRule => "atan_rule",
            RuleName::Constant => "constant",
            RuleName::SumSplit => "sum_split",
            RuleName::ConstFactor => "const_factor",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleHit {
    /// No constant of integration is included.
    pub antiderivative: Expr,
    /// The outermost rule applied.
    pub rule_name: RuleName,
}

/// The base antiderivative rules.
///
/// Covered: constants, `x^q` (`q != -1`), `1/x`, `exp`/`sin`/`cos` of a
/// linear argument, powers of a linear expression, sums and constant
/// multiples of covered integrands, and a polynomial over an irreducible
/// quadratic. Anything else returns `None`, which is how the caller learns
/// that integration by parts is needed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleTable {
    fault: Option<RuleName>,
}

impl RuleTable {
    pub const fn standard() -> Self {
        RuleTable { fault: None }
    }

    /// A deliberately broken table: every antiderivative produced by `rule`
    /// comes out doubled. Used to exercise verification failures.
    pub const fn with_fault(rule: RuleName) -> Self {
        RuleTable { fault: Some(rule) }
    }

    pub fn fault(&self) -> Option<RuleName> {
        self.fault
    }

    pub fn antiderivative(&self, e: &Expr, var: &Symbol) -> Option<RuleHit> {
        if let Some(hit) = self.direct(e, var) {
            return Some(hit);
        }
        let expanded = expand(e);
        if expanded != *e {
            return self.direct(&expanded, var);
        }
        None
    }

    fn hit(&self, rule_name: RuleName, antiderivative: Expr) -> Option<RuleHit> {
        let antiderivative = if self.fault == Some(rule_name) {
            Expr::int(2) * antiderivative
        } else {
            antiderivative
        };
        Some(RuleHit {
            antiderivative,
            rule_name,
        })
    }

    fn direct(&self, e: &Expr, var: &Symbol) -> Option<RuleHit> {
        let x = Expr::symbol(var);
        if e.free_of(var) {
            return self.hit(RuleName::Constant, e * &x);
        }
        match e {
            Expr::Add(ts) => {
                if let Some((a, b)) = linear(e, var) {
                    if !b.symbols().is_empty() {
                        // keeps (x - t) together: -(x - t)^2/2 rather than x*t - t^2/2
                        let anti = e.powi(2) / Expr::constant(&a * &Rational::from(2));
                        return self.hit(RuleName::ShiftedPower, anti);
                    }
                }
                let mut parts = Vec::with_capacity(ts.len());
                for t in ts {
                    parts.push(self.antiderivative(t, var)?.antiderivative);
                }
                self.hit(RuleName::SumSplit, Expr::sum(parts))
            }
            Expr::Mul(fs) => {
                let (free, dependent): (Vec<Expr>, Vec<Expr>) = fs.iter().cloned().partition(|f| f.free_of(var));
                if free.is_empty() {
                    return self.single(e, var);
                }
                let inner = self.antiderivative(&Expr::product(dependent), var)?;
                self.hit(RuleName::ConstFactor, Expr::product(free) * inner.antiderivative)
            }
            _ => self.single(e, var),
        }
    }

    /// A single var-dependent form with no constant factor.
    fn single(&self, e: &Expr, var: &Symbol) -> Option<RuleHit> {
        let x = Expr::symbol(var);
        match e {
            Expr::Sym(_) => self.hit(RuleName::Power, x.powi(2) / Expr::int(2)),
            Expr::Pow(b, q) => {
                let q = q.as_const()?;
                let q1 = q + &Rational::one();
                if let Expr::Sym(_) = &**b {
                    return if q1.is_zero() {
                        self.hit(RuleName::Recip, Expr::ln(x))
                    } else {
                        self.hit(RuleName::Power, x.pow(Expr::constant(q1.clone())) / Expr::constant(q1))
                    };
                }
                let Some((a, _)) = linear(b, var) else {
                    return self.polynomial_over(e, var);
                };
                let anti = if q1.is_zero() {
                    Expr::ln((**b).clone()) / Expr::constant(a)
                } else {
                    b.pow(Expr::constant(q1.clone())) / Expr::constant(&a * &q1)
                };
                self.hit(RuleName::ShiftedPower, anti)
            }
            Expr::Fun(f, arg) => {
                let (a, _) = linear(arg, var)?;
                let a = Expr::constant(a);
                let arg = (**arg).clone();
                match f {
                    Func::Exp => self.hit(RuleName::ExpLinear, Expr::exp(arg) / a),
                    Func::Sin => self.hit(RuleName::SinLinear, -Expr::cos(arg) / a),
                    Func::Cos => self.hit(RuleName::CosLinear, Expr::sin(arg) / a),
                    Func::Ln | Func::Atan => None,
                }
            }
            Expr::Mul(_) => self.polynomial_over(e, var),
            _ => None,
        }
    }

    /// `N(x) / Q(x)` with `N` a polynomial and `Q` linear or an irreducible quadratic.
    fn polynomial_over(&self, e: &Expr, var: &Symbol) -> Option<RuleHit> {
        let fs = e.factors();
        let qi = fs.iter().position(|f| match f {
            Expr::Pow(b, m) => matches!(**b, Expr::Add(_)) && m.as_const().is_some_and(|m| *m == Rational::from(-1)),
            _ => false,
        })?;
        let Expr::Pow(q_expr, _) = &fs[qi] else {
            unreachable!()
        };
        let q = Poly::from_expr(q_expr, var)?;
        let numer = Expr::product(fs.iter().enumerate().filter(|&(i, _)| i != qi).map(|(_, f)| f.clone()));
        let n = Poly::from_expr(&expand(&numer), var)?;
        let x = Expr::symbol(var);
        let (quot, rem) = n.div_rem(&q);
        let quot_anti = self.antiderivative(&quot.to_expr(var), var)?.antiderivative;
        let coeff = |p: &Poly, k: usize| p.0.get(k).cloned().unwrap_or_else(Rational::zero);
        match q.degree() {
            1 => {
                // N = S*Q + r
                let a = coeff(&q, 1);
                let r = coeff(&rem, 0);
                let log = Expr::constant(&r / &a) * Expr::ln((**q_expr).clone());
                self.hit(RuleName::ShiftedPower, quot_anti + log)
            }
            2 => {
                let (gamma, beta, alpha) = (coeff(&q, 0), coeff(&q, 1), coeff(&q, 2));
                let two = Rational::from(2);
                let four = Rational::from(4);
                // D = 4*alpha*gamma - beta^2 > 0 for an irreducible quadratic
                let d = &(&four * &(&alpha * &gamma)) - &(&beta * &beta);
                if !d.is_positive() {
                    return None;
                }
                let (r0, r1) = (coeff(&rem, 0), coeff(&rem, 1));
                let log_coeff = &r1 / &(&two * &alpha);
                let atan_coeff = &r0 - &(&log_coeff * &beta);
                let inv_sqrt_d = Expr::constant(d).pow(Expr::rational(-1, 2));
                let atan_arg = (Expr::constant(&two * &alpha) * x + Expr::constant(beta.clone())) * inv_sqrt_d.clone();
                let anti = Expr::sum([
                    quot_anti,
                    Expr::constant(log_coeff) * Expr::ln((**q_expr).clone()),
                    Expr::product([Expr::constant(&atan_coeff * &two), inv_sqrt_d, Expr::atan(atan_arg)]),
                ]);
                let rule = if r1.is_zero() && quot.0.iter().all(Rational::is_zero) {
                    RuleName::AtanRule
                } else {
                    RuleName::LinearOverQuadratic
                };
                self.hit(rule, anti)
            }
            _ => None,
        }
    }
}

/// `(a, b)` with `e = a*var + b`, `a` a nonzero rational and `b` free of `var`.
fn linear(e: &Expr, var: &Symbol) -> Option<(Rational, Expr)> {
    let mut a = Rational::zero();
    let mut rest = Vec::new();
    for t in e.terms() {
        if t.free_of(var) {
            rest.push(t);
            continue;
        }
        let (c, m) = t.split_coefficient();
        match m {
            Expr::Sym(s) if s == *var => a = &a + &c,
            _ => return None,
        }
    }
    if a.is_zero() {
        return None;
    }
    Some((a, Expr::sum(rest)))
}

/// Standard-table antiderivative of `e` in `var`, without a constant.
pub fn antiderivative(e: &Expr, var: &Symbol) -> Option<RuleHit> {
    RuleTable::standard().antiderivative(e, var)
}

/// The standard antiderivative plus a caller-chosen constant `pin`.
pub fn antiderivative_with_constant(e: &Expr, var: &Symbol, pin: &Expr) -> Option<Expr> {
    debug_assert!(pin.free_of(var), "pin must not depend on the integration variable");
    antiderivative(e, var).map(|hit| hit.antiderivative + pin.clone())
}
