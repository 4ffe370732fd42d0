use serde::Serialize;

use super::{IntegralProblem, Split};
use crate::calculus::RuleTable;
use crate::expr::{Expr, Func, Symbol};

/// Preference classes for `u`, best first: logarithm, inverse trigonometric,
/// polynomial, exponential, trigonometric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LipetClass {
    Logarithm,
    InverseTrig,
    Polynomial,
    Exponential,
    Trigonometric,
    Other,
}

/// Class of a single var-dependent factor.
pub fn lipet_class(f: &Expr, var: &Symbol) -> LipetClass {
    match f {
        Expr::Fun(Func::Ln, _) => LipetClass::Logarithm,
        Expr::Fun(Func::Atan, _) => LipetClass::InverseTrig,
        Expr::Fun(Func::Exp, _) => LipetClass::Exponential,
        Expr::Fun(Func::Sin | Func::Cos, _) => LipetClass::Trigonometric,
        Expr::Sym(_) => LipetClass::Polynomial,
        Expr::Pow(b, x) => match (&**b, x.as_const()) {
            (Expr::Fun(..), Some(k)) if k.is_integer() && k.is_positive() => lipet_class(b, var),
            (_, Some(k)) if k.is_integer() && k.is_positive() && is_polynomial(b, var) => LipetClass::Polynomial,
            _ => LipetClass::Other,
        },
        Expr::Add(_) if is_polynomial(f, var) => LipetClass::Polynomial,
        _ => LipetClass::Other,
    }
}

pub(crate) fn is_polynomial(e: &Expr, var: &Symbol) -> bool {
    match e {
        Expr::Const(_) => true,
        Expr::Sym(_) => true,
        Expr::Add(xs) | Expr::Mul(xs) => xs.iter().all(|x| is_polynomial(x, var)),
        Expr::Pow(b, x) => {
            x.as_const().is_some_and(|k| k.is_integer() && !k.is_negative()) && is_polynomial(b, var)
        }
        Expr::Fun(..) => e.free_of(var),
    }
}

/// Candidate splits, best first.
///
/// `u` takes a nonempty subset of the var-dependent factors; `dv` takes the
/// rest together with every constant factor, and must integrate by a base
/// rule. A single-factor integrand `f` is offered as `u = f, dv = 1`.
pub fn suggest_splits(problem: &IntegralProblem) -> Vec<Split> {
    suggest_splits_with(problem, &RuleTable::standard())
}

pub(crate) fn suggest_splits_with(problem: &IntegralProblem, rules: &RuleTable) -> Vec<Split> {
    let var = &problem.var;
    let (constant, dependent): (Vec<Expr>, Vec<Expr>) =
        problem.integrand.factors().into_iter().partition(|f| f.free_of(var));
    let k = dependent.len();
    if k == 0 || k > 12 {
        return Vec::new();
    }
    let constant = Expr::product(constant);
    let mut out: Vec<(Vec<LipetClass>, crate::expr::ComplexityScore, Split)> = Vec::new();
    for mask in 1u32..(1 << k) {
        let in_u = |i: usize| mask & (1 << i) != 0;
        let all_u = mask == (1 << k) - 1;
        if all_u && k > 1 {
            continue;
        }
        let u = Expr::product((0..k).filter(|&i| in_u(i)).map(|i| dependent[i].clone()));
        let dv = &constant * &Expr::product((0..k).filter(|&i| !in_u(i)).map(|i| dependent[i].clone()));
        if rules.antiderivative(&dv, var).is_none() {
            continue;
        }
        let mut classes: Vec<LipetClass> = (0..k).filter(|&i| in_u(i)).map(|i| lipet_class(&dependent[i], var)).collect();
        classes.sort();
        let score = u.complexity(var);
        out.push((classes, score, Split { u, dv }));
    }
    out.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then_with(|| a.2.u.cmp(&b.2.u))
    });
    out.into_iter().map(|(_, _, s)| s).collect()
}
