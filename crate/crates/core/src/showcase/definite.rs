use crate::expr::{expand, Expr, Func};
use crate::ibp::{auto_integrate, AutoError, IntegralProblem, Policy};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DefiniteError {
    #[error(transparent)]
    Auto(#[from] AutoError),
    #[error("bound {0} depends on the variable of integration")]
    BoundDependsOnVar(Expr),
}

/// `F(b) - F(a)` with `F` from [`auto_integrate`] and the constant left out.
pub fn definite(p: &IntegralProblem, a: &Expr, b: &Expr) -> Result<Expr, DefiniteError> {
    definite_with(p, a, b, &Policy::default())
}

pub fn definite_with(p: &IntegralProblem, a: &Expr, b: &Expr, policy: &Policy) -> Result<Expr, DefiniteError> {
    for bound in [a, b] {
        if !bound.free_of(&p.var) {
            return Err(DefiniteError::BoundDependsOnVar(bound.clone()));
        }
    }
    if a == b {
        return Ok(Expr::zero());
    }
    let trace = auto_integrate(p, policy)?;
    let at = |bound: &Expr| fold_inverses(&trace.antiderivative.substitute(&p.var, bound));
    Ok(expand(&(at(b) - at(a))))
}

/// Rewrites `ln(exp(u))` and `exp(ln(u))` to `u`. Only sound where `u` is
/// real and, for the second, positive; bounds such as `exp(1)` qualify.
pub fn fold_inverses(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Sym(_) => e.clone(),
        Expr::Add(ts) => Expr::sum(ts.iter().map(fold_inverses)),
        Expr::Mul(fs) => Expr::product(fs.iter().map(fold_inverses)),
        Expr::Pow(b, x) => fold_inverses(b).pow(fold_inverses(x)),
        Expr::Fun(f, arg) => {
            let arg = fold_inverses(arg);
            match (f, &arg) {
                (Func::Ln, Expr::Fun(Func::Exp, u)) | (Func::Exp, Expr::Fun(Func::Ln, u)) => (**u).clone(),
                _ => Expr::apply(*f, arg),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn def(f: &str, var: &str, a: &str, b: &str) -> Expr {
        let p = IntegralProblem::new(parse(f).unwrap(), var);
        definite(&p, &parse(a).unwrap(), &parse(b).unwrap()).unwrap()
    }

    #[test]
    fn log_up_to_e() {
        assert_eq!(def("ln(x)", "x", "1", "exp(1)"), Expr::one());
    }

    #[test]
    fn empty_interval() {
        assert_eq!(def("exp(x^2)", "x", "0", "0"), Expr::zero());
    }

    #[test]
    fn beta_like() {
        assert_eq!(def("(1-s)^3*s", "s", "0", "1"), Expr::rational(1, 20));
    }

    #[test]
    fn bound_with_var() {
        let p = IntegralProblem::new(parse("x").unwrap(), "x");
        assert!(matches!(
            definite(&p, &Expr::zero(), &Expr::sym("x")),
            Err(DefiniteError::BoundDependsOnVar(_))
        ));
    }
}
