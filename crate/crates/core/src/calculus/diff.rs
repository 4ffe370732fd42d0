use crate::expr::{Expr, Func, Symbol};

/// Exact derivative of `e` with respect to `var`, in canonical form.
pub fn differentiate(e: &Expr, var: &Symbol) -> Expr {
    if e.free_of(var) {
        return Expr::zero();
    }
    match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Sym(s) => {
            if s == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Add(ts) => Expr::sum(ts.iter().map(|t| differentiate(t, var))),
        Expr::Mul(fs) => Expr::sum((0..fs.len()).filter(|&i| !fs[i].free_of(var)).map(|i| {
            let rest = fs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, f)| f.clone());
            Expr::product(rest.chain([differentiate(&fs[i], var)]))
        })),
        Expr::Pow(b, x) => {
            let db = differentiate(b, var);
            let dx = differentiate(x, var);
            if dx.is_zero() {
                // x * b^(x-1) * b'
                return Expr::product([(**x).clone(), b.pow(&**x - &Expr::one()), db]);
            }
            // b^x * (x' ln b + x b'/b)
            let log_part = dx * Expr::ln((**b).clone());
            let power_part = Expr::product([(**x).clone(), db, b.recip()]);
            e * &(log_part + power_part)
        }
        Expr::Fun(f, a) => {
            let da = differentiate(a, var);
            let outer = match f {
                Func::Ln => a.recip(),
                Func::Exp => e.clone(),
                Func::Sin => Expr::cos((**a).clone()),
                Func::Cos => -Expr::sin((**a).clone()),
                Func::Atan => (Expr::one() + a.powi(2)).recip(),
            };
            outer * da
        }
    }
}
