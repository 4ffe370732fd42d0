//! Tabular integration by parts.
//!
//! A [`Table`] starts from a [`Split`] of the integrand into `u` and `dv`.
//! Each [`Table::step`] differentiates the last `u` entry and integrates the
//! last `dv` entry, with alternating signs. After any step the table states
//!
//! ```text
//! ∫ f dx = S_n + sign * ∫ u_{n+1} v_n dx,   S_n = Σ (-1)^(j-1) u_j v_j
//! ```
//!
//! and [`Table::classify`] decides whether the bottom-row integral ends the
//! derivation. [`auto_integrate`] chooses splits and restarts on simpler
//! residuals.

mod auto;
mod split;
mod table;
mod trace;
mod verify;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::expr::{Expr, Symbol};

pub use auto::{auto_integrate, auto_integrate_with, Attempt, AutoError, Policy};
pub use split::{lipet_class, suggest_splits, LipetClass};
pub use table::{
    finalize, shape_score, FinalizeError, Outcome, Residual, StepError, Table, TableError, TableRow, TooShort,
};
pub use trace::{Derivation, DerivationTrace};
pub use verify::{verify, verify_antiderivative, VerificationReport};

/// `∫ integrand d(var)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntegralProblem {
    pub integrand: Expr,
    pub var: Symbol,
}

impl IntegralProblem {
    pub fn new(integrand: Expr, var: impl Into<Symbol>) -> Self {
        IntegralProblem {
            integrand,
            var: var.into(),
        }
    }
}

impl fmt::Display for IntegralProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "∫ {} d{}", self.integrand, self.var)
    }
}

/// A factorization `integrand = u * dv`; `dv` is the integrand of `dv`, not a differential.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Split {
    pub u: Expr,
    pub dv: Expr,
}

impl Split {
    pub fn new(u: Expr, dv: Expr) -> Self {
        Split { u, dv }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^(j-1)` for the 1-based row index `j`.
    pub fn of_row(j: usize) -> Sign {
        if j % 2 == 1 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn apply(self, e: &Expr) -> Expr {
        match self {
            Sign::Plus => e.clone(),
            Sign::Minus => -e,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
