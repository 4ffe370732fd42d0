use serde::Serialize;

use super::auto::Attempt;
use super::table::{Outcome, Table};
use super::IntegralProblem;
use crate::calculus::RuleHit;
use crate::expr::{gather, Expr, Symbol};
use crate::render::{render, render_table, Format};

/// How one integral in a derivation was resolved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Derivation {
    /// A base rule integrated it outright.
    Rule { integrand: Expr, hit: RuleHit },
    /// A table; `child` resolves the subproblem of a [`Outcome::Simpler`] ending.
    Table {
        table: Table,
        outcome: Outcome,
        child: Option<Box<Derivation>>,
        /// Splits tried and given up on before this one.
        abandoned: Vec<Attempt>,
        antiderivative: Expr,
    },
    /// A sum integrated term by term.
    Linear {
        integrand: Expr,
        parts: Vec<Derivation>,
        antiderivative: Expr,
    },
}

impl Derivation {
    pub fn integrand(&self) -> &Expr {
        match self {
            Derivation::Rule { integrand, .. } | Derivation::Linear { integrand, .. } => integrand,
            Derivation::Table { table, .. } => &table.problem.integrand,
        }
    }

    pub fn antiderivative(&self) -> &Expr {
        match self {
            Derivation::Rule { hit, .. } => &hit.antiderivative,
            Derivation::Table { antiderivative, .. } | Derivation::Linear { antiderivative, .. } => antiderivative,
        }
    }

    /// Every table in derivation order, parents before children.
    pub fn tables(&self) -> Vec<&Table> {
        let mut out = Vec::new();
        self.collect_tables(&mut out);
        out
    }

    fn collect_tables<'a>(&'a self, out: &mut Vec<&'a Table>) {
        match self {
            Derivation::Rule { .. } => {}
            Derivation::Table { table, child, .. } => {
                out.push(table);
                if let Some(c) = child {
                    c.collect_tables(out);
                }
            }
            Derivation::Linear { parts, .. } => parts.iter().for_each(|p| p.collect_tables(out)),
        }
    }

    /// Number of tables started on a subproblem of another table.
    pub fn recursions(&self) -> usize {
        match self {
            Derivation::Rule { .. } => 0,
            Derivation::Table { child, .. } => child.as_ref().map_or(0, |c| c.tables().len().min(1) + c.recursions()),
            Derivation::Linear { parts, .. } => parts.iter().map(Derivation::recursions).sum(),
        }
    }

    fn write(&self, var: &Symbol, format: Format, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let integral = |e: &Expr| match format {
            Format::Latex => format!("\\int {}\\,d{var}", render(e, format)),
            Format::Unicode => format!("∫ {} d{var}", render(e, format)),
            Format::Ascii => format!("int {} d{var}", render(e, format)),
        };
        match self {
            Derivation::Rule { integrand, hit } => {
                out.push_str(&format!(
                    "{pad}{} = {}   [{}]\n",
                    integral(integrand),
                    render(&hit.antiderivative, format),
                    hit.rule_name
                ));
            }
            Derivation::Linear { integrand, parts, .. } => {
                out.push_str(&format!("{pad}{}: integrate term by term\n", integral(integrand)));
                for p in parts {
                    p.write(var, format, depth + 1, out);
                }
            }
            Derivation::Table {
                table,
                outcome,
                child,
                abandoned,
                antiderivative,
            } => {
                for a in abandoned {
                    a.write(format, &pad, out);
                }
                out.push_str(&format!(
                    "{pad}{}: u = {}, dv = {} d{var}\n",
                    integral(&table.problem.integrand),
                    render(&table.split.u, format),
                    render(&table.split.dv, format)
                ));
                for line in render_table(table, format).lines() {
                    out.push_str(&format!("{pad}  {line}\n"));
                }
                out.push_str(&format!("{pad}  {}\n", outcome.describe()));
                if let Some(c) = child {
                    c.write(var, format, depth + 1, out);
                }
                out.push_str(&format!("{pad}  => {}\n", render(&gather(antiderivative, var), format)));
            }
        }
    }
}

/// A finished derivation of `∫ problem`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationTrace {
    pub problem: IntegralProblem,
    pub root: Derivation,
    /// Without the constant of integration.
    pub antiderivative: Expr,
    pub constant: Symbol,
}

impl DerivationTrace {
    pub fn new(problem: IntegralProblem, root: Derivation) -> Self {
        let antiderivative = gather(root.antiderivative(), &problem.var);
        let used = problem.integrand.symbols();
        let constant = std::iter::once("C".to_string())
            .chain((0..).map(|i| format!("C{i}")))
            .map(|n| Symbol::new(&n))
            .find(|s| !used.contains(s) && *s != problem.var)
            .expect("some constant name is free");
        DerivationTrace {
            problem,
            root,
            antiderivative,
            constant,
        }
    }

    /// The antiderivative with its constant of integration.
    pub fn with_constant(&self) -> Expr {
        &self.antiderivative + &Expr::symbol(&self.constant)
    }

    /// `F + C` in the requested format.
    pub fn render_result(&self, format: Format) -> String {
        format!("{} + {}", render(&self.antiderivative, format), self.constant)
    }

    /// Every table with its outcome, children indented under their parent.
    pub fn render_trace(&self, format: Format) -> String {
        let mut out = String::new();
        self.root.write(&self.problem.var, format, 0, &mut out);
        out
    }
}
