use serde::Serialize;

use super::split::{is_polynomial, suggest_splits_with};
use super::table::{function_weight, shape_score, Outcome, Table, TableError, DEFAULT_MAX_NODES};
use super::trace::{Derivation, DerivationTrace};
use super::{IntegralProblem, Split};
use crate::calculus::RuleTable;
use crate::expr::{Expr, Symbol};
use crate::render::{render, render_table, Format};

/// Limits and switches for [`auto_integrate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Policy {
    /// Rows per table, counting the first.
    pub max_rows: usize,
    /// Nesting depth of subproblem tables.
    pub max_recursion: usize,
    /// How many suggested splits to try per integral; `None` tries all.
    pub split_attempts: Option<usize>,
    /// Tables started over the whole derivation.
    pub max_tables: usize,
    /// Residuals above this node count classify as unknown.
    pub max_nodes: usize,
    /// A table is given up once a harder residual has this many times the
    /// nodes of the integral it came from.
    pub max_growth: usize,
    /// After every split was abandoned as harder at its first row, try them
    /// again and keep stepping past a harder first residual.
    pub retry_harder: bool,
    pub rules: RuleTable,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            max_rows: 12,
            max_recursion: 32,
            split_attempts: None,
            max_tables: 64,
            max_nodes: DEFAULT_MAX_NODES,
            max_growth: 8,
            retry_harder: true,
            rules: RuleTable::standard(),
        }
    }
}

/// A split that did not lead anywhere, kept for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub split: Split,
    /// The table as it stood when it was given up.
    pub table: Option<Table>,
    pub outcome: Option<Outcome>,
    pub reason: String,
}

impl Attempt {
    /// The split, its table, and why it was given up.
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        self.write(format, "", &mut out);
        out
    }

    pub(crate) fn write(&self, format: Format, pad: &str, out: &mut String) {
        out.push_str(&format!(
            "{pad}abandoned split u = {}, dv = {}: {}\n",
            render(&self.split.u, format),
            render(&self.split.dv, format),
            self.reason
        ));
        if let Some(t) = &self.table {
            for line in render_table(t, format).lines() {
                out.push_str(&format!("{pad}  {line}\n"));
            }
            if let Some(identity) = t.identity(format) {
                out.push_str(&format!("{pad}  true but not useful: {identity}\n"));
            }
        }
        if let Some(o) = &self.outcome {
            out.push_str(&format!("{pad}  {}\n", o.describe()));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AutoError {
    #[error("no split succeeded within the policy limits ({} attempts)", attempts.len())]
    Exhausted { attempts: Vec<Attempt> },
    #[error(transparent)]
    InvalidSplit(#[from] TableError),
}

pub fn auto_integrate(problem: &IntegralProblem, policy: &Policy) -> Result<DerivationTrace, AutoError> {
    auto_integrate_with(problem, policy, None)
}

/// Like [`auto_integrate`], trying `preferred` before the suggested splits.
pub fn auto_integrate_with(
    problem: &IntegralProblem,
    policy: &Policy,
    preferred: Option<&Split>,
) -> Result<DerivationTrace, AutoError> {
    if let Some(s) = preferred {
        Table::new(problem.clone(), s.clone())?;
    }
    let mut engine = Engine {
        policy,
        var: problem.var.clone(),
        tables_used: 0,
        attempts: Vec::new(),
    };
    let mut ancestors = Vec::new();
    match engine.solve(&problem.integrand, &mut ancestors, preferred) {
        Some(root) => Ok(DerivationTrace::new(problem.clone(), root)),
        None => Err(AutoError::Exhausted {
            attempts: engine.attempts,
        }),
    }
}

struct Engine<'a> {
    policy: &'a Policy,
    var: Symbol,
    tables_used: usize,
    attempts: Vec<Attempt>,
}

enum Failure {
    /// Abandoned at the first classification; eligible for the persistent pass.
    HarderAtFirst(Attempt),
    Other(Attempt),
}

impl Engine<'_> {
    fn solve(&mut self, f: &Expr, ancestors: &mut Vec<Expr>, preferred: Option<&Split>) -> Option<Derivation> {
        let rules = &self.policy.rules;
        if let Some(hit) = rules.antiderivative(f, &self.var) {
            return Some(Derivation::Rule {
                integrand: f.clone(),
                hit,
            });
        }
        if ancestors.len() > self.policy.max_recursion {
            return None;
        }
        if let Expr::Add(ts) = f {
            let parts: Option<Vec<Derivation>> = ts.iter().map(|t| self.solve(t, ancestors, None)).collect();
            if let Some(parts) = parts {
                let antiderivative = Expr::sum(parts.iter().map(|p| p.antiderivative().clone()));
                return Some(Derivation::Linear {
                    integrand: f.clone(),
                    parts,
                    antiderivative,
                });
            }
        }
        let problem = IntegralProblem::new(f.clone(), self.var.clone());
        let mut candidates = suggest_splits_with(&problem, rules);
        if let Some(p) = preferred {
            candidates.retain(|s| s != p);
            candidates.insert(0, p.clone());
        }
        if let Some(n) = self.policy.split_attempts {
            candidates.truncate(n);
        }
        let mut abandoned = Vec::new();
        let mut retry = Vec::new();
        for split in &candidates {
            if self.tables_used >= self.policy.max_tables {
                break;
            }
            match self.run_table(&problem, split, true, ancestors) {
                Ok(d) => return Some(attach(d, abandoned)),
                Err(Failure::HarderAtFirst(a)) => {
                    retry.push(split.clone());
                    abandoned.push(a);
                }
                Err(Failure::Other(a)) => abandoned.push(a),
            }
        }
        if self.policy.retry_harder {
            for split in &retry {
                if self.tables_used >= self.policy.max_tables {
                    break;
                }
                match self.run_table(&problem, split, false, ancestors) {
                    Ok(d) => return Some(attach(d, abandoned)),
                    Err(Failure::HarderAtFirst(a) | Failure::Other(a)) => abandoned.push(a),
                }
            }
        }
        self.attempts.extend(abandoned);
        None
    }

    fn run_table(
        &mut self,
        problem: &IntegralProblem,
        split: &Split,
        strict: bool,
        ancestors: &mut Vec<Expr>,
    ) -> Result<Derivation, Failure> {
        self.tables_used += 1;
        let rules = self.policy.rules;
        let fail = |table: Option<Table>, outcome: Option<Outcome>, reason: String| Attempt {
            split: split.clone(),
            table,
            outcome,
            reason,
        };
        let mut table = match Table::new(problem.clone(), split.clone()) {
            Ok(t) => t,
            Err(e) => return Err(Failure::Other(fail(None, None, e.to_string()))),
        };
        // a simpler residual passed over because the u column is heading to zero
        let mut fallback: Option<(Table, Outcome)> = None;
        let mut last_outcome = None;
        let reason = loop {
            if table.rows.len() >= self.policy.max_rows {
                break format!("reached {} rows", self.policy.max_rows);
            }
            table = match table.step_with(&rules) {
                Ok(t) => t,
                Err(e) => break e.to_string(),
            };
            let outcome = table
                .classify_with(&rules, self.policy.max_nodes)
                .expect("stepped tables have two rows");
            last_outcome = Some(outcome.clone());
            match &outcome {
                o if o.is_final() => match table.finalize(o) {
                    Ok(antiderivative) => {
                        return Ok(Derivation::Table {
                            table,
                            outcome,
                            child: None,
                            abandoned: Vec::new(),
                            antiderivative,
                        })
                    }
                    Err(e) => break e.to_string(),
                },
                Outcome::Harder { .. } if strict && table.rows.len() == 2 => {
                    let reason = "the first residual is harder than the original".to_string();
                    return Err(Failure::HarderAtFirst(fail(Some(table), Some(outcome), reason)));
                }
                Outcome::Harder {
                    original_score,
                    residual_score,
                    ..
                } if residual_score.node_count > original_score.node_count * self.policy.max_growth as u64 => {
                    break format!(
                        "the residual grew to {} nodes from {}",
                        residual_score.node_count, original_score.node_count
                    );
                }
                Outcome::Harder { .. } => continue,
                Outcome::Unknown { reason } => break reason.clone(),
                Outcome::Simpler {
                    subproblem,
                    echo,
                    original_score,
                    residual_score,
                    ..
                } => {
                    let progress = residual_score < original_score
                        || !echo.is_zero()
                        || (residual_score == original_score
                            && function_weight(&subproblem.integrand) < function_weight(&problem.integrand));
                    if !progress {
                        continue;
                    }
                    if echo.is_zero() && is_polynomial(&table.last().u, &self.var) {
                        fallback.get_or_insert((table.clone(), outcome.clone()));
                        continue;
                    }
                    if let Some(d) = self.recurse(&table, &outcome, ancestors) {
                        return Ok(d);
                    }
                }
                _ => unreachable!("final outcomes handled above"),
            }
        };
        if let Some((t, o)) = fallback {
            if let Some(d) = self.recurse(&t, &o, ancestors) {
                return Ok(d);
            }
        }
        Err(Failure::Other(fail(Some(table), last_outcome, reason)))
    }

    fn recurse(&mut self, table: &Table, outcome: &Outcome, ancestors: &mut Vec<Expr>) -> Option<Derivation> {
        let Outcome::Simpler { subproblem, .. } = outcome else {
            return None;
        };
        let f = &table.problem.integrand;
        let shape = |e: &Expr| e.split_coefficient().1;
        let g = shape(&subproblem.integrand);
        if shape(f) == g || ancestors.iter().any(|a| shape(a) == g) {
            return None;
        }
        if shape_score(&subproblem.integrand, &self.var).node_count as usize > self.policy.max_nodes {
            return None;
        }
        ancestors.push(f.clone());
        let child = self.solve(&subproblem.integrand, ancestors, None);
        ancestors.pop();
        let child = child?;
        let antiderivative = table.finalize_simpler(outcome, child.antiderivative()).ok()?;
        Some(Derivation::Table {
            table: table.clone(),
            outcome: outcome.clone(),
            child: Some(Box::new(child)),
            abandoned: Vec::new(),
            antiderivative,
        })
    }
}

fn attach(d: Derivation, abandoned: Vec<Attempt>) -> Derivation {
    match d {
        Derivation::Table {
            table,
            outcome,
            child,
            antiderivative,
            ..
        } => Derivation::Table {
            table,
            outcome,
            child,
            abandoned,
            antiderivative,
        },
        other => other,
    }
}
