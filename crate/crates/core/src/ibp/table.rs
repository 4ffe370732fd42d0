use serde::Serialize;

use super::{IntegralProblem, Sign, Split};
use crate::calculus::{differentiate, RuleName, RuleTable};
use crate::expr::{collect, constant_ratio, equals, expand, ComplexityScore, Expr, Monomials};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    /// 1-based.
    pub index: usize,
    pub sign: Sign,
    /// `u_j`
    pub u: Expr,
    /// `v_{j-1}`
    pub dv: Expr,
}

/// The sign/u/dv table for one integral.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub problem: IntegralProblem,
    pub split: Split,
    pub rows: Vec<TableRow>,
    /// Constant added to the antiderivative at each integration step; missing
    /// entries are zero.
    pub pin_schedule: Option<Vec<Expr>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("split does not reproduce the integrand: u*dv = {product}, integrand = {integrand}")]
    SplitMismatch { product: Expr, integrand: Expr },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("no antiderivative rule applies to dv entry {dv}")]
    NoRuleForDv { dv: Expr },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("the table needs at least two rows")]
pub struct TooShort;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FinalizeError {
    #[error("residual is the original integral itself (c = 1); choose another split")]
    SelfSimilarSingular,
    #[error("outcome `{0}` does not end the derivation")]
    NotFinal(&'static str),
    #[error(transparent)]
    TooShort(#[from] TooShort),
}

/// The bottom-row integral `sign * ∫ integrand`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub sign: Sign,
    pub integrand: Expr,
}

impl Residual {
    pub fn signed(&self) -> Expr {
        self.sign.apply(&self.integrand)
    }
}

/// What the bottom-row integral means for the derivation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// The last `u` entry is zero, so the residual vanishes.
    ZeroRow,
    /// The signed residual integrates by a base rule.
    Direct {
        residual_antiderivative: Expr,
        rule: RuleName,
    },
    /// The signed residual is `c` times the original integrand, `c != 1`.
    SelfSimilar { c: Rational },
    /// The signed residual is `echo * f + sign * g` with `g` the subproblem
    /// integrand; `echo` is zero unless part of the original integral
    /// reappeared.
    Simpler {
        subproblem: IntegralProblem,
        sign: Sign,
        echo: Rational,
        original_score: ComplexityScore,
        residual_score: ComplexityScore,
    },
    Harder {
        original_score: ComplexityScore,
        residual_score: ComplexityScore,
        diagnostic: Option<String>,
    },
    Unknown { reason: String },
}

impl Outcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::ZeroRow => "zero_row",
            Outcome::Direct { .. } => "direct",
            Outcome::SelfSimilar { .. } => "self_similar",
            Outcome::Simpler { .. } => "simpler",
            Outcome::Harder { .. } => "harder",
            Outcome::Unknown { .. } => "unknown",
        }
    }

    /// One line for people reading a derivation.
    pub fn describe(&self) -> String {
        match self {
            Outcome::ZeroRow => "a 0 appeared in the u column; the residual integral vanishes".into(),
            Outcome::Direct {
                residual_antiderivative,
                rule,
            } => format!("the residual integrates directly ({rule}) to {residual_antiderivative}"),
            Outcome::SelfSimilar { c } => {
                format!("the residual is {c} times the original integral, so I = S/(1 - c) with c = {c}")
            }
            Outcome::Simpler {
                subproblem,
                echo,
                original_score,
                residual_score,
                ..
            } => {
                let mut s = format!(
                    "the residual {subproblem} is simpler (score {} vs {})",
                    residual_score.score, original_score.score
                );
                if !echo.is_zero() {
                    s.push_str(&format!("; {echo} times the original integral also reappears"));
                }
                s
            }
            Outcome::Harder {
                original_score,
                residual_score,
                diagnostic,
            } => {
                let mut s = format!(
                    "warning: the residual is harder than the original (score {} vs {})",
                    residual_score.score, original_score.score
                );
                if let Some(d) = diagnostic {
                    s.push_str("; ");
                    s.push_str(d);
                }
                s
            }
            Outcome::Unknown { reason } => format!("cannot classify the residual: {reason}"),
        }
    }

    pub fn is_final(&self) -> bool {
        matches!(self, Outcome::ZeroRow | Outcome::Direct { .. } | Outcome::SelfSimilar { .. })
    }
}

/// Residuals larger than this many nodes are reported as [`Outcome::Unknown`].
pub const DEFAULT_MAX_NODES: usize = 2000;

/// Score with the rational coefficient removed, after collecting.
pub fn shape_score(e: &Expr, var: &crate::expr::Symbol) -> ComplexityScore {
    let (_, rest) = collect(e).split_coefficient();
    rest.complexity(var)
}

/// Total integer power carried by function factors: `ln(x)^3` weighs 3,
/// `exp(x)*sin(x)` weighs 2. Breaks ties between equal scores.
pub(crate) fn function_weight(e: &crate::expr::Expr) -> u64 {
    let (_, rest) = collect(e).split_coefficient();
    rest.factors()
        .iter()
        .map(|f| match f {
            Expr::Fun(..) => 1,
            Expr::Pow(b, x) => match (&**b, x.as_const().and_then(Rational::to_i64)) {
                (Expr::Fun(..), Some(k)) if k > 0 => k as u64,
                _ => 0,
            },
            _ => 0,
        })
        .sum()
}

/// Invariant checks are skipped on tables whose entries grow past this.
const CHECK_NODE_LIMIT: usize = 400;

impl Table {
    pub fn new(problem: IntegralProblem, split: Split) -> Result<Table, TableError> {
        let product = &split.u * &split.dv;
        if !equals(&product, &problem.integrand) {
            return Err(TableError::SplitMismatch {
                product,
                integrand: problem.integrand,
            });
        }
        let first = TableRow {
            index: 1,
            sign: Sign::Plus,
            u: split.u.clone(),
            dv: split.dv.clone(),
        };
        Ok(Table {
            problem,
            split,
            rows: vec![first],
            pin_schedule: None,
        })
    }

    pub fn with_pins(mut self, pins: Vec<Expr>) -> Table {
        self.pin_schedule = Some(pins);
        self
    }

    pub fn last(&self) -> &TableRow {
        self.rows.last().expect("a table has at least one row")
    }

    /// Number of completed steps, `n = rows - 1`.
    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn step(&self) -> Result<Table, StepError> {
        self.step_with(&RuleTable::standard())
    }

    /// Appends one row; `self` is left untouched.
    pub fn step_with(&self, rules: &RuleTable) -> Result<Table, StepError> {
        let var = &self.problem.var;
        let last = self.last();
        let hit = rules
            .antiderivative(&last.dv, var)
            .ok_or_else(|| StepError::NoRuleForDv { dv: last.dv.clone() })?;
        let pin = self
            .pin_schedule
            .as_ref()
            .and_then(|p| p.get(self.steps()))
            .cloned()
            .unwrap_or_else(Expr::zero);
        let row = TableRow {
            index: last.index + 1,
            sign: last.sign.flip(),
            u: differentiate(&last.u, var),
            dv: hit.antiderivative + pin,
        };
        let mut next = self.clone();
        next.rows.push(row);
        if cfg!(debug_assertions) && rules.fault().is_none() {
            next.debug_check_invariant();
        }
        Ok(next)
    }

    fn debug_check_invariant(&self) {
        let size: usize = self.rows.iter().map(|r| r.u.node_count() + r.dv.node_count()).sum();
        if size > CHECK_NODE_LIMIT {
            return;
        }
        assert!(
            self.invariant_holds(),
            "step invariant broken for {}",
            self.problem
        );
    }

    /// `d/dx S_n + sign * residual == integrand`.
    pub fn invariant_holds(&self) -> bool {
        let Ok(res) = self.residual() else {
            return true;
        };
        let lhs = differentiate(&self.partial_sum(), &self.problem.var) + res.signed();
        equals(&lhs, &self.problem.integrand)
    }

    pub fn residual(&self) -> Result<Residual, TooShort> {
        if self.rows.len() < 2 {
            return Err(TooShort);
        }
        let last = self.last();
        Ok(Residual {
            sign: last.sign,
            integrand: &last.u * &last.dv,
        })
    }

    /// `S_n = Σ_{j=1..n} (-1)^(j-1) u_j v_j`, with `v_j` taken from row `j+1`.
    pub fn partial_sum(&self) -> Expr {
        Expr::sum(
            self.rows
                .windows(2)
                .map(|w| w[0].sign.apply(&(&w[0].u * &w[1].dv))),
        )
    }

    /// The identity the table currently proves, `∫f = S_n ± ∫g`, as text.
    pub fn identity(&self, format: crate::render::Format) -> Option<String> {
        let res = self.residual().ok()?;
        let r = |e: &Expr| crate::render::render(e, format);
        let (int, d) = match format {
            crate::render::Format::Latex => ("\\int ", format!("\\,d{}", self.problem.var)),
            crate::render::Format::Unicode => ("∫ ", format!(" d{}", self.problem.var)),
            crate::render::Format::Ascii => ("int ", format!(" d{}", self.problem.var)),
        };
        let op = match res.sign {
            Sign::Plus => "+",
            Sign::Minus => "-",
        };
        Some(format!(
            "{int}{}{d} = {} {op} {int}{}{d}",
            r(&self.problem.integrand),
            r(&self.partial_sum()),
            r(&res.integrand)
        ))
    }

    pub fn classify(&self) -> Result<Outcome, TooShort> {
        self.classify_with(&RuleTable::standard(), DEFAULT_MAX_NODES)
    }

    /// Checks, in order: zero row, direct rule, self-similar, reappearing
    /// original plus a simpler part, harder, simpler.
    pub fn classify_with(&self, rules: &RuleTable, max_nodes: usize) -> Result<Outcome, TooShort> {
        let res = self.residual()?;
        let var = &self.problem.var;
        if self.last().u.is_zero() {
            return Ok(Outcome::ZeroRow);
        }
        let signed = res.signed();
        let size = signed.node_count();
        if size > max_nodes {
            return Ok(Outcome::Unknown {
                reason: format!("residual has {size} nodes, over the limit of {max_nodes}"),
            });
        }
        if let Some(hit) = rules.antiderivative(&signed, var) {
            return Ok(Outcome::Direct {
                residual_antiderivative: hit.antiderivative,
                rule: hit.rule_name,
            });
        }
        let f = &self.problem.integrand;
        let original_score = shape_score(f, var);
        let residual_score = shape_score(&res.integrand, var);
        if let Some(c) = constant_ratio(&signed, f) {
            if !c.is_one() {
                return Ok(Outcome::SelfSimilar { c });
            }
            return Ok(Outcome::Harder {
                original_score,
                residual_score,
                diagnostic: Some("the residual equals the original integral, so the identity is empty".into()),
            });
        }
        if let Some((echo, rest)) = echo_split(&signed, f) {
            let rest_score = shape_score(&rest, var);
            if rest_score < original_score {
                return Ok(Outcome::Simpler {
                    subproblem: IntegralProblem::new(collect(&res.sign.apply(&rest)), var.clone()),
                    sign: res.sign,
                    echo,
                    original_score,
                    residual_score: rest_score,
                });
            }
        }
        if residual_score > original_score {
            return Ok(Outcome::Harder {
                original_score,
                residual_score,
                diagnostic: None,
            });
        }
        Ok(Outcome::Simpler {
            subproblem: IntegralProblem::new(collect(&res.integrand), var.clone()),
            sign: res.sign,
            echo: Rational::zero(),
            original_score,
            residual_score,
        })
    }

    /// Antiderivative (without constant) for a final outcome.
    pub fn finalize(&self, outcome: &Outcome) -> Result<Expr, FinalizeError> {
        let s = self.partial_sum();
        match outcome {
            Outcome::ZeroRow => Ok(s),
            Outcome::Direct {
                residual_antiderivative,
                ..
            } => Ok(s + residual_antiderivative.clone()),
            Outcome::SelfSimilar { c } => {
                if c.is_one() {
                    return Err(FinalizeError::SelfSimilarSingular);
                }
                Ok(s / Expr::constant(&Rational::one() - c))
            }
            other => Err(FinalizeError::NotFinal(other.tag())),
        }
    }

    /// Antiderivative for a [`Outcome::Simpler`] whose subproblem integrates to `child`.
    pub fn finalize_simpler(&self, outcome: &Outcome, child: &Expr) -> Result<Expr, FinalizeError> {
        let Outcome::Simpler { sign, echo, .. } = outcome else {
            return Err(FinalizeError::NotFinal(outcome.tag()));
        };
        if echo.is_one() {
            return Err(FinalizeError::SelfSimilarSingular);
        }
        let total = self.partial_sum() + sign.apply(child);
        Ok(total / Expr::constant(&Rational::one() - echo))
    }
}

/// Splits `r = echo * f + rest` when the leading monomial of `f` reappears in `r`.
fn echo_split(r: &Expr, f: &Expr) -> Option<(Rational, Expr)> {
    let mf = Monomials::of(f);
    let mr = Monomials::of(r);
    let (key, cf) = mf.0.iter().next_back()?;
    let cr = mr.0.get(key)?;
    let echo = cr / cf;
    if echo.is_zero() || echo.is_one() {
        return None;
    }
    let rest = expand(&(r - &(Expr::constant(echo.clone()) * f.clone())));
    if rest.is_zero() {
        return None;
    }
    Some((echo, rest))
}

/// Builds a one-table trace for a final outcome.
pub fn finalize(table: &Table, outcome: &Outcome) -> Result<super::DerivationTrace, FinalizeError> {
    let antiderivative = table.finalize(outcome)?;
    Ok(super::DerivationTrace::new(
        table.problem.clone(),
        super::Derivation::Table {
            table: table.clone(),
            outcome: outcome.clone(),
            child: None,
            abandoned: Vec::new(),
            antiderivative,
        },
    ))
}
