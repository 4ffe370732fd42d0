use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use tabula::ibp::{
    auto_integrate, finalize, shape_score, suggest_splits, verify, Derivation, DerivationTrace, IntegralProblem,
    Outcome, Policy, Sign, Split, Table,
};
use tabula::{parse, render, ComplexityScore, Expr, Format, ParseError, SourceSpan};

/// Body of `POST /session`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateSession {
    pub integrand: String,
    pub var: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopMode {
    /// Whatever the classification allows, including a recursive table.
    Auto,
    /// The residual integrates by a base rule, or a zero row ended the table.
    Direct,
    SelfSimilar,
}

impl StopMode {
    pub fn name(self) -> &'static str {
        match self {
            StopMode::Auto => "auto",
            StopMode::Direct => "direct",
            StopMode::SelfSimilar => "self_similar",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    /// Starts a table from a suggestion (`index`) or from an explicit `u`,
    /// with `dv` taken as the integrand over `u`.
    ChooseSplit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        index: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<String>,
    },
    Step,
    Stop { mode: StopMode },
    Undo,
    Abandon,
}

/// What a log line records: the creation request or a later action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Event {
    Create(CreateSession),
    Act(Action),
}

/// One line of the action log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: usize,
    pub action: Event,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
}

pub fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Open,
    Finalized,
    Abandoned,
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("{}", .0.message)]
    Parse(ParseError),
    #[error("no split of {0} is available")]
    NoSplits(String),
    #[error("{0}")]
    InvalidSplit(String),
    #[error("{0}")]
    Illegal(String),
    #[error("session {0} was abandoned")]
    Abandoned(String),
    #[error("no session {0}")]
    NotFound(String),
    #[error("malformed action log: {0}")]
    BadLog(String),
    #[error("could not write the action log: {0}")]
    Io(String),
}

impl SessionError {
    pub fn status(&self) -> u16 {
        match self {
            SessionError::Parse(_) | SessionError::BadLog(_) => 400,
            SessionError::NotFound(_) => 404,
            SessionError::Illegal(_) => 409,
            SessionError::Abandoned(_) => 410,
            SessionError::NoSplits(_) | SessionError::InvalidSplit(_) => 422,
            SessionError::Io(_) => 500,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Parse(_) => "parse_error",
            SessionError::NoSplits(_) => "no_splits",
            SessionError::InvalidSplit(_) => "invalid_split",
            SessionError::Illegal(_) => "illegal_transition",
            SessionError::Abandoned(_) => "abandoned",
            SessionError::NotFound(_) => "not_found",
            SessionError::BadLog(_) => "bad_log",
            SessionError::Io(_) => "io_error",
        }
    }

    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            SessionError::Parse(e) => Some(e.span),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct State {
    table: Option<Table>,
    status: Status,
    trace: Option<DerivationTrace>,
}

/// One interactive derivation. Every accepted action pushes a new state, so
/// undo is a pop.
#[derive(Clone, Debug)]
pub struct Session {
    id: String,
    problem: IntegralProblem,
    policy: Policy,
    suggestions: Vec<Split>,
    stack: Vec<State>,
    log: Vec<LogEntry>,
}

impl Session {
    pub fn create(id: impl Into<String>, body: &CreateSession) -> Result<Session, SessionError> {
        Session::create_at(id.into(), body, now_millis())
    }

    fn create_at(id: String, body: &CreateSession, timestamp: u64) -> Result<Session, SessionError> {
        let integrand = parse(&body.integrand).map_err(SessionError::Parse)?;
        let var = body.var.trim();
        if var.is_empty() || !var.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(SessionError::Parse(ParseError {
                span: SourceSpan::new(0, body.var.len()),
                message: format!("{:?} is not a variable name", body.var),
            }));
        }
        let problem = IntegralProblem::new(integrand, var);
        let suggestions = suggest_splits(&problem);
        if suggestions.is_empty() {
            return Err(SessionError::NoSplits(body.integrand.clone()));
        }
        Ok(Session {
            id,
            problem,
            policy: Policy::default(),
            suggestions,
            stack: vec![State {
                table: None,
                status: Status::Open,
                trace: None,
            }],
            log: vec![LogEntry {
                seq: 0,
                action: Event::Create(body.clone()),
                timestamp,
            }],
        })
    }

    /// Rebuilds a session from its log, keeping the logged timestamps.
    pub fn replay(id: impl Into<String>, log: &[LogEntry]) -> Result<Session, SessionError> {
        let Some((first, rest)) = log.split_first() else {
            return Err(SessionError::BadLog("empty log".into()));
        };
        let Event::Create(body) = &first.action else {
            return Err(SessionError::BadLog("the first entry must create the session".into()));
        };
        let mut session = Session::create_at(id.into(), body, first.timestamp)?;
        for entry in rest {
            let Event::Act(action) = &entry.action else {
                return Err(SessionError::BadLog(format!("entry {} creates a second session", entry.seq)));
            };
            session.act_at(action, entry.timestamp)?;
        }
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn status(&self) -> Status {
        self.top().status
    }

    pub fn trace(&self) -> Option<&DerivationTrace> {
        self.top().trace.as_ref()
    }

    fn top(&self) -> &State {
        self.stack.last().expect("the stack is never empty")
    }

    pub fn act(&mut self, action: &Action) -> Result<SessionView, SessionError> {
        self.act_at(action, now_millis())
    }

    fn act_at(&mut self, action: &Action, timestamp: u64) -> Result<SessionView, SessionError> {
        match self.status() {
            Status::Abandoned => return Err(SessionError::Abandoned(self.id.clone())),
            Status::Finalized if *action != Action::Undo => {
                return Err(SessionError::Illegal("the session is finalized; only undo is allowed".into()))
            }
            _ => {}
        }
        match action {
            Action::Undo => {
                if self.stack.len() == 1 {
                    return Err(SessionError::Illegal("nothing to undo".into()));
                }
                self.stack.pop();
            }
            other => {
                let next = self.transition(other)?;
                self.stack.push(next);
            }
        }
        self.log.push(LogEntry {
            seq: self.log.len(),
            action: Event::Act(action.clone()),
            timestamp,
        });
        Ok(self.view())
    }

    fn transition(&self, action: &Action) -> Result<State, SessionError> {
        let table = self.top().table.as_ref();
        let open = |table| State {
            table: Some(table),
            status: Status::Open,
            trace: None,
        };
        match action {
            Action::ChooseSplit { index, u } => Ok(open(self.choose(*index, u.as_deref())?)),
            Action::Step => {
                let t = table.ok_or_else(|| SessionError::Illegal("choose a split first".into()))?;
                if t.rows.len() >= self.policy.max_rows {
                    return Err(SessionError::Illegal(format!("tables stop at {} rows", self.policy.max_rows)));
                }
                let next = t
                    .step_with(&self.policy.rules)
                    .map_err(|e| SessionError::Illegal(e.to_string()))?;
                Ok(open(next))
            }
            Action::Stop { mode } => {
                let t = table.ok_or_else(|| SessionError::Illegal("choose a split first".into()))?;
                let trace = self.stop(t, *mode)?;
                Ok(State {
                    table: Some(t.clone()),
                    status: Status::Finalized,
                    trace: Some(trace),
                })
            }
            Action::Abandon => Ok(State {
                table: table.cloned(),
                status: Status::Abandoned,
                trace: None,
            }),
            Action::Undo => unreachable!("undo pops instead"),
        }
    }

    fn choose(&self, index: Option<usize>, u: Option<&str>) -> Result<Table, SessionError> {
        let split = match (index, u) {
            (Some(i), None) => self
                .suggestions
                .get(i)
                .cloned()
                .ok_or_else(|| SessionError::InvalidSplit(format!("there are {} suggestions", self.suggestions.len())))?,
            (None, Some(text)) => {
                let u = parse(text).map_err(SessionError::Parse)?;
                if u.is_zero() {
                    return Err(SessionError::InvalidSplit("u cannot be 0".into()));
                }
                let dv = &self.problem.integrand / &u;
                Split::new(u, dv)
            }
            _ => return Err(SessionError::InvalidSplit("give exactly one of index and u".into())),
        };
        Table::new(self.problem.clone(), split).map_err(|e| SessionError::InvalidSplit(e.to_string()))
    }

    fn stop(&self, t: &Table, mode: StopMode) -> Result<DerivationTrace, SessionError> {
        let outcome = t
            .classify_with(&self.policy.rules, self.policy.max_nodes)
            .map_err(|_| SessionError::Illegal("a table needs two rows before it can stop".into()))?;
        let allowed = match (&outcome, mode) {
            (Outcome::Harder { .. } | Outcome::Unknown { .. }, _) => false,
            (_, StopMode::Auto) => true,
            (Outcome::Direct { .. } | Outcome::ZeroRow, StopMode::Direct) => true,
            (Outcome::SelfSimilar { .. }, StopMode::SelfSimilar) => true,
            _ => false,
        };
        if !allowed {
            return Err(SessionError::Illegal(format!(
                "the table ends as {}, not {}",
                outcome.tag(),
                mode.name()
            )));
        }
        let trace = match &outcome {
            Outcome::Simpler { subproblem, .. } => {
                let child = auto_integrate(subproblem, &self.policy)
                    .map_err(|e| SessionError::Illegal(format!("the residual could not be integrated: {e}")))?;
                let antiderivative = t
                    .finalize_simpler(&outcome, &child.antiderivative)
                    .map_err(|e| SessionError::Illegal(e.to_string()))?;
                DerivationTrace::new(
                    self.problem.clone(),
                    Derivation::Table {
                        table: t.clone(),
                        outcome: outcome.clone(),
                        child: Some(Box::new(child.root)),
                        abandoned: Vec::new(),
                        antiderivative,
                    },
                )
            }
            _ => finalize(t, &outcome).map_err(|e| SessionError::Illegal(e.to_string()))?,
        };
        let report = verify(&trace);
        if !report.passed {
            return Err(SessionError::Illegal("the antiderivative failed verification".into()));
        }
        Ok(trace)
    }

    pub fn view(&self) -> SessionView {
        let state = self.top();
        let var = &self.problem.var;
        let mut view = SessionView {
            id: self.id.clone(),
            status: state.status,
            integrand: Rendered::of(&self.problem.integrand),
            var: var.to_string(),
            table: None,
            residual: None,
            hints: Vec::new(),
            suggestions: Vec::new(),
            scores: None,
            undo_depth: self.stack.len() - 1,
            antiderivative: None,
        };
        let Some(t) = &state.table else {
            view.suggestions = self
                .suggestions
                .iter()
                .enumerate()
                .map(|(index, s)| SplitView {
                    index,
                    u: Rendered::of(&s.u),
                    dv: Rendered::of(&s.dv),
                })
                .collect();
            return view;
        };
        view.table = Some(
            t.rows
                .iter()
                .map(|r| RowView {
                    sign: r.sign,
                    u: Rendered::of(&r.u),
                    dv: Rendered::of(&r.dv),
                })
                .collect(),
        );
        if let Ok(res) = t.residual() {
            view.scores = Some(Scores {
                original: shape_score(&self.problem.integrand, var),
                residual: shape_score(&res.signed(), var),
            });
            view.residual = Some(ResidualView {
                sign: res.sign,
                integrand: Rendered::of(&res.integrand),
            });
        }
        if let Ok(outcome) = t.classify_with(&self.policy.rules, self.policy.max_nodes) {
            view.hints.push(Hint {
                tag: outcome.tag().into(),
                text: outcome.describe(),
            });
            if matches!(outcome, Outcome::Harder { .. }) {
                if let Some(identity) = t.identity(Format::Ascii) {
                    view.hints.push(Hint {
                        tag: "warning".into(),
                        text: format!("true, but not useful: {identity}"),
                    });
                }
            }
        }
        if let Some(trace) = &state.trace {
            view.antiderivative = Some(Rendered {
                ascii: trace.render_result(Format::Ascii),
                latex: trace.render_result(Format::Latex),
            });
        }
        view
    }
}

/// An expression in the ASCII grammar, with LaTeX alongside.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rendered {
    pub ascii: String,
    pub latex: String,
}

impl Rendered {
    fn of(e: &Expr) -> Rendered {
        Rendered {
            ascii: render(e, Format::Ascii),
            latex: render(e, Format::Latex),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowView {
    pub sign: Sign,
    pub u: Rendered,
    pub dv: Rendered,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualView {
    pub sign: Sign,
    pub integrand: Rendered,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hint {
    pub tag: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitView {
    pub index: usize,
    pub u: Rendered,
    pub dv: Rendered,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scores {
    pub original: ComplexityScore,
    pub residual: ComplexityScore,
}

/// Everything a client shows, as a pure function of the session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SessionView {
    pub id: String,
    pub status: Status,
    pub integrand: Rendered,
    pub var: String,
    /// Rows in order; absent until a split is chosen.
    pub table: Option<Vec<RowView>>,
    pub residual: Option<ResidualView>,
    pub hints: Vec<Hint>,
    /// Filled only while there is no table.
    pub suggestions: Vec<SplitView>,
    pub scores: Option<Scores>,
    pub undo_depth: usize,
    /// The verified result with its constant, once finalized.
    pub antiderivative: Option<Rendered>,
}
