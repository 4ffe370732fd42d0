//! A JSON session service for building integration-by-parts tables one row
//! at a time.
//!
//! A client creates a session for an integrand, picks a split, steps the
//! table and stops once the residual can be resolved. Every response is a
//! [`SessionView`]. Accepted actions are logged, and [`Session::replay`]
//! rebuilds a session from its log.
//!
//! | method | path | body |
//! |---|---|---|
//! | `POST` | `/session` | `{"integrand": "ln(x)", "var": "x"}` |
//! | `GET` | `/session/{id}` | |
//! | `POST` | `/session/{id}/act` | an [`Action`], e.g. `{"type": "step"}` |
//! | `DELETE` | `/session/{id}` | |
//!
//! Errors come back as `{code, message, span?}` with status 400 (bad input),
//! 404 (unknown session), 409 (action not allowed now), 410 (abandoned) or
//! 422 (no usable split).

mod http;
mod session;
mod store;

pub use http::{router, serve, ErrorBody};
pub use session::{
    now_millis, Action, CreateSession, Event, Hint, LogEntry, Rendered, ResidualView, RowView, Scores, Session,
    SessionError, SessionView, SplitView, Status, StopMode,
};
pub use store::{read_log, Store};

/// Port used by `serve` when none is given.
pub const DEFAULT_PORT: u16 = 7341;
