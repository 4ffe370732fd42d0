//! Applications of the table: definite integrals, Taylor's formula with
//! integral remainder, an exact asymptotic identity, and a corpus of
//! exercises. [`quad`] is the numeric oracle the checks lean on.

mod asymptotic;
mod corpus;
mod definite;
mod examples;
mod quad;
mod taylor;

pub use asymptotic::{asymptotic_identity_check, asymptotic_table, AsymptoticCheck, AsymptoticError};
pub use corpus::{beta_identity, run_corpus, run_corpus_with, CorpusReport, ItemResult};
pub use definite::{definite, definite_with, fold_inverses, DefiniteError};
pub use examples::{log_power_closed_form, registry_len, run_examples, WORKED};
pub use quad::{quad, quad_fn, QuadError, QuadResult, DEFAULT_TOL, EVALUATION_BUDGET, MIN_PANELS};
pub use taylor::{taylor, taylor_check, TaylorError, TaylorResult};
