//! Derivatives and the base antiderivative rules: the "diff." and "int."
//! columns of an integration table.

mod diff;
mod integrate;

pub use diff::differentiate;
pub use integrate::{antiderivative, antiderivative_with_constant, RuleHit, RuleName, RuleTable};
