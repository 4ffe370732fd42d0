//! Tabular integration by parts over a small symbolic kernel.
//!
//! Expressions are built from rationals, symbols, sums, products, powers and
//! the functions `ln exp sin cos atan`, always held in canonical form. The
//! [`ibp`] module drives the sign/u/dv table and decides when to stop.

pub mod calculus;
pub mod expr;
pub mod ibp;
pub mod parse;
pub mod rational;
pub mod render;
pub mod showcase;

pub use expr::{canonicalize, collect, constant_ratio, equals, expand, ComplexityScore, Expr, Func, Symbol};
pub use parse::{parse, ParseError, SourceSpan};
pub use rational::Rational;
pub use render::{render, Format};
