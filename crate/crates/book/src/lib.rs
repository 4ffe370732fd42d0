//! The guide's code blocks, compiled as doctests so `cargo test` keeps them
//! honest. One module per chapter keeps failures traceable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/expressions.md")]
pub mod expressions {}
#[doc = include_str!("../../../book/src/tables.md")]
pub mod tables {}
#[doc = include_str!("../../../book/src/stopping.md")]
pub mod stopping {}
#[doc = include_str!("../../../book/src/automatic.md")]
pub mod automatic {}
#[doc = include_str!("../../../book/src/definite.md")]
pub mod definite {}
#[doc = include_str!("../../../book/src/taylor.md")]
pub mod taylor {}
#[doc = include_str!("../../../book/src/asymptotic.md")]
pub mod asymptotic {}
#[doc = include_str!("../../../book/src/sessions.md")]
pub mod sessions {}
