//! Runs the code listings in `book/src` as doctests.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}

#[doc = include_str!("../../../book/src/schur.md")]
pub mod schur {}

#[doc = include_str!("../../../book/src/walks.md")]
pub mod walks {}

#[doc = include_str!("../../../book/src/dynamic.md")]
pub mod dynamic {}

#[doc = include_str!("../../../book/src/engine.md")]
pub mod engine {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
