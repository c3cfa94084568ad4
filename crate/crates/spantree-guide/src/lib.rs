//! Runs every code snippet in the book as a doctest.
//!
//! mdBook cannot execute examples that depend on the library, so each
//! chapter is included here as module documentation and `cargo test --doc`
//! does the work. A failing snippet points at its chapter module.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
