//! Command-line front end: JSON scenarios, the built-in experiments, CSV and
//! SVG output.

pub mod builtin;
pub mod commands;
pub mod config;
pub mod plot;

/// Process exit status when every check passes.
pub const EXIT_PASS: i32 = 0;
/// Comparison, check or simulation failure.
pub const EXIT_FAIL: i32 = 1;
/// Usage or configuration error.
pub const EXIT_USAGE: i32 = 2;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
