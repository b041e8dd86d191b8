//! Averaged models, tuning and verification tools for a grid-forming AC
//! converter and its DC dual.
// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]


pub mod ac;
pub mod dc;
pub mod error;
pub mod oracle;
pub mod plant;
pub mod pu;
pub mod setup;
pub mod sim;
pub mod tf;
pub mod tuning;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/tuning.md")]
    pub mod tuning {}
    #[doc = include_str!("../../../book/src/loop_gains.md")]
    pub mod loop_gains {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub mod simulation {}
    #[doc = include_str!("../../../book/src/converters.md")]
    pub mod converters {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
}
