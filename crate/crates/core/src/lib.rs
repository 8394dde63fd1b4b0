// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod classical;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod npxpc;
pub mod param;
pub mod scalar;
pub mod wavefunctions;

pub use error::{Error, Result};
pub use param::Param;
#[cfg(feature = "extended")]
pub use scalar::{set_extended_digits, Ext};
pub use scalar::{Complex, Real, C64};
