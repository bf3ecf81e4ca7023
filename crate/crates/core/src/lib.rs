// Negated comparisons such as `!(x > 0.0)` deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod localsim;
pub mod optimizer;
pub mod problems;
pub mod statevector;
pub mod warmstart;

pub use error::{Error, Result};
