//! Numerical verification lab for enhanced H-consistency bounds on
//! finite-support distributions.
//!
//! Every expectation is an exact finite sum, so each inequality can be
//! evaluated directly and audited against brute-force oracles.

// `!(x > 0.0)` is how NaN gets rejected alongside non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod hypothesis;
pub mod losses;
pub mod optim;
pub mod oracle;
pub mod ranking;
pub mod regret;

pub use error::{Error, Result};
