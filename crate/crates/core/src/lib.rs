//! Naive and informed educational planners facing AI capital.
//!
//! The crate instantiates concrete parametric economies (quadratic skill
//! production, linear educational-AI pass-through, exponential wage curves),
//! solves the planners' time-allocation and AI-intensity problems with full
//! KKT corner classification, and verifies the comparative statics of the
//! model against independent grid-search and finite-difference oracles.
//! The [`skillindex`] module holds the Elo / PCA / Kendall tau pipeline used
//! to build skill rankings from pairwise judgments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adoption;
pub mod economy;
pub mod error;
pub mod exec;
pub mod grid;
pub mod mismatch;
pub mod oracle;
pub mod planner;
pub mod skillindex;
pub mod tiers;

pub use error::{Error, Result};
pub use exec::Execution;

/// Sign tolerance for pass / fail / indeterminate classification.
pub const EPS_SIGN: f64 = 1e-9;
/// Consecutive differences must exceed this for "strictly increasing".
pub const EPS_MONO: f64 = 1e-9;
