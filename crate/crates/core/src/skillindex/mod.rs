//! Skill index construction from pairwise judgments.
//!
//! Judgments are symmetrized over the two presentation orders, replayed
//! through an Elo ladder per model, aggregated across models by the first
//! principal component, and compared with external rankings by Kendall's
//! tau-b with a bootstrap confidence interval.

pub mod elo;
pub mod judgments;
pub mod pca;
pub mod rank;

pub use elo::{elo_run, elo_update, expected_score, EloConfig, EloTable};
pub use judgments::{symmetrize_judgments, Judgment, JudgmentSet, Order, Outcome, Symmetrized, Verdict};
pub use pca::{pca_first_component, PcaResult};
pub use rank::{bootstrap_ci, kendall_tau_b, BootstrapCi, BootstrapMethod};
