//! A laboratory for transferable-utility (TU) coalition games.
//!
//! The crate computes exact Shapley values over complete coalition lattices
//! (up to 25 players), audits the classical Shapley axioms numerically,
//! builds characteristic functions from populations and simulated datasets
//! (R², Bayes accuracy, log-likelihood gain, MSE skill, interventional model
//! loss, linear SHAP magnitudes), and runs detectors that flag when
//! Shapley-ranked feature selection picks a suboptimal submodel.
//!
//! All lattice scans are data-parallel via rayon when the `parallel` feature
//! is enabled (the default); disabling it falls back to sequential scans with
//! bit-identical results.

pub mod axioms;
pub mod coalition;
pub mod dgp;
pub mod error;
pub mod exec;
pub mod game;
pub mod gamefile;
pub mod ols;
pub mod pathology;
pub mod rng;
pub mod shapley;
pub mod toy;
pub mod value_fn;

pub use coalition::Coalition;
pub use error::{Error, Result};
pub use game::Game;
pub use shapley::{exact_shapley, permutation_shapley, Attribution, Method};

/// Largest supported player count; the dense value table has `2^d` entries.
pub const MAX_PLAYERS: usize = 25;

/// Default tolerance for algebraic identities (efficiency, additivity, ...).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default absolute slack when checking monotonicity along lattice edges.
pub const MONOTONICITY_SLACK: f64 = 1e-12;

/// Format a float with 17 significant digits, enough to round-trip binary64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
