//! Forgetting diagnostics: Dobrushin coefficients, block counts, envelopes
//! and Monte Carlo distance curves.

pub mod dobrushin;
pub mod envelope;
pub mod fit;
pub mod initial;
pub mod kappa;
pub mod one_sided;
pub mod two_sided;

pub use dobrushin::{dobrushin, tv};
pub use envelope::{rho_bound, theoretical_envelope};
pub use fit::{fit_line, fit_log_decay, LineFit};
pub use initial::initial_forgetting_experiment;
pub use kappa::{kappa, kappa_star, KappaCount};
pub use one_sided::{one_sided_experiment, ForgettingCurve, ForgettingExperiment, ForgettingSummary, OneSidedConfig};
pub use two_sided::{two_sided_experiment, TwoSidedBounds, TwoSidedCell, TwoSidedConfig, TwoSidedResult};
