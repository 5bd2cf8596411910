//! Exact inference and forgetting diagnostics for pairwise Markov models.
//!
//! A pairwise Markov model is a Markov chain on pairs `(X_t, Y_t)` where
//! `X` is observed and `Y` is a finite hidden state. The crate covers three
//! families (finite pair chains, hidden Markov models and linear Markov
//! switching models), forward-backward smoothing of hidden blocks, checks
//! of the conditions under which smoothers forget their window, and Monte
//! Carlo experiments measuring that forgetting.

pub mod bundled;
pub mod condition;
pub mod error;
pub mod forgetting;
pub mod inference;
pub mod logspace;
pub mod model;
pub mod rng;
pub mod segmentation;

pub use condition::{certify, ForgettingCertificate, Provenance, YPlusSet};
pub use error::{Error, Result};
pub use inference::{pmap_decode, smoothing_block, BlockDistribution, ConditionalTransition};
pub use model::{Model, Obs, ObsSpace, StartLaw};
pub use rng::SimRng;
pub use segmentation::{estimate_r, expected_error, EstimateRConfig, REstimate, SegmentationResult};
