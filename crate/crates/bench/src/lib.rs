//! Fixtures shared by the benchmarks.

use pmmf_core::model::sample_path;
use pmmf_core::rng::seeded_rng;
use pmmf_core::{Model, Obs, StartLaw};

/// A path of length `n` drawn from the model's initial law.
pub fn fixture_path(model: &Model, n: usize, seed: u64) -> Vec<Obs> {
    sample_path(model, n, &StartLaw::Initial, &mut seeded_rng(seed)).expect("bundled models simulate").0
}
