//! Example models shipped with the crate.

use crate::error::Result;
use crate::model::{parse_model, Model};

/// Hidden walk on `Z/4` that stays or steps up with probability 1/2,
/// observed through the parity of the state.
pub const MOD4: &str = include_str!("../models/mod4.json");
/// Four states in two emission classes; `x = (1, 1, 2)` is a product block.
pub const FOURSTATE: &str = include_str!("../models/fourstate.json");
/// Three states over four symbols; symbol 1 is emitted by every state.
pub const CLUSTER_HMM: &str = include_str!("../models/cluster_hmm.json");
/// Scalar autoregression switching between two coefficients.
pub const LMSM_AR1: &str = include_str!("../models/lmsm_ar1.json");

pub const ALL: [(&str, &str); 4] = [
    ("mod4.json", MOD4),
    ("fourstate.json", FOURSTATE),
    ("cluster_hmm.json", CLUSTER_HMM),
    ("lmsm_ar1.json", LMSM_AR1),
];

pub fn mod4() -> Result<Model> {
    parse_model(MOD4)
}

pub fn fourstate() -> Result<Model> {
    parse_model(FOURSTATE)
}

pub fn cluster_hmm() -> Result<Model> {
    parse_model(CLUSTER_HMM)
}

pub fn lmsm_ar1() -> Result<Model> {
    parse_model(LMSM_AR1)
}

/// Looks up a bundled model by file name.
pub fn by_name(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
