use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{block_transition_matrix, Model, Obs};

/// Pairs `(i, j)` joined with positive block density, with projections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YPlusSet {
    pub r: usize,
    pub pairs: Vec<(usize, usize)>,
    pub proj1: Vec<usize>,
    pub proj2: Vec<usize>,
}

impl YPlusSet {
    pub fn from_pairs(r: usize, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let mut proj1: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let mut proj2: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        proj1.sort_unstable();
        proj1.dedup();
        proj2.sort_unstable();
        proj2.dedup();
        YPlusSet { r, pairs, proj1, proj2 }
    }

    pub fn product(r: usize, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_pairs(r, rows.iter().flat_map(|&i| cols.iter().map(move |&j| (i, j))).collect())
    }

    /// Reads the support of a row-major log-matrix.
    pub fn from_log_matrix(r: usize, log_m: &[f64], n_states: usize) -> Self {
        let pairs = (0..n_states)
            .flat_map(|i| (0..n_states).map(move |j| (i, j)))
            .filter(|&(i, j)| log_m[i * n_states + j] > f64::NEG_INFINITY)
            .collect();
        Self::from_pairs(r, pairs)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i, j)).is_ok()
    }

    pub fn is_product(&self) -> bool {
        !self.pairs.is_empty() && self.pairs.len() == self.proj1.len() * self.proj2.len()
    }

    /// Keeps only rows in `rows`.
    pub fn restrict_rows(&self, rows: &[usize]) -> Self {
        Self::from_pairs(self.r, self.pairs.iter().copied().filter(|(i, _)| rows.contains(i)).collect())
    }
}

/// Exact support of `p_ij(x_{1:r})`.
pub fn enumerate_y_plus(model: &Model, xs: &[Obs]) -> Result<YPlusSet> {
    let m = block_transition_matrix(model, xs)?;
    Ok(YPlusSet::from_log_matrix(xs.len(), &m, model.n_states()))
}

/// `Y+` with rows limited to states that can co-occur with `x_1`.
pub fn enumerate_y_plus_admissible(model: &Model, xs: &[Obs]) -> Result<YPlusSet> {
    let full = enumerate_y_plus(model, xs)?;
    Ok(full.restrict_rows(&model.admissible_states(&xs[0])))
}
