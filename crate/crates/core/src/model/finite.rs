use rand::Rng;

use crate::error::{Error, Result};
use crate::logspace::ln;
use crate::model::emission::sample_index;

/// A Markov chain on pairs `(x, i)` with finite observation alphabet.
///
/// Pairs are flattened as `z = x * n_states + i`.
#[derive(Debug, Clone)]
pub struct FinitePmm {
    n_states: usize,
    n_obs: usize,
    trans: Vec<f64>,
    init: Vec<f64>,
    log_trans: Vec<f64>,
    log_init: Vec<f64>,
}

impl FinitePmm {
    pub fn new(n_states: usize, n_obs: usize, trans: Vec<Vec<f64>>, init: Vec<f64>) -> Result<Self> {
        let n = n_states * n_obs;
        if n_states < 1 || n_obs < 1 {
            return Err(Error::InvalidModel("finite pmm needs at least one state and one symbol".into()));
        }
        if trans.len() != n || trans.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel(format!("transition matrix must be {n}x{n}")));
        }
        if init.len() != n {
            return Err(Error::InvalidModel(format!("initial law must have {n} entries")));
        }
        let trans: Vec<f64> = trans.into_iter().flatten().collect();
        let log_trans = trans.iter().map(|&p| ln(p)).collect();
        let log_init = init.iter().map(|&p| ln(p)).collect();
        Ok(FinitePmm { n_states, n_obs, trans, init, log_trans, log_init })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn n_pairs(&self) -> usize {
        self.n_states * self.n_obs
    }

    pub fn pair(&self, x: usize, i: usize) -> usize {
        x * self.n_states + i
    }

    pub fn trans(&self) -> &[f64] {
        &self.trans
    }

    pub fn init(&self) -> &[f64] {
        &self.init
    }

    pub fn trans_rows(&self) -> Vec<Vec<f64>> {
        self.trans.chunks(self.n_pairs()).map(|r| r.to_vec()).collect()
    }

    pub fn log_q(&self, x: usize, i: usize, x2: usize, j: usize) -> f64 {
        if x >= self.n_obs || x2 >= self.n_obs {
            return f64::NEG_INFINITY;
        }
        self.log_trans[self.pair(x, i) * self.n_pairs() + self.pair(x2, j)]
    }

    pub fn init_log_density(&self, x: usize, i: usize) -> f64 {
        if x >= self.n_obs {
            return f64::NEG_INFINITY;
        }
        self.log_init[self.pair(x, i)]
    }

    /// One step of the pair chain applied to a law over pairs.
    pub fn push_forward(&self, law: &[f64]) -> Vec<f64> {
        let n = self.n_pairs();
        let mut out = vec![0.0; n];
        for (z, &w) in law.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let row = &self.trans[z * n..(z + 1) * n];
            for (o, &p) in out.iter_mut().zip(row) {
                *o += w * p;
            }
        }
        out
    }

    pub fn sample_init<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let z = sample_index(&self.init, rng);
        (z / self.n_states, z % self.n_states)
    }

    pub fn sample_step<R: Rng + ?Sized>(&self, x: usize, i: usize, rng: &mut R) -> (usize, usize) {
        let n = self.n_pairs();
        let z = self.pair(x, i);
        let z2 = sample_index(&self.trans[z * n..(z + 1) * n], rng);
        (z2 / self.n_states, z2 % self.n_states)
    }
}
