use rand::Rng;

use crate::error::{Error, Result};
use crate::logspace::ln;
use crate::model::emission::{sample_index, Emission};
use crate::model::Obs;

/// Kernel factorizing as `p_ij * f_j(x')`.
#[derive(Debug, Clone)]
pub struct Hmm {
    trans: Vec<Vec<f64>>,
    init: Vec<f64>,
    emissions: Vec<Emission>,
    log_trans: Vec<f64>,
    log_init: Vec<f64>,
    /// Optional interior points used to exhibit continuous support cells.
    pub support_witnesses: Vec<Vec<f64>>,
}

impl Hmm {
    pub fn new(trans: Vec<Vec<f64>>, init: Vec<f64>, emissions: Vec<Emission>) -> Result<Self> {
        let k = trans.len();
        if k == 0 || trans.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidModel("transition matrix must be square and non-empty".into()));
        }
        if init.len() != k || emissions.len() != k {
            return Err(Error::InvalidModel(format!(
                "{k} states but {} initial weights and {} emissions",
                init.len(),
                emissions.len()
            )));
        }
        let discrete = emissions[0].is_discrete();
        let dim = emissions[0].dim();
        if emissions.iter().any(|e| e.is_discrete() != discrete || e.dim() != dim) {
            return Err(Error::InvalidModel(
                "emissions must share one observation space (same kind family and dimension)".into(),
            ));
        }
        let log_trans = trans.iter().flatten().map(|&p| ln(p)).collect();
        let log_init = init.iter().map(|&p| ln(p)).collect();
        Ok(Hmm { trans, init, emissions, log_trans, log_init, support_witnesses: Vec::new() })
    }

    pub fn n_states(&self) -> usize {
        self.trans.len()
    }

    pub fn trans(&self) -> &[Vec<f64>] {
        &self.trans
    }

    pub fn init(&self) -> &[f64] {
        &self.init
    }

    pub fn emissions(&self) -> &[Emission] {
        &self.emissions
    }

    pub fn is_discrete(&self) -> bool {
        self.emissions[0].is_discrete()
    }

    pub fn log_p(&self, i: usize, j: usize) -> f64 {
        self.log_trans[i * self.n_states() + j]
    }

    pub fn log_init(&self, i: usize) -> f64 {
        self.log_init[i]
    }

    pub fn log_q(&self, i: usize, x2: &Obs, j: usize) -> f64 {
        let p = self.log_p(i, j);
        if p == f64::NEG_INFINITY {
            return p;
        }
        p + self.emissions[j].log_density(x2)
    }

    pub fn sample_init<R: Rng + ?Sized>(&self, rng: &mut R) -> (Obs, usize) {
        let i = sample_index(&self.init, rng);
        (self.emissions[i].sample(rng), i)
    }

    pub fn sample_step<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> (Obs, usize) {
        let j = sample_index(&self.trans[i], rng);
        (self.emissions[j].sample(rng), j)
    }
}
