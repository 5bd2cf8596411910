use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::{ln, LOG_ZERO};
use crate::model::emission::{sample_index, Emission, EmissionSpec};

/// Law of the first observation of a switching model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitX {
    /// Point mass; its log-density is 0 at the point and -inf elsewhere.
    Point { at: Vec<f64> },
    Density { density: EmissionSpec },
}

/// `X_k = F(Y_k) X_{k-1} + xi_k(Y_k)` with a Markov regime `Y`.
#[derive(Debug, Clone)]
pub struct Lmsm {
    trans: Vec<Vec<f64>>,
    init: Vec<f64>,
    f_mats: Vec<DMatrix<f64>>,
    noise: Vec<Emission>,
    init_x: InitX,
    init_x_density: Option<Emission>,
    log_trans: Vec<f64>,
    log_init: Vec<f64>,
}

impl Lmsm {
    pub fn new(
        trans: Vec<Vec<f64>>,
        init: Vec<f64>,
        f_mats: Vec<Vec<Vec<f64>>>,
        noise: Vec<Emission>,
        init_x: Option<InitX>,
    ) -> Result<Self> {
        let k = trans.len();
        if k == 0 || trans.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidModel("transition matrix must be square and non-empty".into()));
        }
        if init.len() != k || f_mats.len() != k || noise.len() != k {
            return Err(Error::InvalidModel(format!(
                "{k} states need {k} initial weights, {k} matrices and {k} noise laws"
            )));
        }
        if noise.iter().any(|e| e.is_discrete()) {
            return Err(Error::InvalidModel("switching-model noise must be continuous".into()));
        }
        let d = noise[0].dim();
        if noise.iter().any(|e| e.dim() != d) {
            return Err(Error::InvalidModel("noise laws must share one dimension".into()));
        }
        let mut mats = Vec::with_capacity(k);
        for (s, m) in f_mats.iter().enumerate() {
            if m.len() != d || m.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidModel(format!("F({s}) must be {d}x{d}")));
            }
            mats.push(DMatrix::from_fn(d, d, |a, b| m[a][b]));
        }
        let init_x = init_x.unwrap_or(InitX::Point { at: vec![0.0; d] });
        let init_x_density = match &init_x {
            InitX::Point { at } => {
                if at.len() != d {
                    return Err(Error::InvalidModel(format!("initial point must have dimension {d}")));
                }
                None
            }
            InitX::Density { density } => {
                let e = Emission::from_spec(density)?;
                if e.is_discrete() || e.dim() != d {
                    return Err(Error::InvalidModel(format!("initial density must be continuous of dimension {d}")));
                }
                Some(e)
            }
        };
        let log_trans = trans.iter().flatten().map(|&p| ln(p)).collect();
        let log_init = init.iter().map(|&p| ln(p)).collect();
        Ok(Lmsm { trans, init, f_mats: mats, noise, init_x, init_x_density, log_trans, log_init })
    }

    pub fn n_states(&self) -> usize {
        self.trans.len()
    }

    pub fn dim(&self) -> usize {
        self.noise[0].dim()
    }

    pub fn trans(&self) -> &[Vec<f64>] {
        &self.trans
    }

    pub fn init(&self) -> &[f64] {
        &self.init
    }

    pub fn f_mats(&self) -> &[DMatrix<f64>] {
        &self.f_mats
    }

    pub fn noise(&self) -> &[Emission] {
        &self.noise
    }

    pub fn init_x(&self) -> &InitX {
        &self.init_x
    }

    pub fn log_p(&self, i: usize, j: usize) -> f64 {
        self.log_trans[i * self.n_states() + j]
    }

    pub fn log_init(&self, i: usize) -> f64 {
        self.log_init[i]
    }

    pub fn residual(&self, j: usize, x: &[f64], x2: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let f = &self.f_mats[j];
        (0..d).map(|a| x2[a] - (0..d).map(|b| f[(a, b)] * x[b]).sum::<f64>()).collect()
    }

    pub fn log_q(&self, x: &[f64], i: usize, x2: &[f64], j: usize) -> f64 {
        let p = self.log_p(i, j);
        if p == LOG_ZERO || x.len() != self.dim() || x2.len() != self.dim() {
            return LOG_ZERO;
        }
        p + self.noise[j].log_density_point(&self.residual(j, x, x2))
    }

    pub fn init_x_log_density(&self, x: &[f64]) -> f64 {
        match (&self.init_x, &self.init_x_density) {
            (InitX::Point { at }, _) => {
                if at.as_slice() == x {
                    0.0
                } else {
                    LOG_ZERO
                }
            }
            (_, Some(e)) => e.log_density_point(x),
            _ => LOG_ZERO,
        }
    }

    pub fn sample_init<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, usize) {
        let i = sample_index(&self.init, rng);
        let x = match (&self.init_x, &self.init_x_density) {
            (InitX::Point { at }, _) => at.clone(),
            (_, Some(e)) => e.sample_point(rng),
            _ => vec![0.0; self.dim()],
        };
        (x, i)
    }

    pub fn sample_step<R: Rng + ?Sized>(&self, x: &[f64], i: usize, rng: &mut R) -> (Vec<f64>, usize) {
        let j = sample_index(&self.trans[i], rng);
        let noise = self.noise[j].sample_point(rng);
        let f = &self.f_mats[j];
        let d = self.dim();
        let x2 = (0..d).map(|a| (0..d).map(|b| f[(a, b)] * x[b]).sum::<f64>() + noise[a]).collect();
        (x2, j)
    }
}
