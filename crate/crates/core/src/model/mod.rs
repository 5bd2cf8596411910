//! Pairwise Markov models: the three concrete classes behind one kernel.

pub mod emission;
pub mod finite;
pub mod hmm;
pub mod lmsm;
pub mod reverse;
pub mod sample;
pub mod spec_file;
pub mod stationary;
pub mod validate;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::{ln, LOG_ZERO};

pub use emission::{Emission, EmissionSpec};
pub use finite::FinitePmm;
pub use hmm::Hmm;
pub use lmsm::{InitX, Lmsm};
pub use reverse::reversed_model;
pub use sample::{sample_path, sample_trajectory, Trajectory};
pub use spec_file::{load_model, load_obs, model_to_json, parse_model, read_obs_csv, write_obs_csv, write_trajectory_csv, ModelSpec};
pub use stationary::stationary_distribution;
pub use validate::{validate_model, ValidationIssue, ValidationReport};

/// A single observation: a symbol of a finite alphabet or a point of R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Obs {
    Symbol(usize),
    Point(Vec<f64>),
}

impl Obs {
    pub fn symbol(&self) -> Option<usize> {
        match self {
            Obs::Symbol(s) => Some(*s),
            Obs::Point(_) => None,
        }
    }

    pub fn point(&self) -> Option<&[f64]> {
        match self {
            Obs::Point(v) => Some(v),
            Obs::Symbol(_) => None,
        }
    }

    /// Symbols print as integers, points as comma-joined components.
    pub fn to_field(&self) -> String {
        match self {
            Obs::Symbol(s) => s.to_string(),
            Obs::Point(v) => v.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(","),
        }
    }
}

/// Builds symbol observations from a digit string such as `"01110010"`.
pub fn symbols(digits: &str) -> Vec<Obs> {
    digits.chars().filter_map(|c| c.to_digit(10)).map(|d| Obs::Symbol(d as usize)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObsSpace {
    Finite(usize),
    Euclidean(usize),
}

/// Law used to seed the forward recursion at the first time of a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartLaw {
    /// The model's own initial law, propagated to the window start.
    Initial,
    /// The stationary law.
    Stationary,
    /// A law over states (hidden Markov and switching models) or over pairs
    /// (finite pair chains), applied at the window start.
    Custom(Vec<f64>),
}

#[derive(Debug, Clone)]
pub enum Model {
    Finite(FinitePmm),
    Hmm(Hmm),
    Lmsm(Lmsm),
}

impl Model {
    pub fn n_states(&self) -> usize {
        match self {
            Model::Finite(m) => m.n_states(),
            Model::Hmm(m) => m.n_states(),
            Model::Lmsm(m) => m.n_states(),
        }
    }

    pub fn obs_space(&self) -> ObsSpace {
        match self {
            Model::Finite(m) => ObsSpace::Finite(m.n_obs()),
            Model::Hmm(m) if m.is_discrete() => ObsSpace::Finite(m.emissions()[0].dim()),
            Model::Hmm(m) => ObsSpace::Euclidean(m.emissions()[0].dim()),
            Model::Lmsm(m) => ObsSpace::Euclidean(m.dim()),
        }
    }

    pub fn is_finite_obs(&self) -> bool {
        matches!(self.obs_space(), ObsSpace::Finite(_))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Finite(_) => "finite_pmm",
            Model::Hmm(_) => "hmm",
            Model::Lmsm(_) => "lmsm",
        }
    }

    /// Checks that an observation lives in the model's observation space.
    pub fn check_obs(&self, xs: &[Obs]) -> Result<()> {
        let space = self.obs_space();
        for (index, x) in xs.iter().enumerate() {
            let ok = match (space, x) {
                (ObsSpace::Finite(k), Obs::Symbol(s)) => *s < k,
                (ObsSpace::Euclidean(d), Obs::Point(v)) => v.len() == d && v.iter().all(|c| c.is_finite()),
                _ => false,
            };
            if !ok {
                return Err(Error::ObservationSpace {
                    index,
                    reason: format!("{x:?} is not a point of {space:?}"),
                });
            }
        }
        Ok(())
    }

    /// `log q(x2, j | x, i)`.
    pub fn log_q(&self, x: &Obs, i: usize, x2: &Obs, j: usize) -> f64 {
        match self {
            Model::Finite(m) => match (x, x2) {
                (Obs::Symbol(a), Obs::Symbol(b)) => m.log_q(*a, i, *b, j),
                _ => LOG_ZERO,
            },
            Model::Hmm(m) => m.log_q(i, x2, j),
            Model::Lmsm(m) => match (x, x2) {
                (Obs::Point(a), Obs::Point(b)) => m.log_q(a, i, b, j),
                _ => LOG_ZERO,
            },
        }
    }

    /// `log p(x, i)` for the first pair of the chain.
    pub fn init_log_density(&self, x: &Obs, i: usize) -> f64 {
        match self {
            Model::Finite(m) => x.symbol().map_or(LOG_ZERO, |s| m.init_log_density(s, i)),
            Model::Hmm(m) => {
                let a = m.log_init(i);
                if a == LOG_ZERO {
                    a
                } else {
                    a + m.emissions()[i].log_density(x)
                }
            }
            Model::Lmsm(m) => {
                let a = m.log_init(i);
                if a == LOG_ZERO {
                    return a;
                }
                x.point().map_or(LOG_ZERO, |p| a + m.init_x_log_density(p))
            }
        }
    }

    /// Row-major `|Y| x |Y|` matrix of `log q(x2, j | x, i)`.
    pub fn step_log_matrix(&self, x: &Obs, x2: &Obs) -> Vec<f64> {
        let k = self.n_states();
        let mut out = vec![LOG_ZERO; k * k];
        match self {
            Model::Hmm(m) => {
                let f: Vec<f64> = m.emissions().iter().map(|e| e.log_density(x2)).collect();
                for i in 0..k {
                    for j in 0..k {
                        let p = m.log_p(i, j);
                        if p > LOG_ZERO && f[j] > LOG_ZERO {
                            out[i * k + j] = p + f[j];
                        }
                    }
                }
            }
            Model::Lmsm(m) => {
                if let (Obs::Point(a), Obs::Point(b)) = (x, x2) {
                    let h: Vec<f64> =
                        (0..k).map(|j| m.noise()[j].log_density_point(&m.residual(j, a, b))).collect();
                    for i in 0..k {
                        for j in 0..k {
                            let p = m.log_p(i, j);
                            if p > LOG_ZERO && h[j] > LOG_ZERO {
                                out[i * k + j] = p + h[j];
                            }
                        }
                    }
                }
            }
            Model::Finite(_) => {
                for i in 0..k {
                    for j in 0..k {
                        out[i * k + j] = self.log_q(x, i, x2, j);
                    }
                }
            }
        }
        out
    }

    /// Transition matrix of the hidden chain alone, when it is Markov.
    pub fn state_transition(&self) -> Option<&[Vec<f64>]> {
        match self {
            Model::Finite(_) => None,
            Model::Hmm(m) => Some(m.trans()),
            Model::Lmsm(m) => Some(m.trans()),
        }
    }

    /// Log prior `log p(X_l = x_l, Y_l = i)` (up to a constant) seeding a
    /// window that starts at time `l` (1-based).
    ///
    /// For switching models started at `l > 1` the observation factor is
    /// dropped and only the propagated state law is used.
    pub fn window_prior(&self, law: &StartLaw, l: usize, x_l: &Obs) -> Result<Vec<f64>> {
        let k = self.n_states();
        if l == 0 {
            return Err(Error::InvalidWindow("time indices start at 1".into()));
        }
        match (self, law) {
            (_, StartLaw::Initial) if l == 1 => Ok((0..k).map(|i| self.init_log_density(x_l, i)).collect()),
            (Model::Finite(m), StartLaw::Initial) => {
                let mut law = m.init().to_vec();
                for _ in 1..l {
                    law = m.push_forward(&law);
                }
                Ok(self.pair_law_at(m, &law, x_l))
            }
            (Model::Finite(m), StartLaw::Stationary) => {
                let pi = stationary::stationary_distribution(self)?;
                Ok(self.pair_law_at(m, &pi, x_l))
            }
            (Model::Finite(m), StartLaw::Custom(law)) => {
                if law.len() != m.n_pairs() {
                    return Err(Error::InvalidArgument(format!(
                        "custom start law needs {} pair weights",
                        m.n_pairs()
                    )));
                }
                Ok(self.pair_law_at(m, law, x_l))
            }
            (_, law) => {
                let state_law = match law {
                    StartLaw::Initial => {
                        let trans = self.state_transition().expect("hidden chain is Markov");
                        let mut v = match self {
                            Model::Hmm(m) => m.init().to_vec(),
                            Model::Lmsm(m) => m.init().to_vec(),
                            Model::Finite(_) => unreachable!(),
                        };
                        for _ in 1..l {
                            v = stationary::vec_mat(&v, trans);
                        }
                        v
                    }
                    StartLaw::Stationary => {
                        if let Model::Lmsm(_) = self {
                            return Err(Error::NotStationary(
                                "switching models have no representable stationary observation law".into(),
                            ));
                        }
                        stationary::stationary_distribution(self)?
                    }
                    StartLaw::Custom(v) => {
                        if v.len() != k {
                            return Err(Error::InvalidArgument(format!("custom start law needs {k} state weights")));
                        }
                        v.clone()
                    }
                };
                Ok(match self {
                    Model::Hmm(m) => (0..k)
                        .map(|i| {
                            let a = ln(state_law[i]);
                            if a == LOG_ZERO {
                                a
                            } else {
                                a + m.emissions()[i].log_density(x_l)
                            }
                        })
                        .collect(),
                    Model::Lmsm(m) if l == 1 => (0..k)
                        .map(|i| {
                            let a = ln(state_law[i]);
                            if a == LOG_ZERO {
                                a
                            } else {
                                x_l.point().map_or(LOG_ZERO, |p| a + m.init_x_log_density(p))
                            }
                        })
                        .collect(),
                    _ => state_law.iter().map(|&p| ln(p)).collect(),
                })
            }
        }
    }

    fn pair_law_at(&self, m: &FinitePmm, law: &[f64], x: &Obs) -> Vec<f64> {
        match x.symbol() {
            Some(s) if s < m.n_obs() => (0..m.n_states()).map(|i| ln(law[m.pair(s, i)])).collect(),
            _ => vec![LOG_ZERO; m.n_states()],
        }
    }

    /// Pushes a start law (over states, or over pairs for pair chains)
    /// forward by `steps` transitions of the chain.
    pub fn propagate_law(&self, law: &[f64], steps: usize) -> Vec<f64> {
        let mut v = law.to_vec();
        for _ in 0..steps {
            v = match self {
                Model::Finite(m) => m.push_forward(&v),
                Model::Hmm(m) => stationary::vec_mat(&v, m.trans()),
                Model::Lmsm(m) => stationary::vec_mat(&v, m.trans()),
            };
        }
        v
    }

    /// States that can co-occur with observation `x` under the chain.
    pub fn admissible_states(&self, x: &Obs) -> Vec<usize> {
        match self {
            Model::Hmm(m) => (0..m.n_states()).filter(|&i| m.emissions()[i].support_member(x)).collect(),
            Model::Finite(m) => {
                let reach = stationary::reachable_pairs(m);
                match x.symbol() {
                    Some(s) if s < m.n_obs() => (0..m.n_states()).filter(|&i| reach[m.pair(s, i)]).collect(),
                    _ => Vec::new(),
                }
            }
            Model::Lmsm(m) => (0..m.n_states()).collect(),
        }
    }

    /// Number of observation cells the hidden chain's continuation has to
    /// track beyond the last observed time.
    pub fn continuation_cells(&self) -> usize {
        match self {
            Model::Finite(m) => m.n_obs(),
            _ => 1,
        }
    }

    pub fn continuation_cell(&self, x: &Obs) -> usize {
        match self {
            Model::Finite(_) => x.symbol().unwrap_or(0),
            _ => 0,
        }
    }

    /// `log P(cell', j | cell, i)` for the unobserved continuation of the chain.
    pub fn continuation_log(&self, cell: usize, i: usize, cell2: usize, j: usize) -> f64 {
        match self {
            Model::Finite(m) => m.log_q(cell, i, cell2, j),
            Model::Hmm(m) => m.log_p(i, j),
            Model::Lmsm(m) => m.log_p(i, j),
        }
    }

    pub fn sample_init<R: Rng + ?Sized>(&self, rng: &mut R) -> (Obs, usize) {
        match self {
            Model::Finite(m) => {
                let (x, i) = m.sample_init(rng);
                (Obs::Symbol(x), i)
            }
            Model::Hmm(m) => m.sample_init(rng),
            Model::Lmsm(m) => {
                let (x, i) = m.sample_init(rng);
                (Obs::Point(x), i)
            }
        }
    }

    pub fn sample_step<R: Rng + ?Sized>(&self, x: &Obs, i: usize, rng: &mut R) -> (Obs, usize) {
        match self {
            Model::Finite(m) => {
                let (x2, j) = m.sample_step(x.symbol().unwrap_or(0), i, rng);
                (Obs::Symbol(x2), j)
            }
            Model::Hmm(m) => m.sample_step(i, rng),
            Model::Lmsm(m) => {
                let zero = vec![0.0; m.dim()];
                let (x2, j) = m.sample_step(x.point().unwrap_or(&zero), i, rng);
                (Obs::Point(x2), j)
            }
        }
    }
}

/// `log p(x_{1:n}, y_{1:n})`.
pub fn joint_log_density(model: &Model, xs: &[Obs], ys: &[usize]) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::LengthMismatch(format!(
            "{} observations and {} states",
            xs.len(),
            ys.len()
        )));
    }
    let mut total = model.init_log_density(&xs[0], ys[0]);
    for k in 1..xs.len() {
        if total == LOG_ZERO {
            break;
        }
        total += model.log_q(&xs[k - 1], ys[k - 1], &xs[k], ys[k]);
    }
    Ok(total)
}

/// Row-major `|Y| x |Y|` matrix of `log p_ij(x_{1:n})`; the factor at `x_1`
/// is excluded.
pub fn block_transition_matrix(model: &Model, xs: &[Obs]) -> Result<Vec<f64>> {
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("block densities need at least two observations".into()));
    }
    let k = model.n_states();
    let mut acc = model.step_log_matrix(&xs[0], &xs[1]);
    for w in xs[1..].windows(2) {
        acc = crate::logspace::log_matmul(&acc, &model.step_log_matrix(&w[0], &w[1]), k);
    }
    Ok(acc)
}

/// Linear-space one-step kernel `q(x, i, x2, j)`, row-major. Finite
/// alphabets multiply the stored probabilities directly, so products of
/// dyadic values stay exact.
pub fn step_matrix(model: &Model, x: &Obs, x2: &Obs) -> Vec<f64> {
    let k = model.n_states();
    match (model, x, x2) {
        (Model::Finite(m), Obs::Symbol(a), Obs::Symbol(b)) if *a < m.n_obs() && *b < m.n_obs() => {
            let np = m.n_pairs();
            let t = m.trans();
            (0..k * k).map(|c| t[m.pair(*a, c / k) * np + m.pair(*b, c % k)]).collect()
        }
        (Model::Hmm(m), _, Obs::Symbol(b)) if m.emissions().iter().all(Emission::is_discrete) => (0..k * k)
            .map(|c| match &m.emissions()[c % k] {
                Emission::Categorical { weights } => m.trans()[c / k][c % k] * weights.get(*b).copied().unwrap_or(0.0),
                _ => unreachable!(),
            })
            .collect(),
        _ => model.step_log_matrix(x, x2).iter().map(|v| v.exp()).collect(),
    }
}

/// `p_ij(x_{1:n})` in linear space.
pub fn block_transition_probs(model: &Model, xs: &[Obs]) -> Result<Vec<f64>> {
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("block densities need at least two observations".into()));
    }
    let k = model.n_states();
    let mut acc = step_matrix(model, &xs[0], &xs[1]);
    for w in xs[1..].windows(2) {
        let step = step_matrix(model, &w[0], &w[1]);
        let mut next = vec![0.0; k * k];
        for i in 0..k {
            for l in 0..k {
                let a = acc[i * k + l];
                if a == 0.0 {
                    continue;
                }
                for j in 0..k {
                    next[i * k + j] += a * step[l * k + j];
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// `log p_ij(x_{1:n})`.
pub fn block_transition_density(model: &Model, xs: &[Obs], i: usize, j: usize) -> Result<f64> {
    let k = model.n_states();
    if i >= k || j >= k {
        return Err(Error::InvalidArgument(format!("state index out of range for {k} states")));
    }
    Ok(block_transition_matrix(model, xs)?[i * k + j])
}
