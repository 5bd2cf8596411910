use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::emission::sample_index;
use crate::model::{stationary, Model, Obs, StartLaw};
use crate::rng::seeded_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub xs: Vec<Obs>,
    pub ys: Vec<usize>,
    pub seed: u64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

pub fn sample_trajectory(model: &Model, n: usize, seed: u64) -> Result<Trajectory> {
    let mut rng = seeded_rng(seed);
    let (xs, ys) = sample_path(model, n, &StartLaw::Initial, &mut rng)?;
    Ok(Trajectory { xs, ys, seed })
}

/// Draws `n` consecutive pairs with the first pair taken from `start`.
pub fn sample_path<R: Rng + ?Sized>(
    model: &Model,
    n: usize,
    start: &StartLaw,
    rng: &mut R,
) -> Result<(Vec<Obs>, Vec<usize>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("trajectory length must be at least 1".into()));
    }
    let (x0, y0) = match (model, start) {
        (_, StartLaw::Initial) => model.sample_init(rng),
        (Model::Finite(m), law) => {
            let law = match law {
                StartLaw::Stationary => stationary::stationary_distribution(model)?,
                StartLaw::Custom(v) => v.clone(),
                StartLaw::Initial => unreachable!(),
            };
            let z = sample_index(&law, rng);
            (Obs::Symbol(z / m.n_states()), z % m.n_states())
        }
        (Model::Hmm(m), law) => {
            let law = match law {
                StartLaw::Stationary => stationary::stationary_distribution(model)?,
                StartLaw::Custom(v) => v.clone(),
                StartLaw::Initial => unreachable!(),
            };
            let i = sample_index(&law, rng);
            (m.emissions()[i].sample(rng), i)
        }
        (Model::Lmsm(_), _) => {
            return Err(Error::NotStationary("switching models are sampled from their initial law only".into()))
        }
    };
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    xs.push(x0);
    ys.push(y0);
    for k in 1..n {
        let (x, y) = model.sample_step(&xs[k - 1], ys[k - 1], rng);
        xs.push(x);
        ys.push(y);
    }
    Ok((xs, ys))
}
