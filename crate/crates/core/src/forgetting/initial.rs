use rayon::prelude::*;

use crate::condition::ForgettingCertificate;
use crate::error::{Error, Result};
use crate::forgetting::one_sided::{compare_on_path, summarize, ForgettingExperiment, OneSidedConfig, Pair};
use crate::inference::PathContext;
use crate::model::{sample_path, Model, StartLaw};
use crate::rng::replicate_rng;

/// Distance between smoothers over `s..=n` whose chains start from `pi` and
/// from `pi_tilde`. Paths are drawn under `pi`, which must put mass only
/// where `pi_tilde` does. `config.l` is ignored.
pub fn initial_forgetting_experiment(
    model: &Model,
    pi: &[f64],
    pi_tilde: &[f64],
    cert: Option<&ForgettingCertificate>,
    config: &OneSidedConfig,
) -> Result<ForgettingExperiment> {
    let width = match model {
        Model::Finite(m) => m.n_pairs(),
        _ => model.n_states(),
    };
    if pi.len() != width || pi_tilde.len() != width {
        return Err(Error::InvalidArgument(format!("start laws need {width} weights")));
    }
    if let Some(i) = (0..width).find(|&i| pi[i] > 0.0 && pi_tilde[i] <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "the reference law is not dominated: index {i} has mass under pi but not under pi_tilde"
        )));
    }
    let mut ts = config.t_grid.clone();
    ts.sort_unstable();
    ts.dedup();
    if config.s == 0 || ts.iter().any(|&t| t < config.s || t > config.n_max) || config.n_paths == 0 {
        return Err(Error::InvalidWindow("need 1 <= s <= t <= n_max and at least one path".into()));
    }
    let law_a = StartLaw::Custom(model.propagate_law(pi, config.s - 1));
    let law_b = StartLaw::Custom(model.propagate_law(pi_tilde, config.s - 1));
    let start = StartLaw::Custom(pi.to_vec());
    let ends = |t: usize| config.ends_for(t);
    let curves = (0..config.n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = replicate_rng(config.seed, p as u64);
            let (xs, _) = sample_path(model, config.n_max, &start, &mut rng)?;
            let ctx = PathContext::new(model, &xs)?;
            let a = ctx.forward(config.s, config.n_max, &ctx.prior(&law_a, config.s)?)?;
            let b = ctx.forward(config.s, config.n_max, &ctx.prior(&law_b, config.s)?)?;
            let pair = Pair { ctx: &ctx, a, b, s: config.s };
            compare_on_path(&pair, model, &xs, cert, &ts, &ends, config.m, p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(curves, config.s, config.seed, cert))
}
