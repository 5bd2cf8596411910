//! Marginal-posterior segmentation and its expected error rate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forgetting::kappa::{kappa_star, rho_envelope};
use crate::forgetting::TwoSidedBounds;
use crate::inference::{argmax, forward_backward, PathContext};
use crate::model::{sample_path, Model, Obs, StartLaw};
use crate::rng::seeded_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationResult {
    pub path: Vec<usize>,
    /// Posterior mass of the chosen state at each time.
    pub per_t_confidence: Vec<f64>,
    pub expected_errors: f64,
    pub normalized_error: f64,
}

/// Marginal-posterior decoding of the whole path with its expected number
/// of misclassified sites.
pub fn expected_error(model: &Model, xs: &[Obs]) -> Result<SegmentationResult> {
    let fb = forward_backward(model, xs, 1, xs.len(), &StartLaw::Initial)?;
    let path: Vec<usize> = fb.marginals.iter().map(|p| argmax(p)).collect();
    let per_t_confidence: Vec<f64> = fb.marginals.iter().zip(&path).map(|(p, &i)| p[i]).collect();
    let expected_errors: f64 = per_t_confidence.iter().map(|c| 1.0 - c).sum();
    Ok(SegmentationResult {
        normalized_error: expected_errors / xs.len() as f64,
        path,
        per_t_confidence,
        expected_errors,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateRConfig {
    /// Number of sites averaged.
    pub n_total: usize,
    pub burn_l: usize,
    pub burn_s: usize,
    pub seed: u64,
    pub batches: usize,
    /// Smooth one long path from the initial law instead of using
    /// certified windows; no truncation bound is reported.
    pub no_bound: bool,
}

impl EstimateRConfig {
    pub fn new(n_total: usize, burn_l: usize, burn_s: usize, seed: u64) -> Self {
        EstimateRConfig { n_total, burn_l, burn_s, seed, batches: 20, no_bound: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct REstimate {
    #[serde(rename = "R_hat")]
    pub r_hat: f64,
    pub stderr: f64,
    /// Mean bound on the distance between each window smoother and the
    /// doubly infinite one.
    pub window_bound: Option<f64>,
    pub n_total: usize,
    pub seed: u64,
}

/// Window length that brings `2 rho^kappa` below `tol` when every block is
/// an `E`-block.
pub fn default_burn(rho: f64, r: usize, tol: f64) -> usize {
    if rho <= 0.0 {
        return r - 1;
    }
    ((tol / 2.0).ln() / rho.ln()).ceil() as usize * (r - 1)
}

fn batch_stderr(values: &[f64], batches: usize) -> f64 {
    let b = batches.clamp(2, values.len().max(2));
    let size = values.len() / b;
    if size == 0 {
        return f64::NAN;
    }
    let means: Vec<f64> = values.chunks_exact(size).take(b).map(|c| c.iter().sum::<f64>() / size as f64).collect();
    let mu = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - mu).powi(2)).sum::<f64>() / (b as f64 - 1.0);
    (var / b as f64).sqrt()
}

/// Monte Carlo estimate of the per-site error of marginal-posterior
/// decoding under the stationary law.
pub fn estimate_r(model: &Model, bounds: TwoSidedBounds, config: &EstimateRConfig) -> Result<REstimate> {
    if config.n_total < 2 {
        return Err(Error::InvalidArgument("need at least two sites".into()));
    }
    let mut rng = seeded_rng(config.seed);
    let misses: Vec<f64>;
    let mut window_bound = None;
    if config.no_bound {
        let (xs, _) = sample_path(model, config.n_total, &StartLaw::Initial, &mut rng)?;
        misses = expected_error(model, &xs)?.per_t_confidence.iter().map(|c| 1.0 - c).collect();
    } else {
        let cert = bounds.forward.ok_or_else(|| {
            Error::Condition("no certificate: window truncation is unjustified; rerun without the bound".into())
        })?;
        let (bl, bs) = (config.burn_l, config.burn_s);
        let len = config.n_total + bl + bs;
        let (xs, _) = sample_path(model, len, &StartLaw::Stationary, &mut rng)?;
        let rev_xs: Vec<Obs> = xs.iter().rev().cloned().collect();
        let ctx = PathContext::new(model, &xs)?;
        let prior_for = |t: usize| ctx.prior(&StartLaw::Stationary, t);
        let per_t = (bl + 1..=bl + config.n_total)
            .into_par_iter()
            .map(|t| -> Result<(f64, f64)> {
                let fwd = ctx.forward(t - bl, t, &prior_for(t - bl)?)?;
                let bwd = ctx.backward(t, t + bs)?;
                let marg = ctx.marginal(&fwd, &bwd, t);
                let miss = 1.0 - marg[argmax(&marg)];
                let left = rho_envelope(cert.rho, kappa_star(cert, model, &xs, t - bl, t));
                let right = match bounds.reversed {
                    Some((rm, rc)) => {
                        let n = rev_xs.len();
                        rho_envelope(rc.rho, kappa_star(rc, rm, &rev_xs, n + 1 - t - bs, n + 1 - t))
                    }
                    None => 2.0,
                };
                Ok((miss, (left + right).min(2.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        window_bound = Some(per_t.iter().map(|p| p.1).sum::<f64>() / per_t.len() as f64);
        misses = per_t.into_iter().map(|p| p.0).collect();
    }
    let r_hat = misses.iter().sum::<f64>() / misses.len() as f64;
    Ok(REstimate {
        r_hat,
        stderr: batch_stderr(&misses, config.batches),
        window_bound,
        n_total: config.n_total,
        seed: config.seed,
    })
}
