use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::ForgettingCertificate;
use crate::error::{Error, Result};
use crate::forgetting::dobrushin::tv;
use crate::forgetting::envelope::{delta_profile, e_block_matrices, envelope_from_profile};
use crate::forgetting::fit::{fit_log_decay, LineFit};
use crate::forgetting::kappa::{kappa_star, rho_envelope};
use crate::inference::{Forward, PathContext};
use crate::model::{sample_path, Model, Obs, StartLaw};
use crate::rng::replicate_rng;

/// Distances below this are treated as exact agreement by the rate fit.
pub const FIT_FLOOR: f64 = 1e-12;
pub const VIOLATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OneSidedConfig {
    pub l: usize,
    pub s: usize,
    pub t_grid: Vec<usize>,
    pub n_max: usize,
    pub m: usize,
    pub n_paths: usize,
    pub seed: u64,
    /// Law of the simulated paths and of the window priors.
    pub start: StartLaw,
    /// Window ends; when empty each `t` uses `t, t+5, t+25, t+125, n_max`.
    #[serde(default)]
    pub n_grid: Vec<usize>,
}

impl OneSidedConfig {
    pub fn new(l: usize, s: usize, t_grid: Vec<usize>, n_max: usize) -> Self {
        OneSidedConfig { l, s, t_grid, n_max, m: 1, n_paths: 100, seed: 0, start: StartLaw::Initial, n_grid: Vec::new() }
    }

    pub(crate) fn ends_for(&self, t: usize) -> Vec<usize> {
        let mut v: Vec<usize> = if self.n_grid.is_empty() {
            [t, t + 5, t + 25, t + 125, self.n_max].into_iter().filter(|&n| n <= self.n_max).collect()
        } else {
            self.n_grid.iter().copied().filter(|&n| n >= t && n <= self.n_max).collect()
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    fn check(&self) -> Result<()> {
        if self.l == 0 || self.l > self.s {
            return Err(Error::InvalidWindow(format!("need 1 <= l <= s, got l={}, s={}", self.l, self.s)));
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|&t| t < self.s || t > self.n_max) {
            return Err(Error::InvalidWindow("every t must lie in s..=n_max".into()));
        }
        if self.n_paths == 0 || self.m == 0 {
            return Err(Error::InvalidArgument("need at least one path and m >= 1".into()));
        }
        Ok(())
    }
}

/// Distances along one simulated path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgettingCurve {
    pub path: usize,
    pub ts: Vec<usize>,
    /// Largest distance over the window ends tried at each `t`.
    pub emp_tv: Vec<f64>,
    /// `2 rho^{kappa*(x_{s:t})}`, or 2 without a certificate.
    pub envelope: Vec<f64>,
    pub kappa: Vec<usize>,
    /// Sharp bound from the realised `U` matrices, largest over window ends.
    pub delta_product: Vec<f64>,
    pub fitted_alpha: Option<f64>,
    pub fit_window: Option<(usize, usize)>,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForgettingSummary {
    pub n_paths: usize,
    pub seed: u64,
    pub fit: Option<LineFit>,
    pub alpha_hat: Option<f64>,
    pub violations: usize,
    pub sharp_violations: usize,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForgettingExperiment {
    pub curves: Vec<ForgettingCurve>,
    pub summary: ForgettingSummary,
}

/// Two filters on one path, both reaching time `s`, compared at each `t`.
pub(crate) struct Pair<'p> {
    pub ctx: &'p PathContext<'p>,
    pub a: Forward,
    pub b: Forward,
    pub s: usize,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn compare_on_path(
    pair: &Pair,
    model: &Model,
    xs: &[Obs],
    cert: Option<&ForgettingCertificate>,
    ts: &[usize],
    ends: &dyn Fn(usize) -> Vec<usize>,
    m: usize,
    path: usize,
) -> Result<ForgettingCurve> {
    let s = pair.s;
    let mut all_ends: Vec<usize> = ts.iter().flat_map(|&t| ends(t)).collect();
    all_ends.sort_unstable();
    all_ends.dedup();
    let blocks = match cert {
        Some(c) => Some(e_block_matrices(c, model, xs)?),
        None => None,
    };
    let mut emp_tv = vec![0.0f64; ts.len()];
    let mut delta_product = vec![if cert.is_some() { 0.0f64 } else { 2.0 }; ts.len()];
    for &n in &all_ends {
        let bwd = pair.ctx.backward(s, n)?;
        let profile = match (cert, &blocks) {
            (Some(c), Some(b)) => Some(delta_profile(c, b, &bwd, s)?),
            _ => None,
        };
        for (slot, &t) in ts.iter().enumerate() {
            if !ends(t).contains(&n) {
                continue;
            }
            let pa = pair.ctx.block_until(&pair.a, Some(&bwd), t, m, n)?;
            let pb = pair.ctx.block_until(&pair.b, Some(&bwd), t, m, n)?;
            emp_tv[slot] = emp_tv[slot].max(tv(&pa.probs, &pb.probs));
            if let (Some(c), Some(p)) = (cert, &profile) {
                delta_product[slot] = delta_product[slot].max(envelope_from_profile(p, c.r_prime(), s, t));
            }
        }
    }
    let kappa: Vec<usize> = ts.iter().map(|&t| cert.map_or(0, |c| kappa_star(c, model, xs, s, t))).collect();
    let envelope: Vec<f64> = kappa.iter().map(|&k| cert.map_or(2.0, |c| rho_envelope(c.rho, k))).collect();
    let violations = emp_tv.iter().zip(&envelope).filter(|(e, b)| **e > **b + VIOLATION_TOL).count();
    let lags: Vec<f64> = ts.iter().map(|&t| (t - s) as f64).collect();
    let fit = fit_log_decay(&lags, &emp_tv, FIT_FLOOR);
    let used: Vec<usize> = ts.iter().zip(&emp_tv).filter(|(_, &e)| e > FIT_FLOOR).map(|(&t, _)| t).collect();
    Ok(ForgettingCurve {
        path,
        ts: ts.to_vec(),
        emp_tv,
        envelope,
        kappa,
        delta_product,
        fitted_alpha: fit.map(|f| f.rate()),
        fit_window: fit.and(used.first().zip(used.last()).map(|(a, b)| (*a, *b))),
        violations,
    })
}

pub(crate) fn summarize(
    curves: Vec<ForgettingCurve>,
    s: usize,
    seed: u64,
    cert: Option<&ForgettingCertificate>,
) -> ForgettingExperiment {
    let (lags, vals): (Vec<f64>, Vec<f64>) = curves
        .iter()
        .flat_map(|c| c.ts.iter().zip(&c.emp_tv).map(|(&t, &e)| ((t - s) as f64, e)))
        .unzip();
    let fit = fit_log_decay(&lags, &vals, FIT_FLOOR);
    let sharp_violations = curves
        .iter()
        .flat_map(|c| c.emp_tv.iter().zip(&c.delta_product))
        .filter(|(e, b)| **e > **b + VIOLATION_TOL)
        .count();
    let summary = ForgettingSummary {
        n_paths: curves.len(),
        seed,
        fit,
        alpha_hat: fit.map(|f| f.rate()),
        violations: curves.iter().map(|c| c.violations).sum(),
        sharp_violations,
        rho: cert.map(|c| c.rho),
    };
    ForgettingExperiment { curves, summary }
}

/// Monte Carlo distance between smoothers started at `l` and at `s`.
pub fn one_sided_experiment(
    model: &Model,
    cert: Option<&ForgettingCertificate>,
    config: &OneSidedConfig,
) -> Result<ForgettingExperiment> {
    config.check()?;
    let mut ts = config.t_grid.clone();
    ts.sort_unstable();
    ts.dedup();
    let ends = |t: usize| config.ends_for(t);
    let curves = (0..config.n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = replicate_rng(config.seed, p as u64);
            let (xs, _) = sample_path(model, config.n_max, &config.start, &mut rng)?;
            let ctx = PathContext::new(model, &xs)?;
            let a = ctx.forward(config.l, config.n_max, &ctx.prior(&config.start, config.l)?)?;
            let b = ctx.forward(config.s, config.n_max, &ctx.prior(&config.start, config.s)?)?;
            let pair = Pair { ctx: &ctx, a, b, s: config.s };
            compare_on_path(&pair, model, &xs, cert, &ts, &ends, config.m, p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(curves, config.s, config.seed, cert))
}
