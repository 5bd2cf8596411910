use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition::ForgettingCertificate;
use crate::error::{Error, Result};
use crate::forgetting::dobrushin::tv;
use crate::forgetting::fit::{fit_log_decay, LineFit};
use crate::forgetting::kappa::{kappa_star, rho_envelope};
use crate::forgetting::one_sided::{FIT_FLOOR, VIOLATION_TOL};
use crate::inference::PathContext;
use crate::model::{sample_path, Model, Obs, StartLaw};
use crate::rng::replicate_rng;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoSidedConfig {
    /// Block start, kept away from both ends of the path.
    pub t: usize,
    /// Observations kept before `t`.
    pub l_grid: Vec<usize>,
    /// Observations kept after `t`.
    pub s_grid: Vec<usize>,
    pub n_total: usize,
    pub m: usize,
    pub n_paths: usize,
    pub seed: u64,
}

/// Forward certificate plus one for the time-reversed chain.
#[derive(Debug, Clone, Copy)]
pub struct TwoSidedBounds<'a> {
    pub forward: Option<&'a ForgettingCertificate>,
    pub reversed: Option<(&'a Model, &'a ForgettingCertificate)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedCell {
    pub l: usize,
    pub s: usize,
    pub mean_tv: f64,
    pub max_tv: f64,
    pub mean_envelope: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoSidedResult {
    pub t: usize,
    pub n_total: usize,
    pub m: usize,
    pub n_paths: usize,
    pub seed: u64,
    pub cells: Vec<TwoSidedCell>,
    /// Log-linear fit of the mean distance against `min(l, s)`.
    pub fit: Option<LineFit>,
    pub alpha_hat: Option<f64>,
    /// Mean bound on the distance between the reference smoother and the
    /// doubly infinite one.
    pub truncation_bound: f64,
    /// Largest gap between the single-site law and the marginal of the
    /// block law, when `m > 1`.
    pub marginal_gap: f64,
    pub violations: usize,
}

impl TwoSidedConfig {
    fn check(&self) -> Result<()> {
        if self.m == 0 || self.n_paths == 0 {
            return Err(Error::InvalidArgument("need m >= 1 and at least one path".into()));
        }
        if self.t < 1 || self.t + self.m - 1 > self.n_total {
            return Err(Error::InvalidWindow("block does not fit in the path".into()));
        }
        if self.l_grid.iter().any(|&l| l >= self.t) {
            return Err(Error::InvalidWindow("every l must be below t".into()));
        }
        if self.s_grid.iter().any(|&s| s + 1 < self.m || self.t + s > self.n_total) {
            return Err(Error::InvalidWindow("every s must satisfy m - 1 <= s <= n_total - t".into()));
        }
        Ok(())
    }
}

fn left_bound(b: &TwoSidedBounds, model: &Model, xs: &[Obs], start: usize, t: usize) -> f64 {
    if start == 1 {
        return 0.0;
    }
    b.forward.map_or(2.0, |c| rho_envelope(c.rho, kappa_star(c, model, xs, start, t)))
}

/// Bound for cutting the path at `end` instead of at its last point, read
/// off the reversed chain on the reversed observations.
fn right_bound(b: &TwoSidedBounds, rev_xs: &[Obs], t: usize, m: usize, end: usize) -> f64 {
    let n = rev_xs.len();
    if end == n {
        return 0.0;
    }
    b.reversed.map_or(2.0, |(rm, c)| {
        let s_rev = n + 1 - end;
        let t_rev = n + 2 - t - m;
        rho_envelope(c.rho, kappa_star(c, rm, rev_xs, s_rev, t_rev))
    })
}

/// Distance bound between the smoother started at time 1 and one whose
/// past extends without limit.
fn infinite_left(b: &TwoSidedBounds, model: &Model, xs: &[Obs], t: usize) -> f64 {
    b.forward.map_or(2.0, |c| rho_envelope(c.rho, kappa_star(c, model, xs, 1, t)))
}

fn infinite_right(b: &TwoSidedBounds, rev_xs: &[Obs], t: usize, m: usize) -> f64 {
    let n = rev_xs.len();
    b.reversed.map_or(2.0, |(rm, c)| rho_envelope(c.rho, kappa_star(c, rm, rev_xs, 1, n + 2 - t - m)))
}

struct PathOutcome {
    tv: Vec<f64>,
    envelope: Vec<f64>,
    truncation: f64,
    marginal_gap: f64,
}

/// Distances between smoothers on windows `t-l..=t+s` and the smoother on
/// the whole stationary path.
pub fn two_sided_experiment(model: &Model, bounds: TwoSidedBounds, config: &TwoSidedConfig) -> Result<TwoSidedResult> {
    config.check()?;
    let (t, m, n) = (config.t, config.m, config.n_total);
    let grid: Vec<(usize, usize)> =
        config.l_grid.iter().flat_map(|&l| config.s_grid.iter().map(move |&s| (l, s))).collect();
    let law = StartLaw::Stationary;
    let outcomes = (0..config.n_paths)
        .into_par_iter()
        .map(|p| -> Result<PathOutcome> {
            let mut rng = replicate_rng(config.seed, p as u64);
            let (xs, _) = sample_path(model, n, &law, &mut rng)?;
            let rev_xs: Vec<Obs> = xs.iter().rev().cloned().collect();
            let ctx = PathContext::new(model, &xs)?;
            let full = ctx.forward(1, n, &ctx.prior(&law, 1)?)?;
            let full_b = ctx.backward(t, n)?;
            let reference = ctx.block(&full, Some(&full_b), t, m)?;
            let mut tvs = Vec::with_capacity(grid.len());
            let mut envs = Vec::with_capacity(grid.len());
            let mut gap: f64 = 0.0;
            let mut fwds = Vec::new();
            for &l in &config.l_grid {
                fwds.push(ctx.forward(t - l, n, &ctx.prior(&law, t - l)?)?);
            }
            let mut bwds = Vec::new();
            for &s in &config.s_grid {
                bwds.push(ctx.backward(t, t + s)?);
            }
            for (li, &l) in config.l_grid.iter().enumerate() {
                for (si, &s) in config.s_grid.iter().enumerate() {
                    let block = ctx.block_until(&fwds[li], Some(&bwds[si]), t, m, t + s)?;
                    tvs.push(tv(&block.probs, &reference.probs));
                    if m > 1 {
                        let single = ctx.block_until(&fwds[li], Some(&bwds[si]), t, 1, t + s)?;
                        let marg = block.marginalize_to(1, ctx.n_states());
                        gap = gap.max(tv(&single.probs, &marg.probs));
                    }
                    let env = left_bound(&bounds, model, &xs, t - l, t) + right_bound(&bounds, &rev_xs, t, m, t + s);
                    envs.push(env.min(2.0));
                }
            }
            let truncation = (infinite_left(&bounds, model, &xs, t) + infinite_right(&bounds, &rev_xs, t, m)).min(2.0);
            Ok(PathOutcome { tv: tvs, envelope: envs, truncation, marginal_gap: gap })
        })
        .collect::<Result<Vec<_>>>()?;
    let np = outcomes.len() as f64;
    let cells: Vec<TwoSidedCell> = grid
        .iter()
        .enumerate()
        .map(|(g, &(l, s))| TwoSidedCell {
            l,
            s,
            mean_tv: outcomes.iter().map(|o| o.tv[g]).sum::<f64>() / np,
            max_tv: outcomes.iter().map(|o| o.tv[g]).fold(0.0, f64::max),
            mean_envelope: outcomes.iter().map(|o| o.envelope[g]).sum::<f64>() / np,
            violations: outcomes.iter().filter(|o| o.tv[g] > o.envelope[g] + VIOLATION_TOL).count(),
        })
        .collect();
    let depth: Vec<f64> = cells.iter().map(|c| c.l.min(c.s) as f64).collect();
    let means: Vec<f64> = cells.iter().map(|c| c.mean_tv).collect();
    let fit = fit_log_decay(&depth, &means, FIT_FLOOR);
    Ok(TwoSidedResult {
        t,
        n_total: n,
        m,
        n_paths: config.n_paths,
        seed: config.seed,
        violations: cells.iter().map(|c| c.violations).sum(),
        cells,
        fit,
        alpha_hat: fit.map(|f| f.rate()),
        truncation_bound: outcomes.iter().map(|o| o.truncation).sum::<f64>() / np,
        marginal_gap: outcomes.iter().map(|o| o.marginal_gap).fold(0.0, f64::max),
    })
}
