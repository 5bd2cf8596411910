//! Normalized log-space forward and backward recursions over a window of a
//! stored observation path. Times are 1-based and windows inclusive.

use crate::error::{Error, Result};
use crate::logspace::{log_sum_exp, normalize, LOG_ZERO};
use crate::model::{Model, Obs, StartLaw};

/// Default cap on block length `m`.
pub const DEFAULT_M_CAP: usize = 8;

/// An observation path with its per-step kernel matrices precomputed.
pub struct PathContext<'a> {
    pub model: &'a Model,
    pub xs: &'a [Obs],
    steps: Vec<Vec<f64>>,
    pub m_cap: usize,
}

/// Normalized forward log-vectors `alpha[t - l]` and the window log-likelihood.
#[derive(Debug, Clone)]
pub struct Forward {
    pub l: usize,
    pub n: usize,
    pub alpha: Vec<Vec<f64>>,
    /// Log-likelihood relative to the prior's total mass.
    pub loglik: f64,
}

/// Normalized backward log-vectors `beta[t - lo]` for times `lo..=n`.
#[derive(Debug, Clone)]
pub struct Backward {
    pub lo: usize,
    pub n: usize,
    pub beta: Vec<Vec<f64>>,
}

impl Forward {
    pub fn at(&self, t: usize) -> &[f64] {
        &self.alpha[t - self.l]
    }
}

impl Backward {
    pub fn at(&self, t: usize) -> &[f64] {
        &self.beta[t - self.lo]
    }
}

impl<'a> PathContext<'a> {
    pub fn new(model: &'a Model, xs: &'a [Obs]) -> Result<Self> {
        model.check_obs(xs)?;
        let steps = xs.windows(2).map(|w| model.step_log_matrix(&w[0], &w[1])).collect();
        Ok(PathContext { model, xs, steps, m_cap: DEFAULT_M_CAP })
    }

    pub fn with_m_cap(mut self, cap: usize) -> Self {
        self.m_cap = cap;
        self
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn n_states(&self) -> usize {
        self.model.n_states()
    }

    /// Kernel log-matrix from time `k` to time `k + 1`.
    pub fn step(&self, k: usize) -> &[f64] {
        &self.steps[k - 1]
    }

    pub fn obs(&self, t: usize) -> &Obs {
        &self.xs[t - 1]
    }

    pub fn check_window(&self, l: usize, n: usize) -> Result<()> {
        if l == 0 || l > n || n > self.len() {
            return Err(Error::InvalidWindow(format!(
                "window {l}:{n} is not inside the observed path 1:{}",
                self.len()
            )));
        }
        Ok(())
    }

    pub fn prior(&self, law: &StartLaw, l: usize) -> Result<Vec<f64>> {
        self.model.window_prior(law, l, self.obs(l))
    }

    /// Forward pass over `l..=n` seeded with `prior_log` at time `l`.
    pub fn forward(&self, l: usize, n: usize, prior_log: &[f64]) -> Result<Forward> {
        self.check_window(l, n)?;
        let k = self.n_states();
        let mut a = prior_log.to_vec();
        let mut loglik = normalize(&mut a);
        if loglik == LOG_ZERO {
            return Err(Error::ZeroLikelihood { time: l });
        }
        let mut alpha = Vec::with_capacity(n - l + 1);
        alpha.push(a);
        let mut terms = vec![LOG_ZERO; k];
        for t in l..n {
            let prev = &alpha[t - l];
            let step = self.step(t);
            let mut next = vec![LOG_ZERO; k];
            for (j, nj) in next.iter_mut().enumerate() {
                for i in 0..k {
                    terms[i] = prev[i] + step[i * k + j];
                }
                *nj = log_sum_exp(terms.iter().copied());
            }
            let total = normalize(&mut next);
            if total == LOG_ZERO {
                return Err(Error::ZeroLikelihood { time: t + 1 });
            }
            loglik += total;
            alpha.push(next);
        }
        Ok(Forward { l, n, alpha, loglik })
    }

    /// Backward pass over `lo..=n`; `beta[n] = 0`.
    pub fn backward(&self, lo: usize, n: usize) -> Result<Backward> {
        self.check_window(lo, n)?;
        let k = self.n_states();
        let mut beta = vec![vec![0.0; k]; n - lo + 1];
        let mut terms = vec![LOG_ZERO; k];
        for t in (lo..n).rev() {
            let step = self.step(t);
            let (head, tail) = beta.split_at_mut(t + 1 - lo);
            let next = &tail[0];
            let cur = &mut head[t - lo];
            for (i, ci) in cur.iter_mut().enumerate() {
                for j in 0..k {
                    terms[j] = step[i * k + j] + next[j];
                }
                *ci = log_sum_exp(terms.iter().copied());
            }
            normalize(cur);
        }
        Ok(Backward { lo, n, beta })
    }

    /// Smoothing marginal at `t` from a forward and a backward pass.
    pub fn marginal(&self, fwd: &Forward, bwd: &Backward, t: usize) -> Vec<f64> {
        let a = fwd.at(t);
        let b = bwd.at(t);
        let mut v: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        normalize(&mut v);
        v.iter().map(|x| x.exp()).collect()
    }
}

/// Forward and backward passes over one window with its smoothing marginals.
#[derive(Debug, Clone)]
pub struct ForwardBackward {
    pub forward: Forward,
    pub backward: Backward,
    pub loglik: f64,
    /// `marginals[t - l]` is the smoothing law of `Y_t`.
    pub marginals: Vec<Vec<f64>>,
}

/// Runs both recursions on the window `l..=n` of `xs` seeded by `law`.
pub fn forward_backward(model: &Model, xs: &[Obs], l: usize, n: usize, law: &StartLaw) -> Result<ForwardBackward> {
    let ctx = PathContext::new(model, xs)?;
    ctx.check_window(l, n)?;
    let prior = ctx.prior(law, l)?;
    let forward = ctx.forward(l, n, &prior)?;
    let backward = ctx.backward(l, n)?;
    let marginals = (l..=n).map(|t| ctx.marginal(&forward, &backward, t)).collect();
    let loglik = forward.loglik;
    Ok(ForwardBackward { forward, backward, loglik, marginals })
}
