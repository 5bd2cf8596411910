//! Joint smoothing laws of hidden blocks `Y_{t:t+m-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::engine::{Backward, Forward, PathContext};
use crate::logspace::{log_sum_exp, normalize, LOG_ZERO};
use crate::model::{Model, Obs, StartLaw};

/// Law of `Y_{t:t+m-1}` given `X_{l:n}`, lexicographic over `Y^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDistribution {
    pub t: usize,
    pub l: usize,
    pub n: usize,
    pub m: usize,
    pub probs: Vec<f64>,
    /// Length of the stored path when `n` is a truncation of it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated_at: Option<usize>,
}

impl BlockDistribution {
    /// Marginal over the first `m'` coordinates.
    pub fn marginalize_to(&self, m2: usize, n_states: usize) -> BlockDistribution {
        let drop = n_states.pow((self.m - m2) as u32);
        let probs = self.probs.chunks(drop).map(|c| c.iter().sum()).collect();
        BlockDistribution { m: m2, probs, ..self.clone() }
    }
}

/// Decodes a lexicographic block index into its state sequence.
pub fn block_states(mut index: usize, m: usize, n_states: usize) -> Vec<usize> {
    let mut v = vec![0; m];
    for slot in v.iter_mut().rev() {
        *slot = index % n_states;
        index /= n_states;
    }
    v
}

struct Dfs<'c, 'a> {
    ctx: &'c PathContext<'a>,
    k: usize,
    t: usize,
    n: usize,
    m: usize,
    cells: usize,
    beta_n_end: Option<&'c [f64]>,
    out: Vec<f64>,
}

impl Dfs<'_, '_> {
    fn model(&self) -> &Model {
        self.ctx.model
    }

    /// Time of block coordinate `d` (0-based).
    fn time(&self, d: usize) -> usize {
        self.t + d
    }

    /// Extends a path observed inside the window.
    fn inside(&mut self, d: usize, prev: usize, weight: f64, index: usize) {
        let time = self.time(d);
        let end_inside = (self.t + self.m - 1).min(self.n);
        if time == end_inside {
            let beta = self.beta_n_end.expect("backward vector at block end");
            let w = weight + beta[prev];
            if d + 1 == self.m {
                self.out[index] = w;
            } else {
                let mut cells = vec![LOG_ZERO; self.cells];
                cells[self.model().continuation_cell(self.ctx.obs(self.n))] = w;
                self.beyond(d, prev, cells, index);
            }
            return;
        }
        let step = self.ctx.step(time);
        for j in 0..self.k {
            let w = weight + step[prev * self.k + j];
            if w == LOG_ZERO {
                continue;
            }
            self.inside(d + 1, j, w, index * self.k + j);
        }
    }

    /// Extends past the last observation, tracking unobserved cells.
    fn beyond(&mut self, d: usize, prev: usize, cells: Vec<f64>, index: usize) {
        if d + 1 == self.m {
            self.out[index] = log_sum_exp(cells.iter().copied());
            return;
        }
        for j in 0..self.k {
            let next = step_cells(self.model(), &cells, prev, j);
            if next.iter().all(|&v| v == LOG_ZERO) {
                continue;
            }
            self.beyond(d + 1, j, next, index * self.k + j);
        }
    }
}

fn step_cells(model: &Model, cells: &[f64], i: usize, j: usize) -> Vec<f64> {
    let c = cells.len();
    (0..c)
        .map(|c2| log_sum_exp((0..c).map(|c1| cells[c1] + model.continuation_log(c1, i, c2, j))))
        .collect()
}

impl PathContext<'_> {
    /// Law of `Y_{t:t+m-1}` given the window of `fwd`.
    ///
    /// `bwd` must cover `t..=n` whenever `t <= n`.
    pub fn block(&self, fwd: &Forward, bwd: Option<&Backward>, t: usize, m: usize) -> Result<BlockDistribution> {
        self.block_until(fwd, bwd, t, m, fwd.n)
    }

    /// As [`PathContext::block`] with the window cut at `n <= fwd.n`. The
    /// filter does not depend on the window end, so one forward pass serves
    /// every `n`.
    pub fn block_until(
        &self,
        fwd: &Forward,
        bwd: Option<&Backward>,
        t: usize,
        m: usize,
        n: usize,
    ) -> Result<BlockDistribution> {
        let l = fwd.l;
        if n > fwd.n || n < l {
            return Err(Error::InvalidWindow(format!("window end {n} outside the filtered range {l}..={}", fwd.n)));
        }
        if m == 0 {
            return Err(Error::InvalidArgument("block length must be at least 1".into()));
        }
        if m > self.m_cap {
            return Err(Error::BlockTooLong { m, cap: self.m_cap });
        }
        if t < l {
            return Err(Error::InvalidWindow(format!("block start {t} precedes window start {l}")));
        }
        let k = self.n_states();
        let mut out = vec![LOG_ZERO; k.pow(m as u32)];
        let cells = self.model.continuation_cells();
        if t <= n {
            let bwd = bwd.ok_or_else(|| Error::InvalidArgument("backward pass required inside the window".into()))?;
            if bwd.lo > t || bwd.n != n {
                return Err(Error::InvalidArgument("backward pass does not cover the block".into()));
            }
            let e = (t + m - 1).min(n);
            let mut dfs = Dfs { ctx: self, k, t, n, m, cells, beta_n_end: Some(bwd.at(e)), out };
            let alpha = fwd.at(t);
            for (v1, &a) in alpha.iter().enumerate() {
                if a > LOG_ZERO {
                    dfs.inside(0, v1, a, v1);
                }
            }
            out = dfs.out;
        } else {
            // Law of (cell, Y) at time t, propagated from the filter at n.
            let mut w = vec![vec![LOG_ZERO; k]; cells];
            let c_n = self.model.continuation_cell(self.obs(n));
            w[c_n].copy_from_slice(fwd.at(n));
            for _ in n..t {
                let mut next = vec![vec![LOG_ZERO; k]; cells];
                for (c2, row) in next.iter_mut().enumerate() {
                    for (j, slot) in row.iter_mut().enumerate() {
                        *slot = log_sum_exp(
                            (0..cells)
                                .flat_map(|c1| (0..k).map(move |i| (c1, i)))
                                .map(|(c1, i)| w[c1][i] + self.model.continuation_log(c1, i, c2, j)),
                        );
                    }
                }
                w = next;
            }
            let mut dfs = Dfs { ctx: self, k, t, n, m, cells, beta_n_end: None, out };
            #[allow(clippy::needless_range_loop)]
            for v1 in 0..k {
                let start: Vec<f64> = (0..cells).map(|c| w[c][v1]).collect();
                if start.iter().all(|&v| v == LOG_ZERO) {
                    continue;
                }
                dfs.beyond(0, v1, start, v1);
            }
            out = dfs.out;
        }
        if normalize(&mut out) == LOG_ZERO {
            return Err(Error::ZeroLikelihood { time: t });
        }
        Ok(BlockDistribution { t, l, n, m, probs: out.iter().map(|v| v.exp()).collect(), truncated_at: None })
    }

    /// Convenience wrapper: `nu^t_{l:n;m}` seeded by `law`.
    pub fn smoothing_block(&self, l: usize, n: usize, t: usize, m: usize, law: &StartLaw) -> Result<BlockDistribution> {
        let prior = self.prior(law, l)?;
        let fwd = self.forward(l, n, &prior)?;
        let bwd = if t <= n { Some(self.backward(t.max(l), n)?) } else { None };
        self.block(&fwd, bwd.as_ref(), t, m)
    }
}

/// `nu^t_{l:n;m}[x_{l:n}]`: law of `Y_{t:t+m-1}` given `X_{l:n}`, where the
/// window `(l, n)` is taken from the full path `xs` (1-based, inclusive).
pub fn smoothing_block(
    model: &Model,
    xs: &[Obs],
    window: (usize, usize),
    t: usize,
    m: usize,
    law: &StartLaw,
) -> Result<BlockDistribution> {
    let ctx = PathContext::new(model, xs)?;
    ctx.smoothing_block(window.0, window.1, t, m, law)
}
