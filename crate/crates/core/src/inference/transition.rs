//! Conditional transition matrices `F_{k;m}` and the Doeblin matrix `U`.

use serde::{Deserialize, Serialize};

use crate::condition::ForgettingCertificate;
use crate::error::{Error, Result};
use crate::inference::engine::PathContext;
use crate::logspace::{normalize, LOG_ZERO};
use crate::model::{block_transition_matrix, Model, Obs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransitionKind {
    U { r: usize },
    F { k: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalTransition {
    pub kind: TransitionKind,
    /// Length of the conditioning observation slice.
    pub window_len: usize,
    /// Row-major rows; row `u` is a law over `Y^m` (lexicographic).
    pub matrix: Vec<Vec<f64>>,
    /// Rows whose conditioning event has zero likelihood.
    pub fallback_rows: Vec<usize>,
    /// The fallback law used for `U`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
}

/// `F_{k;m}[x_{s:n}](u, v) = P(Y_{s+k:s+k+m-1} = v | X_{s:n}, Y_s = u)` for
/// the slice `xs = x_{s:n}`. Rows with zero likelihood are uniform and
/// listed in `fallback_rows`.
pub fn f_matrix(model: &Model, xs: &[Obs], k: usize, m: usize) -> Result<ConditionalTransition> {
    let ctx = PathContext::new(model, xs)?;
    f_matrix_in(&ctx, 1, xs.len(), k, m)
}

/// `F_{k;m}` over the window `s..=n` of a context path.
pub fn f_matrix_in(ctx: &PathContext, s: usize, n: usize, k: usize, m: usize) -> Result<ConditionalTransition> {
    let ns = ctx.n_states();
    let t = s + k;
    let bwd = if t <= n { Some(ctx.backward(t, n)?) } else { None };
    let width = ns.pow(m as u32);
    let mut matrix = Vec::with_capacity(ns);
    let mut fallback_rows = Vec::new();
    for u in 0..ns {
        let mut prior = vec![LOG_ZERO; ns];
        prior[u] = 0.0;
        let row = match ctx.forward(s, n, &prior) {
            Ok(fwd) => ctx.block(&fwd, bwd.as_ref(), t, m)?.probs,
            Err(Error::ZeroLikelihood { .. }) => {
                fallback_rows.push(u);
                vec![1.0 / width as f64; width]
            }
            Err(e) => return Err(e),
        };
        matrix.push(row);
    }
    Ok(ConditionalTransition {
        kind: TransitionKind::F { k, m },
        window_len: n - s + 1,
        matrix,
        fallback_rows,
        lambda: None,
    })
}

/// Builds `U` from the block log-matrix `log p_ij(x_{1:r})`, the normalized
/// backward vector at the block end, and the second projection of `Y+`.
pub fn u_from_parts(
    block_log: &[f64],
    beta_end: &[f64],
    proj2: &[usize],
    r: usize,
    window_len: usize,
) -> Result<ConditionalTransition> {
    let ns = beta_end.len();
    let mut lam = vec![LOG_ZERO; ns];
    for &j in proj2 {
        lam[j] = beta_end[j];
    }
    if normalize(&mut lam) == LOG_ZERO {
        return Err(Error::InvalidWindow(
            "the observations after the block are impossible from every admissible state".into(),
        ));
    }
    let lambda: Vec<f64> = lam.iter().map(|v| v.exp()).collect();
    let mut matrix = Vec::with_capacity(ns);
    let mut fallback_rows = Vec::new();
    for i in 0..ns {
        let mut row: Vec<f64> = (0..ns).map(|j| block_log[i * ns + j] + beta_end[j]).collect();
        if normalize(&mut row) == LOG_ZERO {
            fallback_rows.push(i);
            matrix.push(lambda.clone());
        } else {
            matrix.push(row.iter().map(|v| v.exp()).collect());
        }
    }
    Ok(ConditionalTransition {
        kind: TransitionKind::U { r },
        window_len,
        matrix,
        fallback_rows,
        lambda: Some(lambda),
    })
}

/// `U[x_{1:n}]` for a slice whose first `r` observations form an `E`-block.
pub fn u_matrix(model: &Model, xs: &[Obs], cert: &ForgettingCertificate) -> Result<ConditionalTransition> {
    let r = cert.r;
    if xs.len() < r {
        return Err(Error::InvalidWindow(format!("U needs at least r = {r} observations, got {}", xs.len())));
    }
    if !cert.contains(model, &xs[..r]) {
        return Err(Error::Condition("the leading block of the window is not in E".into()));
    }
    let ctx = PathContext::new(model, xs)?;
    let block = block_transition_matrix(model, &xs[..r])?;
    let bwd = ctx.backward(r, xs.len())?;
    u_from_parts(&block, bwd.at(r), &cert.y_plus.proj2, r, xs.len())
}
