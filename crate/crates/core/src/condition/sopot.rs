use rand::Rng;
use serde::Serialize;

use crate::condition::certificate::{symbols_to_obs, ForgettingCertificate};
use crate::condition::cells::ENUMERATION_CAP;
use crate::error::{Error, Result};
use crate::model::{block_transition_matrix, Model, Obs};

#[derive(Debug, Clone, Serialize)]
pub struct SopotOutcome {
    /// Smallest ratio `p_il(x_{1:t}) p_lj(x_{t:r}) / p_ij(x_{1:r})` seen.
    pub lambda: f64,
    pub points: usize,
    pub exact: bool,
}

fn min_ratio(model: &Model, xs: &[Obs], cert: &ForgettingCertificate, t: usize, l: usize) -> Result<f64> {
    let k = model.n_states();
    let head = block_transition_matrix(model, &xs[..t])?;
    let tail = block_transition_matrix(model, &xs[t - 1..])?;
    let full = block_transition_matrix(model, xs)?;
    let mut lam = f64::INFINITY;
    for &i in &cert.y_plus.proj1 {
        for &j in &cert.y_plus.proj2 {
            let num = head[i * k + l] + tail[l * k + j];
            let ratio = (num - full[i * k + j]).exp();
            lam = lam.min(if num == f64::NEG_INFINITY { 0.0 } else { ratio });
        }
    }
    Ok(lam)
}

/// Routing condition through state `l` at block time `t` (1-based,
/// `2 <= t <= r - 1`). Finite `E` is scanned fully, otherwise `samples`
/// members are drawn. A zero ratio is a failure.
pub fn check_sopot<R: Rng + ?Sized>(
    model: &Model,
    cert: &ForgettingCertificate,
    t: usize,
    l: usize,
    samples: usize,
    rng: &mut R,
) -> Result<SopotOutcome> {
    if t < 2 || t + 1 > cert.r {
        return Err(Error::InvalidArgument(format!("split time {t} must lie in 2..={}", cert.r - 1)));
    }
    if l >= model.n_states() {
        return Err(Error::InvalidArgument(format!("state {l} out of range")));
    }
    let (points, exact, lambda) = if let Some(members) = cert.finite_members(model, ENUMERATION_CAP) {
        let mut lam = f64::INFINITY;
        for x in &members {
            lam = lam.min(min_ratio(model, &symbols_to_obs(x), cert, t, l)?);
        }
        (members.len(), true, lam)
    } else {
        let mut lam = f64::INFINITY;
        for _ in 0..samples {
            let xs = cert.sample_member(model, rng)?;
            lam = lam.min(min_ratio(model, &xs, cert, t, l)?);
        }
        (samples, false, lam)
    };
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::Condition(format!("routing through state {l} at time {t} has a zero ratio")));
    }
    Ok(SopotOutcome { lambda, points, exact })
}
