//! Bounds on `|| nu^t_{l:n;m} - nu^t_{s:n;m} ||_TV`.
//!
//! The coarse bound is `2 rho^{kappa*}`. The sharp bound replaces each
//! `rho` by the Dobrushin coefficient of the matrix `U` actually met on that
//! block, and each non-`E` block by 1.

use crate::condition::ForgettingCertificate;
use crate::error::{Error, Result};
use crate::forgetting::dobrushin::dobrushin;
use crate::forgetting::kappa::{block_in_e, kappa_star, rho_envelope};
use crate::inference::{u_from_parts, Backward, PathContext};
use crate::model::{block_transition_matrix, Model, Obs};

/// Block log-matrices `log p_ij(x_{b:b+r-1})` of every `E`-block of a path,
/// indexed by `b - 1`.
pub fn e_block_matrices(cert: &ForgettingCertificate, model: &Model, xs: &[Obs]) -> Result<Vec<Option<Vec<f64>>>> {
    let r = cert.r;
    let count = (xs.len() + 1).saturating_sub(r);
    (1..=count)
        .map(|b| {
            if block_in_e(cert, model, xs, b) {
                block_transition_matrix(model, &xs[b - 1..b - 1 + r]).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect()
}

/// `delta(U_b)` for every block start `b` in `s..` whose block ends by
/// `bwd.n`; non-`E` blocks get 1.
pub fn delta_profile(
    cert: &ForgettingCertificate,
    blocks: &[Option<Vec<f64>>],
    bwd: &Backward,
    s: usize,
) -> Result<Vec<f64>> {
    let r = cert.r;
    let n = bwd.n;
    let last = (n + 1).saturating_sub(r);
    (s..last + 1)
        .map(|b| match blocks.get(b - 1).and_then(Option::as_ref) {
            Some(block_log) if b + r > bwd.lo => {
                let u = u_from_parts(block_log, bwd.at(b + r - 1), &cert.y_plus.proj2, r, n - b + 1)?;
                dobrushin(&u.matrix)
            }
            _ => Ok(1.0),
        })
        .collect()
}

/// `min(2, min_k 2 prod_u delta(U_{s+k+u r'}))` from a profile built at `s`.
pub fn envelope_from_profile(profile: &[f64], r_prime: usize, s: usize, t: usize) -> f64 {
    let mut best: f64 = 2.0;
    for k in 0..r_prime {
        let tau = (t - s).saturating_sub(k) / r_prime;
        let mut prod = 2.0;
        for u in 0..tau {
            prod *= profile.get(k + u * r_prime).copied().unwrap_or(1.0);
        }
        best = best.min(prod);
    }
    best
}

/// Sharp bound on the distance between the block laws given `x_{l:n}` and
/// given `x_{s:n}` at time `t`, for any `l <= s`. Never larger than
/// `2 rho^{kappa*(x_{s:t})}`.
pub fn theoretical_envelope(
    cert: &ForgettingCertificate,
    model: &Model,
    xs: &[Obs],
    s: usize,
    t: usize,
    n: usize,
) -> Result<f64> {
    if s == 0 || s > t || n > xs.len() {
        return Err(Error::InvalidWindow(format!("need 1 <= s <= t and n within the path, got s={s}, t={t}, n={n}")));
    }
    if t < s + cert.r_prime() {
        return Ok(2.0);
    }
    let ctx = PathContext::new(model, xs)?;
    let lo = (s + cert.r_prime()).min(n);
    let bwd = ctx.backward(lo, n)?;
    let blocks = e_block_matrices(cert, model, &xs[..n])?;
    let profile = delta_profile(cert, &blocks, &bwd, s)?;
    Ok(envelope_from_profile(&profile, cert.r_prime(), s, t))
}

/// `2 rho^{kappa*(x_{s:t})}`.
pub fn rho_bound(cert: &ForgettingCertificate, model: &Model, xs: &[Obs], s: usize, t: usize) -> f64 {
    rho_envelope(cert.rho, kappa_star(cert, model, xs, s, t))
}
