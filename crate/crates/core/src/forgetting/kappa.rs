use serde::Serialize;

use crate::condition::ForgettingCertificate;
use crate::error::{Error, Result};
use crate::model::{Model, Obs};

/// Counts of `E`-blocks in almost non-overlapping positions of `x_{s:t}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KappaCount {
    /// `kappa_k` for offsets `k = 0..r'`.
    pub k_offsets: Vec<usize>,
    pub tau: Vec<usize>,
    /// Count from the right end, equal to `kappa_k` at `k = (t - s) mod r'`.
    pub kappa_bar: usize,
    pub r_prime: usize,
}

impl KappaCount {
    pub fn max(&self) -> usize {
        self.k_offsets.iter().copied().max().unwrap_or(0)
    }
}

/// Membership of the block `x_{a : a + r - 1}` (1-based) in `E`.
pub fn block_in_e(cert: &ForgettingCertificate, model: &Model, xs: &[Obs], a: usize) -> bool {
    a >= 1 && a + cert.r - 1 <= xs.len() && cert.contains(model, &xs[a - 1..a - 1 + cert.r])
}

/// `kappa_k(x_{s:t})` for every offset, on a path `xs` indexed from 1.
pub fn kappa(cert: &ForgettingCertificate, model: &Model, xs: &[Obs], s: usize, t: usize) -> Result<KappaCount> {
    let rp = cert.r_prime();
    if s == 0 || t > xs.len() || t < s + rp {
        return Err(Error::InvalidWindow(format!(
            "window {s}:{t} is shorter than r = {} or outside the path",
            cert.r
        )));
    }
    let mut k_offsets = Vec::with_capacity(rp);
    let mut tau = Vec::with_capacity(rp);
    for k in 0..rp {
        let tk = (t - s).saturating_sub(k) / rp;
        tau.push(tk);
        k_offsets.push((0..tk).filter(|&u| block_in_e(cert, model, xs, s + k + u * rp)).count());
    }
    let tau0 = tau[0];
    let kappa_bar = (0..tau0).filter(|&u| block_in_e(cert, model, xs, t - (u + 1) * rp)).count();
    Ok(KappaCount { k_offsets, tau, kappa_bar, r_prime: rp })
}

/// `max_k kappa_k(x_{s:t})`, zero on windows shorter than a block.
pub fn kappa_star(cert: &ForgettingCertificate, model: &Model, xs: &[Obs], s: usize, t: usize) -> usize {
    kappa(cert, model, xs, s, t).map(|k| k.max()).unwrap_or(0)
}

/// `2 rho^kappa`.
pub fn rho_envelope(rho: f64, kappa: usize) -> f64 {
    2.0 * rho.powi(kappa.min(i32::MAX as usize) as i32)
}
