//! Shared machinery for certificates whose `E` is a product of support cells.

use rand::Rng;

use crate::condition::certificate::{n0_of_block, symbols_to_obs, BlockSet, CellConstraint, Coordinate};
use crate::condition::yplus::YPlusSet;
use crate::error::{Error, Result};
use crate::model::Model;

/// Default sample size behind continuous `n0` estimates.
pub const N0_SAMPLES: usize = 10_000;
/// Largest finite `E` scanned exhaustively.
pub const ENUMERATION_CAP: usize = 1 << 20;

/// `Y+` of a product of signature cells by boolean path products; the
/// first coordinate is unconstrained since its factor is excluded.
pub fn cells_y_plus(trans: &[Vec<f64>], coords: &[Coordinate]) -> Result<YPlusSet> {
    let k = trans.len();
    let mut reach: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| i == j).collect()).collect();
    for c in &coords[1..] {
        let CellConstraint::Signature { states } = &c.constraint else {
            return Err(Error::InvalidArgument("only the first coordinate may be a non-signature cell".into()));
        };
        reach = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| states.contains(&j) && (0..k).any(|h| reach[i][h] && trans[h][j] > 0.0))
                    .collect()
            })
            .collect();
    }
    let pairs = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|&(i, j)| reach[i][j]).collect();
    Ok(YPlusSet::from_pairs(coords.len(), pairs))
}

/// `n0` over a cell product: exact on finite alphabets, otherwise twice the
/// worst ratio over sampled members. Returns `(n0, points, exact)`.
pub fn n0_over_cells<R: Rng + ?Sized>(
    model: &Model,
    coords: &[Coordinate],
    y_plus: &YPlusSet,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, usize, bool)> {
    let probe = crate::condition::certificate::ForgettingCertificate::new(
        coords.len(),
        BlockSet::Cells { coords: coords.to_vec() },
        y_plus.clone(),
        1.0,
        crate::condition::certificate::Provenance::UserAsserted,
        None,
        0,
        false,
    );
    if model.is_finite_obs() {
        let members = probe
            .finite_members(model, ENUMERATION_CAP)
            .ok_or_else(|| Error::InvalidArgument("E is too large to enumerate".into()))?;
        if members.is_empty() {
            return Err(Error::Condition("E has no members".into()));
        }
        let mut n0: f64 = 1.0;
        for x in &members {
            n0 = n0.max(n0_of_block(model, &symbols_to_obs(x), y_plus)?);
        }
        return Ok((n0, members.len(), true));
    }
    let mut n0: f64 = 1.0;
    for _ in 0..samples {
        let xs = probe.sample_member(model, rng)?;
        n0 = n0.max(n0_of_block(model, &xs, y_plus)?);
    }
    if !n0.is_finite() {
        return Err(Error::Condition("sampled block densities vanish on E".into()));
    }
    Ok((2.0 * n0, samples, false))
}
