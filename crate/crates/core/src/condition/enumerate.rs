//! Block-forgetting conditions for finite observation alphabets by exhaustive scan of `X^r`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::condition::certificate::{n0_of_block, symbols_to_obs, BlockSet, ForgettingCertificate, Provenance};
use crate::condition::yplus::{enumerate_y_plus, YPlusSet};
use crate::error::{Error, Result};
use crate::model::{stationary, Model, ObsSpace};

pub const DEFAULT_R_MAX: usize = 8;
const WITNESS_CAP: usize = 256;

/// Why a block fails to qualify for `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockVerdict {
    Product,
    Empty,
    NotProduct,
    /// Product, but no admissible first state charges it.
    Unreachable,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureWitness {
    pub x: Vec<usize>,
    pub verdict: BlockVerdict,
    pub pairs: Vec<(usize, usize)>,
    /// Pairs whose first state can co-occur with `x_1`.
    pub admissible_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RFailure {
    pub r: usize,
    pub blocks: usize,
    pub empty: usize,
    pub not_product: usize,
    pub unreachable: usize,
    pub witnesses: Vec<FailureWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureReport {
    pub r_max: usize,
    pub per_r: Vec<RFailure>,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum CheckOutcome {
    Certified(ForgettingCertificate),
    Failed(FailureReport),
}

impl CheckOutcome {
    pub fn certificate(self) -> Option<ForgettingCertificate> {
        match self {
            CheckOutcome::Certified(c) => Some(c),
            CheckOutcome::Failed(_) => None,
        }
    }
}

fn hidden_or_pair_chain(model: &Model) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    match model {
        Model::Finite(m) => Ok((m.trans_rows(), m.init().to_vec())),
        Model::Hmm(m) => Ok((m.trans().to_vec(), m.init().to_vec())),
        Model::Lmsm(_) => Err(Error::InvalidArgument("enumeration needs a finite observation alphabet".into())),
    }
}

/// The chain started from its initial law must settle into one closed class.
pub fn check_unichain(model: &Model) -> Result<()> {
    let (rows, init) = hidden_or_pair_chain(model)?;
    let reach = stationary::reachability(&rows);
    let classes = stationary::closed_classes(&rows);
    let hit: Vec<_> = classes
        .iter()
        .filter(|c| init.iter().enumerate().any(|(a, &p)| p > 0.0 && c.iter().any(|&b| reach[a][b])))
        .collect();
    if hit.len() != 1 {
        return Err(Error::NotIrreducible(format!(
            "{} closed classes are reachable from the initial law",
            hit.len()
        )));
    }
    Ok(())
}

fn decode(mut idx: usize, r: usize, k: usize) -> Vec<usize> {
    let mut v = vec![0; r];
    for slot in v.iter_mut().rev() {
        *slot = idx % k;
        idx /= k;
    }
    v
}

/// Smallest `r <= r_max` with a product-structured `Y+` shared by a
/// charged set of blocks, and the largest such set as `E`.
pub fn check_a1_a2_finite(model: &Model, r_max: usize) -> Result<CheckOutcome> {
    let ObsSpace::Finite(alphabet) = model.obs_space() else {
        return Err(Error::InvalidArgument("enumeration needs a finite observation alphabet".into()));
    };
    check_unichain(model)?;
    let mut per_r = Vec::new();
    for r in 2..=r_max.max(2) {
        let total = alphabet
            .checked_pow(r as u32)
            .filter(|&t| t <= 1 << 24)
            .ok_or_else(|| Error::InvalidArgument(format!("|X|^r too large at r = {r}")))?;
        let verdicts: Vec<(Vec<usize>, YPlusSet, YPlusSet, BlockVerdict)> = (0..total)
            .into_par_iter()
            .map(|idx| {
                let x = decode(idx, r, alphabet);
                let xs = symbols_to_obs(&x);
                let yp = enumerate_y_plus(model, &xs).expect("r >= 2");
                let adm = yp.restrict_rows(&model.admissible_states(&xs[0]));
                let verdict = if yp.is_empty() {
                    BlockVerdict::Empty
                } else if !yp.is_product() {
                    BlockVerdict::NotProduct
                } else if adm.is_empty() {
                    BlockVerdict::Unreachable
                } else {
                    BlockVerdict::Product
                };
                (x, yp, adm, verdict)
            })
            .collect();

        let mut groups: BTreeMap<Vec<(usize, usize)>, Vec<usize>> = BTreeMap::new();
        for (pos, v) in verdicts.iter().enumerate() {
            if v.3 == BlockVerdict::Product {
                groups.entry(v.1.pairs.clone()).or_default().push(pos);
            }
        }
        if !groups.is_empty() {
            let mut best: Option<(usize, f64, usize, &Vec<usize>)> = None;
            for members in groups.values() {
                let yp = &verdicts[members[0]].1;
                let mut n0: f64 = 1.0;
                for &pos in members {
                    n0 = n0.max(n0_of_block(model, &symbols_to_obs(&verdicts[pos].0), yp)?);
                }
                let better = match &best {
                    None => true,
                    Some((size, bn0, first, _)) => {
                        members.len() > *size
                            || (members.len() == *size && (n0 < *bn0 || (n0 == *bn0 && members[0] < *first)))
                    }
                };
                if better {
                    best = Some((members.len(), n0, members[0], members));
                }
            }
            let (_, n0, _, members) = best.expect("non-empty groups");
            let y_plus = verdicts[members[0]].1.clone();
            let e = BlockSet::Explicit { members: members.iter().map(|&p| verdicts[p].0.clone()).collect() };
            let cert = ForgettingCertificate::new(r, e, y_plus, n0, Provenance::Enumerated, None, members.len(), true);
            return Ok(CheckOutcome::Certified(cert));
        }

        let count = |v: BlockVerdict| verdicts.iter().filter(|w| w.3 == v).count();
        per_r.push(RFailure {
            r,
            blocks: total,
            empty: count(BlockVerdict::Empty),
            not_product: count(BlockVerdict::NotProduct),
            unreachable: count(BlockVerdict::Unreachable),
            witnesses: verdicts
                .iter()
                .filter(|v| v.3 != BlockVerdict::Empty)
                .take(WITNESS_CAP)
                .map(|v| FailureWitness {
                    x: v.0.clone(),
                    verdict: v.3,
                    pairs: v.1.pairs.clone(),
                    admissible_pairs: v.2.pairs.clone(),
                })
                .collect(),
        });
    }
    Ok(CheckOutcome::Failed(FailureReport { r_max, per_r }))
}
