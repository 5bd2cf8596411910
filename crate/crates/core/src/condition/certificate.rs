use std::collections::HashSet;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::condition::yplus::YPlusSet;
use crate::error::{Error, Result};
use crate::model::{block_transition_probs, Model, Obs, ObsSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Enumerated,
    ClusterLemma,
    PositiveRow,
    LmsmLemma,
    UserAsserted,
}

/// Which observations a coordinate of an `E`-block admits, by the set of
/// states whose emission support contains the observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellConstraint {
    Any,
    /// Support signature meets the listed states.
    Touches { states: Vec<usize> },
    /// Support signature equals the listed states.
    Signature { states: Vec<usize> },
}

/// Open Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.center.len()
            && x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < self.radius * self.radius
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.center.len();
        let dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let scale = self.radius * rng.random::<f64>().powf(1.0 / d as f64) / norm;
        self.center.iter().zip(&dir).map(|(c, v)| c + v * scale).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub constraint: CellConstraint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<Ball>,
}

impl Coordinate {
    pub fn any() -> Self {
        Coordinate { constraint: CellConstraint::Any, ball: None }
    }

    pub fn signature(states: Vec<usize>) -> Self {
        Coordinate { constraint: CellConstraint::Signature { states }, ball: None }
    }

    pub fn touches(states: Vec<usize>) -> Self {
        Coordinate { constraint: CellConstraint::Touches { states }, ball: None }
    }

    pub fn within(mut self, ball: Ball) -> Self {
        self.ball = Some(ball);
        self
    }

    pub fn admits(&self, model: &Model, x: &Obs) -> bool {
        if let Some(b) = &self.ball {
            match x.point() {
                Some(p) if b.contains(p) => {}
                _ => return false,
            }
        }
        match &self.constraint {
            CellConstraint::Any => true,
            CellConstraint::Touches { states } => {
                model.admissible_states(x).iter().any(|s| states.contains(s))
            }
            CellConstraint::Signature { states } => model.admissible_states(x) == *states,
        }
    }
}

/// The block set `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockSet {
    /// Explicit list of symbol blocks.
    Explicit { members: Vec<Vec<usize>> },
    /// Product of coordinate sets.
    Cells { coords: Vec<Coordinate> },
}

/// A witnessed `(r, E, Y+, n0, rho)` tuple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForgettingCertificate {
    pub r: usize,
    pub e: BlockSet,
    pub y_plus: YPlusSet,
    pub n0: f64,
    pub rho: f64,
    pub provenance: Provenance,
    /// Cluster the certificate was built from, when applicable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<Vec<usize>>,
    /// Conditions taken on trust rather than checked.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub asserted: Vec<String>,
    /// Number of `E`-points behind `n0` and whether it is exact.
    pub n0_points: usize,
    pub n0_exact: bool,
    #[serde(skip)]
    index: OnceLock<HashSet<Vec<usize>>>,
}

pub fn rho_from_n0(n0: f64) -> f64 {
    1.0 - 1.0 / (n0 * n0)
}

impl ForgettingCertificate {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r: usize,
        e: BlockSet,
        y_plus: YPlusSet,
        n0: f64,
        provenance: Provenance,
        cluster: Option<Vec<usize>>,
        n0_points: usize,
        n0_exact: bool,
    ) -> Self {
        ForgettingCertificate {
            r,
            e,
            y_plus,
            n0,
            rho: rho_from_n0(n0),
            provenance,
            cluster,
            asserted: Vec::new(),
            n0_points,
            n0_exact,
            index: OnceLock::new(),
        }
    }

    /// Parses a certificate and checks its internal consistency.
    pub fn from_json(json: &str) -> Result<Self> {
        let cert: ForgettingCertificate = serde_json::from_str(json)?;
        if cert.r < 2 || cert.n0.is_nan() || cert.n0 < 1.0 || !(0.0..1.0).contains(&cert.rho) {
            return Err(Error::Condition("certificate needs r > 1, n0 >= 1 and rho in [0, 1)".into()));
        }
        if (cert.rho - rho_from_n0(cert.n0)).abs() > 1e-12 {
            return Err(Error::Condition("certificate rho does not equal 1 - n0^-2".into()));
        }
        Ok(cert)
    }

    pub fn r_prime(&self) -> usize {
        self.r - 1
    }

    fn explicit_index(&self) -> &HashSet<Vec<usize>> {
        self.index.get_or_init(|| match &self.e {
            BlockSet::Explicit { members } => members.iter().cloned().collect(),
            BlockSet::Cells { .. } => HashSet::new(),
        })
    }

    /// Membership of `xs` (length `r`) in `E`.
    pub fn contains(&self, model: &Model, xs: &[Obs]) -> bool {
        if xs.len() != self.r {
            return false;
        }
        match &self.e {
            BlockSet::Explicit { .. } => {
                let key: Option<Vec<usize>> = xs.iter().map(Obs::symbol).collect();
                key.is_some_and(|k| self.explicit_index().contains(&k))
            }
            BlockSet::Cells { coords } => coords.iter().zip(xs).all(|(c, x)| c.admits(model, x)),
        }
    }

    /// All members of `E` for finite observation spaces, up to `cap`.
    pub fn finite_members(&self, model: &Model, cap: usize) -> Option<Vec<Vec<usize>>> {
        match &self.e {
            BlockSet::Explicit { members } => Some(members.clone()),
            BlockSet::Cells { coords } => {
                let ObsSpace::Finite(k) = model.obs_space() else { return None };
                let sets: Vec<Vec<usize>> = coords
                    .iter()
                    .map(|c| (0..k).filter(|&s| c.admits(model, &Obs::Symbol(s))).collect())
                    .collect();
                let total = sets.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.len()))?;
                if total > cap {
                    return None;
                }
                Some(cartesian(&sets))
            }
        }
    }

    /// Draws a member of `E`: uniformly among admitted symbols on finite
    /// alphabets, by rejection inside each coordinate's ball otherwise.
    pub fn sample_member<R: Rng + ?Sized>(&self, model: &Model, rng: &mut R) -> Result<Vec<Obs>> {
        let coords = match &self.e {
            BlockSet::Explicit { members } => {
                if members.is_empty() {
                    return Err(Error::Condition("the block set is empty".into()));
                }
                return Ok(symbols_to_obs(&members[rng.random_range(0..members.len())]));
            }
            BlockSet::Cells { coords } => coords,
        };
        coords
            .iter()
            .map(|c| {
                if let ObsSpace::Finite(k) = model.obs_space() {
                    let admitted: Vec<usize> = (0..k).filter(|&s| c.admits(model, &Obs::Symbol(s))).collect();
                    if admitted.is_empty() {
                        return Err(Error::Condition("a coordinate admits no symbol".into()));
                    }
                    return Ok(Obs::Symbol(admitted[rng.random_range(0..admitted.len())]));
                }
                let ball = c
                    .ball
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("cannot sample an unbounded coordinate".into()))?;
                for _ in 0..10_000 {
                    let x = Obs::Point(ball.sample(rng));
                    if c.admits(model, &x) {
                        return Ok(x);
                    }
                }
                Err(Error::Condition("rejection sampling found no point of the cell inside its ball".into()))
            })
            .collect()
    }
}

pub fn cartesian(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for s in sets {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                s.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// `max(max p, 1 / min p)` of `p_ij(x)` over the pairs of `y_plus`.
pub fn n0_of_block(model: &Model, xs: &[Obs], y_plus: &YPlusSet) -> Result<f64> {
    let m = block_transition_probs(model, xs)?;
    let k = model.n_states();
    let mut worst: f64 = 1.0;
    for &(i, j) in &y_plus.pairs {
        let p = m[i * k + j];
        worst = worst.max(p).max(1.0 / p);
    }
    Ok(worst)
}

pub fn symbols_to_obs(xs: &[usize]) -> Vec<Obs> {
    xs.iter().map(|&s| Obs::Symbol(s)).collect()
}

/// Checks a certificate on finite `E` (exhaustively) or on sampled points:
/// returns the first member whose `Y+` differs or whose densities leave
/// `[1/n0, n0]`.
pub fn verify_certificate<R: Rng + ?Sized>(
    model: &Model,
    cert: &ForgettingCertificate,
    samples: usize,
    rng: &mut R,
) -> Result<Option<String>> {
    let check = |xs: &[Obs]| -> Result<Option<String>> {
        let yp = crate::condition::yplus::enumerate_y_plus(model, xs)?;
        if yp.pairs != cert.y_plus.pairs {
            return Ok(Some(format!("Y+ at {xs:?} is {:?}", yp.pairs)));
        }
        let n0 = n0_of_block(model, xs, &cert.y_plus)?;
        if n0 > cert.n0 * (1.0 + 1e-12) {
            return Ok(Some(format!("block densities at {xs:?} need n0 = {n0}")));
        }
        Ok(None)
    };
    if let Some(members) = cert.finite_members(model, 1 << 20) {
        for mem in members {
            if let Some(msg) = check(&symbols_to_obs(&mem))? {
                return Ok(Some(msg));
            }
        }
        return Ok(None);
    }
    for _ in 0..samples {
        let xs = cert.sample_member(model, rng)?;
        if let Some(msg) = check(&xs)? {
            return Ok(Some(msg));
        }
    }
    Ok(None)
}
