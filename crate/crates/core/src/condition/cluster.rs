//! Clusters of states sharing an emission-support cell, and the
//! certificate they induce.

use serde::Serialize;

use crate::condition::cells::{cells_y_plus, n0_over_cells, N0_SAMPLES};
use crate::condition::certificate::{Ball, BlockSet, Coordinate, ForgettingCertificate, Provenance};
use crate::condition::primitive::{check_primitive, power_is_positive, submatrix};
use crate::error::{Error, Result};
use crate::model::{stationary, Hmm, Model, Obs, ObsSpace};
use crate::rng::seeded_rng;

/// Radius of the balls around continuous witnesses that bound `E`.
pub const WITNESS_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    pub states: Vec<usize>,
    /// A point of the cell whose support signature is exactly `states`.
    pub witness: Obs,
    /// Symbols of the cell (finite alphabets only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<Vec<usize>>,
    /// Primitivity exponent of the transition matrix restricted to the cluster.
    pub exponent: Option<usize>,
    /// States with a positive transition into the cluster.
    pub feeders: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub clusters: Vec<Cluster>,
    /// Indices into `clusters` whose restricted matrix is primitive.
    pub passing: Vec<usize>,
    /// Witness points whose cell could not be pinned down.
    pub undetermined: Vec<String>,
}

impl ClusterReport {
    pub fn containing(&self, state: usize) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.states.contains(&state))
    }
}

pub fn as_hmm(model: &Model) -> Result<&Hmm> {
    match model {
        Model::Hmm(m) => Ok(m),
        _ => Err(Error::InvalidArgument("cluster analysis needs a hidden Markov model".into())),
    }
}

pub fn feeders(trans: &[Vec<f64>], states: &[usize]) -> Vec<usize> {
    (0..trans.len()).filter(|&i| states.iter().any(|&j| trans[i][j] > 0.0)).collect()
}

fn interior_signature(model: &Model, w: &[f64]) -> Option<Vec<usize>> {
    let sig = model.admissible_states(&Obs::Point(w.to_vec()));
    for a in 0..w.len() {
        let h = 1e-6 * (1.0 + w[a].abs());
        for s in [-h, h] {
            let mut p = w.to_vec();
            p[a] += s;
            if model.admissible_states(&Obs::Point(p)) != sig {
                return None;
            }
        }
    }
    Some(sig)
}

pub fn find_clusters(model: &Model) -> Result<ClusterReport> {
    let hmm = as_hmm(model)?;
    let trans = hmm.trans();
    let mut cells: Vec<(Vec<usize>, Obs, Option<Vec<usize>>)> = Vec::new();
    let mut undetermined = Vec::new();
    match model.obs_space() {
        ObsSpace::Finite(k) => {
            for s in 0..k {
                let sig = model.admissible_states(&Obs::Symbol(s));
                if sig.is_empty() {
                    continue;
                }
                match cells.iter_mut().find(|c| c.0 == sig) {
                    Some(c) => c.2.as_mut().expect("finite cell").push(s),
                    None => cells.push((sig, Obs::Symbol(s), Some(vec![s]))),
                }
            }
        }
        ObsSpace::Euclidean(d) => {
            let mut witnesses = hmm.support_witnesses.clone();
            if hmm.emissions().iter().all(|e| e.has_full_support()) && witnesses.is_empty() {
                witnesses.push(vec![0.0; d]);
            }
            for w in witnesses {
                match interior_signature(model, &w) {
                    Some(sig) if !sig.is_empty() => {
                        if !cells.iter().any(|c| c.0 == sig) {
                            cells.push((sig, Obs::Point(w), None));
                        }
                    }
                    Some(_) => undetermined.push(format!("{w:?} lies outside every support")),
                    None => undetermined.push(format!("{w:?} is not an interior point of its cell")),
                }
            }
            let covered = (0..hmm.n_states()).all(|i| cells.iter().any(|c| c.0.contains(&i)));
            if !covered {
                undetermined.push("some states are in no exhibited cell; supply more support witnesses".into());
            }
        }
    }
    let clusters: Vec<Cluster> = cells
        .into_iter()
        .map(|(states, witness, cell)| {
            let exponent = check_primitive(&submatrix(trans, &states)).exponent;
            let feeders = feeders(trans, &states);
            Cluster { states, witness, cell, exponent, feeders }
        })
        .collect();
    let passing = (0..clusters.len()).filter(|&c| clusters[c].exponent.is_some()).collect();
    Ok(ClusterReport { clusters, passing, undetermined })
}

/// Coordinate admitting the cell of `cluster`, bounded by a ball around
/// its witness on continuous spaces.
pub fn cell_coordinate(cluster: &Cluster) -> Coordinate {
    let c = Coordinate::signature(cluster.states.clone());
    match &cluster.witness {
        Obs::Point(w) => c.within(Ball { center: w.clone(), radius: WITNESS_RADIUS }),
        Obs::Symbol(_) => c,
    }
}

fn ball_of(cluster: &Cluster) -> Option<Ball> {
    cluster.witness.point().map(|w| Ball { center: w.to_vec(), radius: WITNESS_RADIUS })
}

/// Certificate with `r = R + 2`, `E = (touches Y_C) x cell(C)^(R+1)` and
/// `Y+ = Y_C x C`.
pub fn certificate_from_cluster(model: &Model, states: &[usize], exponent: usize) -> Result<ForgettingCertificate> {
    let hmm = as_hmm(model)?;
    let report = find_clusters(model)?;
    let mut sorted = states.to_vec();
    sorted.sort_unstable();
    let cluster = report
        .clusters
        .iter()
        .find(|c| c.states == sorted)
        .ok_or_else(|| Error::Condition(format!("{sorted:?} is not a cluster with an exhibited cell")))?;
    if exponent == 0 || !power_is_positive(&submatrix(hmm.trans(), &sorted), exponent) {
        return Err(Error::Condition(format!(
            "the transition matrix restricted to {sorted:?} has no positive power {exponent}"
        )));
    }
    let mut first = Coordinate::touches(cluster.feeders.clone());
    if let Some(b) = ball_of(cluster) {
        first = first.within(b);
    }
    let mut coords = vec![first];
    coords.extend(std::iter::repeat_n(cell_coordinate(cluster), exponent + 1));
    let y_plus = cells_y_plus(hmm.trans(), &coords)?;
    let expected = crate::condition::yplus::YPlusSet::product(coords.len(), &cluster.feeders, &sorted);
    if y_plus != expected {
        return Err(Error::Condition("cell product does not yield Y_C x C".into()));
    }
    let mut rng = seeded_rng(0x005e_edc1_u64);
    let (n0, points, exact) = n0_over_cells(model, &coords, &y_plus, N0_SAMPLES, &mut rng)?;
    Ok(ForgettingCertificate::new(
        coords.len(),
        BlockSet::Cells { coords },
        y_plus,
        n0,
        Provenance::ClusterLemma,
        Some(sorted),
        points,
        exact,
    ))
}

/// Stationary probability of a finite cell.
fn cell_mass(hmm: &Hmm, pi: &[f64], cell: &[usize]) -> f64 {
    hmm.emissions()
        .iter()
        .zip(pi)
        .map(|(e, p)| p * cell.iter().map(|&s| e.log_density(&Obs::Symbol(s)).exp()).sum::<f64>())
        .sum()
}

/// Picks a passing cluster and builds its certificate: on finite alphabets
/// the one whose cell is most likely under the stationary law (then the
/// smallest exponent); on continuous spaces the largest cluster.
pub fn certify_by_cluster(model: &Model) -> Result<ForgettingCertificate> {
    let hmm = as_hmm(model)?;
    let report = find_clusters(model)?;
    if report.passing.is_empty() {
        return Err(Error::Condition("no cluster has a primitive restricted transition matrix".into()));
    }
    let pi = stationary::stationary_distribution(model)?;
    let score = |c: &Cluster| -> (f64, i64) {
        let primary = match &c.cell {
            Some(cell) => cell_mass(hmm, &pi, cell),
            None => c.states.len() as f64,
        };
        (primary, -(c.exponent.unwrap_or(usize::MAX) as i64))
    };
    let best = report
        .passing
        .iter()
        .map(|&i| &report.clusters[i])
        .fold(None::<&Cluster>, |acc, c| match acc {
            Some(a) if score(a) >= score(c) => Some(a),
            _ => Some(c),
        })
        .expect("non-empty passing set");
    certificate_from_cluster(model, &best.states, best.exponent.expect("passing"))
}
