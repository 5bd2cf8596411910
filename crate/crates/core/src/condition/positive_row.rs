//! Certificates for hidden Markov models whose transition matrix has a
//! strictly positive row.

use std::collections::VecDeque;

use serde::Serialize;

use crate::condition::cells::{cells_y_plus, n0_over_cells, N0_SAMPLES};
use crate::condition::certificate::{Ball, BlockSet, Coordinate, ForgettingCertificate, Provenance};
use crate::condition::cluster::{as_hmm, cell_coordinate, find_clusters, WITNESS_RADIUS};
use crate::condition::yplus::YPlusSet;
use crate::error::{Error, Result};
use crate::model::{stationary, Model};
use crate::rng::seeded_rng;

#[derive(Debug, Clone, Serialize)]
pub struct PositiveRowOutcome {
    pub holds: bool,
    pub positive_rows: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ForgettingCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn shortest_path(trans: &[Vec<f64>], from: usize, to: usize) -> Option<Vec<usize>> {
    let k = trans.len();
    let mut prev = vec![usize::MAX; k];
    let mut queue = VecDeque::from([from]);
    prev[from] = from;
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = vec![to];
            let mut v = to;
            while v != from {
                v = prev[v];
                path.push(v);
            }
            path.reverse();
            return Some(path);
        }
        for v in 0..k {
            if trans[u][v] > 0.0 && prev[v] == usize::MAX {
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}

/// Tests for a strictly positive row and, when one exists, extends a
/// block of support cells until every admissible first state connects to
/// that row's state; one more cell then makes `Y+` a product.
pub fn check_positive_row(model: &Model) -> Result<PositiveRowOutcome> {
    let hmm = as_hmm(model)?;
    let trans = hmm.trans();
    if !stationary::is_irreducible(trans) {
        return Err(Error::NotIrreducible("the hidden transition matrix is reducible".into()));
    }
    let positive_rows: Vec<usize> =
        (0..trans.len()).filter(|&i| trans[i].iter().all(|&p| p > 0.0)).collect();
    let Some(&anchor) = positive_rows.first() else {
        return Ok(PositiveRowOutcome { holds: false, positive_rows, certificate: None, note: None });
    };
    let report = find_clusters(model)?;
    let cell_of = |state: usize| report.containing(state).map(cell_coordinate);
    let Some(anchor_cell) = cell_of(anchor) else {
        return Ok(PositiveRowOutcome {
            holds: true,
            positive_rows,
            certificate: None,
            note: Some(format!("no exhibited cell contains state {anchor}")),
        });
    };
    let mut first = Coordinate::any();
    if let Some(w) = report.containing(anchor).and_then(|c| c.witness.point().map(<[f64]>::to_vec)) {
        first = first.within(Ball { center: w, radius: WITNESS_RADIUS });
    }
    let mut coords = vec![first, anchor_cell.clone()];
    for _ in 0..=trans.len() {
        let yp = cells_y_plus(trans, &coords)?;
        let stuck = yp.proj1.iter().copied().find(|&i| !yp.contains(i, anchor));
        let Some(i) = stuck else {
            coords.push(anchor_cell.clone());
            let y_plus = cells_y_plus(trans, &coords)?;
            if !y_plus.is_product() {
                return Err(Error::Condition("extended block did not reach a product Y+".into()));
            }
            let mut rng = seeded_rng(0x005e_ed90_u64);
            let (n0, points, exact) = n0_over_cells(model, &coords, &y_plus, N0_SAMPLES, &mut rng)?;
            let cert = ForgettingCertificate::new(
                coords.len(),
                BlockSet::Cells { coords },
                y_plus,
                n0,
                Provenance::PositiveRow,
                None,
                points,
                exact,
            );
            return Ok(PositiveRowOutcome { holds: true, positive_rows, certificate: Some(cert), note: None });
        };
        let j = yp.pairs.iter().find(|p| p.0 == i).expect("row in projection").1;
        let path = shortest_path(trans, j, anchor).expect("irreducible");
        for &s in &path[1..] {
            match cell_of(s) {
                Some(c) => coords.push(c),
                None => {
                    return Ok(PositiveRowOutcome {
                        holds: true,
                        positive_rows,
                        certificate: None,
                        note: Some(format!("no exhibited cell contains state {s}")),
                    })
                }
            }
        }
    }
    Err(Error::Condition("block extension did not terminate".into()))
}

/// `Y+` for a fixed product of signature cells, exposed for tests.
pub fn product_cells_y_plus(model: &Model, coords: &[Coordinate]) -> Result<YPlusSet> {
    cells_y_plus(as_hmm(model)?.trans(), coords)
}
