use nalgebra::DMatrix;
use rand::Rng;

use crate::condition::certificate::{Ball, BlockSet, Coordinate, ForgettingCertificate, Provenance};
use crate::condition::cluster::feeders;
use crate::condition::primitive::{check_primitive, submatrix};
use crate::condition::yplus::{enumerate_y_plus, YPlusSet};
use crate::error::{Error, Result};
use crate::model::{Lmsm, Model, Obs};
use crate::condition::certificate::n0_of_block;

pub const GRID_PER_AXIS: usize = 21;

/// Largest singular value.
pub fn operator_norm(f: &DMatrix<f64>) -> f64 {
    f.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

/// Radius `eps / (1 + max_j ||F(j)||)` keeping every residual inside `B(0, eps)`.
pub fn inner_radius(model: &Lmsm, epsilon: f64) -> f64 {
    let worst = model.f_mats().iter().map(operator_norm).fold(0.0, f64::max);
    epsilon / (1.0 + worst)
}

fn ball_grid(d: usize, epsilon: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..per_axis)
        .map(|a| -epsilon + 2.0 * epsilon * a as f64 / (per_axis - 1) as f64)
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let ball = Ball { center: vec![0.0; d], radius: epsilon };
    out.into_iter().filter(|p| ball.contains(p)).collect()
}

/// Switching-model lemma: one support pattern near the origin, a primitive
/// restricted transition matrix, and `E = B(0, eps0)^(R+2)`. Reachability
/// of the origin is taken as asserted.
pub fn check_lmsm<R: Rng + ?Sized>(
    model: &Model,
    epsilon: f64,
    samples: usize,
    rng: &mut R,
) -> Result<ForgettingCertificate> {
    let Model::Lmsm(m) = model else {
        return Err(Error::InvalidArgument("the switching-model check needs a switching model".into()));
    };
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let d = m.dim();
    let support_at = |x: &[f64]| -> Vec<usize> {
        (0..m.n_states()).filter(|&i| m.noise()[i].log_density_point(x) > f64::NEG_INFINITY).collect()
    };
    let cluster = support_at(&vec![0.0; d]);
    if cluster.is_empty() {
        return Err(Error::Condition("no noise density is positive at the origin".into()));
    }
    let grid: Vec<Vec<f64>> = if d <= 3 {
        ball_grid(d, epsilon, GRID_PER_AXIS)
    } else {
        let b = Ball { center: vec![0.0; d], radius: epsilon };
        (0..samples).map(|_| b.sample(rng)).collect()
    };
    if let Some(bad) = grid.iter().find(|p| support_at(p) != cluster) {
        return Err(Error::Condition(format!(
            "support pattern at {bad:?} differs from {cluster:?} at the origin"
        )));
    }
    let exponent = check_primitive(&submatrix(m.trans(), &cluster))
        .exponent
        .ok_or_else(|| Error::Condition(format!("transition matrix restricted to {cluster:?} is not primitive")))?;
    let eps0 = inner_radius(m, epsilon);
    let r = exponent + 2;
    let ball = Ball { center: vec![0.0; d], radius: eps0 };
    let coords = vec![Coordinate::any().within(ball.clone()); r];
    let y_plus = YPlusSet::product(r, &feeders(m.trans(), &cluster), &cluster);
    let mut worst: f64 = 1.0;
    for _ in 0..samples {
        let xs: Vec<Obs> = (0..r).map(|_| Obs::Point(ball.sample(rng))).collect();
        let yp = enumerate_y_plus(model, &xs)?;
        if yp != y_plus {
            return Err(Error::Condition(format!("Y+ at sampled block {xs:?} is {:?}", yp.pairs)));
        }
        worst = worst.max(n0_of_block(model, &xs, &y_plus)?);
    }
    let mut cert = ForgettingCertificate::new(
        r,
        BlockSet::Cells { coords },
        y_plus,
        2.0 * worst,
        Provenance::LmsmLemma,
        Some(cluster),
        samples,
        false,
    );
    cert.asserted.push("some state feeding the cluster is recurrent at the origin".into());
    Ok(cert)
}
