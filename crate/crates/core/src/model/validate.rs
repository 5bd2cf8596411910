//! Structural checks on model parameters.

use serde::Serialize;

use crate::model::emission::Emission;
use crate::model::lmsm::InitX;
use crate::model::Model;

const ROW_TOL: f64 = 1e-12;
const INTEGRAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationIssue {
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
    /// Densities whose integral could not be checked (dimension too high).
    pub skipped: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ValidationIssue { location: location.into(), message: message.into() });
    }

    fn check_probability_vector(&mut self, location: &str, v: &[f64]) {
        if let Some((k, p)) = v.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            self.push(format!("{location}[{k}]"), format!("entry {p} is not a non-negative number"));
            return;
        }
        let total: f64 = v.iter().sum();
        if (total - 1.0).abs() > ROW_TOL {
            self.push(location, format!("sums to {total}"));
        }
    }

    fn check_density(&mut self, location: &str, e: &Emission) {
        match e {
            Emission::Categorical { weights } => self.check_probability_vector(location, weights),
            _ => match integrate_density(e) {
                Some(v) if (v - 1.0).abs() <= INTEGRAL_TOL => {}
                Some(v) => self.push(location, format!("density integrates to {v}")),
                None => self.skipped.push(location.to_string()),
            },
        }
    }
}

pub fn validate_model(model: &Model) -> ValidationReport {
    let mut report = ValidationReport::default();
    match model {
        Model::Finite(m) => {
            for (z, row) in m.trans_rows().iter().enumerate() {
                report.check_probability_vector(&format!("trans row {z}"), row);
            }
            report.check_probability_vector("init", m.init());
        }
        Model::Hmm(m) => {
            for (i, row) in m.trans().iter().enumerate() {
                report.check_probability_vector(&format!("trans row {i}"), row);
            }
            report.check_probability_vector("init", m.init());
            for (i, e) in m.emissions().iter().enumerate() {
                report.check_density(&format!("emission {i}"), e);
            }
        }
        Model::Lmsm(m) => {
            for (i, row) in m.trans().iter().enumerate() {
                report.check_probability_vector(&format!("trans row {i}"), row);
            }
            report.check_probability_vector("init", m.init());
            for (i, e) in m.noise().iter().enumerate() {
                report.check_density(&format!("noise {i}"), e);
            }
            for (i, f) in m.f_mats().iter().enumerate() {
                if f.iter().any(|v| !v.is_finite()) {
                    report.push(format!("f_mats {i}"), "non-finite entry");
                }
            }
            if let InitX::Density { density } = m.init_x() {
                match Emission::from_spec(density) {
                    Ok(e) => report.check_density("init_x", &e),
                    Err(err) => report.push("init_x", err.to_string()),
                }
            }
        }
    }
    report
}

const GL_NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Nodes and weights of composite 8-point Gauss-Legendre on `[a, b]`.
fn composite_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * 8);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (node, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            out.push((mid - 0.5 * h * node, 0.5 * h * w));
            out.push((mid + 0.5 * h * node, 0.5 * h * w));
        }
    }
    out
}

/// Deterministic tensor-product quadrature of a continuous density over a
/// box that holds all but a negligible fraction of its mass. Returns `None`
/// above three dimensions.
pub fn integrate_density(e: &Emission) -> Option<f64> {
    let (lo, hi): (Vec<f64>, Vec<f64>) = match e {
        Emission::Categorical { weights } => return Some(weights.iter().sum()),
        Emission::Gaussian(g) => {
            let s = g.scales();
            (
                g.mean.iter().zip(&s).map(|(m, s)| m - 12.0 * s).collect(),
                g.mean.iter().zip(&s).map(|(m, s)| m + 12.0 * s).collect(),
            )
        }
        Emission::Uniform { low, high } => (low.clone(), high.clone()),
    };
    let d = lo.len();
    let panels = match d {
        1 => 64,
        2 => 24,
        3 => 12,
        _ => return None,
    };
    let rules: Vec<Vec<(f64, f64)>> = (0..d).map(|a| composite_rule(lo[a], hi[a], panels)).collect();
    let mut idx = vec![0usize; d];
    let mut total = 0.0;
    let mut point = vec![0.0; d];
    loop {
        let mut w = 1.0;
        for a in 0..d {
            let (x, wa) = rules[a][idx[a]];
            point[a] = x;
            w *= wa;
        }
        total += w * e.log_density_point(&point).exp();
        let mut a = 0;
        loop {
            idx[a] += 1;
            if idx[a] < rules[a].len() {
                break;
            }
            idx[a] = 0;
            a += 1;
            if a == d {
                return Some(total);
            }
        }
    }
}
