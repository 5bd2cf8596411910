use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::LOG_ZERO;
use crate::model::Obs;

/// Serialized form of an emission (or noise) density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmissionSpec {
    Categorical { weights: Vec<f64> },
    Gaussian { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    /// Uniform density on the closed box `[low, high]`.
    Uniform { low: Vec<f64>, high: Vec<f64> },
}

/// A density on the observation space together with its exact support.
///
/// Support membership is decided by `log_density(x) > -inf`, never by a
/// magnitude threshold.
#[derive(Debug, Clone)]
pub enum Emission {
    Categorical { weights: Vec<f64> },
    Gaussian(Gaussian),
    Uniform { low: Vec<f64>, high: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct Gaussian {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    chol: DMatrix<f64>,
    log_norm: f64,
}

impl Gaussian {
    pub fn new(mean: Vec<f64>, cov: Vec<Vec<f64>>) -> Result<Self> {
        let d = mean.len();
        if d == 0 || cov.len() != d || cov.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidModel(format!(
                "gaussian covariance must be {d}x{d} for a mean of length {d}"
            )));
        }
        let m = DMatrix::from_fn(d, d, |i, j| cov[i][j]);
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidModel("gaussian covariance is not positive definite".into()))?
            .l();
        let log_det: f64 = (0..d).map(|i| chol[(i, i)].ln()).sum::<f64>() * 2.0;
        let log_norm = -0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + log_det);
        Ok(Gaussian { mean, cov, chol, log_norm })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let diff = DVector::from_fn(d, |i, _| x[i] - self.mean[i]);
        match self.chol.solve_lower_triangular(&diff) {
            Some(z) => self.log_norm - 0.5 * z.norm_squared(),
            None => LOG_ZERO,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.dim();
        let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = &self.chol * z;
        (0..d).map(|i| self.mean[i] + x[i]).collect()
    }

    /// Per-coordinate standard deviations.
    pub fn scales(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.cov[i][i].sqrt()).collect()
    }
}

impl Emission {
    pub fn from_spec(spec: &EmissionSpec) -> Result<Self> {
        match spec {
            EmissionSpec::Categorical { weights } => {
                if weights.is_empty() {
                    return Err(Error::InvalidModel("categorical emission with no symbols".into()));
                }
                Ok(Emission::Categorical { weights: weights.clone() })
            }
            EmissionSpec::Gaussian { mean, cov } => Ok(Emission::Gaussian(Gaussian::new(mean.clone(), cov.clone())?)),
            EmissionSpec::Uniform { low, high } => {
                if low.is_empty() || low.len() != high.len() || low.iter().zip(high).any(|(a, b)| a.is_nan() || b.is_nan() || a >= b) {
                    return Err(Error::InvalidModel("uniform box needs low < high in every coordinate".into()));
                }
                Ok(Emission::Uniform { low: low.clone(), high: high.clone() })
            }
        }
    }

    pub fn to_spec(&self) -> EmissionSpec {
        match self {
            Emission::Categorical { weights } => EmissionSpec::Categorical { weights: weights.clone() },
            Emission::Gaussian(g) => EmissionSpec::Gaussian { mean: g.mean.clone(), cov: g.cov.clone() },
            Emission::Uniform { low, high } => EmissionSpec::Uniform { low: low.clone(), high: high.clone() },
        }
    }

    pub fn categorical(weights: Vec<f64>) -> Self {
        Emission::Categorical { weights }
    }

    pub fn gaussian(mean: Vec<f64>, cov: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Emission::Gaussian(Gaussian::new(mean, cov)?))
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Emission::Categorical { .. })
    }

    /// Alphabet size for categorical emissions, dimension otherwise.
    pub fn dim(&self) -> usize {
        match self {
            Emission::Categorical { weights } => weights.len(),
            Emission::Gaussian(g) => g.dim(),
            Emission::Uniform { low, .. } => low.len(),
        }
    }

    /// True when the support is the whole observation space.
    pub fn has_full_support(&self) -> bool {
        match self {
            Emission::Categorical { weights } => weights.iter().all(|&w| w > 0.0),
            Emission::Gaussian(_) => true,
            Emission::Uniform { .. } => false,
        }
    }

    pub fn log_density(&self, x: &Obs) -> f64 {
        match (self, x) {
            (Emission::Categorical { weights }, Obs::Symbol(s)) => match weights.get(*s) {
                Some(&w) if w > 0.0 => w.ln(),
                _ => LOG_ZERO,
            },
            (Emission::Categorical { .. }, Obs::Point(_)) => LOG_ZERO,
            (_, Obs::Point(v)) => self.log_density_point(v),
            (_, Obs::Symbol(_)) => LOG_ZERO,
        }
    }

    /// Log-density at a Euclidean point (noise residuals in switching models).
    pub fn log_density_point(&self, v: &[f64]) -> f64 {
        match self {
            Emission::Categorical { .. } => LOG_ZERO,
            Emission::Gaussian(g) => {
                if v.len() != g.dim() {
                    return LOG_ZERO;
                }
                g.log_density(v)
            }
            Emission::Uniform { low, high } => {
                if v.len() != low.len() {
                    return LOG_ZERO;
                }
                let inside = v.iter().zip(low.iter().zip(high)).all(|(x, (a, b))| *a <= *x && *x <= *b);
                if inside {
                    -low.iter().zip(high).map(|(a, b)| (b - a).ln()).sum::<f64>()
                } else {
                    LOG_ZERO
                }
            }
        }
    }

    pub fn support_member(&self, x: &Obs) -> bool {
        self.log_density(x) > LOG_ZERO
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Obs {
        match self {
            Emission::Categorical { weights } => Obs::Symbol(sample_index(weights, rng)),
            _ => Obs::Point(self.sample_point(rng)),
        }
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Emission::Categorical { weights } => vec![sample_index(weights, rng) as f64],
            Emission::Gaussian(g) => g.sample(rng),
            Emission::Uniform { low, high } => {
                low.iter().zip(high).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect()
            }
        }
    }
}

/// Inverse-CDF draw from a (possibly unnormalized) weight vector.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn gaussian_log_density_matches_closed_form() {
        let g = Gaussian::new(vec![1.0], vec![vec![4.0]]).unwrap();
        let x = 2.5;
        let expected = -0.5 * (2.0 * std::f64::consts::PI * 4.0).ln() - (x - 1.0) * (x - 1.0) / 8.0;
        assert!((g.log_density(&[x]) - expected).abs() < 1e-12);
    }

    #[test]
    fn non_positive_definite_covariance_is_rejected() {
        assert!(Gaussian::new(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
    }

    #[test]
    fn support_membership_is_exact() {
        let e = Emission::categorical(vec![0.5, 0.0, 0.5]);
        assert!(e.support_member(&Obs::Symbol(0)));
        assert!(!e.support_member(&Obs::Symbol(1)));
        assert!(!e.support_member(&Obs::Symbol(7)));
        let u = Emission::from_spec(&EmissionSpec::Uniform { low: vec![1.0], high: vec![2.0] }).unwrap();
        assert!(u.support_member(&Obs::Point(vec![1.5])));
        assert!(!u.support_member(&Obs::Point(vec![0.0])));
        let mut rng = seeded_rng(3);
        for _ in 0..100 {
            let x = u.sample(&mut rng);
            assert!(u.support_member(&x));
        }
    }

    #[test]
    fn sample_index_never_returns_zero_weight() {
        let mut rng = seeded_rng(11);
        for _ in 0..1000 {
            let i = sample_index(&[0.0, 0.3, 0.0, 0.7], &mut rng);
            assert!(i == 1 || i == 3);
        }
    }
}
