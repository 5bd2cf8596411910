use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Ordinary least squares `y = a + b x` with a one-sided 95% upper bound
/// on the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub slope_upper95: f64,
    pub points: usize,
}

impl LineFit {
    /// `exp(slope)` clipped into `(0, 1]`.
    pub fn rate(&self) -> f64 {
        self.slope.exp().clamp(f64::MIN_POSITIVE, 1.0)
    }
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let sxx: f64 = xs[..n].iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs[..n].iter().zip(&ys[..n]).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs[..n].iter().zip(&ys[..n]).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let df = nf - 2.0;
    let slope_se = (sse / df / sxx).sqrt();
    let q = StudentsT::new(0.0, 1.0, df).map(|d| d.inverse_cdf(0.95)).unwrap_or(f64::INFINITY);
    Some(LineFit { slope, intercept, slope_se, slope_upper95: slope + q * slope_se, points: n })
}

/// Fits `ln y` against `x` over the points with `y > floor`.
pub fn fit_log_decay(xs: &[f64], ys: &[f64], floor: f64) -> Option<LineFit> {
    let (fx, fy): (Vec<f64>, Vec<f64>) =
        xs.iter().zip(ys).filter(|(_, &y)| y > floor).map(|(&x, &y)| (x, y.ln())).unzip();
    fit_line(&fx, &fy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 0.25 * x).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope + 0.25).abs() < 1e-12);
        assert!((f.intercept - 1.5).abs() < 1e-12);
        assert!(f.slope_se < 1e-10);
    }

    #[test]
    fn geometric_rate() {
        let xs: Vec<f64> = (1..20).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * 0.8f64.powf(*x)).collect();
        let f = fit_log_decay(&xs, &ys, 1e-12).unwrap();
        assert!((f.rate() - 0.8).abs() < 1e-12);
    }
}
