//! Log-space arithmetic. Exact zeros are represented by `f64::NEG_INFINITY`
//! and "positive" always means a log-value strictly above it.

pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

#[inline]
pub fn ln(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        LOG_ZERO
    }
}

#[inline]
pub fn is_positive(log_value: f64) -> bool {
    log_value > LOG_ZERO
}

/// `log(exp(a) + exp(b))` with a max-shift.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == LOG_ZERO {
        return b;
    }
    if b == LOG_ZERO {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Max-shifted log-sum-exp over an iterator.
pub fn log_sum_exp<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: Clone,
{
    let iter = values.into_iter();
    let max = iter.clone().fold(LOG_ZERO, f64::max);
    if max == LOG_ZERO {
        return LOG_ZERO;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = iter.map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Normalizes a log-vector in place so that its exponentials sum to one.
/// Returns the log of the original total mass.
pub fn normalize(values: &mut [f64]) -> f64 {
    let total = log_sum_exp(values.iter().copied());
    if total.is_finite() {
        for v in values.iter_mut() {
            *v -= total;
        }
    }
    total
}

/// Exponentiates a normalized log-vector into probabilities.
pub fn to_probs(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| v.exp()).collect()
}

/// Log-space product of two row-major square matrices of side `n`.
pub fn log_matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![LOG_ZERO; n * n];
    let mut terms = vec![LOG_ZERO; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                terms[k] = a[i * n + k] + b[k * n + j];
            }
            out[i * n + j] = log_sum_exp(terms.iter().copied());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_handles_zeros() {
        assert_eq!(log_sum_exp([LOG_ZERO, LOG_ZERO]), LOG_ZERO);
        assert_eq!(log_sum_exp([0.0_f64.ln(), 2.0_f64.ln()]), 2.0_f64.ln());
        let v = log_sum_exp([-1000.0, -1000.0]);
        assert!((v - (-1000.0 + 2.0_f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn log_add_matches_direct_sum() {
        let v = log_add(0.3_f64.ln(), 0.2_f64.ln());
        assert!((v.exp() - 0.5).abs() < 1e-15);
        assert_eq!(log_add(LOG_ZERO, -3.0), -3.0);
    }

    #[test]
    fn normalize_single_finite_entry_is_exact() {
        let mut v = vec![LOG_ZERO, -745.3, LOG_ZERO];
        normalize(&mut v);
        assert_eq!(v[1].exp(), 1.0);
        assert_eq!(v[0].exp(), 0.0);
    }
}
