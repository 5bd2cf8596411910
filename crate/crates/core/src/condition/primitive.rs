use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Primitivity {
    pub primitive: bool,
    /// Smallest `R` with `M^R` entrywise positive.
    pub exponent: Option<usize>,
}

fn support(m: &[Vec<f64>]) -> Vec<Vec<bool>> {
    m.iter().map(|r| r.iter().map(|&v| v > 0.0).collect()).collect()
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect()).collect()
}

/// Support-graph powering up to the Wielandt bound `(n - 1)^2 + 1`.
pub fn check_primitive(m: &[Vec<f64>]) -> Primitivity {
    let n = m.len();
    if n == 0 {
        return Primitivity { primitive: false, exponent: None };
    }
    let base = support(m);
    let mut p = base.clone();
    let bound = (n - 1) * (n - 1) + 1;
    for r in 1..=bound {
        if p.iter().all(|row| row.iter().all(|&v| v)) {
            return Primitivity { primitive: true, exponent: Some(r) };
        }
        p = bool_mul(&p, &base);
    }
    Primitivity { primitive: false, exponent: None }
}

/// Whether `M^r` is entrywise positive.
pub fn power_is_positive(m: &[Vec<f64>], r: usize) -> bool {
    let base = support(m);
    let mut p = base.clone();
    for _ in 1..r {
        p = bool_mul(&p, &base);
    }
    r >= 1 && p.iter().all(|row| row.iter().all(|&v| v))
}

/// Principal submatrix on `states`.
pub fn submatrix(m: &[Vec<f64>], states: &[usize]) -> Vec<Vec<f64>> {
    states.iter().map(|&i| states.iter().map(|&j| m[i][j]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert!(!check_primitive(&[vec![1.0, 0.0], vec![0.0, 1.0]]).primitive);
        assert_eq!(check_primitive(&[vec![0.5, 0.5], vec![0.5, 0.5]]).exponent, Some(1));
        assert_eq!(check_primitive(&[vec![0.0, 1.0], vec![0.5, 0.5]]).exponent, Some(2));
        assert!(!check_primitive(&[vec![0.0, 1.0], vec![1.0, 0.0]]).primitive);
    }

    #[test]
    fn wielandt_matrix_attains_the_bound() {
        // Cycle 0 -> 1 -> ... -> n-1 -> 0 plus the chord n-1 -> 1.
        let n = 5;
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n - 1 {
            m[i][i + 1] = 1.0;
        }
        m[n - 1][0] = 0.5;
        m[n - 1][1] = 0.5;
        assert_eq!(check_primitive(&m).exponent, Some((n - 1) * (n - 1) + 1));
    }
}
