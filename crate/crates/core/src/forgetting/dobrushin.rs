use crate::error::{Error, Result};

const ROW_TOL: f64 = 1e-10;

/// Total variation in the full-sum convention: `sum |a - b|`, in `[0, 2]`
/// for probability vectors.
pub fn tv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Half the largest total variation between two rows.
pub fn dobrushin(m: &[Vec<f64>]) -> Result<f64> {
    for (i, row) in m.iter().enumerate() {
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > ROW_TOL || row.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidArgument(format!("row {i} is not a probability vector (sum {s})")));
        }
    }
    let mut worst: f64 = 0.0;
    for a in 0..m.len() {
        for b in a + 1..m.len() {
            worst = worst.max(tv(&m[a], &m[b]));
        }
    }
    Ok(0.5 * worst)
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).map(|(x, br)| x * br[j]).sum()).collect())
        .collect()
}

pub fn vec_mat(v: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    crate::model::stationary::vec_mat(v, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_values() {
        assert_eq!(dobrushin(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(), 1.0);
        assert_eq!(dobrushin(&[vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap(), 0.0);
        assert!((dobrushin(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap() - 0.7).abs() < 1e-15);
        assert!(dobrushin(&[vec![0.9, 0.2], vec![0.2, 0.8]]).is_err());
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv(&[1.0, 0.0], &[0.0, 1.0]), 2.0);
        assert!((tv(&[0.7, 0.3], &[0.2, 0.8]) - 1.0).abs() < 1e-15);
    }
}
