//! Invariant laws and support-graph reachability.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{FinitePmm, Model};

pub fn vec_mat(v: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.first().map_or(0, |r| r.len());
    let mut out = vec![0.0; n];
    for (a, row) in v.iter().zip(m) {
        if *a == 0.0 {
            continue;
        }
        for (o, p) in out.iter_mut().zip(row) {
            *o += a * p;
        }
    }
    out
}

/// `reach[a][b]`: `b` is reachable from `a` in zero or more steps.
pub fn reachability(m: &[Vec<f64>]) -> Vec<Vec<bool>> {
    let n = m.len();
    (0..n)
        .map(|a| {
            let mut seen = vec![false; n];
            let mut stack = vec![a];
            seen[a] = true;
            while let Some(u) = stack.pop() {
                for (v, &p) in m[u].iter().enumerate() {
                    if p > 0.0 && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Closed communicating classes of the support graph.
pub fn closed_classes(m: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let reach = reachability(m);
    let n = m.len();
    let mut assigned = vec![false; n];
    let mut classes = Vec::new();
    for a in 0..n {
        if assigned[a] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&b| reach[a][b] && reach[b][a]).collect();
        for &b in &class {
            assigned[b] = true;
        }
        let closed = class.iter().all(|&u| (0..n).all(|v| !reach[u][v] || class.contains(&v)));
        if closed {
            classes.push(class);
        }
    }
    classes
}

pub fn is_irreducible(m: &[Vec<f64>]) -> bool {
    reachability(m).iter().all(|row| row.iter().all(|&r| r))
}

/// Pairs reachable from the support of the initial law.
pub fn reachable_pairs(m: &FinitePmm) -> Vec<bool> {
    let rows = m.trans_rows();
    let reach = reachability(&rows);
    let n = m.n_pairs();
    (0..n).map(|b| (0..n).any(|a| m.init()[a] > 0.0 && reach[a][b])).collect()
}

/// Unique invariant law of a chain with exactly one closed class.
pub fn invariant_law(m: &[Vec<f64>]) -> Result<Vec<f64>> {
    let classes = closed_classes(m);
    if classes.len() != 1 {
        return Err(Error::NotIrreducible(format!(
            "support graph has {} closed classes; the invariant law is not unique",
            classes.len()
        )));
    }
    let class = &classes[0];
    let c = class.len();
    // Solve (M_C^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    let mut a = DMatrix::from_fn(c, c, |r, s| m[class[s]][class[r]] - if r == s { 1.0 } else { 0.0 });
    for s in 0..c {
        a[(c - 1, s)] = 1.0;
    }
    let mut b = DVector::zeros(c);
    b[c - 1] = 1.0;
    let sol = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::NotIrreducible("singular invariant-law system".into()))?;
    let mut pi = vec![0.0; m.len()];
    for (idx, &u) in class.iter().enumerate() {
        pi[u] = sol[idx].max(0.0);
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    Ok(pi)
}

/// Stationary law over pairs (finite pair chains) or over hidden states.
pub fn stationary_distribution(model: &Model) -> Result<Vec<f64>> {
    match model {
        Model::Finite(m) => invariant_law(&m.trans_rows()),
        Model::Hmm(m) => invariant_law(m.trans()),
        Model::Lmsm(m) => invariant_law(m.trans()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_iterate(m: &[Vec<f64>], steps: usize) -> Vec<f64> {
        let n = m.len();
        let mut v = vec![1.0 / n as f64; n];
        for _ in 0..steps {
            v = vec_mat(&v, m);
        }
        v
    }

    #[test]
    fn two_state_chain() {
        let m = vec![vec![0.9, 0.1], vec![0.2, 0.8]];
        let pi = invariant_law(&m).unwrap();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((pi[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn doubly_stochastic_is_uniform() {
        let m = vec![vec![0.2, 0.5, 0.3], vec![0.3, 0.2, 0.5], vec![0.5, 0.3, 0.2]];
        for p in invariant_law(&m).unwrap() {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circulant_mod4_matches_power_iteration() {
        let p = 0.3;
        let m: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if j == i { 1.0 - p } else if j == (i + 1) % 4 { p } else { 0.0 }).collect())
            .collect();
        let pi = invariant_law(&m).unwrap();
        let pw = power_iterate(&m, 2000);
        for (a, b) in pi.iter().zip(&pw) {
            assert!((a - 0.25).abs() < 1e-10);
            assert!((a - b).abs() < 1e-10);
        }
        let back = vec_mat(&pi, &m);
        for (a, b) in pi.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn two_closed_classes_are_rejected() {
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(matches!(invariant_law(&m), Err(Error::NotIrreducible(_))));
    }

    #[test]
    fn transient_states_get_zero_mass() {
        let m = vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5], vec![0.0, 0.5, 0.5]];
        let pi = invariant_law(&m).unwrap();
        assert_eq!(pi[0], 0.0);
        assert!((pi[1] - 0.5).abs() < 1e-12);
    }
}
