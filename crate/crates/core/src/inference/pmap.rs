use crate::error::Result;
use crate::inference::engine::forward_backward;
use crate::model::{Model, Obs, StartLaw};

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in v.iter().enumerate() {
        if p > v[best] {
            best = i;
        }
    }
    best
}

/// Pointwise MAP path over the whole observed sequence.
pub fn pmap_decode(model: &Model, xs: &[Obs]) -> Result<Vec<usize>> {
    let fb = forward_backward(model, xs, 1, xs.len(), &StartLaw::Initial)?;
    Ok(fb.marginals.iter().map(|m| argmax(m)).collect())
}
