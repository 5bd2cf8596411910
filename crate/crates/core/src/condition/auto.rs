use crate::condition::{
    check_a1_a2_finite, check_lmsm, check_positive_row, certify_by_cluster, CheckOutcome, ForgettingCertificate,
};
use crate::condition::cells::N0_SAMPLES;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::rng::seeded_rng;

/// Block length tried by the fallback enumeration.
pub const AUTO_R_MAX: usize = 6;
pub const AUTO_EPSILON: f64 = 0.5;
const AUTO_SEED: u64 = 0x00a0_7001;

/// First certificate found among the cluster lemma, exhaustive enumeration
/// on finite alphabets, and the positive-row check. Switching models use
/// their own lemma with radius [`AUTO_EPSILON`].
pub fn certify(model: &Model) -> Result<ForgettingCertificate> {
    if let Model::Lmsm(_) = model {
        return check_lmsm(model, AUTO_EPSILON, N0_SAMPLES, &mut seeded_rng(AUTO_SEED));
    }
    let mut reasons = Vec::new();
    if let Model::Hmm(_) = model {
        match certify_by_cluster(model) {
            Ok(c) => return Ok(c),
            Err(e) => reasons.push(format!("cluster: {e}")),
        }
    }
    if model.is_finite_obs() {
        match check_a1_a2_finite(model, AUTO_R_MAX) {
            Ok(CheckOutcome::Certified(c)) => return Ok(c),
            Ok(CheckOutcome::Failed(_)) => reasons.push(format!("enumeration: no product block up to r = {AUTO_R_MAX}")),
            Err(e) => reasons.push(format!("enumeration: {e}")),
        }
    }
    match check_positive_row(model) {
        Ok(out) if out.holds => {
            if let Some(c) = out.certificate {
                return Ok(c);
            }
            reasons.push("positive row: no certificate".into());
        }
        Ok(out) => reasons.push(format!("positive row: {}", out.note.unwrap_or_default())),
        Err(e) => reasons.push(format!("positive row: {e}")),
    }
    Err(Error::Condition(reasons.join("; ")))
}
