use crate::error::{Error, Result};
use crate::model::{stationary, FinitePmm, Hmm, Model};

/// The stationary chain run backwards in time. Hidden Markov models stay
/// hidden Markov with the same emissions; pair chains stay pair chains.
pub fn reversed_model(model: &Model) -> Result<Model> {
    let pi = stationary::stationary_distribution(model)?;
    let reverse = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let n = rows.len();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| if pi[a] > 0.0 { pi[b] * rows[b][a] / pi[a] } else if a == b { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect()
    };
    match model {
        Model::Hmm(m) => {
            let mut r = Hmm::new(reverse(m.trans()), pi.clone(), m.emissions().to_vec())?;
            r.support_witnesses = m.support_witnesses.clone();
            Ok(Model::Hmm(r))
        }
        Model::Finite(m) => Ok(Model::Finite(FinitePmm::new(
            m.n_states(),
            m.n_obs(),
            reverse(&m.trans_rows()),
            pi.clone(),
        )?)),
        Model::Lmsm(_) => Err(Error::NotStationary("switching models have no representable reversal".into())),
    }
}
