use pmmf_core::bundled;
use pmmf_core::forgetting::{initial_forgetting_experiment, OneSidedConfig, TwoSidedBounds};
use pmmf_core::inference::{argmax, f_matrix, forward_backward, pmap_decode, smoothing_block, PathContext};
use pmmf_core::logspace::log_sum_exp;
use pmmf_core::model::{joint_log_density, symbols, EmissionSpec, ModelSpec};
use pmmf_core::segmentation::{estimate_r, expected_error, EstimateRConfig};
use pmmf_core::{Error, Model, Obs, StartLaw};

/// Two absorbing states, each emitting its own symbol.
fn sticky() -> Model {
    ModelSpec::Hmm {
        trans: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        init: vec![0.5, 0.5],
        emissions: vec![
            EmissionSpec::Categorical { weights: vec![1.0, 0.0] },
            EmissionSpec::Categorical { weights: vec![0.0, 1.0] },
        ],
        support_witnesses: Vec::new(),
    }
    .build()
    .unwrap()
}

fn flat() -> Model {
    ModelSpec::Hmm {
        trans: vec![vec![0.5, 0.25, 0.25], vec![0.25, 0.5, 0.25], vec![0.25, 0.25, 0.5]],
        init: vec![1.0 / 3.0; 3],
        emissions: (0..3).map(|_| EmissionSpec::Categorical { weights: vec![0.5, 0.5] }).collect(),
        support_witnesses: Vec::new(),
    }
    .build()
    .unwrap()
}

#[test]
fn likelihood_matches_a_path_sum() {
    let model = bundled::cluster_hmm().unwrap();
    let xs = symbols("0121130");
    let fb = forward_backward(&model, &xs, 1, xs.len(), &StartLaw::Initial).unwrap();
    let k = model.n_states();
    let total = log_sum_exp((0..k.pow(xs.len() as u32)).map(|code| {
        let ys: Vec<usize> = (0..xs.len()).map(|d| code / k.pow(d as u32) % k).collect();
        joint_log_density(&model, &xs, &ys).unwrap()
    }));
    assert!((fb.loglik - total).abs() < 1e-12);
    for m in &fb.marginals {
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn window_and_block_errors() {
    let model = bundled::cluster_hmm().unwrap();
    let xs = symbols("01211");
    assert!(matches!(
        smoothing_block(&model, &xs, (1, 5), 2, 9, &StartLaw::Initial),
        Err(Error::BlockTooLong { m: 9, cap: 8 })
    ));
    assert!(matches!(smoothing_block(&model, &xs, (3, 5), 2, 1, &StartLaw::Initial), Err(Error::InvalidWindow(_))));
    assert!(smoothing_block(&model, &xs, (1, 6), 2, 1, &StartLaw::Initial).is_err());
    let sticky = sticky();
    let bad = symbols("01");
    let ctx = PathContext::new(&sticky, &bad).unwrap();
    let prior = vec![0.0, f64::NEG_INFINITY];
    assert!(matches!(ctx.forward(1, 2, &prior), Err(Error::ZeroLikelihood { time: 2 })));
    assert!(matches!(pmap_decode(&sticky, &bad), Err(Error::ZeroLikelihood { .. })));
}

#[test]
fn prediction_past_the_window_follows_the_chain() {
    let model = bundled::cluster_hmm().unwrap();
    let xs = symbols("0121");
    let filt = smoothing_block(&model, &xs, (1, 4), 4, 1, &StartLaw::Initial).unwrap();
    let next = smoothing_block(&model, &xs, (1, 4), 5, 1, &StartLaw::Initial).unwrap();
    let p = model.state_transition().unwrap();
    for (j, got) in next.probs.iter().enumerate() {
        let want: f64 = (0..3).map(|i| filt.probs[i] * p[i][j]).sum();
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn impossible_start_rows_fall_back_to_uniform() {
    let f = f_matrix(&sticky(), &symbols("011"), 1, 1).unwrap();
    assert_eq!(f.fallback_rows, vec![0]);
    assert_eq!(f.matrix[0], vec![0.5, 0.5]);
    assert_eq!(f.matrix[1], vec![0.0, 1.0]);
}

#[test]
fn ties_break_towards_the_first_state() {
    assert_eq!(argmax(&[0.25, 0.5, 0.5, 0.25]), 1);
    let path = pmap_decode(&flat(), &symbols("0101")).unwrap();
    assert_eq!(path, vec![0; 4]);
}

#[test]
fn uninformative_segmentation_error() {
    let seg = expected_error(&flat(), &symbols("011010")).unwrap();
    assert!((seg.normalized_error - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(seg.per_t_confidence.len(), 6);
}

#[test]
fn error_estimate_needs_a_certificate_or_the_explicit_flag() {
    let model = bundled::cluster_hmm().unwrap();
    let none = TwoSidedBounds { forward: None, reversed: None };
    assert!(matches!(estimate_r(&model, none, &EstimateRConfig::new(100, 5, 5, 1)), Err(Error::Condition(_))));
    let mut cfg = EstimateRConfig::new(100, 5, 5, 1);
    cfg.no_bound = true;
    let est = estimate_r(&model, none, &cfg).unwrap();
    assert!(est.window_bound.is_none());
    assert!(est.r_hat > 0.0 && est.r_hat < 1.0);
}

#[test]
fn switching_models_have_no_stationary_start() {
    let model = bundled::lmsm_ar1().unwrap();
    let xs = vec![Obs::Point(vec![0.0]), Obs::Point(vec![0.3]), Obs::Point(vec![-0.2])];
    assert!(matches!(
        smoothing_block(&model, &xs, (1, 3), 2, 1, &StartLaw::Stationary),
        Err(Error::NotStationary(_))
    ));
    let law = smoothing_block(&model, &xs, (1, 3), 2, 2, &StartLaw::Initial).unwrap();
    assert!((law.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn initial_laws_must_be_dominated() {
    let model = bundled::fourstate().unwrap();
    let cfg = OneSidedConfig::new(1, 1, vec![1, 2], 5);
    let res = initial_forgetting_experiment(&model, &[0.5, 0.5, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], None, &cfg);
    assert!(matches!(res, Err(Error::InvalidArgument(_))));
}
