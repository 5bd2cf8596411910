use pmmf_core::bundled;
use pmmf_core::condition::enumerate::check_unichain;
use pmmf_core::condition::{
    certify, certify_by_cluster, check_a1_a2_finite, check_lmsm, check_positive_row, check_sopot, enumerate_y_plus, enumerate_y_plus_admissible,
    find_clusters, verify_certificate, Provenance,
};
use pmmf_core::forgetting::{kappa, rho_bound, theoretical_envelope};
use pmmf_core::model::{sample_path, symbols, EmissionSpec, ModelSpec};
use pmmf_core::rng::seeded_rng;
use pmmf_core::{Error, Model, StartLaw};

#[test]
fn cluster_certificate_for_the_three_state_model() {
    let model = bundled::cluster_hmm().unwrap();
    let cert = certify_by_cluster(&model).unwrap();
    assert_eq!(cert.provenance, Provenance::ClusterLemma);
    assert!(cert.y_plus.is_product());
    assert!(cert.n0_exact);
    assert!(cert.rho < 1.0 && cert.rho > 0.0);
    let mut rng = seeded_rng(1);
    assert_eq!(verify_certificate(&model, &cert, 200, &mut rng).unwrap(), None);
}

#[test]
fn two_state_clusters_without_primitivity_fail() {
    let model = bundled::fourstate().unwrap();
    let report = find_clusters(&model).unwrap();
    assert!(report.passing.is_empty());
    assert!(certify_by_cluster(&model).is_err());
    // The enumeration still finds a certificate.
    let cert = certify(&model).unwrap();
    assert_eq!(cert.provenance, Provenance::Enumerated);
}

#[test]
fn the_walk_is_unichain_but_never_certified() {
    let model = bundled::mod4().unwrap();
    check_unichain(&model).unwrap();
    assert!(check_a1_a2_finite(&model, 4).unwrap().certificate().is_none());
    assert!(certify(&model).is_err());
    // Under the exact definition every start state counts, so the pattern
    // has four pairs even though only two are reachable from x_1.
    let yp = enumerate_y_plus(&model, &symbols("00")).unwrap();
    assert_eq!(yp.pairs, vec![(0, 1), (1, 1), (2, 3), (3, 3)]);
    let reachable = enumerate_y_plus_admissible(&model, &symbols("00")).unwrap();
    assert_eq!(reachable.pairs, vec![(1, 1), (3, 3)]);
    assert!(!reachable.is_product());
}

#[test]
fn positive_rows_hold_for_a_full_transition_matrix() {
    let model = bundled::cluster_hmm().unwrap();
    let out = check_positive_row(&model).unwrap();
    assert!(out.holds);
    let cert = out.certificate.unwrap();
    assert_eq!(cert.provenance, Provenance::PositiveRow);
    assert!(cert.y_plus.is_product());
}

#[test]
fn split_ratio_is_positive_inside_the_cluster() {
    let model = bundled::cluster_hmm().unwrap();
    let cert = certify_by_cluster(&model).unwrap();
    let out = check_sopot(&model, &cert, 2, 0, 100, &mut seeded_rng(2)).unwrap();
    assert!(out.lambda > 0.0);
    assert!(out.exact);
    assert!(check_sopot(&model, &cert, 1, 0, 100, &mut seeded_rng(2)).is_err());
}

#[test]
fn switching_model_lemma() {
    let model = bundled::lmsm_ar1().unwrap();
    let cert = check_lmsm(&model, 0.5, 2_000, &mut seeded_rng(3)).unwrap();
    assert_eq!(cert.provenance, Provenance::LmsmLemma);
    assert!(!cert.asserted.is_empty());
    assert!(!cert.n0_exact);
    let mut rng = seeded_rng(4);
    for _ in 0..50 {
        let xs = cert.sample_member(&model, &mut rng).unwrap();
        assert!(cert.contains(&model, &xs));
        assert_eq!(enumerate_y_plus(&model, &xs).unwrap().pairs, cert.y_plus.pairs);
    }
    assert!(check_lmsm(&model, 0.0, 10, &mut rng).is_err());
    assert!(matches!(check_lmsm(&bundled::mod4().unwrap(), 0.5, 10, &mut rng), Err(Error::InvalidArgument(_))));
}

fn gaussian_hmm() -> Model {
    ModelSpec::Hmm {
        trans: vec![vec![0.8, 0.2], vec![0.3, 0.7]],
        init: vec![0.5, 0.5],
        emissions: vec![
            EmissionSpec::Gaussian { mean: vec![-1.0], cov: vec![vec![1.0]] },
            EmissionSpec::Gaussian { mean: vec![1.0], cov: vec![vec![0.5]] },
        ],
        support_witnesses: Vec::new(),
    }
    .build()
    .unwrap()
}

#[test]
fn full_support_emissions_form_one_cluster() {
    let model = gaussian_hmm();
    let cert = certify(&model).unwrap();
    assert_eq!(cert.provenance, Provenance::ClusterLemma);
    assert_eq!(cert.cluster.as_deref(), Some(&[0, 1][..]));
    assert!(!cert.n0_exact);
    let mut rng = seeded_rng(5);
    assert_eq!(verify_certificate(&model, &cert, 500, &mut rng).unwrap(), None);
}

#[test]
fn kappa_on_a_hand_counted_path() {
    let model = bundled::fourstate().unwrap();
    let cert = check_a1_a2_finite(&model, 4).unwrap().certificate().unwrap();
    let xs = symbols("0010010");
    let k = kappa(&cert, &model, &xs, 1, 7).unwrap();
    assert_eq!(k.r_prime, 2);
    assert_eq!(k.tau, vec![3, 2]);
    assert_eq!(k.k_offsets, vec![1, 1]);
    assert_eq!(k.kappa_bar, 1);
    assert!(kappa(&cert, &model, &xs, 6, 7).is_err());
    assert!((rho_bound(&cert, &model, &xs, 1, 7) - 2.0 * 63.0 / 64.0).abs() < 1e-15);
}

#[test]
fn sharp_envelope_never_exceeds_the_rho_bound() {
    let model = bundled::fourstate().unwrap();
    let cert = check_a1_a2_finite(&model, 4).unwrap().certificate().unwrap();
    let mut rng = seeded_rng(6);
    for _ in 0..50 {
        let (xs, _) = sample_path(&model, 60, &StartLaw::Initial, &mut rng).unwrap();
        for t in [3, 10, 30, 50] {
            let sharp = theoretical_envelope(&cert, &model, &xs, 1, t, 60).unwrap();
            assert!(sharp <= rho_bound(&cert, &model, &xs, 1, t) + 1e-12);
        }
    }
}
