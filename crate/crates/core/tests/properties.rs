use proptest::prelude::*;

use pmmf_core::bundled;
use pmmf_core::condition::primitive::power_is_positive;
use pmmf_core::condition::{certify, check_primitive, enumerate_y_plus};
use pmmf_core::forgetting::dobrushin::mat_mul;
use pmmf_core::forgetting::{dobrushin, kappa, rho_bound, theoretical_envelope, tv};
use pmmf_core::inference::{f_matrix, smoothing_block, u_matrix, PathContext};
use pmmf_core::model::{
    block_transition_matrix, block_transition_probs, reversed_model, sample_path, stationary_distribution,
    EmissionSpec, ModelSpec,
};
use pmmf_core::rng::seeded_rng;
use pmmf_core::{Model, Obs, StartLaw};

fn law(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 3 => 0.01f64..1.0], n).prop_filter_map("all zero", |w| {
        let s: f64 = w.iter().sum();
        (s > 0.0).then(|| w.iter().map(|v| v / s).collect())
    })
}

fn stochastic(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(law(cols), rows)
}

/// Hidden Markov model with full-support transitions and sparse emissions.
fn hmm() -> impl Strategy<Value = Model> {
    (2usize..=4, 2usize..=3).prop_flat_map(|(ny, nx)| {
        (
            prop::collection::vec(prop::collection::vec(0.05f64..1.0, ny), ny),
            stochastic(ny, nx),
        )
            .prop_map(move |(raw, f)| {
                let trans: Vec<Vec<f64>> = raw
                    .iter()
                    .map(|r| {
                        let s: f64 = r.iter().sum();
                        r.iter().map(|v| v / s).collect()
                    })
                    .collect();
                ModelSpec::Hmm {
                    trans,
                    init: vec![1.0 / ny as f64; ny],
                    emissions: f.into_iter().map(|weights| EmissionSpec::Categorical { weights }).collect(),
                    support_witnesses: Vec::new(),
                }
                .build()
                .unwrap()
            })
    })
}

fn path(model: &Model, n: usize, seed: u64) -> Vec<Obs> {
    sample_path(model, n, &StartLaw::Initial, &mut seeded_rng(seed)).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_densities_compose(model in hmm(), n in 3usize..8, split in 1usize..6, seed in any::<u64>()) {
        let xs = path(&model, n, seed);
        let k = model.n_states();
        let cut = 1 + split % (n - 2);
        let whole = block_transition_probs(&model, &xs).unwrap();
        let head = block_transition_probs(&model, &xs[..=cut]).unwrap();
        let tail = block_transition_probs(&model, &xs[cut..]).unwrap();
        let logs = block_transition_matrix(&model, &xs).unwrap();
        for i in 0..k {
            for j in 0..k {
                let composed: f64 = (0..k).map(|l| head[i * k + l] * tail[l * k + j]).sum();
                prop_assert!((whole[i * k + j] - composed).abs() <= 1e-12);
                prop_assert!((logs[i * k + j].exp() - whole[i * k + j]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn block_laws_marginalize(model in hmm(), n in 2usize..10, seed in any::<u64>()) {
        let xs = path(&model, n, seed);
        let k = model.n_states();
        for t in 1..=n {
            let pair = smoothing_block(&model, &xs, (1, n), t, 2, &StartLaw::Initial).unwrap();
            let single = smoothing_block(&model, &xs, (1, n), t, 1, &StartLaw::Initial).unwrap();
            let next = smoothing_block(&model, &xs, (1, n), t + 1, 1, &StartLaw::Initial).unwrap();
            let first = pair.marginalize_to(1, k);
            prop_assert!(tv(&first.probs, &single.probs) <= 1e-12);
            let second: Vec<f64> = (0..k).map(|j| (0..k).map(|i| pair.probs[i * k + j]).sum()).collect();
            prop_assert!(tv(&second, &next.probs) <= 1e-12);
            prop_assert!((pair.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn dobrushin_is_submultiplicative(a in (1usize..5, 1usize..5).prop_flat_map(|(n, k)| stochastic(n, k)),
                                      c in 1usize..5, seed in any::<u64>()) {
        let k = a[0].len();
        let mut rng = seeded_rng(seed);
        let b: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let w: Vec<f64> = (0..c).map(|_| rand::Rng::random::<f64>(&mut rng) + 1e-3).collect();
                let s: f64 = w.iter().sum();
                w.iter().map(|v| v / s).collect()
            })
            .collect();
        let (da, db) = (dobrushin(&a).unwrap(), dobrushin(&b).unwrap());
        prop_assert!((0.0..=1.0).contains(&da));
        prop_assert!(dobrushin(&mat_mul(&a, &b)).unwrap() <= da * db + 1e-12);
    }

    #[test]
    fn dobrushin_contracts(a in (2usize..5, 1usize..5).prop_flat_map(|(n, k)| stochastic(n, k)), w in 0.0f64..1.0) {
        let n = a.len();
        let mu: Vec<f64> = (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        let nu: Vec<f64> = (0..n).map(|i| if i == 0 { w } else { (1.0 - w) / (n - 1) as f64 }).collect();
        let push = |v: &[f64]| -> Vec<f64> {
            (0..a[0].len()).map(|j| v.iter().zip(&a).map(|(p, r)| p * r[j]).sum()).collect()
        };
        prop_assert!(tv(&push(&mu), &push(&nu)) <= dobrushin(&a).unwrap() * tv(&mu, &nu) + 1e-12);
    }

    #[test]
    fn primitivity_exponent_is_minimal(m in (2usize..5).prop_flat_map(|n| stochastic(n, n))) {
        let p = check_primitive(&m);
        if let Some(e) = p.exponent {
            prop_assert!(p.primitive);
            prop_assert!(power_is_positive(&m, e));
            prop_assert!(e == 1 || !power_is_positive(&m, e - 1));
        } else {
            let n = m.len();
            prop_assert!(!power_is_positive(&m, n * n - 2 * n + 2));
        }
    }

    #[test]
    fn stationary_law_is_invariant(model in hmm()) {
        let pi = stationary_distribution(&model).unwrap();
        let p = model.state_transition().unwrap();
        for j in 0..pi.len() {
            let s: f64 = (0..pi.len()).map(|i| pi[i] * p[i][j]).sum();
            prop_assert!((s - pi[j]).abs() <= 1e-12);
        }
        let rev = reversed_model(&model).unwrap();
        let back = reversed_model(&rev).unwrap();
        let (q, r) = (back.state_transition().unwrap(), p);
        for i in 0..pi.len() {
            for j in 0..pi.len() {
                prop_assert!((q[i][j] - r[i][j]).abs() <= 1e-12);
            }
        }
    }
}

fn cluster() -> (Model, pmmf_core::ForgettingCertificate) {
    let model = bundled::cluster_hmm().unwrap();
    let cert = certify(&model).unwrap();
    (model, cert)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn doeblin_rows_are_conditional_transitions(seed in any::<u64>(), extra in 0usize..12) {
        let (model, cert) = cluster();
        let mut rng = seeded_rng(seed);
        let xs = loop {
            let (xs, _) = sample_path(&model, cert.r + extra, &StartLaw::Stationary, &mut rng).unwrap();
            if cert.contains(&model, &xs[..cert.r]) {
                break xs;
            }
        };
        let u = u_matrix(&model, &xs, &cert).unwrap();
        let f = f_matrix(&model, &xs, cert.r - 1, 1).unwrap();
        for i in 0..model.n_states() {
            if f.fallback_rows.contains(&i) {
                prop_assert!(u.fallback_rows.contains(&i));
                continue;
            }
            prop_assert!(tv(&u.matrix[i], &f.matrix[i]) <= 1e-12);
        }
    }

    #[test]
    fn certificate_blocks_share_y_plus(seed in any::<u64>()) {
        let (model, cert) = cluster();
        let member = cert.sample_member(&model, &mut seeded_rng(seed)).unwrap();
        prop_assert!(cert.contains(&model, &member));
        prop_assert_eq!(enumerate_y_plus(&model, &member).unwrap().pairs, cert.y_plus.pairs.clone());
    }

    #[test]
    fn kappa_counts_match_a_direct_scan(seed in any::<u64>(), s in 1usize..5, len in 2usize..40) {
        let (model, cert) = cluster();
        let n = s + len + cert.r;
        let xs = path(&model, n, seed);
        let t = s + len;
        let rp = cert.r - 1;
        let kc = kappa(&cert, &model, &xs, s, t).unwrap();
        for k in 0..rp {
            let mut count = 0;
            let mut a = s + k;
            while a + rp <= t {
                if cert.contains(&model, &xs[a - 1..a - 1 + cert.r]) {
                    count += 1;
                }
                a += rp;
            }
            prop_assert_eq!(kc.k_offsets[k], count);
        }
        prop_assert_eq!(kc.kappa_bar, kc.k_offsets[(t - s) % rp]);
    }

    #[test]
    fn sharp_envelope_is_below_the_rho_bound(seed in any::<u64>(), l in 1usize..4, gap in 0usize..20, tail in 0usize..10) {
        let (model, cert) = cluster();
        let s = l + 2;
        let t = s + gap;
        let n = t + tail;
        let xs = path(&model, n, seed);
        let sharp = theoretical_envelope(&cert, &model, &xs, s, t, n).unwrap();
        prop_assert!(sharp <= rho_bound(&cert, &model, &xs, s, t) + 1e-12);
        let ctx = PathContext::new(&model, &xs).unwrap();
        let a = ctx.smoothing_block(l, n, t, 1, &StartLaw::Initial).unwrap();
        let b = ctx.smoothing_block(s, n, t, 1, &StartLaw::Initial).unwrap();
        prop_assert!(tv(&a.probs, &b.probs) <= sharp + 1e-10);
    }
}
