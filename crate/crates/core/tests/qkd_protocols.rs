use std::collections::HashMap;

use moeqkd_core::hash::{HashSeed, UniversalHashFamily};
use moeqkd_core::nike::{BrokenNike, IdealNike, Nike, ToyDhNike};
use moeqkd_core::protocol::{
    everlasting_distance_report, run_niqkd, run_two_round, two_round_stats, verifiability_rate,
    weak_security_ensemble, weak_security_report, Adversary, AdversaryKind, ClassicalClone, DigestKind,
    IdentityAdversary, Party, SwapEpr, TwoRoundConfig,
};
use moeqkd_core::rng::substream;
use moeqkd_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn honest_agreement<N: Nike>(scheme: &N, trials: u64) {
    for t in 0..trials {
        let tr = run_niqkd(scheme, scheme.key_bits(), None, &mut substream(11, t)).unwrap();
        assert_eq!(tr.theta_a, tr.theta_b);
        assert_eq!(tr.key_a, tr.key_b);
        assert!(tr.eve_state.is_none());
    }
}

#[test]
fn honest_runs_agree_for_every_scheme() {
    honest_agreement(&IdealNike::new(8), 1000);
    honest_agreement(&ToyDhNike::new(8).unwrap(), 1000);
    honest_agreement(&BrokenNike::new(8), 1000);
}

#[test]
fn honest_run_is_reproducible() {
    let s = ToyDhNike::new(16).unwrap();
    let a = run_niqkd(&s, 16, None, &mut ChaCha20Rng::seed_from_u64(5)).unwrap();
    let b = run_niqkd(&s, 16, None, &mut ChaCha20Rng::seed_from_u64(5)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn wrong_key_length_is_rejected() {
    let s = IdealNike::new(3);
    assert!(matches!(
        run_niqkd(&s, 4, None, &mut ChaCha20Rng::seed_from_u64(1)),
        Err(Error::LengthMismatch { .. })
    ));
}

#[test]
fn identity_adversary_matches_honest() {
    let s = BrokenNike::new(3);
    for t in 0..300 {
        let tr = run_niqkd(&s, 3, Some(&IdentityAdversary), &mut substream(2, t)).unwrap();
        assert_eq!(tr.key_a, tr.key_b);
        assert!(tr.eve_guess.is_none());
    }
}

#[test]
fn adversary_leaves_classical_messages_unchanged() {
    let s = ToyDhNike::new(2).unwrap();
    let honest = run_niqkd(&s, 2, None, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
    let attacked = run_niqkd(&s, 2, Some(&SwapEpr), &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
    assert_eq!(honest.public, attacked.public);
    assert_eq!(honest.theta_a, attacked.theta_a);
    assert_eq!(honest.theta_b, attacked.theta_b);
}

#[test]
fn swap_epr_decoder_recovers_both_keys() {
    let s = ToyDhNike::new(2).unwrap();
    let trials = 4000u64;
    let mut agree = 0;
    for t in 0..trials {
        let tr = run_niqkd(&s, 2, Some(&SwapEpr), &mut substream(3, t)).unwrap();
        let guess = tr.eve_guess.unwrap();
        assert_eq!(guess.key_a, tr.key_a);
        assert_eq!(guess.key_b, tr.key_b);
        agree += usize::from(tr.key_a == tr.key_b);
        assert_eq!(tr.eve_state.as_ref().unwrap().num_qubits(), 4);
    }
    let p = agree as f64 / trials as f64;
    let se = (0.25f64 * 0.75 / trials as f64).sqrt();
    assert!((p - 0.25).abs() <= 3.0 * se, "agreement {p}");
}

#[test]
fn swap_epr_needs_small_n() {
    let s = IdealNike::new(5);
    assert!(matches!(
        run_niqkd(&s, 5, Some(&SwapEpr), &mut ChaCha20Rng::seed_from_u64(1)),
        Err(Error::SizeCap(_))
    ));
}

#[test]
fn memory_state_is_a_density_operator() {
    let s = IdealNike::new(2);
    let tr = run_niqkd(&s, 2, Some(&ClassicalClone), &mut ChaCha20Rng::seed_from_u64(4)).unwrap();
    let e = tr.eve_state.unwrap();
    assert!((e.trace() - 1.0).abs() < 1e-12);
    assert!(e.matrix().min_eigenvalue() > -1e-12);
}

#[test]
fn passive_weak_security_is_full_entropy() {
    for adv in [None, Some(&IdentityAdversary as &dyn Adversary)] {
        let r = weak_security_report(&IdealNike::new(2), adv, 0, 1).unwrap();
        assert!(r.hmin.width() <= 1e-6);
        assert!((r.hmin.lower - 2.0).abs() <= 1e-6 && (r.hmin.upper - 2.0).abs() <= 1e-6);
        assert!((r.agree_rate - 1.0).abs() < 1e-12);
    }
}

/// `¼ cos⁴(π/8) + 3/16`: the agreement branch is guessed by measuring both
/// partners in the Breidbart basis, the disagreement branch is uniform.
#[test]
fn swap_epr_weak_security_regression() {
    let r = weak_security_report(&IdealNike::new(2), Some(&SwapEpr), 0, 1).unwrap();
    let closed = 0.25 * std::f64::consts::FRAC_PI_8.cos().powi(4) + 3.0 / 16.0;
    assert!(r.pguess_lower <= closed + 1e-6 && closed <= r.pguess_upper + 1e-6);
    assert!((r.hmin.center() - 1.435814).abs() < 1e-5, "{:?}", r.hmin);
    assert!((r.agree_rate - 0.25).abs() < 1e-12);
}

#[test]
fn classical_clone_weak_security_regression() {
    let r = weak_security_report(&IdealNike::new(2), Some(&ClassicalClone), 2000, 3).unwrap();
    assert!(r.hmin.lower > 0.0);
    assert!((r.hmin.center() - 1.0).abs() < 1e-6);
    assert!((r.agree_rate - 9.0 / 16.0).abs() < 1e-12);
    let (p, se) = (r.sampled_agree_rate.unwrap(), r.sampled_agree_stderr.unwrap());
    assert!((p - 9.0 / 16.0).abs() <= 3.0 * se.max(1e-3));
    assert!(r.eve_guess_rate.is_some());
}

#[test]
fn disagreement_part_is_uniform_and_independent() {
    for kind in [AdversaryKind::SwapEpr, AdversaryKind::ClassicalClone, AdversaryKind::PartialClone] {
        let adv = kind.build().unwrap();
        let ens = weak_security_ensemble(&IdealNike::new(2), Some(adv.as_ref())).unwrap();
        assert!((ens.total_trace() - 1.0).abs() < 1e-12);
        for block in &ens.blocks {
            for (k, op) in block.operators(2).iter().enumerate() {
                let rest = &op.1 - &block.agree[k];
                assert!((&rest - &block.disagree.scale(0.25)).max_abs() < 1e-14);
            }
        }
    }
}

#[test]
fn broken_scheme_blocks_follow_the_basis() {
    let ens = weak_security_ensemble(&BrokenNike::new(2), Some(&SwapEpr)).unwrap();
    assert_eq!(ens.blocks.len(), 4);
    let r = weak_security_report(&BrokenNike::new(2), Some(&SwapEpr), 0, 1).unwrap();
    // With θ public, the agreed key is read off exactly: pguess = 1/4 + 3/16.
    assert!((r.pguess_lower - 7.0 / 16.0).abs() < 1e-6, "{r:?}");
}

#[test]
fn toy_dh_is_not_enumerable_for_the_exact_path() {
    let s = ToyDhNike::new(2).unwrap();
    assert!(matches!(weak_security_report(&s, Some(&SwapEpr), 0, 1), Err(Error::NotEnumerable(_))));
}

#[test]
fn sampled_weak_report_is_reproducible() {
    let s = IdealNike::new(2);
    let a = weak_security_report(&s, Some(&SwapEpr), 500, 17).unwrap();
    let b = weak_security_report(&s, Some(&SwapEpr), 500, 17).unwrap();
    assert_eq!(a, b);
}

#[test]
fn honest_two_round_agrees() {
    for digest in [DigestKind::Sha256, DigestKind::Universal] {
        let mut cfg = TwoRoundConfig::new(8).unwrap();
        cfg.digest = digest;
        let st = two_round_stats(&IdealNike::new(8), &cfg, None, 1000, 21).unwrap();
        assert_eq!(st.success_rate, 1.0);
        assert_eq!(st.disagree_rate, 0.0);
    }
    let cfg = TwoRoundConfig::new(4).unwrap();
    assert_eq!(two_round_stats(&ToyDhNike::new(4).unwrap(), &cfg, None, 300, 2).unwrap().success_rate, 1.0);
    assert_eq!(two_round_stats(&BrokenNike::new(4), &cfg, None, 300, 2).unwrap().success_rate, 1.0);
}

#[test]
fn default_config_values() {
    let cfg = TwoRoundConfig::new(12).unwrap();
    assert_eq!((cfg.digest_bits, cfg.output_bits), (3, 3));
    let spec = cfg.extractor().unwrap();
    assert_eq!((spec.source_bits, spec.output_bits), (24, 3));
    assert_eq!(spec.epsilon, 0.125);
    assert!(TwoRoundConfig::new(1).is_err());
    let mut bad = TwoRoundConfig::with_digest_bits(2, 1).unwrap();
    bad.digest = DigestKind::Universal;
    bad.digest_bits = 3;
    assert!(bad.validate().is_err());
}

#[test]
fn two_round_transcript_is_self_consistent() {
    let s = IdealNike::new(4);
    let cfg = TwoRoundConfig::with_digest_bits(4, 2).unwrap();
    for t in 0..200 {
        let tr = run_two_round(&s, &cfg, Some(&SwapEpr), &mut substream(8, t)).unwrap();
        assert_eq!(tr.subs[0].sender, Party::Alice);
        assert_eq!(tr.subs[1].sender, Party::Bob);
        let seed = HashSeed { a: tr.subs[0].seed.a ^ tr.subs[1].seed.a, b: tr.subs[0].seed.b ^ tr.subs[1].seed.b };
        assert_eq!(tr.extractor_seed, seed);
        for sub in &tr.subs {
            let ks = sub.raw_key(sub.sender);
            assert_eq!(sub.sender_value, sub.sender_digest.digest(&ks).unwrap());
            if let Some(k) = sub.sender_output {
                assert_eq!(k, ks);
                assert_eq!(sub.receiver_digest.digest(&k).unwrap(), sub.receiver_value);
            }
        }
        // The unattacked sub-protocol always agrees.
        assert_eq!(tr.subs[1].run.key_a, tr.subs[1].run.key_b);
        let spec = cfg.extractor().unwrap();
        match (tr.subs[0].output(Party::Alice), tr.subs[1].output(Party::Alice)) {
            (Some(k0), Some(k1)) => {
                let x = k0.concat(&k1).unwrap();
                assert_eq!(tr.key_a, Some(spec.family().eval(&tr.extractor_seed, &x).unwrap()));
            }
            _ => assert!(tr.key_a.is_none()),
        }
    }
}

#[test]
fn swap_epr_mismatches_abort() {
    let s = IdealNike::new(2);
    let m = 8;
    let cfg = TwoRoundConfig::with_digest_bits(2, m).unwrap();
    let st = two_round_stats(&s, &cfg, Some(&SwapEpr), 3000, 4).unwrap();
    assert!(st.raw_mismatches > 0);
    let rate = st.aborted_on_mismatch as f64 / st.raw_mismatches as f64;
    let floor = 1.0 - 2.0 * 0.5f64.powi(m as i32);
    let se = (floor * (1.0 - floor) / st.raw_mismatches as f64).sqrt();
    assert!(rate >= floor - 3.0 * se, "abort rate {rate}");
}

#[test]
fn verifiability_under_swap_epr() {
    let s = IdealNike::new(2);
    let cfg = TwoRoundConfig::with_digest_bits(2, 16).unwrap();
    assert_eq!(verifiability_rate(&s, &cfg, None, 500, 6).unwrap(), 0.0);
    // Truncated digests collide with probability 2^{-16}, so a rare
    // disagreement is expected; the rate must stay within the union bound.
    let trials = 3000;
    let bound = 4.0 * 0.5f64.powi(16);
    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
    let rate = verifiability_rate(&s, &cfg, Some(&SwapEpr), trials, 6).unwrap();
    assert!(rate <= bound + 3.0 * sigma, "disagreement rate {rate}");
}

#[test]
fn entangling_ancilla_does_not_cause_disagreement() {
    let s = IdealNike::new(2);
    let cfg = TwoRoundConfig::with_digest_bits(2, 16).unwrap();
    let adv = AdversaryKind::PartialClone.build().unwrap();
    let st = two_round_stats(&s, &cfg, Some(adv.as_ref()), 2000, 12).unwrap();
    assert_eq!(st.disagree_rate, 0.0);
}

#[test]
fn two_round_is_reproducible() {
    let s = ToyDhNike::new(4).unwrap();
    let cfg = TwoRoundConfig::new(4).unwrap();
    let a = run_two_round(&s, &cfg, Some(&SwapEpr), &mut substream(1, 1)).unwrap();
    let b = run_two_round(&s, &cfg, Some(&SwapEpr), &mut substream(1, 1)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

fn exhaustive_cfg() -> TwoRoundConfig {
    let mut cfg = TwoRoundConfig::with_digest_bits(2, 1).unwrap();
    cfg.digest = DigestKind::Universal;
    cfg
}

/// Classical enumeration for the passive case, written independently and
/// including the extractor's additive seed part.
fn passive_distance_oracle() -> f64 {
    let n = 2;
    let ext = UniversalHashFamily::new(4, 1).unwrap();
    let dig = UniversalHashFamily::new(2, 1).unwrap();
    let mut joint: HashMap<(u128, u128, [u128; 8]), [f64; 3]> = HashMap::new();
    let ext_seeds: Vec<HashSeed> = ext.seeds().unwrap().collect();
    let digest_as: Vec<u128> = (0..4).collect();
    let w = 1.0 / (ext_seeds.len() * 4usize.pow(4) * 16) as f64;
    for es in &ext_seeds {
        for &h0s in &digest_as {
            for &h0r in &digest_as {
                for &h1s in &digest_as {
                    for &h1r in &digest_as {
                        for k0 in 0..4u128 {
                            for k1 in 0..4u128 {
                                let d = |a: u128, x: u128| dig.eval_raw(&HashSeed { a, b: 0 }, x);
                                let view = [h0s, h0r, h1s, h1r, d(h0s, k0), d(h0r, k0), d(h1s, k1), d(h1r, k1)];
                                let out = ext.eval_raw(es, (k0 << n) | k1) as usize;
                                joint.entry((es.a, es.b, view)).or_insert([0.0; 3])[out] += w;
                            }
                        }
                    }
                }
            }
        }
    }
    0.5 * joint.values().map(|p| (p[0] - p[1]).abs()).sum::<f64>()
}

#[test]
fn passive_everlasting_distance_matches_oracle() {
    let r = everlasting_distance_report(&IdealNike::new(2), &exhaustive_cfg(), None, true).unwrap();
    let oracle = passive_distance_oracle();
    assert!((r.alice - oracle).abs() < 1e-12, "{} vs {oracle}", r.alice);
    assert!((r.bob - oracle).abs() < 1e-12);
    assert!((r.alice - 0.2257080078125).abs() < 1e-12);
    assert!(r.alice <= r.epsilon);
    assert_eq!(r.alice_abort, 0.0);
}

#[test]
fn hidden_transcript_gives_zero_distance() {
    for kind in AdversaryKind::ALL {
        let adv = kind.build();
        let r = everlasting_distance_report(&IdealNike::new(2), &exhaustive_cfg(), adv.as_deref(), false).unwrap();
        assert!(r.alice < 1e-12 && r.bob < 1e-12, "{}: {r:?}", kind.label());
    }
}

#[test]
fn attacked_everlasting_regressions() {
    let s = IdealNike::new(2);
    let cfg = exhaustive_cfg();
    let swap = everlasting_distance_report(&s, &cfg, Some(&SwapEpr), true).unwrap();
    assert!((swap.alice - 0.186883).abs() < 1e-6, "{swap:?}");
    assert!((swap.bob - swap.alice).abs() < 1e-9);
    assert!((swap.alice_abort - 0.375).abs() < 1e-12);
    let clone = everlasting_distance_report(&s, &cfg, Some(&ClassicalClone), true).unwrap();
    assert!((clone.alice - 0.216522).abs() < 1e-6, "{clone:?}");
    assert!((clone.alice_abort - 7.0 / 32.0).abs() < 1e-12);
    for r in [swap, clone] {
        assert!(r.alice <= r.epsilon && r.bob <= r.epsilon);
    }
}

#[test]
fn everlasting_rejects_unsupported_setups() {
    let s = IdealNike::new(2);
    let sha = TwoRoundConfig::with_digest_bits(2, 1).unwrap();
    assert!(everlasting_distance_report(&s, &sha, None, true).is_err());
    let mut both = exhaustive_cfg();
    both.attacked = [true, true];
    assert!(everlasting_distance_report(&s, &both, Some(&SwapEpr), true).is_err());
    let big = IdealNike::new(3);
    let mut cfg3 = TwoRoundConfig::with_digest_bits(3, 1).unwrap();
    cfg3.digest = DigestKind::Universal;
    assert!(matches!(everlasting_distance_report(&big, &cfg3, None, true), Err(Error::SizeCap(_))));
}
