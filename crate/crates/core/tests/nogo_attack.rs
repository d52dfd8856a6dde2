use moeqkd_core::nogo::{
    attack_success_rate, attack_trial, eve_offline, eve_online, nogo_bound, run_toy_protocol, sample_gamma_a,
    AttackConfig, ClassicalKeyProtocol, KeyFunction, KeyFunctionKind, SamplingMethod,
};
use moeqkd_core::rng::substream;
use moeqkd_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn proto(kind: KeyFunctionKind, r: usize, m: usize) -> ClassicalKeyProtocol {
    ClassicalKeyProtocol::new(kind, r, m, 1).unwrap()
}

#[test]
fn xor_prefix_key_replays_from_randomness() {
    let p = proto(KeyFunctionKind::XorPrefix, 16, 5);
    for t in 0..200 {
        let run = run_toy_protocol(&p, &mut substream(1, t));
        let expected = (run.alice.randomness ^ run.bob.randomness) >> 11;
        assert_eq!(run.key_a.value(), expected);
        assert_eq!(run.key_b.value(), expected);
        assert_eq!(run.alice.public, run.alice.randomness >> 8);
    }
}

#[test]
fn table_key_is_a_lookup() {
    let p = proto(KeyFunctionKind::Table, 8, 2);
    let KeyFunction::Table { entries } = &p.function else { panic!("table expected") };
    assert_eq!(entries.len(), 1 << 16);
    assert!(entries.iter().all(|&e| e < 4));
    for t in 0..200 {
        let run = run_toy_protocol(&p, &mut substream(2, t));
        let idx = ((run.alice.randomness << 8) | run.bob.randomness) as usize;
        assert_eq!(run.key_a.value(), entries[idx] as u128);
    }
}

#[test]
fn honest_runs_are_perfectly_correct() {
    for kind in KeyFunctionKind::ALL {
        let p = proto(kind, 10, 3);
        for t in 0..1000 {
            let run = run_toy_protocol(&p, &mut substream(3, t));
            assert_eq!(run.key_a, run.key_b);
            assert_eq!(run.key_a, p.key_string(run.alice.randomness, run.bob.randomness));
        }
    }
}

#[test]
fn online_phase_is_non_destructive_and_deterministic() {
    let p = proto(KeyFunctionKind::Universal, 24, 3);
    let cfg = AttackConfig::for_protocol(&p);
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let alice = p.sample_party(&mut rng);
    let bob = p.sample_party(&mut rng);
    let (mut ma, mut mb) = (alice.payload.clone(), bob.payload.clone());
    let before = serde_json::to_string(&(&ma, &mb)).unwrap();
    let state = eve_online(&p, &cfg, alice.public, bob.public, &mut ma, &mut mb, &mut rng);
    assert_eq!(serde_json::to_string(&(&ma, &mb)).unwrap(), before);
    assert_eq!(state.alphas.len(), 48);
    for &(rb, alpha) in &state.alphas {
        assert_eq!(alpha, p.key(alice.randomness, rb));
    }
    for &(ra, beta) in &state.betas {
        assert_eq!(beta, p.key(ra, bob.randomness));
    }
}

#[test]
fn honest_keys_survive_the_attack() {
    let p = proto(KeyFunctionKind::Table, 8, 2);
    let cfg = AttackConfig::for_protocol(&p);
    for t in 0..1000 {
        let tr = attack_trial(&p, &cfg, &mut substream(5, t));
        assert!(tr.undisturbed);
        assert_eq!(tr.key_a, tr.key_b);
        assert_eq!(tr.key_a, tr.honest_key(&p));
        assert!(tr.state.in_gamma_a(&p, tr.alice.randomness));
        assert!(tr.state.in_gamma_b(&p, tr.bob.randomness));
    }
}

#[test]
fn constant_function_is_always_guessed() {
    let p = proto(KeyFunctionKind::Constant, 8, 3);
    let rep = attack_success_rate(&p, &AttackConfig::for_protocol(&p), 500, 6).unwrap();
    assert_eq!(rep.rate, 1.0);
}

/// A full-rank map of `r_A ⊕ r_B` pins both `Γ` sets to a single point.
#[test]
fn full_rank_linear_map_is_recovered_exactly() {
    let p = proto(KeyFunctionKind::Linear, 8, 8);
    let cfg = AttackConfig::for_protocol(&p);
    for t in 0..300 {
        let tr = attack_trial(&p, &cfg, &mut substream(7, t));
        assert_eq!(tr.guess.ra, Some(tr.alice.randomness));
        assert_eq!(tr.guess.rb, Some(tr.bob.randomness));
    }
}

#[test]
fn table_attack_rates() {
    let p10 = proto(KeyFunctionKind::Table, 10, 2);
    let rep = attack_success_rate(&p10, &AttackConfig::for_protocol(&p10), 10_000, 2026).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.method, SamplingMethod::Exact);
    assert_eq!(rep.rate, 1.0);
    let p12 = proto(KeyFunctionKind::Table, 12, 2);
    let rep = attack_success_rate(&p12, &AttackConfig::for_protocol(&p12), 1000, 2026).unwrap();
    assert_eq!(rep.bound, 0.0);
    assert!(rep.rate > 0.0);
    assert_eq!(rep.rate, 1.0);
}

#[test]
fn one_bit_keys_beat_the_guessing_floor() {
    for (kind, r) in [(KeyFunctionKind::Table, 8), (KeyFunctionKind::Universal, 32), (KeyFunctionKind::XorPrefix, 8)] {
        let p = proto(kind, r, 1);
        let rep = attack_success_rate(&p, &AttackConfig::for_protocol(&p), 2000, 8).unwrap();
        assert!(rep.rate >= 0.5, "{}: {}", kind.label(), rep.rate);
    }
    let p = proto(KeyFunctionKind::Table, 8, 1);
    let rep = attack_success_rate(&p, &AttackConfig::for_protocol(&p), 10_000, 2026).unwrap();
    assert!((rep.rate - 0.9967).abs() < 1e-12);
}

#[test]
fn conditional_sample_is_uniform_on_gamma() {
    let p = proto(KeyFunctionKind::XorPrefix, 8, 2);
    let cfg = AttackConfig::for_protocol(&p);
    let tr = attack_trial(&p, &cfg, &mut substream(9, 0));
    let members: Vec<u128> = (0..256).filter(|&x| tr.state.in_gamma_a(&p, x)).collect();
    assert_eq!(members.len(), 64);
    let draws = 64_000;
    let mut counts = vec![0usize; 256];
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    for _ in 0..draws {
        let (x, method) = sample_gamma_a(&p, &cfg, &tr.state, &mut rng);
        assert_eq!(method, SamplingMethod::Exact);
        counts[x.unwrap() as usize] += 1;
    }
    let expected = draws as f64 / 64.0;
    let chi2: f64 = members.iter().map(|&x| (counts[x as usize] as f64 - expected).powi(2) / expected).sum();
    // 63 degrees of freedom: mean 63, standard deviation √126.
    assert!(chi2 < 63.0 + 5.0 * 126f64.sqrt(), "chi-square {chi2}");
    assert!(counts.iter().enumerate().all(|(x, &c)| c == 0 || members.contains(&(x as u128))));
}

#[test]
fn large_randomness_uses_rejection_sampling() {
    let p = proto(KeyFunctionKind::Universal, 64, 4);
    let cfg = AttackConfig::for_protocol(&p);
    assert_eq!(cfg.samples, 128);
    let rep = attack_success_rate(&p, &cfg, 300, 11).unwrap();
    assert_eq!(rep.method, SamplingMethod::Rejection);
    assert_eq!(rep.budget_failures, 0);
    assert!(rep.rate >= rep.bound - 3.0 * rep.stderr);
    assert_eq!((rep.honest_ok, rep.undisturbed, rep.premise_ok), (300, 300, 300));
}

#[test]
fn exhausted_budget_counts_as_failure() {
    let p = proto(KeyFunctionKind::Universal, 40, 8);
    let cfg = AttackConfig { samples: 80, candidate_cap: 1 };
    let rep = attack_success_rate(&p, &cfg, 200, 12).unwrap();
    assert!(rep.budget_failures > 0);
    assert!(rep.rate <= 1.0 - rep.budget_failures as f64 / 200.0 + 1e-12);
    let tr = attack_trial(&p, &cfg, &mut substream(12, 0));
    let guess = eve_offline(&p, &cfg, &tr.state, &mut substream(13, 0));
    if guess.ra.is_none() || guess.rb.is_none() {
        assert!(guess.key.is_none());
    }
}

#[test]
fn bound_values() {
    assert!((nogo_bound(64) - 0.33226853206682244).abs() < 1e-12);
    assert!((nogo_bound(16) - 0.02953202733130661).abs() < 1e-12);
    assert!(nogo_bound(12) < 0.0);
}

#[test]
fn reports_are_reproducible() {
    let p = proto(KeyFunctionKind::Table, 8, 2);
    let cfg = AttackConfig::for_protocol(&p);
    assert_eq!(attack_success_rate(&p, &cfg, 400, 3).unwrap(), attack_success_rate(&p, &cfg, 400, 3).unwrap());
}

#[test]
fn invalid_parameters() {
    assert!(ClassicalKeyProtocol::new(KeyFunctionKind::XorPrefix, 8, 9, 0).is_err());
    assert!(ClassicalKeyProtocol::new(KeyFunctionKind::XorPrefix, 65, 1, 0).is_err());
    assert!(matches!(ClassicalKeyProtocol::new(KeyFunctionKind::Table, 13, 2, 0), Err(Error::SizeCap(_))));
    assert!("nonsense".parse::<KeyFunctionKind>().is_err());
    assert_eq!("universal".parse::<KeyFunctionKind>().unwrap(), KeyFunctionKind::Universal);
}
