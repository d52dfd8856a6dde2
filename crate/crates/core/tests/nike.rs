use moeqkd_core::bits::BitString;
use moeqkd_core::hash::UniversalHashFamily;
use moeqkd_core::nike::{
    discrete_log_brute_force, mod_pow, nike_correctness_rate, sample_z, BrokenNike, IdealNike, Identity, Nike,
    SchemeKind, ToyDhNike, DEFAULT_PRIME,
};
use moeqkd_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

#[test]
fn all_schemes_are_correct() {
    let mut r = rng(1);
    assert_eq!(nike_correctness_rate(&IdealNike::new(3), 200, &mut r), 1.0);
    assert_eq!(nike_correctness_rate(&ToyDhNike::new(3).unwrap(), 1000, &mut r), 1.0);
    assert_eq!(nike_correctness_rate(&BrokenNike::new(3), 1000, &mut r), 1.0);
}

fn same_identity_aborts<N: Nike>(s: &N) {
    let mut r = rng(2);
    let pp = s.setup(&mut r);
    let a = Identity::alice();
    let (sk, pk) = s.keygen(&pp, &a, &mut r);
    assert!(s.shared_key(&pp, &a, &pk, &a, &sk).is_none());
}

#[test]
fn equal_identities_give_abort() {
    same_identity_aborts(&IdealNike::new(2));
    same_identity_aborts(&ToyDhNike::new(2).unwrap());
    same_identity_aborts(&BrokenNike::new(2));
}

#[test]
fn derivation_is_pure() {
    let s = ToyDhNike::new(4).unwrap();
    let mut r = rng(3);
    let pp = s.setup(&mut r);
    let (sk_a, _) = s.keygen(&pp, &Identity::alice(), &mut r);
    let (_, pk_b) = s.keygen(&pp, &Identity::bob(), &mut r);
    let first = s.shared_key(&pp, &Identity::bob(), &pk_b, &Identity::alice(), &sk_a);
    for _ in 0..10 {
        assert_eq!(s.shared_key(&pp, &Identity::bob(), &pk_b, &Identity::alice(), &sk_a), first);
    }
}

#[test]
fn ideal_keys_are_uniform() {
    let s = IdealNike::new(2);
    let mut r = rng(4);
    let trials = 4000;
    let mut counts = [0usize; 4];
    for _ in 0..trials {
        counts[sample_z(&s, &mut r).unwrap().theta.index()] += 1;
    }
    let expect = trials as f64 / 4.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    // 99.9% quantile of chi-square with 3 degrees of freedom
    assert!(chi2 < 16.27, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn ideal_public_tuple_carries_no_key() {
    let s = IdealNike::new(8);
    let mut r = rng(5);
    let z = sample_z(&s, &mut r).unwrap();
    let json: serde_json::Value = serde_json::to_value(&z.p).unwrap();
    assert_eq!(json["pp"].as_object().unwrap().keys().collect::<Vec<_>>(), ["handle"]);
    assert!(s.efficient_leak(&z.p).is_none());
    assert!(s.unbounded_recover(&z.p).unwrap().is_none());
    // only the handle-based lookup reveals it
    let (sk_a, _) = s.keygen(&z.p.pp, &Identity::alice(), &mut r);
    assert_eq!(s.shared_key(&z.p.pp, &Identity::bob(), &z.p.pk_b, &Identity::alice(), &sk_a), Some(z.theta));
}

#[test]
fn toy_dh_key_reproducible_from_seed() {
    let s = ToyDhNike::new(4).unwrap();
    let z = sample_z(&s, &mut rng(6)).unwrap();
    // replay the same randomness by hand
    let mut r = rng(6);
    let family = UniversalHashFamily::new(20, 4).unwrap();
    let seed = family.random_seed(&mut r);
    assert_eq!(seed, z.p.pp.expansion);
    let a = r.random_range(1..DEFAULT_PRIME - 1);
    let b = r.random_range(1..DEFAULT_PRIME - 1);
    let g = s.generator();
    assert_eq!(mod_pow(g, a, DEFAULT_PRIME), z.p.pk_a);
    assert_eq!(mod_pow(g, b, DEFAULT_PRIME), z.p.pk_b);
    let secret = mod_pow(g, a * b % (DEFAULT_PRIME - 1), DEFAULT_PRIME);
    let expected = family.eval(&seed, &BitString::from_value(20, secret as u128)).unwrap();
    assert_eq!(expected, z.theta);
}

#[test]
fn discrete_log_examples() {
    assert_eq!(discrete_log_brute_force(101, 2, mod_pow(2, 13, 101)).unwrap(), 13);
    assert_eq!(discrete_log_brute_force(101, 2, 2).unwrap(), 1);
    assert!(matches!(discrete_log_brute_force(101, 2, 0), Err(Error::DiscreteLogNotFound { .. })));
}

#[test]
fn small_prime_break() {
    let s = ToyDhNike::with_prime(3, 101).unwrap();
    assert_eq!(s.generator(), 2);
    let mut r = rng(7);
    for _ in 0..100 {
        let z = sample_z(&s, &mut r).unwrap();
        assert_eq!(s.break_toy_dh(&z.p).unwrap(), z.theta);
    }
}

#[test]
fn break_round_trip() {
    let s = ToyDhNike::new(4).unwrap();
    let mut r = rng(8);
    let ok = (0..100).filter(|_| {
        let z = sample_z(&s, &mut r).unwrap();
        s.break_toy_dh(&z.p).unwrap() == z.theta
    });
    assert_eq!(ok.count(), 100);
}

#[test]
fn malformed_tuple_fails_to_break() {
    let s = ToyDhNike::with_prime(2, 101).unwrap();
    let mut z = sample_z(&s, &mut rng(9)).unwrap();
    z.p.pk_a = 0;
    assert!(matches!(s.break_toy_dh(&z.p), Err(Error::DiscreteLogNotFound { .. })));
}

#[test]
fn broken_scheme_leaks_key() {
    let s = BrokenNike::new(5);
    let mut r = rng(10);
    for _ in 0..20 {
        let z = sample_z(&s, &mut r).unwrap();
        assert_eq!(s.efficient_leak(&z.p), Some(z.theta));
    }
}

#[test]
fn enumerations_are_distributions() {
    let ideal = IdealNike::new(3).enumerate_z().unwrap();
    let broken = BrokenNike::new(3).enumerate_z().unwrap();
    for total in [ideal.iter().map(|e| e.0).sum::<f64>(), broken.iter().map(|e| e.0).sum::<f64>()] {
        assert!((total - 1.0).abs() < 1e-12);
    }
    assert_eq!(ideal.len(), 8);
    assert!(ToyDhNike::new(2).unwrap().enumerate_z().is_none());
}

#[test]
fn scheme_parameters_rejected() {
    assert!(ToyDhNike::with_prime(2, 100).is_err());
    assert!(ToyDhNike::with_prime(2, (1 << 20) + 7).is_err());
    assert!(Identity::new("").is_err());
    assert!("toy-dh".parse::<SchemeKind>().is_ok());
    assert!("rsa".parse::<SchemeKind>().is_err());
}

#[test]
fn ideal_setup_replays_under_the_same_seed() {
    let s = IdealNike::new(4);
    let first = sample_z(&s, &mut rng(40)).unwrap();
    let again = sample_z(&s, &mut rng(40)).unwrap();
    assert_eq!(first, again);
    assert_eq!(s.table_len(), 1);
}
