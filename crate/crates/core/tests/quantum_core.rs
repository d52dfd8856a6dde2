use std::f64::consts::FRAC_1_SQRT_2;

use moeqkd_core::quantum::lemmas::{averaged_projector_deviation, epr_support_deviation, operator_union_bound};
use moeqkd_core::quantum::random::{random_density, random_projector, random_pure_state, random_unitary};
use moeqkd_core::quantum::*;
use moeqkd_core::{BasisString, BitString, Error};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.rows() == b.rows() && a.cols() == b.cols() && (a - b).max_abs() <= tol
}

fn proj(v: &PureState) -> ComplexMatrix {
    ComplexMatrix::projector(v.amplitudes())
}

fn bits(s: &str) -> BitString {
    BitString::parse(s).unwrap()
}

#[test]
fn tensor_examples() {
    let i4 = tensor(&pauli_i(), &pauli_i()).unwrap();
    assert!(close(&i4, &ComplexMatrix::identity(4), 0.0));

    let p0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let p1 = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
    let d = tensor(&p0, &p1).unwrap();
    assert!(close(&d, &ComplexMatrix::diagonal(&[ZERO, ONE, ZERO, ZERO]), 0.0));

    let xz = tensor(&pauli_x(), &pauli_z()).unwrap();
    let expect = ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 0.0, 0.0, -1.0],
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, -1.0, 0.0, 0.0],
    ]);
    assert!(close(&xz, &expect, 0.0));
}

#[test]
fn tensor_dimension_cap() {
    let big = ComplexMatrix::identity(1 << 7);
    assert!(matches!(tensor(&big, &big), Err(Error::DimensionOverflow { .. })));
    assert!(tensor_with_cap(&pauli_x(), &pauli_x(), 2).is_err());
}

#[test]
fn partial_trace_examples() {
    let layout = RegisterLayout::sequential(&[("A", 1), ("B", 1)]).unwrap();
    let phi = bell_state(BellLabel::PhiPlus).density().unwrap();
    let ra = partial_trace(&phi, &layout, &["A"]).unwrap();
    assert!(close(ra.matrix(), &ComplexMatrix::identity(2).scale(0.5), 1e-12));

    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let rho = random_density(1, 2, &mut rng);
    let sigma = random_density(1, 2, &mut rng);
    let prod = rho.tensor(&sigma).unwrap();
    let back = partial_trace(&prod, &layout, &["A"]).unwrap();
    assert!(close(back.matrix(), rho.matrix(), 1e-12));
    let back_b = partial_trace(&prod, &layout, &["B"]).unwrap();
    assert!(close(back_b.matrix(), sigma.matrix(), 1e-12));
}

#[test]
fn partial_trace_matches_index_contraction() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let layout = RegisterLayout::sequential(&[("A", 1), ("B", 1)]).unwrap();
    for _ in 0..20 {
        let psi = random_pure_state(2, &mut rng);
        let rho = psi.density().unwrap();
        let got = partial_trace(&rho, &layout, &["A"]).unwrap();
        // rho_A[a, a'] = sum_b psi[a b] conj(psi[a' b])
        let v = psi.amplitudes();
        for a in 0..2 {
            for a2 in 0..2 {
                let expect: C64 = (0..2).map(|b| v[2 * a + b] * v[2 * a2 + b].conj()).sum();
                assert!((got.matrix().get(a, a2) - expect).norm() < 1e-12);
            }
        }
        let got_b = partial_trace(&rho, &layout, &["B"]).unwrap();
        for b in 0..2 {
            for b2 in 0..2 {
                let expect: C64 = (0..2).map(|a| v[2 * a + b] * v[2 * a + b2].conj()).sum();
                assert!((got_b.matrix().get(b, b2) - expect).norm() < 1e-12);
            }
        }
        let pure_path = psi.reduced(&[0]).unwrap();
        assert!(close(pure_path.matrix(), got.matrix(), 1e-12));
    }
}

#[test]
fn partial_trace_three_registers_preserves_trace() {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let layout = RegisterLayout::sequential(&[("A", 2), ("B", 1), ("E", 2)]).unwrap();
    let rho = random_density(5, 3, &mut rng);
    for keep in [vec!["A"], vec!["B"], vec!["E"], vec!["A", "E"], vec!["B", "E"]] {
        let r = partial_trace(&rho, &layout, &keep).unwrap();
        assert!((r.trace() - 1.0).abs() < 1e-12);
        assert!(r.matrix().min_eigenvalue() > -1e-10);
    }
}

#[test]
fn trace_distance_examples() {
    let zero = PureState::basis(1, 0).density().unwrap();
    let one = PureState::basis(1, 1).density().unwrap();
    let plus = theta_basis_state(&bits("0"), &BasisString::parse("1").unwrap()).unwrap().density().unwrap();
    assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-12);
    assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
    assert!((trace_distance(&zero, &plus).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    let two = DensityOperator::maximally_mixed(2);
    assert!(matches!(trace_distance(&zero, &two), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn operator_leq_examples() {
    let w = operator_leq(&ComplexMatrix::zeros(2, 2), &ComplexMatrix::identity(2), 1e-9).unwrap();
    assert!(w.holds);
    assert!((w.min_eigenvalue - 1.0).abs() < 1e-12);
    let w = operator_leq(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2).scale(0.5), 1e-9).unwrap();
    assert!(!w.holds);
    assert!((w.min_eigenvalue + 0.5).abs() < 1e-12);
    let nh = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    assert!(matches!(operator_leq(&nh, &ComplexMatrix::identity(2), 1e-9), Err(Error::NonHermitian { .. })));
}

#[test]
fn union_bound_rank_one_pair() {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    for _ in 0..20 {
        let p1 = random_projector(2, 1, &mut rng);
        let p2 = random_projector(2, 1, &mut rng);
        assert!(operator_union_bound(&[p1, p2], 1e-9).unwrap().holds);
    }
}

#[test]
fn union_bound_random_tuples() {
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    use rand::Rng;
    for _ in 0..200 {
        let t = rng.random_range(2..=4);
        let ps: Vec<ComplexMatrix> = (0..t)
            .map(|_| {
                let d = if rng.random::<bool>() { 2 } else { 4 };
                let r = rng.random_range(0..=d);
                random_projector(d, r, &mut rng)
            })
            .collect();
        let w = operator_union_bound(&ps, 1e-9).unwrap();
        assert!(w.min_eigenvalue >= -1e-9, "witness {}", w.min_eigenvalue);
    }
}

#[test]
fn theta_basis_orthonormal_n3() {
    for theta in BasisString::all(3) {
        let states: Vec<PureState> = BitString::all(3).map(|x| theta_basis_state(&x, &theta).unwrap()).collect();
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b) - re(expect)).norm() < 1e-12);
            }
        }
    }
    let x = bits("101");
    let zero = BasisString::zeros(3);
    let s = theta_basis_state(&x, &zero).unwrap();
    assert_eq!(s, PureState::basis(3, 0b101));
    assert!(matches!(
        theta_basis_state(&bits("10"), &zero),
        Err(Error::LengthMismatch { .. })
    ));
}

#[test]
fn bell_eigenbasis() {
    let xx = tensor(&pauli_x(), &pauli_x()).unwrap();
    let zz = tensor(&pauli_z(), &pauli_z()).unwrap();
    let phi = bell_state(BellLabel::PhiPlus);
    let h = FRAC_1_SQRT_2;
    for (a, e) in phi.amplitudes().iter().zip([h, 0.0, 0.0, h]) {
        assert!((a - re(e)).norm() < 1e-15);
    }
    let expected = [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)];
    for (label, (ex, ez)) in BellLabel::ALL.iter().zip(expected) {
        let s = bell_state(*label);
        let v = s.amplitudes();
        let xv = xx.apply(v);
        let zv = zz.apply(v);
        for k in 0..4 {
            assert!((xv[k] - v[k] * ex).norm() < 1e-12);
            assert!((zv[k] - v[k] * ez).norm() < 1e-12);
        }
    }
    for a in BellLabel::ALL {
        for b in BellLabel::ALL {
            let ip = bell_state(a).inner(&bell_state(b)).norm();
            assert!((ip - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
}

#[test]
fn agreement_projector_n1_standard_basis() {
    let p = agreement_projector(&BasisString::zeros(1)).unwrap();
    assert!(close(&p, &ComplexMatrix::diagonal(&[ONE, ZERO, ZERO, ONE]), 1e-15));
}

#[test]
fn agreement_projector_matches_outer_product_sum() {
    // Oracle: Σ_x |x⟩_θ|x⟩_θ projectors built from state vectors in A-first layout.
    for n in 1..=3 {
        for theta in BasisString::all(n) {
            let d = 1usize << (2 * n);
            let mut oracle = ComplexMatrix::zeros(d, d);
            for x in BitString::all(n) {
                let s = theta_basis_state(&x, &theta).unwrap();
                let pair = s.tensor(&s).unwrap();
                oracle = &oracle + &proj(&pair);
            }
            let p = agreement_projector(&theta).unwrap();
            assert!(close(&p, &oracle, 1e-12));
            assert!(close(&(&p * &p), &p, 1e-10));
            assert!((p.trace().re - (1u64 << n) as f64).abs() < 1e-10);
        }
    }
}

#[test]
fn epr_support_all_theta() {
    for n in 1..=4 {
        assert!(epr_support_deviation(n).unwrap() < 1e-12);
    }
}

#[test]
fn averaged_projector_identity() {
    for n in 1..=3 {
        assert!(averaged_projector_deviation(n).unwrap() <= 1e-12);
    }
}

#[test]
fn block_projector_examples() {
    let (m0, m1) = block_projectors(2, 1).unwrap();
    let epr = epr_pairs(2).unwrap();
    assert!(m1.apply(epr.amplitudes()).iter().all(|a| a.norm() < 1e-12));
    assert!(close(&(&m0 + &m1), &ComplexMatrix::identity(16), 1e-12));
    let mixed = DensityOperator::maximally_mixed(4);
    let v = m0.trace_product(mixed.matrix()).re;
    assert!((v - 7.0 / 16.0).abs() < 1e-12);
    for (n, s) in [(2, 2), (3, 1), (3, 3), (4, 2)] {
        let (m0, m1) = block_projectors(n, s).unwrap();
        assert!(close(&(&m0 * &m0), &m0, 1e-10));
        assert!(close(&(&m1 * &m1), &m1, 1e-10));
    }
}

#[test]
fn measurement_examples() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let l1 = RegisterLayout::sequential(&[("A", 2)]).unwrap();
    let theta = BasisString::parse("10").unwrap();
    let x = bits("11");
    let rho = theta_basis_state(&x, &theta).unwrap().density().unwrap();
    let dist = theta_outcome_distribution(&rho, &l1, "A", &theta).unwrap();
    assert!((dist[x.index()] - 1.0).abs() < 1e-12);
    let (got, _) = measure_theta_basis(&rho, &l1, "A", &theta, &mut rng).unwrap();
    assert_eq!(got, x);

    let l2 = RegisterLayout::sequential(&[("A", 1), ("B", 1)]).unwrap();
    let phi = bell_state(BellLabel::PhiPlus).density().unwrap();
    for t in ["0", "1"] {
        let theta = BasisString::parse(t).unwrap();
        let dist = theta_outcome_distribution(&phi, &l2, "A", &theta).unwrap();
        assert!((dist[0] - 0.5).abs() < 1e-12 && (dist[1] - 0.5).abs() < 1e-12);
        for _ in 0..20 {
            let (a, post) = measure_theta_basis(&phi, &l2, "A", &theta, &mut rng).unwrap();
            let (b, _) = measure_theta_basis(&post, &l2, "B", &theta, &mut rng).unwrap();
            assert_eq!(a, b);
        }
    }

    let zero = PureState::basis(1, 0).density().unwrap();
    let l = RegisterLayout::sequential(&[("A", 1)]).unwrap();
    let dist = theta_outcome_distribution(&zero, &l, "A", &BasisString::parse("1").unwrap()).unwrap();
    assert!((dist[0] - 0.5).abs() < 1e-12 && (dist[1] - 0.5).abs() < 1e-12);
}

#[test]
fn measurement_is_seed_deterministic() {
    let rho = DensityOperator::maximally_mixed(3);
    let l = RegisterLayout::sequential(&[("A", 3)]).unwrap();
    let theta = BasisString::parse("101").unwrap();
    let run = |seed| {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..10).map(|_| measure_theta_basis(&rho, &l, "A", &theta, &mut rng).unwrap().0).collect::<Vec<_>>()
    };
    assert_eq!(run(4), run(4));
}

#[test]
fn pure_and_mixed_measurement_agree_in_distribution() {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let psi = random_pure_state(3, &mut rng);
    let rho = psi.density().unwrap();
    let layout = RegisterLayout::sequential(&[("A", 2), ("B", 1)]).unwrap();
    let theta = BasisString::parse("01").unwrap();
    let exact = theta_outcome_distribution(&rho, &layout, "A", &theta).unwrap();
    let trials = 20_000;
    let mut counts = [0usize; 4];
    for _ in 0..trials {
        let (x, _) = measure_theta_basis_pure(&psi, 0, &theta, &mut rng).unwrap();
        counts[x.index()] += 1;
    }
    for k in 0..4 {
        let p = exact[k];
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((counts[k] as f64 / trials as f64 - p).abs() <= 4.0 * sd + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_distance_metric_properties(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a = random_density(2, 2, &mut rng);
        let b = random_density(2, 1, &mut rng);
        let c = random_density(2, 4, &mut rng);
        let ab = trace_distance(&a, &b).unwrap();
        let ba = trace_distance(&b, &a).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        let cb = trace_distance(&c, &b).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab <= ac + cb + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        let u = random_unitary(4, &mut rng);
        let ua = DensityOperator::new(a.matrix().expand(&u).hermitian_part()).unwrap();
        let ub = DensityOperator::new(b.matrix().expand(&u).hermitian_part()).unwrap();
        prop_assert!((trace_distance(&ua, &ub).unwrap() - ab).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_inverts_tensor(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a = random_density(2, 3, &mut rng);
        let b = random_density(1, 1, &mut rng).scaled(0.5);
        let m = tensor(a.matrix(), b.matrix()).unwrap();
        let back = partial_trace_qubits(&m, 3, &[0, 1]).unwrap();
        prop_assert!(close(&back, &a.matrix().scale(0.5), 1e-12));
    }

    #[test]
    fn constructed_projectors_idempotent(theta in 0u128..16, n in 1usize..=4) {
        let theta = BasisString::from_value(n, theta & ((1 << n) - 1));
        let p = agreement_projector(&theta).unwrap();
        prop_assert!(close(&(&p * &p), &p, 1e-10));
    }
}
