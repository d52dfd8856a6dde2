use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::config::{RunConfig, FUNCTION_SEED};
use super::record::ResultRecord;
use crate::bits::{BasisString, BitString};
use crate::entropy::{
    chain_rule_check, helstrom_binary, hmin, pguess, pretty_good_measurement, ChainRuleVerdict, CqEnsemble, Povm,
    SolverOptions, DEFAULT_GAP,
};
use crate::error::{Error, Result};
use crate::game::{
    binomial, commutation_deviation, decomposition_terms, default_block, exact_pwin_with_block, fixed_theta_bound,
    sampled_pwin, verify_fixed_theta_bound, verify_random_theta_bound, PublicView, Strategy,
};
use crate::hash::{extractor_distance, uh_collision_probability, ExtractorSpec};
use crate::nike::Nike;
use crate::nogo::{attack_success_rate, AttackConfig, ClassicalKeyProtocol};
use crate::protocol::{
    everlasting_distance_report, run_niqkd, two_round_stats, weak_security_report, AdversaryKind, TwoRoundConfig,
};
use crate::quantum::lemmas::{averaged_projector_deviation, epr_support_deviation, operator_union_bound};
use crate::quantum::random::{random_density, random_projector};
use crate::quantum::{theta_basis_state, ComplexMatrix, DensityOperator, PureState};
use crate::rng::substream;
use crate::with_scheme;

/// Tolerance for identities that hold exactly up to rounding.
const EXACT_TOL: f64 = 1e-12;

/// Required bracket width for certified guessing probabilities.
const BRACKET_TOL: f64 = 1e-6;

/// Trial `i` of section `section`; sections never share a stream.
fn stream(seed: u64, section: u64, i: u64) -> ChaCha20Rng {
    substream(seed, (section << 40) | i)
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|s| n.is_multiple_of(*s)).collect()
}

fn random_divisor<R: Rng + ?Sized>(n: usize, rng: &mut R) -> usize {
    let d = divisors(n);
    d[rng.random_range(0..d.len())]
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

pub(super) fn lemmas(cfg: &RunConfig) -> Result<Vec<ResultRecord>> {
    let rec = |metric: &str, value: f64| ResultRecord::new("lemmas", metric, value);
    let (tol, trials) = (cfg.tolerance, cfg.trials);
    let mut out = Vec::new();

    let eigs = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, 0, i);
            let k = rng.random_range(2..=3);
            let ps: Vec<ComplexMatrix> = (0..k)
                .map(|_| {
                    let d = rng.random_range(2..=4);
                    let rank = rng.random_range(1..=d);
                    random_projector(d, rank, &mut rng)
                })
                .collect();
            operator_union_bound(&ps, tol).map(|w| w.min_eigenvalue)
        })
        .collect::<Result<Vec<f64>>>()?;
    let violations = eigs.iter().filter(|&&e| e < -tol).count();
    out.push(rec("union-bound-min-eigenvalue", -max(eigs.iter().map(|e| -e))).trials(trials).at_least(-tol));
    out.push(rec("union-bound-violations", violations as f64).trials(trials).at_most(0.0));

    for n in 1..=3 {
        out.push(rec("averaged-projector-deviation", averaged_projector_deviation(n)?).n(n).at_most(EXACT_TOL));
    }
    for n in 1..=4 {
        out.push(rec("epr-support-deviation", epr_support_deviation(n)?).n(n).at_most(EXACT_TOL));
    }

    let random_theta = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, 1, i);
            let n = 1 + (i % 4) as usize;
            let s = random_divisor(n, &mut rng);
            let rank = rng.random_range(1..=4);
            let rho = random_density(2 * n, rank, &mut rng);
            verify_random_theta_bound(&rho, s).map(|c| c.value - c.bound)
        })
        .collect::<Result<Vec<f64>>>()?;
    let violations = random_theta.iter().filter(|&&x| x > tol).count();
    out.push(rec("random-theta-max-excess", max(random_theta)).trials(trials).at_most(tol));
    out.push(rec("random-theta-violations", violations as f64).trials(trials).at_most(0.0));

    let fixed_theta = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, 2, i);
            let n = 1 + (i % 3) as usize;
            let e = rng.random_range(0..=3);
            let s = random_divisor(n, &mut rng);
            let rho = random_density(2 * n + e, rng.random_range(1..=4), &mut rng);
            let ops: Vec<ComplexMatrix> =
                (0..1 << n).map(|_| random_density(e, rng.random_range(1..=2), &mut rng).into_matrix()).collect();
            let povm = Povm { elements: BitString::all(n).zip(pretty_good_measurement(&ops)).collect() };
            let theta = BasisString::random(n, &mut rng);
            verify_fixed_theta_bound(&rho, &povm, &theta, s).map(|c| (c.value - c.bound, c.ok))
        })
        .collect::<Result<Vec<(f64, bool)>>>()?;
    let violations = fixed_theta.iter().filter(|(x, ok)| *x > tol || !ok).count();
    out.push(rec("fixed-theta-max-excess", max(fixed_theta.iter().map(|x| x.0))).trials(trials).at_most(tol));
    out.push(rec("fixed-theta-violations", violations as f64).trials(trials).at_most(0.0));
    Ok(out)
}

pub(super) fn moe(cfg: &RunConfig) -> Result<Vec<ResultRecord>> {
    let n = cfg.n;
    let s = cfg.s.unwrap_or_else(|| default_block(n));
    let strategy = cfg.strategy.build(n, cfg.seed)?;
    with_scheme!(cfg.scheme, n, |scheme| moe_rows(cfg, &scheme, strategy.as_ref(), s))
}

fn moe_rows<N: Nike>(cfg: &RunConfig, scheme: &N, strategy: &dyn Strategy, s: usize) -> Result<Vec<ResultRecord>> {
    let n = cfg.n;
    let rec = |metric: &str, value: f64| {
        ResultRecord::new("moe", metric, value).scheme(cfg.scheme.label()).strategy(cfg.strategy.label()).n(n).s(s)
    };
    let exact = match exact_pwin_with_block(scheme, strategy, n, s) {
        Ok(r) => Some(r),
        Err(Error::NotEnumerable(_)) if !cfg.exact => None,
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    if let Some(r) = &exact {
        out.push(rec("pwin", r.pwin));
        out.push(rec("agree-rate", r.agree_rate));
        let d = r.decomposition.unwrap_or_default();
        out.push(rec("agree-m0", d.agree_m0).at_most(fixed_theta_bound(n, s) + cfg.tolerance));
        out.push(rec("agree-m1", d.agree_m1));
        out.push(rec("disagree", d.disagree).at_most(1.0 / (1u64 << n) as f64 + cfg.tolerance));
        let support = scheme.enumerate_z().ok_or_else(|| Error::NotEnumerable(scheme.name().into()))?;
        let mut worst: f64 = 0.0;
        let mut failures = 0;
        for (_, z) in support {
            let psi = strategy.prepare(&PublicView { leak: scheme.efficient_leak(&z.p) })?;
            let rep = decomposition_terms(&psi, &z.theta, s, &strategy.charlie_povm(&z.theta)?)?;
            worst = worst.max(rep.terms.identity_error());
            failures += usize::from(!rep.holds());
        }
        out.push(rec("decomposition-identity-error", worst).at_most(cfg.tolerance));
        out.push(rec("decomposition-failures", failures as f64).at_most(0.0));
        out.push(rec("commutation-deviation", commutation_deviation(n, s)?).at_most(1e-10));
    }
    if !cfg.exact {
        let t = cfg.trials;
        let mc = sampled_pwin(scheme, strategy, n, t, &mut ChaCha20Rng::seed_from_u64(cfg.seed))?;
        out.push(rec("pwin-sampled", mc.pwin).trials(t).stderr(mc.pwin_stderr));
        out.push(rec("agree-rate-sampled", mc.agree_rate).trials(t).stderr(mc.agree_stderr));
        if let Some(r) = &exact {
            out.push(rec("pwin-sampled-deviation", (mc.pwin - r.pwin).abs()).trials(t).at_most(3.0 * mc.pwin_stderr + cfg.tolerance));
            out.push(
                rec("agree-rate-sampled-deviation", (mc.agree_rate - r.agree_rate).abs())
                    .trials(t)
                    .at_most(3.0 * mc.agree_stderr + cfg.tolerance),
            );
        }
    }
    Ok(out)
}

fn passive(kind: AdversaryKind) -> bool {
    matches!(kind, AdversaryKind::None | AdversaryKind::Identity)
}

pub(super) fn niqkd(cfg: &RunConfig) -> Result<Vec<ResultRecord>> {
    with_scheme!(cfg.scheme, cfg.n, |scheme| niqkd_rows(cfg, &scheme))
}

fn niqkd_rows<N: Nike>(cfg: &RunConfig, scheme: &N) -> Result<Vec<ResultRecord>> {
    let n = cfg.n;
    let rec = |metric: &str, value: f64| {
        ResultRecord::new("niqkd", metric, value).scheme(cfg.scheme.label()).strategy(cfg.adversary.label()).n(n)
    };
    let adversary = cfg.adversary.build();
    let adversary = adversary.as_deref();
    let mut out = Vec::new();
    if cfg.exact {
        let r = weak_security_report(scheme, adversary, 0, cfg.seed)?;
        out.push(rec("hmin-lower", r.hmin.lower));
        out.push(rec("hmin-upper", r.hmin.upper));
        out.push(rec("pguess-lower", r.pguess_lower));
        out.push(rec("pguess-upper", r.pguess_upper));
        out.push(rec("pguess-bracket-width", r.pguess_upper - r.pguess_lower).at_most(BRACKET_TOL));
        out.push(rec("agree-probability", r.agree_rate));
        if passive(cfg.adversary) {
            // Full entropy is certified to the bracket tolerance.
            out.push(rec("hmin-bracket-width", r.hmin.width()).at_most(BRACKET_TOL));
            out.push(rec("hmin", r.hmin.center()).at_least(n as f64 - BRACKET_TOL));
        } else {
            out.push(rec("hmin-bracket-width", r.hmin.width()));
            out.push(rec("hmin", r.hmin.center()));
        }
        return Ok(out);
    }
    let t = cfg.trials;
    let outcomes = (0..t as u64)
        .into_par_iter()
        .map(|i| {
            let tr = run_niqkd(scheme, n, adversary, &mut substream(cfg.seed, i))?;
            let (ga, gb) = tr.eve_guess.as_ref().map_or((false, false), |g| (g.key_a == tr.key_a, g.key_b == tr.key_b));
            Ok([tr.key_a == tr.key_b, ga, gb])
        })
        .collect::<Result<Vec<[bool; 3]>>>()?;
    let count = |k: usize| outcomes.iter().filter(|o| o[k]).count();
    let (agree, se) = binomial(count(0), t);
    let row = rec("agreement", agree).trials(t).stderr(se);
    out.push(if adversary.is_none() { row.at_least(1.0) } else { row });
    if adversary.is_some() {
        for (k, metric) in [(1, "eve-recovers-key-a"), (2, "eve-recovers-key-b")] {
            let (p, se) = binomial(count(k), t);
            out.push(rec(metric, p).trials(t).stderr(se));
        }
    }
    Ok(out)
}

pub(super) fn two_round(cfg: &RunConfig) -> Result<Vec<ResultRecord>> {
    with_scheme!(cfg.scheme, cfg.n, |scheme| two_round_rows(cfg, &scheme))
}

fn two_round_rows<N: Nike>(cfg: &RunConfig, scheme: &N) -> Result<Vec<ResultRecord>> {
    let n = cfg.n;
    let mut tr = match cfg.m {
        Some(m) => TwoRoundConfig::with_digest_bits(n, m)?,
        None => TwoRoundConfig::new(n)?,
    };
    tr.digest = cfg.digest;
    tr.validate()?;
    let m = tr.digest_bits;
    let rec = |metric: &str, value: f64| {
        ResultRecord::new("two-round", metric, value)
            .scheme(cfg.scheme.label())
            .strategy(cfg.adversary.label())
            .n(n)
            .m(m)
    };
    let adversary = cfg.adversary.build();
    let adversary = adversary.as_deref();
    let mut out = Vec::new();
    if cfg.exact {
        for visible in [true, false] {
            let r = everlasting_distance_report(scheme, &tr, adversary, visible)?;
            let view = if visible { "visible" } else { "hidden" };
            out.push(rec(&format!("distance-alice-{view}"), r.alice).at_most(r.epsilon));
            out.push(rec(&format!("distance-bob-{view}"), r.bob).at_most(r.epsilon));
            out.push(rec(&format!("abort-alice-{view}"), r.alice_abort));
            out.push(rec(&format!("abort-bob-{view}"), r.bob_abort));
        }
        return Ok(out);
    }
    let t = cfg.trials;
    let st = two_round_stats(scheme, &tr, adversary, t, cfg.seed)?;
    let row = rec("success-rate", st.success_rate).trials(t).stderr(st.success_stderr);
    out.push(if adversary.is_none() { row.at_least(1.0) } else { row });
    // Digest collisions on either side of either sub-protocol.
    let collision = 4.0 * 0.5f64.powi(m as i32);
    let slack = 3.0 * (collision * (1.0 - collision) / t as f64).sqrt();
    out.push(
        rec("disagree-rate", st.disagree_rate).trials(t).stderr(st.disagree_stderr).at_most(collision + slack),
    );
    out.push(rec("both-abort-rate", st.both_abort_rate).trials(t));
    out.push(rec("raw-mismatches", st.raw_mismatches as f64).trials(t));
    if st.raw_mismatches > 0 {
        let k = st.raw_mismatches;
        let floor = 1.0 - 2.0 * 0.5f64.powi(m as i32);
        let slack = 3.0 * (floor * (1.0 - floor) / k as f64).sqrt();
        let rate = st.aborted_on_mismatch as f64 / k as f64;
        out.push(rec("abort-on-mismatch", rate).trials(k).at_least(floor - slack));
    }
    Ok(out)
}

pub(super) fn nogo(cfg: &RunConfig) -> Result<Vec<ResultRecord>> {
    let m = cfg.m.unwrap_or(4);
    let proto = ClassicalKeyProtocol::new(cfg.key_function, cfg.r, m, FUNCTION_SEED)?;
    let t = cfg.trials;
    let rep = attack_success_rate(&proto, &AttackConfig::for_protocol(&proto), t, cfg.seed)?;
    let rec = |metric: &str, value: f64| {
        ResultRecord::new("nogo", metric, value).strategy(cfg.key_function.label()).m(m).r(cfg.r).trials(t)
    };
    let frac = |k: usize| k as f64 / t as f64;
    Ok(vec![
        rec("success-rate", rep.rate).stderr(rep.stderr).check(rep.bound, rep.passed),
        rec("honest-keys-intact", frac(rep.honest_ok)).at_least(1.0),
        rec("payloads-undisturbed", frac(rep.undisturbed)).at_least(1.0),
        rec("randomness-in-gamma", frac(rep.premise_ok)).at_least(1.0),
        rec("budget-failures", rep.budget_failures as f64),
    ])
}

fn label(i: usize, bits: usize) -> BitString {
    BitString::from_value(bits, i as u128)
}

fn classical(n: usize, weights: &[(u128, f64)]) -> Result<CqEnsemble> {
    let one = DensityOperator::maximally_mixed(0);
    CqEnsemble::from_triples(weights.iter().map(|&(x, p)| (BitString::from_value(n, x), p, one.clone())).collect())
}

/// `X` uniform on `n` bits with its first bit in a fixed BB84 basis on `B`.
fn bb84_source(n: usize, hadamard: bool) -> Result<CqEnsemble> {
    let size = 1usize << n;
    let basis = BasisString::from_value(1, hadamard as u128);
    let triples = (0..size)
        .map(|x| {
            let first = BitString::from_value(1, (x >> (n - 1)) as u128);
            let s: PureState = theta_basis_state(&first, &basis)?;
            Ok((BitString::from_value(n, x as u128), 1.0 / size as f64, s.density()?))
        })
        .collect::<Result<Vec<_>>>()?;
    CqEnsemble::from_triples(triples)
}

/// `ens` with a classical bit `z_i` appended to each conditional state.
fn with_z(states: &[(f64, DensityOperator, usize)]) -> Result<CqEnsemble> {
    let triples = states
        .iter()
        .enumerate()
        .map(|(i, (p, rho, z))| Ok((label(i, 2), *p, rho.tensor(&PureState::basis(1, *z).density()?)?)))
        .collect::<Result<Vec<_>>>()?;
    CqEnsemble::from_triples(triples)
}

pub(super) fn entropy(cfg: &RunConfig) -> Result<Vec<ResultRecord>> {
    let rec = |metric: &str, value: f64| ResultRecord::new("entropy", metric, value);
    let t = cfg.trials;
    let mut out = Vec::new();

    let binary = (0..t as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, 0, i);
            let q = 1 + (i % 3) as usize;
            let r0 = random_density(q, rng.random_range(1..=4), &mut rng);
            let r1 = random_density(q, rng.random_range(1..=4), &mut rng);
            let p0: f64 = rng.random_range(0.05..0.95);
            let ens = CqEnsemble::from_triples(vec![(label(0, 1), p0, r0.clone()), (label(1, 1), 1.0 - p0, r1.clone())])?;
            let b = pguess(&ens, DEFAULT_GAP)?;
            let h = helstrom_binary(p0, &r0, 1.0 - p0, &r1)?;
            Ok(((b.center() - h).abs(), b.width()))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    out.push(rec("helstrom-max-deviation", max(binary.iter().map(|x| x.0))).trials(t).at_most(BRACKET_TOL));
    out.push(rec("helstrom-max-width", max(binary.iter().map(|x| x.1))).trials(t).at_most(BRACKET_TOL));

    let zero = PureState::basis(1, 0).density()?;
    let plus = theta_basis_state(&BitString::parse("0")?, &BasisString::parse("1")?)?.density()?;
    let ens = CqEnsemble::from_triples(vec![(label(0, 1), 0.5, zero), (label(1, 1), 0.5, plus)])?;
    let b = pguess(&ens, DEFAULT_GAP)?;
    let closed = 0.5 + 0.5 * std::f64::consts::FRAC_1_SQRT_2;
    out.push(rec("zero-plus-pguess", b.center()));
    out.push(rec("zero-plus-deviation", (b.center() - closed).abs()).at_most(BRACKET_TOL));

    // Every conditioning dimension up to 64.
    let mut cases = Vec::new();
    for q in 1..=4 {
        for labels in [2, 3, 5, 8] {
            cases.push((q, labels, 1 + labels % 3));
        }
    }
    cases.extend([(5, 4, 2), (6, 3, 2)]);
    let widths = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(q, labels, rank))| {
            let mut rng = stream(cfg.seed, 1, i as u64);
            let weights: Vec<f64> = (0..labels).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = weights.iter().sum();
            let ens = CqEnsemble::from_triples(
                (0..labels).map(|k| (label(k, 3), weights[k] / total, random_density(q, rank, &mut rng))).collect(),
            )?;
            let b = pguess(&ens, DEFAULT_GAP)?;
            Ok(if b.converged { b.width() } else { f64::INFINITY })
        })
        .collect::<Result<Vec<f64>>>()?;
    out.push(rec("ensemble-max-width", max(widths)).trials(cases.len()).at_most(BRACKET_TOL));

    let opts = SolverOptions::default();
    let verdicts = (0..t as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, 2, i);
            let states: Vec<(f64, DensityOperator, usize)> =
                (0..4).map(|_| (0.25, random_density(2, 2, &mut rng), rng.random_range(0..2))).collect();
            Ok(chain_rule_check(&with_z(&states)?, 1, &opts)?.verdict)
        })
        .collect::<Result<Vec<ChainRuleVerdict>>>()?;
    let violations = verdicts.iter().filter(|&&v| v != ChainRuleVerdict::Holds).count();
    out.push(rec("chain-rule-violations", violations as f64).trials(t).at_most(0.0));

    let mismatches = (1..=8usize)
        .flat_map(|n| (0..=n).map(move |l| (n, l)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(n, l)| {
            let mut bad = 0usize;
            let target = num_rational::Ratio::new(1u64, 1u64 << l);
            for x in 0..1u128 << n {
                for y in x + 1..1u128 << n {
                    let p = uh_collision_probability(n, l, &BitString::from_value(n, x), &BitString::from_value(n, y))?;
                    bad += usize::from(p != target);
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<usize>>>()?;
    out.push(rec("uh-collision-mismatches", mismatches.iter().sum::<usize>() as f64).at_most(0.0));

    let (excess, checked) = leftover_hash_sweep(cfg.seed)?;
    out.push(rec("leftover-hash-max-excess", excess).trials(checked).at_most(EXACT_TOL));
    Ok(out)
}

/// Flat sources of every entropy, one non-flat source and two quantum
/// sources per size `n ≤ 6`, against every admissible `(ℓ, ε)`.
fn leftover_hash_sweep(seed: u64) -> Result<(f64, usize)> {
    let mut rng = stream(seed, 3, 0);
    let mut excess = f64::NEG_INFINITY;
    let mut checked = 0;
    for n in 2..=6usize {
        let mut sources = Vec::new();
        for k in 0..=n {
            let mut xs: Vec<u128> = (0..1u128 << n).collect();
            xs.shuffle(&mut rng);
            let size = 1usize << k;
            let flat: Vec<(u128, f64)> = xs[..size].iter().map(|&x| (x, 1.0 / size as f64)).collect();
            sources.push((k as f64, classical(n, &flat)?));
        }
        let raw: Vec<f64> = (0..1usize << n).map(|_| rng.random_range(0.5..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<(u128, f64)> = raw.iter().enumerate().map(|(x, w)| (x as u128, w / total)).collect();
        let k = -probs.iter().map(|p| p.1).fold(0.0, f64::max).log2();
        sources.push((k, classical(n, &probs)?));
        for hadamard in [false, true] {
            let q = bb84_source(n, hadamard)?;
            let h = hmin(&q, DEFAULT_GAP)?;
            sources.push((h.lower, q));
        }
        for (k, src) in &sources {
            for l in 0..=n {
                for eps_exp in [0.5, 1.0, 1.5, 2.0] {
                    let eps = 2f64.powf(-eps_exp);
                    let Ok(spec) = ExtractorSpec::new(n, l, eps, *k) else { continue };
                    excess = excess.max(extractor_distance(&spec, src)? - eps);
                    checked += 1;
                }
            }
        }
    }
    Ok((excess, checked))
}
