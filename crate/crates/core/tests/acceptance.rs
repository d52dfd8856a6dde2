//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::time::Instant;

use moeqkd_core::game::StrategyKind;
use moeqkd_core::harness::{run, Experiment, ResultRecord, RunConfig};
use moeqkd_core::nike::SchemeKind;
use moeqkd_core::nogo::KeyFunctionKind;
use moeqkd_core::protocol::AdversaryKind;
use moeqkd_core::{Error, Result};

/// Fixed before any acceptance run.
const SEED: u64 = 2026;

fn config(exp: Experiment, f: impl FnOnce(&mut RunConfig)) -> RunConfig {
    let mut cfg = RunConfig::new(exp, SEED);
    f(&mut cfg);
    cfg
}

fn get<'a>(rows: &'a [ResultRecord], metric: &str) -> Result<&'a ResultRecord> {
    rows.iter().find(|r| r.metric == metric).ok_or_else(|| Error::InvalidParameter(format!("missing row {metric}")))
}

/// All asserted rows whose metric starts with one of `prefixes` pass.
fn passed(rows: &[ResultRecord], prefixes: &[&str]) -> bool {
    let selected: Vec<_> = rows.iter().filter(|r| prefixes.iter().any(|p| r.metric.starts_with(p))).collect();
    !selected.is_empty() && selected.iter().all(|r| r.passed != Some(false))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

type Verdict = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Verdict);

fn lemma_suite() -> Verdict {
    let start = Instant::now();
    let rows = run(&config(Experiment::Lemmas, |c| c.trials = 200))?;
    let secs = start.elapsed().as_secs_f64();
    let ok = passed(&rows, &["union-bound", "averaged-projector", "epr-support"]) && secs < 60.0;
    let eig = get(&rows, "union-bound-min-eigenvalue")?.value;
    let proj = rows.iter().filter(|r| r.metric == "averaged-projector-deviation").map(|r| r.value).fold(0.0, f64::max);
    let epr = rows.iter().filter(|r| r.metric == "epr-support-deviation").map(|r| r.value).fold(0.0, f64::max);
    Ok((ok, format!("union-bound min eigenvalue {eig:.3e}, projector deviation {proj:.1e}, EPR deviation {epr:.1e}")))
}

fn bound_suite() -> Verdict {
    let start = Instant::now();
    let rows = run(&config(Experiment::Lemmas, |c| c.trials = 500))?;
    let secs = start.elapsed().as_secs_f64();
    let ok = passed(&rows, &["random-theta", "fixed-theta"]) && secs < 300.0;
    Ok((
        ok,
        format!(
            "violations {} + {} over 500 states each, max excess {:.3} / {:.3}",
            get(&rows, "random-theta-violations")?.value,
            get(&rows, "fixed-theta-violations")?.value,
            get(&rows, "random-theta-max-excess")?.value,
            get(&rows, "fixed-theta-max-excess")?.value
        ),
    ))
}

fn moe_cfg(scheme: SchemeKind, strategy: StrategyKind, exact: bool) -> RunConfig {
    config(Experiment::Moe, |c| {
        c.scheme = scheme;
        c.strategy = strategy;
        c.exact = exact;
        c.trials = 10_000;
    })
}

fn game_exactness() -> Verdict {
    let cases = [
        (SchemeKind::Ideal, StrategyKind::Honest, 0.25, None),
        (SchemeKind::Ideal, StrategyKind::InterceptResend, 0.25, Some(0.25)),
        (SchemeKind::Broken, StrategyKind::BasisAware, 1.0, None),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (scheme, strategy, pwin, agree) in cases {
        let rows = run(&moe_cfg(scheme, strategy, false))?;
        let exact = get(&rows, "pwin")?.value;
        ok &= close(exact, pwin, 1e-9);
        if let Some(a) = agree {
            ok &= close(get(&rows, "agree-rate")?.value, a, 1e-9);
        }
        ok &= passed(&rows, &["pwin-sampled-deviation", "agree-rate-sampled-deviation"]);
        let mc = get(&rows, "pwin-sampled")?;
        detail.push(format!(
            "{}/{} exact {exact:.9} sampled {:.4}±{:.4}",
            scheme.label(),
            strategy.label(),
            mc.value,
            mc.stderr.unwrap_or(0.0)
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn decomposition_identity() -> Verdict {
    let (mut ok, mut worst, mut comm, mut runs) = (true, 0.0f64, 0.0f64, 0);
    for n in [2, 3] {
        for s in (1..=n).filter(|s| n % s == 0) {
            for scheme in [SchemeKind::Ideal, SchemeKind::Broken] {
                for strategy in StrategyKind::ALL {
                    let mut cfg = moe_cfg(scheme, strategy, true);
                    cfg.n = n;
                    cfg.s = Some(s);
                    let rows = run(&cfg)?;
                    ok &= passed(&rows, &["decomposition-identity-error", "commutation-deviation"]);
                    worst = worst.max(get(&rows, "decomposition-identity-error")?.value);
                    comm = comm.max(get(&rows, "commutation-deviation")?.value);
                    runs += 1;
                }
            }
        }
    }
    Ok((ok, format!("{runs} configurations, max identity error {worst:.1e}, max commutator {comm:.1e}")))
}

fn min_entropy_certification() -> Verdict {
    let rows = run(&config(Experiment::Entropy, |c| c.trials = 100))?;
    let ok = passed(&rows, &["helstrom", "ensemble-max-width", "zero-plus-deviation", "chain-rule"])
        && close(get(&rows, "zero-plus-pguess")?.value, 0.853553, 1e-6);
    Ok((
        ok,
        format!(
            "Helstrom deviation {:.1e}, max width {:.1e}, {{|0>,|+>}} {:.6}, chain-rule violations {}",
            get(&rows, "helstrom-max-deviation")?.value,
            get(&rows, "ensemble-max-width")?.value.max(get(&rows, "helstrom-max-width")?.value),
            get(&rows, "zero-plus-pguess")?.value,
            get(&rows, "chain-rule-violations")?.value
        ),
    ))
}

fn protocol_correctness() -> Verdict {
    let mut ok = true;
    let mut detail = Vec::new();
    for scheme in SchemeKind::ALL {
        let rows = run(&config(Experiment::Niqkd, |c| {
            c.scheme = scheme;
            c.n = 8;
            c.trials = 1000;
        }))?;
        let agree = get(&rows, "agreement")?;
        ok &= agree.value == 1.0 && agree.passed == Some(true);
        let rows = run(&config(Experiment::TwoRound, |c| {
            c.scheme = scheme;
            c.n = 8;
            c.trials = 1000;
        }))?;
        let success = get(&rows, "success-rate")?;
        ok &= success.value == 1.0 && success.passed == Some(true);
        detail.push(format!("{}: NI-QKD {} two-round {}", scheme.label(), agree.value, success.value));
    }
    Ok((ok, format!("{} (1000 trials each)", detail.join(", "))))
}

fn swap_epr_attack() -> Verdict {
    let trials = 10_000;
    let rows = run(&config(Experiment::Niqkd, |c| {
        c.scheme = SchemeKind::ToyDh;
        c.adversary = AdversaryKind::SwapEpr;
        c.trials = trials;
    }))?;
    let (ka, kb) = (get(&rows, "eve-recovers-key-a")?.value, get(&rows, "eve-recovers-key-b")?.value);
    let agree = get(&rows, "agreement")?.value;
    let sigma = (0.25f64 * 0.75 / trials as f64).sqrt();
    let ok = ka == 1.0 && kb == 1.0 && (agree - 0.25).abs() <= 3.0 * sigma;
    Ok((ok, format!("Eve recovers K_A {ka}, K_B {kb}; Pr(K_A = K_B) = {agree:.4} (target 0.25 ± {:.4})", 3.0 * sigma)))
}

fn weak_everlasting() -> Verdict {
    let exact = |adversary| {
        run(&config(Experiment::Niqkd, |c| {
            c.adversary = adversary;
            c.exact = true;
        }))
    };
    let passive = exact(AdversaryKind::None)?;
    let h = get(&passive, "hmin")?.value;
    let passive_ok = passed(&passive, &["hmin"]) && close(h, 2.0, 1e-6);
    let swap = exact(AdversaryKind::SwapEpr)?;
    let (lo, hi) = (get(&swap, "hmin-lower")?.value, get(&swap, "hmin-upper")?.value);
    let swap_ok = lo >= 1.9;
    Ok((
        passive_ok && swap_ok,
        format!("passive H_min {h:.7}; swap-EPR H_min in [{lo:.6}, {hi:.6}], required ≥ 1.9"),
    ))
}

fn two_round_verifiability() -> Verdict {
    let trials = 10_000;
    let rows = run(&config(Experiment::TwoRound, |c| {
        c.adversary = AdversaryKind::SwapEpr;
        c.m = Some(16);
        c.trials = trials;
    }))?;
    let disagreements = (get(&rows, "disagree-rate")?.value * trials as f64).round();
    let success = get(&rows, "success-rate")?.value;
    Ok((disagreements == 0.0, format!("{disagreements} disagreements in {trials} trials, success rate {success:.4}")))
}

fn universality_and_extraction() -> Verdict {
    let rows = run(&config(Experiment::Entropy, |c| c.trials = 1))?;
    let ok = passed(&rows, &["uh-collision-mismatches", "leftover-hash-max-excess"]);
    let lh = get(&rows, "leftover-hash-max-excess")?;
    Ok((
        ok,
        format!(
            "collision mismatches {}, leftover-hash max(d − ε) {:.4} over {} instances",
            get(&rows, "uh-collision-mismatches")?.value,
            lh.value,
            lh.trials.unwrap_or(0)
        ),
    ))
}

fn nogo_bound() -> Verdict {
    let start = Instant::now();
    let rows = run(&config(Experiment::Nogo, |c| {
        c.key_function = KeyFunctionKind::Universal;
        c.r = 64;
        c.m = Some(4);
        c.trials = 10_000;
    }))?;
    let secs = start.elapsed().as_secs_f64();
    let rate = get(&rows, "success-rate")?;
    let intact = get(&rows, "honest-keys-intact")?.value;
    let undisturbed = get(&rows, "payloads-undisturbed")?.value;
    let ok = rate.passed == Some(true) && intact == 1.0 && undisturbed == 1.0 && secs < 600.0;
    Ok((
        ok,
        format!(
            "rate {:.4}±{:.4} against bound {:.6}, honest keys intact {intact}, payloads undisturbed {undisturbed}",
            rate.value,
            rate.stderr.unwrap_or(0.0),
            rate.bound.unwrap_or(f64::NAN)
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("lemma suite", lemma_suite),
        ("bound suite", bound_suite),
        ("MoE game exactness", game_exactness),
        ("decomposition identity", decomposition_identity),
        ("min-entropy certification", min_entropy_certification),
        ("protocol correctness", protocol_correctness),
        ("swap-EPR attack", swap_epr_attack),
        ("weak everlasting security", weak_everlasting),
        ("two-round verifiability", two_round_verifiability),
        ("universality and extraction", universality_and_extraction),
        ("no-go bound", nogo_bound),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failures += usize::from(!ok);
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name}: {detail} [{:.1} s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
