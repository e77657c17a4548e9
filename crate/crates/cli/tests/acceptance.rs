//! End-to-end acceptance criteria. Runs without the libtest harness so that
//! every criterion prints its verdict; the process fails if any criterion does.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seqdisc::correlations::{
    discord_by_definition, family_state, koashi_winter, left_discord_closed, relative_difference,
    right_discord_closed, symmetrized_discord, tangles, SearchSchedule, Side,
};
use seqdisc::figures::{
    relative_difference_vs_pb, relative_difference_vs_pc, symmetrized_vs_overlap,
};
use seqdisc::montecarlo::{empirical_probs, run_trials, verify_unambiguity};
use seqdisc::optimizer::{
    broken_branch, pbc_closed_max, pbc_numeric_max, regime_boundary, symmetric_branch,
    NumericSearch, Regime,
};
use seqdisc::protocol::{
    ancilla_pair, joint_success_prob, povm_elements, success_prob_bob, success_prob_charlie,
    ProtocolParams, SequentialProtocol,
};
use seqdisc::qmath::partial_transpose_negativity;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || {
        format!("took {elapsed:.2?}, budget {budget:?}")
    })
}

fn grid10() -> impl Iterator<Item = (f64, f64)> {
    let at = |k: usize| 0.05 + 0.1 * k as f64;
    (0..10).flat_map(move |i| (0..10).map(move |j| (at(i), at(j))))
}

fn optimum_reproduction() -> Verdict {
    let start = Instant::now();
    let b = regime_boundary();
    let search = NumericSearch::default();
    let mut worst: f64 = 0.0;
    for s in [0.01, 0.04, 0.1, b, 0.25, 0.5, 0.75, 0.9] {
        let closed = pbc_closed_max(s).map_err(|e| e.to_string())?;
        let expected = if s < b {
            symmetric_branch(s)
        } else {
            broken_branch(s)
        };
        let formula = if s < b {
            (1.0 - s.sqrt()).powi(2)
        } else {
            0.5 * (1.0 - s).powi(2)
        };
        ensure(
            (closed.pbc_max - expected).abs() < 1e-15 && (expected - formula).abs() < 1e-15,
            || format!("closed form at s={s}: {} vs {formula}", closed.pbc_max),
        )?;
        ensure(
            (joint_success_prob(&closed.argmax) - closed.pbc_max).abs() < 1e-12,
            || format!("closed argmax at s={s} does not attain the maximum"),
        )?;
        let numeric = pbc_numeric_max(s, &search).map_err(|e| e.to_string())?;
        let gap = (numeric.pbc_max - closed.pbc_max).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-5, || format!("numeric gap {gap:e} at s={s}"))?;
    }
    let branch_gap = (symmetric_branch(b) - broken_branch(b)).abs();
    ensure(branch_gap < 1e-12, || format!("branch gap {branch_gap:e}"))?;
    let corner = 6.0 - 4.0 * std::f64::consts::SQRT_2;
    ensure((symmetric_branch(b) - corner).abs() < 1e-12, || {
        "boundary value".into()
    })?;
    ensure(
        pbc_closed_max(0.1).unwrap().regime == Regime::Symmetric,
        || "regime at 0.1".into(),
    )?;
    ensure(
        pbc_closed_max(0.25).unwrap().regime == Regime::SymmetryBroken,
        || "regime at 0.25".into(),
    )?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "max numeric gap {worst:.1e}, branch gap {branch_gap:.1e}, {elapsed:.2?}"
    ))
}

fn unambiguity() -> Verdict {
    let start = Instant::now();
    let params = ProtocolParams::equal_weight(0.25, 0.5).map_err(|e| e.to_string())?;
    let stats = run_trials(&params, 1_000_000, 2024).map_err(|e| e.to_string())?;
    let check = verify_unambiguity(&stats);
    ensure(stats.n_trials() == 1_000_000, || "trial count".into())?;
    ensure(check.ok, || {
        format!("{} misidentifications", check.violations)
    })?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "0 misidentifications in 10^6 trials, {elapsed:.2?}"
    ))
}

fn probability_statistics() -> Verdict {
    let points = [(0.25, 0.5), (0.04, 0.2), (0.1, 0.3), (0.3, 0.6), (0.5, 0.9)];
    let mut worst: f64 = 0.0;
    for (seed, &(s, t)) in points.iter().enumerate() {
        let params = ProtocolParams::equal_weight(s, t).map_err(|e| e.to_string())?;
        let stats = run_trials(&params, 1_000_000, 100 + seed as u64).map_err(|e| e.to_string())?;
        let probs = empirical_probs(&stats).map_err(|e| e.to_string())?;
        for (name, est, analytic) in [
            ("p_b", probs.p_b, success_prob_bob(&params)),
            ("p_c", probs.p_c, success_prob_charlie(&params)),
            ("p_bc", probs.p_bc, joint_success_prob(&params)),
        ] {
            let z = (est.value - analytic) / est.std_err;
            worst = worst.max(z.abs());
            ensure(z.abs() < 4.0, || {
                format!(
                    "{name} at (s={s}, t={t}): {} vs {analytic}, z = {z:.2}",
                    est.value
                )
            })?;
        }
    }
    let reference = ProtocolParams::equal_weight(0.25, 0.5).unwrap();
    ensure(
        success_prob_bob(&reference) == 0.5
            && success_prob_charlie(&reference) == 0.5
            && joint_success_prob(&reference) == 0.25,
        || "analytic reference values".into(),
    )?;
    Ok(format!("5 points x 3 probabilities, max |z| = {worst:.2}"))
}

fn separability() -> Verdict {
    let mut worst: f64 = 0.0;
    for (r, t) in grid10() {
        let rho = family_state(r, t).map_err(|e| e.to_string())?;
        for side in [0, 1] {
            let n = partial_transpose_negativity(&rho, side).map_err(|e| e.to_string())?;
            worst = worst.max(n);
        }
    }
    ensure(worst < 1e-10, || format!("negativity {worst:e}"))?;
    Ok(format!("max negativity {worst:.1e} on 10x10 grid"))
}

fn discord_oracle() -> Verdict {
    let start = Instant::now();
    let schedule = SearchSchedule::default();
    let (mut oracle_gap, mut kw_gap, mut ckw_gap): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (r, t) in grid10() {
        let rho = family_state(r, t).map_err(|e| e.to_string())?;
        let right = discord_by_definition(&rho, Side::B, &schedule).map_err(|e| e.to_string())?;
        let left = discord_by_definition(&rho, Side::A, &schedule).map_err(|e| e.to_string())?;
        let closed_right = right_discord_closed(r, t).unwrap();
        let closed_left = left_discord_closed(r, t).unwrap();
        oracle_gap = oracle_gap
            .max((right.discord - closed_right).abs())
            .max((left.discord - closed_left).abs());

        let kw = koashi_winter(r, t).map_err(|e| e.to_string())?;
        kw_gap = kw_gap.max((kw.right_discord() - closed_right).abs());
        let tau = tangles(r, t).unwrap();
        ckw_gap = ckw_gap.max((kw.concurrence_ad.powi(2) - (tau.tau_a - tau.tau_abd)).abs());
    }
    ensure(oracle_gap <= 1e-3, || format!("oracle gap {oracle_gap:e}"))?;
    ensure(kw_gap <= 1e-8, || format!("Koashi-Winter gap {kw_gap:e}"))?;
    ensure(ckw_gap <= 1e-8, || {
        format!("squared-concurrence gap {ckw_gap:e}")
    })?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "oracle gap {oracle_gap:.1e}, KW gap {kw_gap:.1e}, C^2 gap {ckw_gap:.1e}, {elapsed:.2?}"
    ))
}

fn figure2() -> Verdict {
    for fixed in [0.1, 0.5, 0.9] {
        let a: Vec<f64> = relative_difference_vs_pb(fixed, 50)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|p| p.y.ok_or("undefined point on fig 2a grid"))
            .collect::<Result<_, _>>()?;
        ensure(a.windows(2).all(|w| w[1] >= w[0]), || {
            format!("2a not non-decreasing at P_c={fixed}")
        })?;
        let b: Vec<f64> = relative_difference_vs_pc(fixed, 50)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|p| p.y.ok_or("undefined point on fig 2b grid"))
            .collect::<Result<_, _>>()?;
        ensure(b.windows(2).all(|w| w[1] <= w[0]), || {
            format!("2b not non-increasing at P_b={fixed}")
        })?;

        // P → 1 along 1 − 10^-k
        let approach = |f: &dyn Fn(f64) -> Option<f64>| -> Vec<f64> {
            (2..=6).map(|k| f(10f64.powi(-k)).unwrap()).collect()
        };
        let t = 1.0 - fixed;
        let to_plus = approach(&|eps| relative_difference(eps, t).unwrap());
        let to_minus = approach(&|eps| relative_difference(1.0 - fixed, eps).unwrap());
        ensure(
            to_plus.windows(2).all(|w| w[1] >= w[0]) && 1.0 - to_plus[4] < 1e-6,
            || format!("2a limit at P_c={fixed}: {to_plus:?}"),
        )?;
        ensure(
            to_minus.windows(2).all(|w| w[1] <= w[0]) && 1.0 + to_minus[4] < 1e-6,
            || format!("2b limit at P_b={fixed}: {to_minus:?}"),
        )?;
    }
    Ok("monotone on 50-point grids, limits +1 (2a) and -1 (2b)".into())
}

fn figure3() -> Verdict {
    for alpha in [0.5, 0.25, 0.125] {
        let curve = symmetrized_vs_overlap(alpha, 201).map_err(|e| e.to_string())?;
        let y: Vec<f64> = curve.iter().map(|p| p.y.unwrap()).collect();
        ensure(y[0].abs() < 1e-10 && y[200].abs() < 1e-10, || {
            format!("endpoints at alpha={alpha}: {} {}", y[0], y[200])
        })?;
        ensure(y[1..200].iter().all(|&d| d > 0.0), || {
            format!("non-positive interior at alpha={alpha}")
        })?;
    }
    let steps = 200;
    let mut worst_sym: f64 = 0.0;
    for s in [0.1f64, 0.3, 0.5] {
        let ts: Vec<f64> = (0..=steps)
            .map(|k| s + (1.0 - s) * k as f64 / steps as f64)
            .collect();
        let d = |t: f64| symmetrized_discord(s / t, t).unwrap();
        let argmax = ts
            .iter()
            .copied()
            .fold((f64::NAN, f64::NEG_INFINITY), |best, t| {
                let v = d(t);
                if v > best.1 {
                    (t, v)
                } else {
                    best
                }
            })
            .0;
        ensure((argmax - s.sqrt()).abs() <= 1.0 / steps as f64, || {
            format!("argmax {argmax} vs sqrt(s) {} at s={s}", s.sqrt())
        })?;
        for &t in &ts {
            worst_sym = worst_sym.max((d(t) - d(s / t)).abs());
        }
    }
    ensure(worst_sym < 1e-10, || {
        format!("t <-> s/t asymmetry {worst_sym:e}")
    })?;
    Ok(format!(
        "endpoints zero, argmax within 1/200 of sqrt(s), t<->s/t gap {worst_sym:.1e}"
    ))
}

fn protocol_algebra() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut unitary, mut complete, mut overlap): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..20 {
        let s: f64 = rng.random_range(0.0..0.95);
        let t: f64 = rng.random_range(s..=1.0);
        let lo_b = if t > 0.0 { (s / t).powi(2) } else { 0.0 };
        let q1b = rng.random_range(lo_b..=1.0);
        let q2b = if q1b > 0.0 {
            lo_b / q1b
        } else {
            rng.random_range(0.0..=1.0)
        };
        let q1c = rng.random_range(t * t..=1.0);
        let q2c = rng.random_range((t * t / q1c).min(1.0)..=1.0);
        let params = ProtocolParams::new(s, t, q1b, q2b, q1c, q2c).map_err(|e| e.to_string())?;
        let protocol = SequentialProtocol::new(params).map_err(|e| e.to_string())?;
        for u in [protocol.bob(), protocol.charlie()] {
            unitary = unitary.max(u.defect());
            complete = complete.max(
                povm_elements(u)
                    .map_err(|e| e.to_string())?
                    .completeness_defect(),
            );
        }
        let [phi1, phi2] = protocol.relayed();
        let (eta1, eta2) = ancilla_pair(q1b, q2b).map_err(|e| e.to_string())?;
        let conserved = (phi1.inner(phi2) * eta1.inner(&eta2)).re;
        overlap = overlap.max((conserved - s).abs());
    }
    ensure(unitary < 1e-10, || format!("unitarity defect {unitary:e}"))?;
    ensure(complete < 1e-10, || {
        format!("completeness defect {complete:e}")
    })?;
    ensure(overlap < 1e-12, || {
        format!("overlap conservation error {overlap:e}")
    })?;
    Ok(format!(
        "20 sets: unitarity {unitary:.1e}, completeness {complete:.1e}, overlap {overlap:.1e}"
    ))
}

fn cli_determinism() -> Verdict {
    let run = |workers: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_seqdisc"))
            .args([
                "simulate", "--s", "0.25", "--t", "0.5", "--trials", "200000", "--seed", "17",
            ])
            .args(["--workers", workers])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("exit status {}", out.status)
        })?;
        Ok(out.stdout)
    };
    let first = run("1")?;
    let again = run("1")?;
    let four = run("4")?;
    ensure(first == again, || "two runs differ".into())?;
    ensure(first == four, || "workers 1 and 4 differ".into())?;
    Ok(format!(
        "{} identical bytes across runs and worker counts",
        first.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("optimum reproduction", optimum_reproduction),
        ("unambiguity", unambiguity),
        ("probability statistics", probability_statistics),
        ("separability", separability),
        ("discord oracle equivalence", discord_oracle),
        ("figure 2 properties", figure2),
        ("figure 3 properties", figure3),
        ("protocol algebra", protocol_algebra),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
