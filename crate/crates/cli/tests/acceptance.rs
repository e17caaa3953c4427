//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed; the
//! process exits non-zero if any criterion fails.

use std::f64::consts::{LN_2, PI};
use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use qorder_core::limits::{c_s_surface, commutativity_gap, limit_a_sequence, rh_contradiction_check, GapOptions};
use qorder_core::qset::{enumerate_q, f_bruteforce, f_closed, QOrdering};
use qorder_core::series::{
    eta_accel, gamma_partial, geom_closed, geom_lower_bound, subseries_q, term_ab, zeta_from_eta, StripPoint,
    SubseriesMethod,
};
use qorder_core::zeros::{scan_and_refine, DEFAULT_STEP};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn pt(x: f64, y: f64) -> StripPoint {
    StripPoint::new(x, y).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

const FIRST_ZEROS: [f64; 3] = [14.134725141734694, 21.022039638771555, 25.010_857_580_145_69];

/// Zeros found by scanning `[0, y_max]` and refining every candidate.
fn zeros_up_to(y_max: f64) -> Result<Vec<f64>, String> {
    Ok(scan_and_refine(0.0, y_max, DEFAULT_STEP, 0.1, 1e-9).map_err(err)?.iter().map(|r| r.ordinate).collect())
}

fn refined_first_zero() -> Result<StripPoint, String> {
    let zeros = zeros_up_to(15.0)?;
    let y = *zeros.first().ok_or("no zero below 15")?;
    Ok(pt(0.5, y))
}

fn criterion_1() -> Outcome {
    const K_MAX: u64 = 100_000;
    let start = Instant::now();
    // Definition: f(k) = sum of sgn q over q in Q dividing k.
    let mut by_definition = vec![0i64; K_MAX as usize + 1];
    for q in enumerate_q(K_MAX).map_err(err)? {
        let v = q.value();
        for k in (v..=K_MAX).step_by(v as usize) {
            by_definition[k as usize] += i64::from(q.sign());
        }
    }
    for k in 1..=K_MAX {
        let closed = f_closed(k);
        ensure(closed == by_definition[k as usize] && closed == f_bruteforce(k), || {
            format!("k={k}: closed {closed}, definition {}, brute force {}", by_definition[k as usize], f_bruteforce(k))
        })?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1}s"))?;
    Ok(format!("exact for k <= {K_MAX} in {secs:.2}s"))
}

fn criterion_2() -> Outcome {
    let ord = QOrdering::by_value(1000).enumerate().map_err(err)?;
    let n_axis: Vec<u64> = (1..=200).collect();
    let h_axis: Vec<usize> = (0..=50).collect();
    let points = [pt(0.5, 14.134725141734694), pt(0.25, -3.0), pt(0.75, 40.0), pt(1.0, 0.0), pt(3.0, 7.5)];
    let mut worst = 0.0f64;
    for s in points {
        let surf = c_s_surface(s, &ord, &n_axis, &h_axis).map_err(err)?;
        let a_b: Vec<(f64, f64)> = (1..=200).map(|k| term_ab(k, s)).collect();
        for (i, &n) in n_axis.iter().enumerate() {
            for (j, &h) in h_axis.iter().enumerate() {
                let (mut c, mut sn) = (0.0, 0.0);
                for k in 1..=n {
                    for q in &ord.elements()[..h] {
                        if k % q.value() == 0 {
                            let (a, b) = a_b[k as usize - 1];
                            c += f64::from(q.sign()) * a;
                            sn += f64::from(q.sign()) * b;
                        }
                    }
                }
                let scale = c.abs().max(sn.abs()).max(1.0);
                let dev = (surf.c_at(i, j) - c).abs().max((surf.s_at(i, j) - sn).abs()) / scale;
                worst = worst.max(dev);
                ensure(dev <= 1e-12, || format!("s={}+{}i n={n} h={h}: relative deviation {dev:e}", s.x(), s.y()))?;
            }
        }
    }
    Ok(format!("5 points, n<=200, h<=50; max relative deviation {worst:e}"))
}

fn criterion_3() -> Outcome {
    let eta1 = eta_accel(pt(1.0, 0.0), 1e-13).map_err(err)?.value;
    let eta2 = eta_accel(pt(2.0, 0.0), 1e-13).map_err(err)?.value;
    let zeta2 = zeta_from_eta(pt(2.0, 0.0), 1e-13).map_err(err)?.value;
    let zeta_half = zeta_from_eta(pt(0.5, 0.0), 1e-13).map_err(err)?.value;
    let d1 = (eta1.re - LN_2).abs().max(eta1.im.abs());
    let d2 = (eta2.re - PI * PI / 12.0).abs();
    let d3 = (zeta2.re - PI * PI / 6.0).abs();
    let d4 = (zeta_half.re + 1.4603545088).abs();
    ensure(d1 <= 1e-12, || format!("eta(1) off by {d1:e}"))?;
    ensure(d2 <= 1e-12, || format!("eta(2) off by {d2:e}"))?;
    ensure(d3 <= 1e-9, || format!("zeta(2) off by {d3:e}"))?;
    ensure(d4 <= 1e-8, || format!("zeta(1/2) off by {d4:e}"))?;
    Ok(format!("deviations {d1:.1e}, {d2:.1e}, {d3:.1e}, {d4:.1e}"))
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn criterion_4() -> Outcome {
    let g = geom_closed(pt(0.5, 0.0));
    ensure((g.re + 2f64.sqrt()).abs() <= 1e-12 && g.im.abs() <= 1e-12, || format!("geom(1/2) = {g}"))?;

    let mut fits = Vec::new();
    for s in [pt(0.3, 0.0), pt(0.5, 14.134725141734694), pt(0.8, -7.0)] {
        // stop before the differences reach rounding level
        let levels: Vec<f64> = (4..=(30.0 / s.x()) as u32).step_by(2).map(f64::from).collect();
        let logs: Vec<f64> =
            levels.iter().map(|&l| (gamma_partial(s, l as u32) - geom_closed(s)).norm().log2()).collect();
        let rate = -slope(&levels, &logs);
        let rel = (rate - s.x()).abs() / s.x();
        ensure(rel <= 0.05, || format!("decay exponent {rate} at x={} ({:.1}% off)", s.x(), 100.0 * rel))?;
        fits.push(format!("{rate:.4}/{}", s.x()));
    }

    let mut min_ratio = f64::INFINITY;
    for i in 1..=100 {
        let x = i as f64 / 101.0;
        let floor = geom_lower_bound(x);
        for j in 0..100 {
            let y = -50.0 + j as f64;
            let m = geom_closed(pt(x, y)).norm();
            ensure(m >= floor * (1.0 - 1e-12), || format!("|geom({x}+{y}i)| = {m} below {floor}"))?;
            min_ratio = min_ratio.min(m / floor);
        }
    }
    Ok(format!("fitted/expected exponents {}; min |geom|/bound {min_ratio:.6}", fits.join(", ")))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let zeros = zeros_up_to(30.0)?;
    let secs = start.elapsed().as_secs_f64();
    ensure(zeros.len() == 3, || format!("found {} zeros in [0, 30]: {zeros:?}", zeros.len()))?;
    for (y, want) in zeros.iter().zip(FIRST_ZEROS) {
        ensure((y - want).abs() <= 1e-5, || format!("ordinate {y} vs {want}"))?;
        let r = qorder_core::zeros::eta_modulus_on_line(*y).map_err(err)?;
        ensure(r <= 1e-9, || format!("residual {r:e} at {y}"))?;
    }
    let below = zeros.iter().filter(|&&y| y < 25.02).count();
    ensure(below == 3, || format!("{below} zeros below 25.02"))?;
    ensure(secs < 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{zeros:.6?} in {secs:.2}s"))
}

fn criterion_6() -> Outcome {
    let z = refined_first_zero()?;
    let eta = eta_accel(z, 1e-13).map_err(err)?.value;
    ensure(eta.re.abs() <= 1e-9 && eta.im.abs() <= 1e-9, || format!("sums of a_k, b_k: {eta}"))?;
    for q in [3u64, 5, 15] {
        let v = subseries_q(z, q, SubseriesMethod::Oracle { tol: 1e-13 }).map_err(err)?.value.norm();
        ensure(v <= (q as f64).powf(-0.5) * 1e-8, || format!("subseries q={q}: {v:e}"))?;
    }
    let mut worst = 0.0f64;
    for ordering in [QOrdering::by_value(1000), QOrdering::seeded_shuffle(7, 64, 1000)] {
        let ord = ordering.enumerate().map_err(err)?;
        for (h, (c, s)) in limit_a_sequence(z, &ord, 64, 1e-12).map_err(err)?.into_iter().enumerate() {
            worst = worst.max(c.abs()).max(s.abs());
            ensure(c.abs() <= 1e-8 && s.abs() <= 1e-8, || format!("{}: A({}) = ({c:e}, {s:e})", ord.id(), h + 1))?;
        }
    }
    Ok(format!("|eta| = {:.1e}; max |A(h)| component {worst:.1e}", eta.norm()))
}

fn criterion_7() -> Outcome {
    let z = refined_first_zero()?;
    let ord = QOrdering::by_value(1000).enumerate().map_err(err)?;
    let r = commutativity_gap(z, &ord, 64, 100_000, GapOptions::default()).map_err(err)?;
    let g = geom_closed(z);
    let dc = (r.gap_cos - g.re).abs();
    let ds = (r.gap_sin + g.im).abs();
    ensure(dc <= 1e-6 && ds <= 1e-6, || format!("gap ({}, {}) vs geom {g}", r.gap_cos, r.gap_sin))?;
    Ok(format!("gap = ({:.10}, {:.10}); deviation ({dc:.1e}, {ds:.1e})", r.gap_cos, r.gap_sin))
}

fn criterion_8() -> Outcome {
    let s = pt(3.0, 0.0);
    let mut gaps = Vec::new();
    for bound in [100u64, 1_000, 10_000] {
        let ord = QOrdering::by_value(bound).enumerate().map_err(err)?;
        let r = commutativity_gap(s, &ord, ord.len(), 0, GapOptions::default()).map_err(err)?;
        gaps.push((bound, r.gap_cos.abs().max(r.gap_sin.abs())));
    }
    for w in gaps.windows(2) {
        ensure(w[1].1 <= w[0].1.max(1e-9), || format!("gap grew from {:e} to {:e}", w[0].1, w[1].1))?;
    }
    let last = gaps.last().unwrap().1;
    ensure(last <= 1e-6, || format!("gap {last:e} at bound 1e4"))?;
    let shown: Vec<String> = gaps.iter().map(|(b, g)| format!("{b}:{g:.1e}")).collect();
    Ok(format!("gap by Q bound {}", shown.join(" ")))
}

fn criterion_9() -> Outcome {
    let z = refined_first_zero()?;
    let mut worst_oracle = 0.0f64;
    let mut worst_direct = 0.0f64;
    for s in [pt(0.5, 0.0), z, pt(0.75, 3.0), pt(0.9, -25.0), pt(2.0, 0.0), pt(3.0, 1.0)] {
        let r = rh_contradiction_check(s, 1_000_000, 1e-13).map_err(err)?;
        let o = r.oracle_residual.cos.abs().max(r.oracle_residual.sin.abs());
        let d = r.direct_residual.cos.abs().max(r.direct_residual.sin.abs());
        ensure(o <= 1e-10, || format!("oracle residual {o:e} at {}+{}i", s.x(), s.y()))?;
        ensure(d <= 5e-3, || format!("direct residual {d:e} at {}+{}i", s.x(), s.y()))?;
        worst_oracle = worst_oracle.max(o);
        worst_direct = worst_direct.max(d);
    }
    Ok(format!("max oracle residual {worst_oracle:.1e}; max direct residual {worst_direct:.1e}"))
}

fn qorder(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_qorder")).args(args).output().map_err(err)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let (trace, best, surface) =
            (path(&format!("t{run}.csv")), path(&format!("b{run}.json")), path(&format!("s{run}.csv")));
        let threads = if run == 0 { "1" } else { "3" };
        let o = qorder(&[
            "--threads",
            threads,
            "search",
            "--seed",
            "42",
            "--prefix",
            "32",
            "--iters",
            "200",
            "--trace",
            &trace,
            "--best",
            &best,
        ])?;
        ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
        let o = qorder(&[
            "--threads",
            threads,
            "surface",
            "--x",
            "0.5",
            "--y",
            "14.1347251417",
            "--ordering",
            "shuffle:7:64",
            "--bound",
            "1000",
            "--n",
            "1:10000:100",
            "--h",
            "1:64",
            "--out",
            &surface,
        ])?;
        ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
        let read = |p: &str| fs::read(p).map_err(err);
        outputs.push((read(&trace)?, read(&best)?, read(&surface)?));
    }
    ensure(outputs[0] == outputs[1], || "outputs differ between identical runs".into())?;

    let start = Instant::now();
    let o = qorder(&["--threads", "1", "verify"])?;
    let secs = start.elapsed().as_secs_f64();
    ensure(o.status.success(), || String::from_utf8_lossy(&o.stdout).into_owned())?;
    ensure(secs <= 300.0, || format!("verify took {secs:.1}s"))?;
    Ok(format!("search and surface byte-identical; verify passed in {secs:.2}s single-threaded"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("combinatorial exactness", criterion_1),
        ("definition vs fast path", criterion_2),
        ("classical values", criterion_3),
        ("geometric closed form", criterion_4),
        ("zero reproduction", criterion_5),
        ("at-zero identities", criterion_6),
        ("non-commutation at a zero", criterion_7),
        ("commutation for Re s > 1", criterion_8),
        ("contradiction-chain identity", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} ({name}) [{secs:.2}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} ({name}) [{secs:.2}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
