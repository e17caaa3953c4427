//! The `verify` self-check suite.

use std::f64::consts::{E, LN_2, PI};
use std::time::Instant;

use qorder_core::limits::{c_s_surface, commutativity_gap, limit_a_sequence, rh_contradiction_check, GapOptions};
use qorder_core::qset::{f_bruteforce, f_closed, QOrdering};
use qorder_core::series::{
    bridge_factor, eta_accel, eta_averaged, gamma_partial, geom_closed, geom_lower_bound, shifted_sums_averaged,
    shifted_sums_oracle, subseries_q, term_ab, zeta_from_eta, StripPoint, SubseriesMethod,
};
use qorder_core::zeros::refine_zero;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub k_max: u64,
    /// Flips one sign inside the combinatorial check.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub passed: bool,
    #[serde(rename = "firstFailure")]
    pub first_failure: Option<&'static str>,
    pub checks: Vec<CheckResult>,
}

type Check = fn(&VerifyOptions) -> Result<String, String>;

fn pt(x: f64, y: f64) -> StripPoint {
    StripPoint::new(x, y).expect("fixed verification points are valid")
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

const CHECKS: &[(&str, Check)] = &[
    ("f-closed-vs-bruteforce", check_f_closed),
    ("surface-vs-triple-loop", check_surface),
    ("classical-values", check_classical),
    ("bridge-identity", check_bridge),
    ("geometric-closed-form", check_geometric),
    ("subseries-oracles", check_subseries),
    ("shifted-sums", check_shifted),
    ("zero-refinement", check_zero),
    ("at-zero-identities", check_at_zero),
    ("non-commutation-at-zero", check_gap_at_zero),
    ("commutation-re-s-gt-1", check_gap_absolute),
    ("contradiction-chain", check_contradiction),
];

pub fn run(opts: &VerifyOptions) -> VerifySummary {
    let mut checks = Vec::new();
    for (name, check) in CHECKS {
        let start = Instant::now();
        let outcome = check(opts);
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        checks.push(CheckResult { name, passed, detail, seconds: start.elapsed().as_secs_f64() });
    }
    let first_failure = checks.iter().find(|c| !c.passed).map(|c| c.name);
    VerifySummary { passed: first_failure.is_none(), first_failure, checks }
}

fn check_f_closed(opts: &VerifyOptions) -> Result<String, String> {
    for k in 1..=opts.k_max {
        let mut closed = f_closed(k);
        if opts.inject_fault && k == 15 {
            closed = -closed;
        }
        let brute = f_bruteforce(k);
        ensure(closed == brute, || format!("k={k}: closed {closed} != brute force {brute}"))?;
    }
    Ok(format!("exact for k <= {}", opts.k_max))
}

fn check_surface(_: &VerifyOptions) -> Result<String, String> {
    let ord = QOrdering::seeded_shuffle(1, 30, 300).enumerate().map_err(err)?;
    let n_axis: Vec<u64> = (1..=80).collect();
    let h_axis: Vec<usize> = (0..=25).collect();
    for s in [pt(0.5, 14.0), pt(2.0, 0.0)] {
        let surf = c_s_surface(s, &ord, &n_axis, &h_axis).map_err(err)?;
        for (i, &n) in n_axis.iter().enumerate() {
            for (j, &h) in h_axis.iter().enumerate() {
                let (mut c, mut sn) = (0.0, 0.0);
                for k in 1..=n {
                    let (a, b) = term_ab(k, s);
                    for q in &ord.elements()[..h] {
                        if k % q.value() == 0 {
                            c += f64::from(q.sign()) * a;
                            sn += f64::from(q.sign()) * b;
                        }
                    }
                }
                let tol = 1e-12 * c.abs().max(sn.abs()).max(1.0);
                ensure((surf.c_at(i, j) - c).abs() <= tol && (surf.s_at(i, j) - sn).abs() <= tol, || {
                    format!("mismatch at n={n} h={h}")
                })?;
            }
        }
    }
    Ok("incremental surface equals triple loop on 80x26 grid".into())
}

fn check_classical(_: &VerifyOptions) -> Result<String, String> {
    let eta1 = eta_accel(pt(1.0, 0.0), 1e-13).map_err(err)?.value.re;
    ensure((eta1 - LN_2).abs() <= 1e-12, || format!("eta(1) = {eta1}"))?;
    let eta2 = eta_accel(pt(2.0, 0.0), 1e-13).map_err(err)?.value.re;
    ensure((eta2 - PI * PI / 12.0).abs() <= 1e-12, || format!("eta(2) = {eta2}"))?;
    let z2 = zeta_from_eta(pt(2.0, 0.0), 1e-13).map_err(err)?.value.re;
    ensure((z2 - PI * PI / 6.0).abs() <= 1e-9, || format!("zeta(2) = {z2}"))?;
    let zh = zeta_from_eta(pt(0.5, 0.0), 1e-13).map_err(err)?.value.re;
    ensure((zh + 1.4603545088).abs() <= 1e-8, || format!("zeta(1/2) = {zh}"))?;
    Ok(format!("eta(1)={eta1:.15} zeta(1/2)={zh:.12}"))
}

fn check_bridge(_: &VerifyOptions) -> Result<String, String> {
    let mut worst = 0.0f64;
    for x in [0.1, 0.5, 0.9, 1.5, 3.0] {
        for y in [-20.0, -1.0, 0.3, 7.0, 30.0] {
            let s = pt(x, y);
            let eta = eta_accel(s, 1e-11).map_err(err)?;
            let zeta = zeta_from_eta(s, 1e-11).map_err(err)?;
            let diff = (bridge_factor(s).map_err(err)? * zeta.value - eta.value).norm();
            ensure(diff <= eta.error_estimate + 1e-12, || format!("s={x}+{y}i residual {diff:e}"))?;
            worst = worst.max(diff);
        }
    }
    Ok(format!("max residual {worst:e}"))
}

fn check_geometric(_: &VerifyOptions) -> Result<String, String> {
    let g = geom_closed(pt(0.5, 0.0));
    ensure((g.re + 2f64.sqrt()).abs() <= 1e-12, || format!("geom(1/2) = {g}"))?;
    for i in 1..50 {
        let x = i as f64 / 50.0;
        for j in 0..50 {
            let y = -100.0 + 4.0 * j as f64;
            let m = geom_closed(pt(x, y)).norm();
            ensure(m >= geom_lower_bound(x) * (1.0 - 1e-12), || format!("|geom| too small at {x}+{y}i"))?;
        }
    }
    for s in [pt(0.3, 2.0), pt(0.5, 14.1), pt(0.8, -6.0)] {
        for l in [5u32, 20, 40] {
            let diff = (gamma_partial(s, l) - geom_closed(s)).norm();
            let bound = 2f64.powf(-(l as f64) * s.x()) * 2.0 / (1.0 - 2f64.powf(-s.x()));
            ensure(diff <= bound, || format!("tail bound fails at L={l}"))?;
        }
    }
    Ok("closed form, non-vanishing grid and tail bounds hold".into())
}

fn check_subseries(_: &VerifyOptions) -> Result<String, String> {
    for s in [pt(0.5, 0.0), pt(0.75, 3.0), pt(1.5, -2.0)] {
        for q in [1u64, 3, 5, 9, 15] {
            let direct = subseries_q(s, q, SubseriesMethod::Direct { terms: 50_000, levels: 3 }).map_err(err)?;
            let oracle = subseries_q(s, q, SubseriesMethod::Oracle { tol: 1e-12 }).map_err(err)?;
            let diff = (direct.value - oracle.value).norm();
            ensure(diff <= 10.0 * direct.error_estimate + 1e-12, || {
                format!("q={q} at {}+{}i differs by {diff:e}", s.x(), s.y())
            })?;
        }
    }
    Ok("direct truncations match q^(-s) eta(s)".into())
}

fn check_shifted(_: &VerifyOptions) -> Result<String, String> {
    let s = pt(0.75, 5.0);
    let eta = eta_accel(s, 1e-12).map_err(err)?.value;
    let (oc, os) = shifted_sums_oracle(s, E, eta).map_err(err)?;
    let (c, sn, _) = shifted_sums_averaged(s, E, 100_000, 3).map_err(err)?;
    ensure((c - oc).abs() <= 1e-3 && (sn - os).abs() <= 1e-3, || {
        format!("shifted sums ({c}, {sn}) vs oracle ({oc}, {os})")
    })?;
    Ok(format!("max deviation {:e}", (c - oc).abs().max((sn - os).abs())))
}

fn first_zero() -> Result<StripPoint, String> {
    let z = refine_zero(14.13, 0.05, 1e-9).map_err(err)?;
    Ok(pt(0.5, z.ordinate))
}

fn check_zero(_: &VerifyOptions) -> Result<String, String> {
    let z = refine_zero(14.13, 0.05, 1e-9).map_err(err)?;
    ensure((z.ordinate - 14.134725141734693).abs() <= 1e-6, || format!("ordinate {}", z.ordinate))?;
    Ok(format!("y={:.12} residual {:e}", z.ordinate, z.residual))
}

fn check_at_zero(_: &VerifyOptions) -> Result<String, String> {
    let z = first_zero()?;
    let eta = eta_accel(z, 1e-12).map_err(err)?.value;
    ensure(eta.re.abs() <= 1e-9 && eta.im.abs() <= 1e-9, || format!("eta = {eta}"))?;
    for q in [3u64, 5, 15] {
        let v = subseries_q(z, q, SubseriesMethod::Oracle { tol: 1e-12 }).map_err(err)?.value;
        ensure(v.norm() <= (q as f64).powf(-0.5) * 1e-8, || format!("subseries q={q}: {v}"))?;
    }
    for ordering in [QOrdering::by_value(1000), QOrdering::seeded_shuffle(7, 64, 1000)] {
        let ord = ordering.enumerate().map_err(err)?;
        for (h, (c, s)) in limit_a_sequence(z, &ord, 64, 1e-12).map_err(err)?.into_iter().enumerate() {
            ensure(c.abs() <= 1e-8 && s.abs() <= 1e-8, || format!("A({}) = ({c}, {s})", h + 1))?;
        }
    }
    Ok(format!("|eta| = {:e}", eta.norm()))
}

fn check_gap_at_zero(_: &VerifyOptions) -> Result<String, String> {
    let z = first_zero()?;
    let ord = QOrdering::by_value(1000).enumerate().map_err(err)?;
    let r = commutativity_gap(z, &ord, 64, 10_000, GapOptions::default()).map_err(err)?;
    let g = geom_closed(z);
    ensure((r.gap_cos - g.re).abs() <= 1e-6 && (r.gap_sin + g.im).abs() <= 1e-6, || {
        format!("gap ({}, {}) vs geom {g}", r.gap_cos, r.gap_sin)
    })?;
    Ok(format!("gap_cos={:.9} gap_sin={:.9}", r.gap_cos, r.gap_sin))
}

fn check_gap_absolute(_: &VerifyOptions) -> Result<String, String> {
    let ord = QOrdering::by_value(10_000).enumerate().map_err(err)?;
    let r = commutativity_gap(pt(3.0, 0.0), &ord, ord.len(), 10_000, GapOptions::default()).map_err(err)?;
    ensure(r.gap_cos.abs() <= 1e-6 && r.gap_sin.abs() <= 1e-6, || format!("gap ({:e}, {:e})", r.gap_cos, r.gap_sin))?;
    Ok(format!("|gap_cos| = {:e}", r.gap_cos.abs()))
}

fn check_contradiction(_: &VerifyOptions) -> Result<String, String> {
    let z = first_zero()?;
    for s in [pt(0.5, 0.0), pt(2.0, 0.0), pt(0.75, 3.0), z] {
        let r = rh_contradiction_check(s, 1_000_000, 1e-12).map_err(err)?;
        let o = r.oracle_residual;
        ensure(o.cos.abs() <= 1e-10 && o.sin.abs() <= 1e-10, || {
            format!("oracle residual ({:e}, {:e}) at {}+{}i", o.cos, o.sin, s.x(), s.y())
        })?;
        let d = r.direct_residual;
        ensure(d.cos.abs() <= 5e-3 && d.sin.abs() <= 5e-3, || {
            format!("direct residual ({:e}, {:e}) at {}+{}i", d.cos, d.sin, s.x(), s.y())
        })?;
    }
    let check = eta_averaged(pt(0.5, 0.0), 1000, 3).value.re;
    ensure((check - 0.6048986434216304).abs() < 1e-6, || format!("averaged eta(1/2) = {check}"))?;
    Ok("identity holds on oracle and direct paths".into())
}
