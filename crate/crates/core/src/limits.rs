//! The double sums
//!
//! ```text
//! C(n, h) = sum_{k<=n} f(k, h) a_k,    S(n, h) = sum_{k<=n} f(k, h) b_k
//! ```
//!
//! and their two iterated limits.
//!
//! * Inner limit over `n` first: for fixed `h` the sum over `k` regroups
//!   into subseries over multiples of each `q_i`, so
//!   `lim_n C(n, h) = sum_{i<=h} sgn(q_i) Re[q_i^(-s) eta(s)]`
//!   (and `-Im` for `S`).
//! * Inner limit over `h` first: `f(k, h) -> f(k)`, which is `-1` off the
//!   powers of two, so the outer limit is `Re[geom(s) - eta(s)]`, with
//!   `geom(s)` the sum of `phi(2^l)`.
//!
//! At a zero of eta the first limit is `0` for every `h` while the second
//! is `Re geom(s) != 0`; the two orders of limits disagree. For `Re s > 1`
//! everything converges absolutely and the two agree.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::sci17;
use crate::qset::{f_closed, is_gamma, OddFactorTable, OrderedQ, QsetError};
use crate::series::{
    averaged_tail, eta_accel, eta_averaged, gamma_partial, geom_closed, phi, q_power, term_ab, trailing_partials,
    SeriesError, StripPoint, DEFAULT_AVERAGING_LEVELS,
};
use crate::sum::{ComplexSum, NeumaierSum};

#[derive(Debug, Error)]
pub enum LimitsError {
    #[error(transparent)]
    Qset(#[from] QsetError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("{axis} axis must be strictly ascending")]
    Axis { axis: &'static str },
    #[error("n axis values must be positive")]
    ZeroN,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// `C(n, h)` and `S(n, h)` over a grid of `(n, h)`, row-major in `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumSurface {
    pub point: StripPoint,
    #[serde(rename = "orderingId")]
    pub ordering_id: String,
    #[serde(rename = "nAxis")]
    pub n_axis: Vec<u64>,
    #[serde(rename = "hAxis")]
    pub h_axis: Vec<usize>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "S")]
    pub s: Vec<f64>,
}

impl SumSurface {
    pub fn c_at(&self, n_idx: usize, h_idx: usize) -> f64 {
        self.c[n_idx * self.h_axis.len() + h_idx]
    }

    pub fn s_at(&self, n_idx: usize, h_idx: usize) -> f64 {
        self.s[n_idx * self.h_axis.len() + h_idx]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = SurfaceCsv::new(out)?;
        for (i, &n) in self.n_axis.iter().enumerate() {
            for (j, &h) in self.h_axis.iter().enumerate() {
                w.row(n, h, self.c_at(i, j), self.s_at(i, j))?;
            }
        }
        Ok(())
    }
}

/// Streaming writer for `n,h,C,S` rows.
pub struct SurfaceCsv<W: Write> {
    out: W,
}

impl<W: Write> SurfaceCsv<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "n,h,C,S")?;
        Ok(Self { out })
    }

    pub fn row(&mut self, n: u64, h: usize, c: f64, s: f64) -> io::Result<()> {
        writeln!(self.out, "{n},{h},{},{}", sci17(c), sci17(s))
    }
}

fn check_ascending<T: PartialOrd>(axis: &[T], name: &'static str) -> Result<(), LimitsError> {
    if axis.windows(2).all(|w| w[0] < w[1]) {
        Ok(())
    } else {
        Err(LimitsError::Axis { axis: name })
    }
}

/// Walks the surface row by row, calling `visit(n, h, C, S)` in row-major
/// order without holding the whole grid.
///
/// Each `k` is charged only to the positions in the ordering of its own
/// divisors in `Q`; a row is then a prefix sum over those per-position
/// totals.
pub fn stream_surface(
    s: StripPoint,
    ordering: &OrderedQ,
    n_axis: &[u64],
    h_axis: &[usize],
    mut visit: impl FnMut(u64, usize, f64, f64) -> io::Result<()>,
) -> Result<(), LimitsError> {
    check_ascending(n_axis, "n")?;
    check_ascending(h_axis, "h")?;
    if n_axis.first() == Some(&0) {
        return Err(LimitsError::ZeroN);
    }
    let h_max = h_axis.last().copied().unwrap_or(0);
    ordering.prefix(h_max)?;
    let n_max = n_axis.last().copied().unwrap_or(0);
    let table = OddFactorTable::new(n_max);

    let mut per_cos = vec![NeumaierSum::new(); h_max];
    let mut per_sin = vec![NeumaierSum::new(); h_max];
    let mut next_row = 0;
    for k in 1..=n_max {
        if !is_gamma(k) {
            let (a, b) = term_ab(k, s);
            table.for_each_q_divisor(k, |d, sign| {
                if let Some(i) = ordering.index_of(d).filter(|&i| i < h_max) {
                    let sign = f64::from(sign);
                    per_cos[i].add(sign * a);
                    per_sin[i].add(sign * b);
                }
            });
        }
        if n_axis.get(next_row) == Some(&k) {
            let mut c = NeumaierSum::new();
            let mut sn = NeumaierSum::new();
            let mut i = 0;
            for &h in h_axis {
                while i < h {
                    c.add(per_cos[i].value());
                    sn.add(per_sin[i].value());
                    i += 1;
                }
                visit(k, h, c.value(), sn.value())?;
            }
            next_row += 1;
        }
    }
    Ok(())
}

/// Materializes `C` and `S` on the grid `n_axis x h_axis`.
pub fn c_s_surface(
    s: StripPoint,
    ordering: &OrderedQ,
    n_axis: &[u64],
    h_axis: &[usize],
) -> Result<SumSurface, LimitsError> {
    let cells = n_axis.len() * h_axis.len();
    let mut c = Vec::with_capacity(cells);
    let mut sv = Vec::with_capacity(cells);
    stream_surface(s, ordering, n_axis, h_axis, |_, _, cv, svv| {
        c.push(cv);
        sv.push(svv);
        Ok(())
    })?;
    Ok(SumSurface {
        point: s,
        ordering_id: ordering.id().to_owned(),
        n_axis: n_axis.to_vec(),
        h_axis: h_axis.to_vec(),
        c,
        s: sv,
    })
}

/// Streams the surface straight into `n,h,C,S` CSV.
pub fn write_surface_csv<W: Write>(
    s: StripPoint,
    ordering: &OrderedQ,
    n_axis: &[u64],
    h_axis: &[usize],
    out: W,
) -> Result<(), LimitsError> {
    let mut csv = SurfaceCsv::new(out)?;
    stream_surface(s, ordering, n_axis, h_axis, |n, h, c, sv| csv.row(n, h, c, sv))
}

/// Tightest eta tolerance requested; below this the accelerator's rounding
/// term dominates.
pub const ETA_TOL_FLOOR: f64 = 1e-13;

/// `eta(s)` accurate enough that `sum_{i<=h} q_i^(-x) |eta error| <= tol`.
fn eta_for_prefix(s: StripPoint, ordering: &OrderedQ, h: usize, tol: f64) -> Result<Complex64, LimitsError> {
    let weight: f64 = ordering.prefix(h)?.iter().map(|q| (q.value() as f64).powf(-s.x())).sum();
    let eta_tol = (tol / weight.max(1.0)).max(ETA_TOL_FLOOR);
    Ok(eta_accel(s, eta_tol)?.value)
}

/// `lim_n C(n, h)` and `lim_n S(n, h)` for `h = 1..=h_max`.
pub fn limit_a_sequence(
    s: StripPoint,
    ordering: &OrderedQ,
    h_max: usize,
    tol: f64,
) -> Result<Vec<(f64, f64)>, LimitsError> {
    let prefix = ordering.prefix(h_max)?;
    if h_max == 0 {
        return Ok(Vec::new());
    }
    let eta = eta_for_prefix(s, ordering, h_max, tol)?;
    let mut acc = ComplexSum::new();
    Ok(prefix
        .iter()
        .map(|q| {
            acc.add(q_power(s, q.value()) * f64::from(q.sign()));
            let z = acc.value() * eta;
            (z.re, -z.im)
        })
        .collect())
}

/// `lim_n C(n, h)` and `lim_n S(n, h)`.
pub fn limit_a(s: StripPoint, ordering: &OrderedQ, h: usize, tol: f64) -> Result<(f64, f64), LimitsError> {
    Ok(limit_a_sequence(s, ordering, h, tol)?.last().copied().unwrap_or((0.0, 0.0)))
}

/// The limit over `n` of `lim_h C(n, h)`, both directly and in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitB {
    /// Truncation of `sum f(k) a_k` to `budget` terms with averaged tail;
    /// `None` when `budget == 0`.
    pub direct_cos: Option<f64>,
    pub direct_sin: Option<f64>,
    /// Averaging delta plus the bound on the omitted powers of two.
    pub direct_error: f64,
    pub oracle_cos: f64,
    pub oracle_sin: f64,
    /// Whether direct and oracle agree within `direct_error + tol`.
    pub consistent: bool,
}

/// `lim_n lim_h C(n, h) = sum f(k) a_k = Re[geom(s) - eta(s)]` and the sine
/// analogue.
pub fn limit_b(s: StripPoint, budget: u64, tol: f64) -> Result<LimitB, LimitsError> {
    let eta = eta_accel(s, tol)?;
    let oracle = geom_closed(s) - eta.value;
    let (oracle_cos, oracle_sin) = (oracle.re, -oracle.im);
    if budget == 0 {
        return Ok(LimitB {
            direct_cos: None,
            direct_sin: None,
            direct_error: f64::INFINITY,
            oracle_cos,
            oracle_sin,
            consistent: true,
        });
    }
    let partials = trailing_partials(budget, DEFAULT_AVERAGING_LEVELS + 1, |k| phi(k, s) * f_closed(k) as f64);
    let (direct, delta) = if partials.len() >= 2 { averaged_tail(&partials) } else { (partials[0], f64::INFINITY) };
    // powers of two beyond the budget are missing from the direct sum
    let ratio = 2f64.powf(-s.x());
    let next_level = 64 - budget.leading_zeros();
    let gamma_tail = ratio.powi(next_level as i32) / (1.0 - ratio);
    let direct_error = delta + gamma_tail;
    let gap = (direct - oracle).norm();
    Ok(LimitB {
        direct_cos: Some(direct.re),
        direct_sin: Some(-direct.im),
        direct_error,
        oracle_cos,
        oracle_sin,
        consistent: gap <= direct_error + tol + eta.error_estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convergence {
    Converged,
    NotConverged,
    Empty,
}

/// Spread of the last quarter of `seq` (at least two entries).
pub fn last_quarter_spread(seq: &[f64]) -> Option<f64> {
    if seq.len() < 2 {
        return None;
    }
    let take = seq.len().div_ceil(4).max(2);
    let tail = &seq[seq.len() - take..];
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Some(hi - lo)
}

fn classify(cos: &[f64], sin: &[f64], tol: f64) -> Convergence {
    match (last_quarter_spread(cos), last_quarter_spread(sin)) {
        _ if cos.is_empty() => Convergence::Empty,
        (Some(a), Some(b)) if a < tol && b < tol => Convergence::Converged,
        _ => Convergence::NotConverged,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapOptions {
    /// Accuracy of every eta evaluation feeding the closed forms.
    #[serde(rename = "etaTol")]
    pub eta_tol: f64,
    /// Last-quarter spread below which the `A(h)` sequence counts as
    /// converged.
    #[serde(rename = "convergenceTol")]
    pub convergence_tol: f64,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self { eta_tol: 1e-12, convergence_tol: 1e-8 }
    }
}

/// Both iterated limits at one point for one ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub point: StripPoint,
    #[serde(rename = "orderingId")]
    pub ordering_id: String,
    /// `lim_n C(n, h)` for `h = 1..=hMax`.
    #[serde(rename = "A_cos")]
    pub a_cos: Vec<f64>,
    #[serde(rename = "A_sin")]
    pub a_sin: Vec<f64>,
    #[serde(rename = "A_convergence")]
    pub a_convergence: Convergence,
    /// Direct truncated estimates of `lim_n lim_h`; null without budget.
    #[serde(rename = "B_cos")]
    pub b_cos: Option<f64>,
    #[serde(rename = "B_sin")]
    pub b_sin: Option<f64>,
    #[serde(rename = "B_errorEstimate")]
    pub b_error_estimate: f64,
    #[serde(rename = "B_consistent")]
    pub b_consistent: bool,
    #[serde(rename = "oracleB_cos")]
    pub oracle_b_cos: f64,
    #[serde(rename = "oracleB_sin")]
    pub oracle_b_sin: f64,
    /// `oracleB - A(hMax)`.
    pub gap_cos: f64,
    pub gap_sin: f64,
    #[serde(rename = "hMax")]
    pub h_max: usize,
    pub budget: u64,
    pub tolerances: GapOptions,
}

/// Assembles a [`LimitReport`]: the `A(h)` sequence, `B` both ways, and the
/// gap between the closed-form `B` and the last `A`.
pub fn commutativity_gap(
    s: StripPoint,
    ordering: &OrderedQ,
    h_max: usize,
    budget: u64,
    options: GapOptions,
) -> Result<LimitReport, LimitsError> {
    let seq = limit_a_sequence(s, ordering, h_max, options.eta_tol)?;
    let (a_cos, a_sin): (Vec<f64>, Vec<f64>) = seq.into_iter().unzip();
    let b = limit_b(s, budget, options.eta_tol)?;
    let last_cos = a_cos.last().copied().unwrap_or(0.0);
    let last_sin = a_sin.last().copied().unwrap_or(0.0);
    Ok(LimitReport {
        point: s,
        ordering_id: ordering.id().to_owned(),
        a_convergence: classify(&a_cos, &a_sin, options.convergence_tol),
        a_cos,
        a_sin,
        b_cos: b.direct_cos,
        b_sin: b.direct_sin,
        b_error_estimate: b.direct_error,
        b_consistent: b.consistent,
        oracle_b_cos: b.oracle_cos,
        oracle_b_sin: b.oracle_sin,
        gap_cos: b.oracle_cos - last_cos,
        gap_sin: b.oracle_sin - last_sin,
        h_max,
        budget,
        tolerances: options,
    })
}

/// Cosine and sine parts of one side of the power-of-two identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parts {
    pub cos: f64,
    pub sin: f64,
}

impl From<Complex64> for Parts {
    fn from(z: Complex64) -> Self {
        Self { cos: z.re, sin: -z.im }
    }
}

/// Numerical check of `sum_Γ a_k = sum a_k + sum f(k) a_k` (and the `b`
/// analogue), with each side computed along independent paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContradictionReport {
    pub point: StripPoint,
    pub budget: u64,
    /// Left side from the partial sums of `phi(2^l)`.
    #[serde(rename = "gammaSum")]
    pub gamma_sum: Parts,
    /// Left side from the closed form.
    #[serde(rename = "gammaClosed")]
    pub gamma_closed: Parts,
    /// `sum a_k`, accelerated.
    pub eta: Parts,
    /// `sum f(k) a_k` from the closed form.
    #[serde(rename = "fSumOracle")]
    pub f_sum_oracle: Parts,
    /// `sum f(k) a_k` truncated at `budget`.
    #[serde(rename = "fSumDirect")]
    pub f_sum_direct: Parts,
    /// Partial eta sum at `budget`, averaged.
    #[serde(rename = "etaDirect")]
    pub eta_direct: Parts,
    #[serde(rename = "oracleResidual")]
    pub oracle_residual: Parts,
    #[serde(rename = "directResidual")]
    pub direct_residual: Parts,
}

fn residual(lhs: Parts, a: Parts, b: Parts) -> Parts {
    Parts { cos: lhs.cos - (a.cos + b.cos), sin: lhs.sin - (a.sin + b.sin) }
}

pub fn rh_contradiction_check(s: StripPoint, budget: u64, tol: f64) -> Result<ContradictionReport, LimitsError> {
    // enough levels that 2^(-L x) is far below binary64 resolution
    let levels = ((60.0 / s.x()).ceil() as u32).clamp(1, 4000);
    let gamma_sum: Parts = gamma_partial(s, levels).into();
    let gamma_closed: Parts = geom_closed(s).into();
    let eta = eta_accel(s, tol)?;
    let b = limit_b(s, budget.max(1), tol)?;
    let f_sum_oracle = Parts { cos: b.oracle_cos, sin: b.oracle_sin };
    let f_sum_direct = Parts { cos: b.direct_cos.unwrap_or(f64::NAN), sin: b.direct_sin.unwrap_or(f64::NAN) };
    let eta_direct: Parts = eta_averaged(s, budget.max(1), DEFAULT_AVERAGING_LEVELS).value.into();
    let eta: Parts = eta.value.into();
    Ok(ContradictionReport {
        point: s,
        budget,
        gamma_sum,
        gamma_closed,
        eta,
        f_sum_oracle,
        f_sum_direct,
        eta_direct,
        oracle_residual: residual(gamma_sum, eta, f_sum_oracle),
        direct_residual: residual(gamma_sum, eta_direct, f_sum_direct),
    })
}
