//! The alternating Dirichlet series `eta(s) = sum (-1)^(k-1) k^(-s)` and the
//! objects built from it.
//!
//! Terms are `phi(k) = (-1)^(k-1) k^(-s)`, with real and sine parts
//! `a_k = Re phi(k)` and `b_k = -Im phi(k)`. Powers are taken as
//! `exp(-s ln k)` with the real logarithm of `k`, so there is no branch to
//! choose.
//!
//! Three evaluation routes exist and are used to check one another:
//!
//! * [`eta_partial`]: raw compensated partial sums.
//! * [`eta_averaged`]: partial sums followed by repeated averaging of
//!   neighbours, which cancels the alternating tail one order at a time.
//! * [`eta_accel`]: alternating-series acceleration with weights taken from
//!   the shifted Chebyshev polynomial `T_n(1 - 2t)`. Writing
//!   `(k+1)^(-s) = Γ(s)^(-1) ∫_0^1 u^k ln(1/u)^(s-1) du` gives the bound
//!   `|error| <= Γ(x) / (|Γ(s)| d_n)` with `d_n >= (3+√8)^n / 2`.

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::qset::sieve_primes;
use crate::sum::ComplexSum;

pub type ComplexVal = Complex64;

/// Multiplier applied to the Chebyshev bound before it is reported.
pub const CHEBYSHEV_SAFETY: f64 = 10.0;
/// Largest acceleration order tried; `(3+√8)^n` must stay finite.
pub const MAX_ACCEL_TERMS: usize = 380;
/// Averaging depth used for tails of conditionally convergent sums.
pub const DEFAULT_AVERAGING_LEVELS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("real part must be positive and both parts finite, got s = {x} + {y}i")]
    InvalidPoint { x: f64, y: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("no convergence to {target:e} within the term budget; best estimate {best:?}")]
    NonConvergence { target: f64, best: SeriesResult },
    #[error("pole at z=1")]
    Pole,
    #[error("1 - 2^(1-s) vanishes at s = 1 + {y}i (y = 2π·{m}/ln 2)")]
    SingularDenominator { y: f64, m: i64 },
    #[error("modulus {0} is even; the subseries sign identity needs an odd modulus")]
    EvenModulus(u64),
    #[error("Euler product needs Re(s) > 1, got {0}")]
    NotAbsolutelyConvergent(f64),
    #[error("shift must be positive, got {0}")]
    InvalidShift(f64),
}

/// A point `s = x + iy` with `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct StripPoint {
    x: f64,
    y: f64,
}

#[derive(Deserialize)]
struct RawPoint {
    x: f64,
    y: f64,
}

impl TryFrom<RawPoint> for StripPoint {
    type Error = SeriesError;
    fn try_from(p: RawPoint) -> Result<Self, Self::Error> {
        StripPoint::new(p.x, p.y)
    }
}

impl StripPoint {
    pub fn new(x: f64, y: f64) -> Result<Self, SeriesError> {
        if !(x > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(SeriesError::InvalidPoint { x, y });
        }
        Ok(Self { x, y })
    }

    /// A point on the critical line `x = 1/2`.
    pub fn on_critical_line(y: f64) -> Result<Self, SeriesError> {
        Self::new(0.5, y)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn in_critical_strip(&self) -> bool {
        self.x < 1.0
    }

    pub fn conj(&self) -> Self {
        Self { x: self.x, y: -self.y }
    }
}

impl Serialize for StripPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("StripPoint", 3)?;
        st.serialize_field("x", &self.x)?;
        st.serialize_field("y", &self.y)?;
        st.serialize_field("inCriticalStrip", &self.in_critical_strip())?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesMethod {
    Raw,
    AveragedTail,
    ChebyshevAccelerated,
}

impl SeriesMethod {
    pub fn id(&self) -> &'static str {
        match self {
            SeriesMethod::Raw => "raw-compensated",
            SeriesMethod::AveragedTail => "averaged-tail",
            SeriesMethod::ChebyshevAccelerated => "chebyshev-accelerated",
        }
    }
}

/// A series value with the error its method claims.
///
/// * `Raw`: the modulus of the first omitted term (alternating bound, exact
///   only for real `s`).
/// * `AveragedTail`: the change between the two values entering the final
///   averaging step.
/// * `ChebyshevAccelerated`: the analytic bound times [`CHEBYSHEV_SAFETY`],
///   plus accumulated rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: ComplexVal,
    pub method: SeriesMethod,
    #[serde(rename = "termsUsed")]
    pub terms_used: u64,
    #[serde(rename = "errorEstimate")]
    pub error_estimate: f64,
}

/// `(-1)^(k-1) k^(-s)`.
#[inline]
pub fn phi(k: u64, s: StripPoint) -> Complex64 {
    let lnk = (k as f64).ln();
    let mag = (-s.x * lnk).exp();
    let (sin, cos) = (s.y * lnk).sin_cos();
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    Complex64::new(sign * mag * cos, -sign * mag * sin)
}

/// `(a_k, b_k)`: the cosine and sine parts of the k-th eta term.
pub fn term_ab(k: u64, s: StripPoint) -> (f64, f64) {
    let p = phi(k, s);
    (p.re, -p.im)
}

/// Compensated partial sum `sum_{k=1..n} phi(k)`.
pub fn eta_partial(s: StripPoint, n: u64) -> Complex64 {
    (1..=n).map(|k| phi(k, s)).collect::<ComplexSum>().value()
}

/// Iterated averaging of consecutive partial sums.
///
/// Takes `levels + 1` consecutive partial sums and returns the fully
/// averaged value with the gap between the two inputs to the last
/// averaging step.
pub fn averaged_tail(partials: &[Complex64]) -> (Complex64, f64) {
    assert!(partials.len() >= 2, "averaging needs at least two partial sums");
    let mut level = partials.to_vec();
    while level.len() > 2 {
        level = level.windows(2).map(|w| (w[0] + w[1]) * 0.5).collect();
    }
    ((level[0] + level[1]) * 0.5, (level[1] - level[0]).norm())
}

/// Accumulates `term(1..=n)` and keeps the last `keep` partial sums.
pub(crate) fn trailing_partials(n: u64, keep: usize, mut term: impl FnMut(u64) -> Complex64) -> Vec<Complex64> {
    let keep = keep.min(n as usize);
    let first_kept = n - keep as u64 + 1;
    let mut acc = ComplexSum::new();
    let mut out = Vec::with_capacity(keep);
    for k in 1..=n {
        acc.add(term(k));
        if k >= first_kept {
            out.push(acc.value());
        }
    }
    out
}

/// Partial sum to `n` terms with `levels` rounds of neighbour averaging.
pub fn eta_averaged(s: StripPoint, n: u64, levels: usize) -> SeriesResult {
    averaged_series(n, levels, |k| phi(k, s))
}

pub(crate) fn averaged_series(n: u64, levels: usize, term: impl FnMut(u64) -> Complex64) -> SeriesResult {
    let partials = trailing_partials(n, levels + 1, term);
    if partials.len() < 2 {
        let value = partials.last().copied().unwrap_or_default();
        return SeriesResult { value, method: SeriesMethod::Raw, terms_used: n, error_estimate: f64::INFINITY };
    }
    let (value, delta) = averaged_tail(&partials);
    SeriesResult { value, method: SeriesMethod::AveragedTail, terms_used: n, error_estimate: delta }
}

/// `ln|Γ(z)|` for `Re z > 0`, by upward recurrence and Stirling's series.
pub fn ln_gamma_abs(z: Complex64) -> f64 {
    let mut z = z;
    let mut shift = 0.0;
    while z.re < 15.0 {
        shift += z.norm().ln();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    let lg = (z - 0.5) * z.ln() - z + 0.5 * TAU.ln() + series;
    lg.re - shift
}

/// Natural log of the Chebyshev acceleration error bound at order `n`.
fn ln_chebyshev_bound(s: StripPoint, n: usize) -> f64 {
    let ln_mass = ln_gamma_abs(Complex64::new(s.x, 0.0)) - ln_gamma_abs(s.s());
    // d_n = ((3+√8)^n + (3-√8)^n)/2 >= (3+√8)^n / 2
    let ln_dn = n as f64 * (3.0 + 8f64.sqrt()).ln() - LN_2;
    ln_mass - ln_dn
}

fn chebyshev_eta(s: StripPoint, n: usize) -> Complex64 {
    let nf = n as f64;
    let mut d = (3.0 + 8f64.sqrt()).powi(n as i32);
    d = (d + 1.0 / d) / 2.0;
    let mut b = -1.0;
    let mut c = -d;
    let mut acc = ComplexSum::new();
    for k in 0..n {
        c = b - c;
        let kf = k as f64;
        // the weights c alternate in sign, so terms enter unsigned
        acc.add(q_power(s, k as u64 + 1) * c);
        b *= (kf + nf) * (kf - nf) / ((kf + 0.5) * (kf + 1.0));
    }
    acc.value() / d
}

fn chebyshev_estimate(s: StripPoint, n: usize) -> f64 {
    CHEBYSHEV_SAFETY * ln_chebyshev_bound(s, n).exp() + 4.0 * n as f64 * f64::EPSILON
}

/// Chebyshev-accelerated `eta(s)` with `error_estimate <= target_tol`.
pub fn eta_accel(s: StripPoint, target_tol: f64) -> Result<SeriesResult, SeriesError> {
    if !(target_tol > 0.0) {
        return Err(SeriesError::InvalidTolerance(target_tol));
    }
    let step = (3.0 + 8f64.sqrt()).ln();
    let ln_mass = ln_chebyshev_bound(s, 0);
    let mut n =
        (((ln_mass + CHEBYSHEV_SAFETY.ln() - target_tol.ln()) / step).ceil().max(1.0) as usize).min(MAX_ACCEL_TERMS);
    while n < MAX_ACCEL_TERMS && chebyshev_estimate(s, n) > target_tol {
        n += 1;
    }
    let result = SeriesResult {
        value: chebyshev_eta(s, n),
        method: SeriesMethod::ChebyshevAccelerated,
        terms_used: n as u64,
        error_estimate: chebyshev_estimate(s, n),
    };
    if result.error_estimate > target_tol {
        return Err(SeriesError::NonConvergence { target: target_tol, best: result });
    }
    Ok(result)
}

/// `1 - 2^(1-s)`, rejecting the pole and the other zeros of the factor.
pub fn bridge_factor(s: StripPoint) -> Result<Complex64, SeriesError> {
    if (s.x - 1.0).abs() < 1e-14 {
        let turns = s.y * LN_2 / TAU;
        let m = turns.round();
        if (turns - m).abs() < 1e-12 {
            return Err(if m == 0.0 {
                SeriesError::Pole
            } else {
                SeriesError::SingularDenominator { y: s.y, m: m as i64 }
            });
        }
    }
    Ok(Complex64::new(1.0, 0.0) - pow2(Complex64::new(1.0, 0.0) - s.s()))
}

/// `2^w` via `exp(w ln 2)`.
#[inline]
fn pow2(w: Complex64) -> Complex64 {
    (w * LN_2).exp()
}

/// `zeta(s) = eta(s) / (1 - 2^(1-s))`.
pub fn zeta_from_eta(s: StripPoint, target_tol: f64) -> Result<SeriesResult, SeriesError> {
    let factor = bridge_factor(s)?;
    let scale = factor.norm();
    let eta = eta_accel(s, target_tol * scale.min(1.0))?;
    Ok(SeriesResult { value: eta.value / factor, error_estimate: eta.error_estimate / scale, ..eta })
}

/// `(2^x - 2e^(-iy ln 2)) / (2^x - e^(-iy ln 2))`, the sum of `phi(2^l)`
/// over `l >= 0`.
pub fn geom_closed(s: StripPoint) -> Complex64 {
    let two_x = Complex64::new(2f64.powf(s.x), 0.0);
    let rot = Complex64::from_polar(1.0, -s.y * LN_2);
    (two_x - rot * 2.0) / (two_x - rot)
}

/// Lower bound on `|geom_closed(s)|` valid for `0 < x < 1`.
pub fn geom_lower_bound(x: f64) -> f64 {
    let t = 2f64.powf(x);
    (2.0 - t) / (t + 1.0)
}

/// `sum_{l=0..L} phi(2^l)`: `1 - sum_{l=1..L} 2^(-l s)`.
pub fn gamma_partial(s: StripPoint, levels: u32) -> Complex64 {
    let mut acc = ComplexSum::new();
    acc.add(Complex64::new(1.0, 0.0));
    for l in 1..=levels {
        acc.add(-pow2(-s.s() * f64::from(l)));
    }
    acc.value()
}

/// `sum_{l >= 0} phi(2^l)` over the powers of two not exceeding `n`.
pub fn gamma_partial_upto(s: StripPoint, n: u64) -> Complex64 {
    if n == 0 {
        return Complex64::default();
    }
    gamma_partial(s, 63 - n.leading_zeros())
}

fn shifted_term(s: StripPoint, rot: Complex64, k: u64) -> Complex64 {
    rot * phi(k, s)
}

/// Truncated `sum (-1)^(k-1) k^(-x) cos(y ln(shift k))` and its sine twin.
pub fn shifted_sums(s: StripPoint, shift: f64, n: u64) -> Result<(f64, f64), SeriesError> {
    let rot = shift_rotation(s, shift)?;
    let z = (1..=n).map(|k| shifted_term(s, rot, k)).collect::<ComplexSum>().value();
    Ok((z.re, -z.im))
}

/// [`shifted_sums`] with averaged tails; returns the sums and the delta.
pub fn shifted_sums_averaged(s: StripPoint, shift: f64, n: u64, levels: usize) -> Result<(f64, f64, f64), SeriesError> {
    let rot = shift_rotation(s, shift)?;
    let r = averaged_series(n, levels, |k| shifted_term(s, rot, k));
    Ok((r.value.re, -r.value.im, r.error_estimate))
}

/// Infinite-sum values of [`shifted_sums`]: `Re` and `-Im` of
/// `shift^(-iy) eta(s)`.
pub fn shifted_sums_oracle(s: StripPoint, shift: f64, eta: Complex64) -> Result<(f64, f64), SeriesError> {
    let z = shift_rotation(s, shift)? * eta;
    Ok((z.re, -z.im))
}

fn shift_rotation(s: StripPoint, shift: f64) -> Result<Complex64, SeriesError> {
    if !(shift > 0.0) || !shift.is_finite() {
        return Err(SeriesError::InvalidShift(shift));
    }
    Ok(Complex64::from_polar(1.0, -s.y * shift.ln()))
}

/// How [`subseries_q`] evaluates `sum_m (-1)^(mq-1) (mq)^(-s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubseriesMethod {
    /// Truncate after `terms` multiples, then average the tail.
    Direct { terms: u64, levels: usize },
    /// `q^(-s) eta(s)` with accelerated eta.
    Oracle { tol: f64 },
}

/// The subseries of eta over the multiples of an odd `q`.
pub fn subseries_q(s: StripPoint, q: u64, method: SubseriesMethod) -> Result<SeriesResult, SeriesError> {
    if q.is_multiple_of(2) {
        return Err(SeriesError::EvenModulus(q));
    }
    match method {
        SubseriesMethod::Direct { terms, levels } => Ok(averaged_series(terms, levels, |m| phi(m * q, s))),
        SubseriesMethod::Oracle { tol } => {
            let scale = (q as f64).powf(-s.x);
            let eta = eta_accel(s, tol / scale)?;
            Ok(SeriesResult { value: q_power(s, q) * eta.value, error_estimate: eta.error_estimate * scale, ..eta })
        }
    }
}

/// `q^(-s)`.
#[inline]
pub fn q_power(s: StripPoint, q: u64) -> Complex64 {
    (-s.s() * (q as f64).ln()).exp()
}

/// Partial Euler products over all primes and over odd primes only.
pub fn euler_product_check(s: StripPoint, prime_limit: u64) -> Result<(Complex64, Complex64), SeriesError> {
    if s.x <= 1.0 {
        return Err(SeriesError::NotAbsolutelyConvergent(s.x));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut odd = one;
    let mut two = one;
    for p in sieve_primes(prime_limit) {
        let factor = one - q_power(s, p);
        if p == 2 {
            two = factor;
        } else {
            odd *= factor;
        }
    }
    Ok((two * odd, odd))
}
