//! Ordinates `y` of zeros `1/2 + iy` on the critical line.
//!
//! Zeros are located as minima of `|eta(1/2 + iy)|`: a grid scan flags
//! local minima below a threshold, then golden-section search on
//! `|eta|^2` refines each one. Below height ~100 the default grid step
//! separates neighbouring zeros comfortably.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::sci17;
use crate::series::{eta_accel, SeriesError, StripPoint};

/// Accuracy requested from the eta evaluations behind every residual.
pub const EVAL_TOL: f64 = 1e-13;
/// Default grid step for [`scan_zeros`].
pub const DEFAULT_STEP: f64 = 0.01;
/// Largest number of grid points a single scan may evaluate.
pub const MAX_SCAN_POINTS: u64 = 10_000_000;
/// Ordinates closer than this are treated as the same zero.
pub const DEDUP_DISTANCE: f64 = 1e-6;

const GOLDEN_ITERATIONS: usize = 200;

#[derive(Debug, Error)]
pub enum ZeroError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: cannot parse {text:?} as an ordinate")]
    Parse { line: usize, text: String },
    #[error("line {line}: ordinate {value} must be positive and finite")]
    NonPositive { line: usize, value: f64 },
    #[error("line {line}: ordinate {value} is below the previous ordinate {previous}")]
    NonAscending { line: usize, value: f64, previous: f64 },
    #[error("invalid scan range [{y_min}, {y_max}] with step {step}")]
    InvalidRange { y_min: f64, y_max: f64, step: f64 },
    #[error("scan would evaluate {points} points, more than the budget of {MAX_SCAN_POINTS}")]
    BudgetExceeded { points: u64 },
    #[error("invalid refinement window {window} or tolerance {tol}")]
    InvalidWindow { window: f64, tol: f64 },
    #[error("no zero in window: best ordinate {best_ordinate} has |eta| = {best_residual:e} > {tol:e}")]
    NoZeroInWindow { best_ordinate: f64, best_residual: f64, tol: f64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroSource {
    File,
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub ordinate: f64,
    pub source: ZeroSource,
    /// `|eta(1/2 + i ordinate)|`.
    pub residual: f64,
    pub refined: bool,
}

/// `|eta(1/2 + iy)|`.
pub fn eta_modulus_on_line(y: f64) -> Result<f64, SeriesError> {
    let s = StripPoint::on_critical_line(y)?;
    Ok(eta_accel(s, EVAL_TOL)?.value.norm())
}

/// Parses the zero-table format: one positive ordinate per line, ascending,
/// blank lines and lines starting with `#` ignored.
pub fn parse_zeros(text: &str) -> Result<Vec<ZeroRecord>, ZeroError> {
    let mut out: Vec<ZeroRecord> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| ZeroError::Parse { line, text: trimmed.to_owned() })?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(ZeroError::NonPositive { line, value });
        }
        if let Some(prev) = out.last() {
            if (value - prev.ordinate).abs() < DEDUP_DISTANCE {
                continue;
            }
            if value < prev.ordinate {
                return Err(ZeroError::NonAscending { line, value, previous: prev.ordinate });
            }
        }
        out.push(ZeroRecord {
            ordinate: value,
            source: ZeroSource::File,
            residual: eta_modulus_on_line(value)?,
            refined: false,
        });
    }
    Ok(out)
}

pub fn load_zeros(path: impl AsRef<Path>) -> Result<Vec<ZeroRecord>, ZeroError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ZeroError::Io { path: path.display().to_string(), source })?;
    parse_zeros(&text)
}

/// Local minima of `|eta(1/2 + iy)|` below `threshold` on the grid
/// `y_min, y_min + step, ...` up to `y_max`.
pub fn scan_zeros(y_min: f64, y_max: f64, step: f64, threshold: f64) -> Result<Vec<ZeroRecord>, ZeroError> {
    if !(step > 0.0) || !(y_min >= 0.0) || !(y_max >= y_min) || !y_max.is_finite() {
        return Err(ZeroError::InvalidRange { y_min, y_max, step });
    }
    let span = ((y_max - y_min) / step + 1e-9).floor();
    if span + 1.0 > MAX_SCAN_POINTS as f64 {
        return Err(ZeroError::BudgetExceeded { points: span as u64 + 1 });
    }
    let count = span as u64 + 1;
    let grid: Vec<f64> = (0..count).map(|i| y_min + i as f64 * step).collect();
    let values = grid
        .par_iter()
        .map(|&y| {
            // y = 0 is fine for eta; StripPoint only constrains x
            eta_modulus_on_line(y)
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let v = values[i];
        if v < threshold && v <= values[i - 1] && v < values[i + 1] {
            out.push(ZeroRecord { ordinate: grid[i], source: ZeroSource::Scan, residual: v, refined: false });
        }
    }
    Ok(out)
}

/// Golden-section minimization of `|eta(1/2 + iy)|^2` over
/// `[y0 - window, y0 + window]`.
pub fn refine_zero(y0: f64, window: f64, tol: f64) -> Result<ZeroRecord, ZeroError> {
    if !(window > 0.0) || !(tol > 0.0) {
        return Err(ZeroError::InvalidWindow { window, tol });
    }
    let objective = |y: f64| eta_modulus_on_line(y).map(|m| m * m);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = (y0 - window).max(0.0);
    let mut hi = y0 + window;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    for _ in 0..GOLDEN_ITERATIONS {
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = objective(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = objective(d)?;
        }
    }
    let (ordinate, best) = if fc < fd { (c, fc) } else { (d, fd) };
    let residual = best.sqrt();
    if residual > tol {
        return Err(ZeroError::NoZeroInWindow { best_ordinate: ordinate, best_residual: residual, tol });
    }
    Ok(ZeroRecord { ordinate, source: ZeroSource::Scan, residual, refined: true })
}

/// Refines an existing record in place of its ordinate, keeping its source.
pub fn refine_record(record: &ZeroRecord, window: f64, tol: f64) -> Result<ZeroRecord, ZeroError> {
    let refined = refine_zero(record.ordinate, window, tol)?;
    Ok(ZeroRecord { source: record.source, ..refined })
}

/// Scan followed by refinement of every candidate, deduplicated.
pub fn scan_and_refine(
    y_min: f64,
    y_max: f64,
    step: f64,
    threshold: f64,
    tol: f64,
) -> Result<Vec<ZeroRecord>, ZeroError> {
    let mut out: Vec<ZeroRecord> = Vec::new();
    for candidate in scan_zeros(y_min, y_max, step, threshold)? {
        let refined = refine_record(&candidate, step, tol)?;
        if out.last().is_some_and(|p| (refined.ordinate - p.ordinate).abs() < DEDUP_DISTANCE) {
            continue;
        }
        out.push(refined);
    }
    Ok(out)
}

/// Writes `ordinate,residual,refined` rows.
pub fn write_csv<W: Write>(records: &[ZeroRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "ordinate,residual,refined")?;
    for r in records {
        writeln!(out, "{},{},{}", sci17(r.ordinate), sci17(r.residual), r.refined)?;
    }
    Ok(())
}
