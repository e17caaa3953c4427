//! Simulated annealing over orderings of a finite prefix of `Q`.
//!
//! The objective measures how far the rows `C(n, ·)`, `S(n, ·)` are from
//! their limits in `n` uniformly over `h`:
//!
//! ```text
//! sum over points of  max_{h<=hMax} max_{n0<=n<=n1}
//!     |C(n,h) - A_cos(h)| + |S(n,h) - A_sin(h)|
//! ```
//!
//! A small value is a finite-budget proxy for uniform convergence in `h`,
//! nothing more. Only the first `prefix_length` by-value elements are
//! permuted; the rest keep their by-value positions.

use std::io::{self, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::sci17;
use crate::limits::{LimitsError, ETA_TOL_FLOOR};
use crate::qset::{enumerate_q, OddSquarefree, QsetError, SHUFFLE_ALGORITHM};
use crate::series::{eta_accel, phi, q_power, SeriesError, StripPoint};
use crate::sum::ComplexSum;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search config: {0}")]
    Config(String),
    #[error("permutation is not a bijection on the first {0} elements")]
    NotABijection(usize),
    #[error(transparent)]
    Qset(#[from] QsetError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Limits(#[from] LimitsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Neighborhood {
    AdjacentSwap,
    RandomSwap,
}

/// Inputs to [`objective_gap`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub points: Vec<StripPoint>,
    /// Inclusive `(n0, n1)`.
    #[serde(rename = "nWindow")]
    pub n_window: (u64, u64),
    #[serde(rename = "hMax")]
    pub h_max: usize,
    #[serde(rename = "etaTol")]
    pub eta_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    #[serde(rename = "prefixLength")]
    pub prefix_length: usize,
    pub iterations: u64,
    pub neighborhood: Neighborhood,
    #[serde(rename = "initialTemperature")]
    pub initial_temperature: f64,
    pub decay: f64,
    pub objective: ObjectiveSpec,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let fail = |m: &str| Err(SearchError::Config(m.to_owned()));
        if self.prefix_length < 2 {
            return fail("prefixLength must be at least 2");
        }
        if self.iterations < 1 {
            return fail("iterations must be at least 1");
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return fail("decay must lie in (0, 1)");
        }
        if !(self.initial_temperature > 0.0) {
            return fail("initial temperature must be positive");
        }
        self.objective.validate()
    }
}

impl ObjectiveSpec {
    pub fn validate(&self) -> Result<(), SearchError> {
        let (n0, n1) = self.n_window;
        if n0 == 0 || n1 < n0 {
            return Err(SearchError::Config(format!("bad n window ({n0}, {n1})")));
        }
        if !(self.eta_tol > 0.0) {
            return Err(SearchError::Config("etaTol must be positive".into()));
        }
        Ok(())
    }
}

/// An ordering of the by-value prefix, with its objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingCandidate {
    /// `q` values in candidate order.
    pub permutation: Vec<u64>,
    pub objective: f64,
}

/// First `count` elements of `Q` in value order.
fn first_elements(count: usize) -> Result<Vec<OddSquarefree>, QsetError> {
    let mut bound = 64u64;
    loop {
        let q = enumerate_q(bound)?;
        if q.len() >= count {
            return Ok(q.into_iter().take(count).collect());
        }
        bound *= 2;
    }
}

/// Precomputed per-element deviations, so each candidate costs one pass of
/// prefix sums per `n`.
pub struct ObjectiveContext {
    elements: Vec<OddSquarefree>,
    h_max: usize,
    window: usize,
    // per point: dev[n_idx * m + j] = sgn(q_j) (P_{q_j}(n) - q_j^(-s) eta(s))
    deviations: Vec<Vec<Complex64>>,
}

impl ObjectiveContext {
    /// `prefix_length` elements are permutable; `spec.h_max` may reach
    /// past them into the fixed by-value tail.
    pub fn new(spec: &ObjectiveSpec, prefix_length: usize) -> Result<Self, SearchError> {
        spec.validate()?;
        let m = prefix_length.max(spec.h_max);
        let elements = first_elements(m)?;
        let (n0, n1) = spec.n_window;
        let window = (n1 - n0 + 1) as usize;
        let mut deviations = Vec::with_capacity(spec.points.len());
        for &s in &spec.points {
            let mut dev = vec![Complex64::default(); if spec.h_max == 0 { 0 } else { window * m }];
            if spec.h_max > 0 {
                let eta = eta_accel(s, spec.eta_tol.max(ETA_TOL_FLOOR))?.value;
                for (j, q) in elements.iter().enumerate() {
                    let qv = q.value();
                    let limit = q_power(s, qv) * eta;
                    let sign = f64::from(q.sign());
                    let mut partial: ComplexSum = (1..=n0 / qv).map(|mm| phi(mm * qv, s)).collect();
                    for (idx, n) in (n0..=n1).enumerate() {
                        if n % qv == 0 && n > n0 {
                            partial.add(phi(n, s));
                        }
                        dev[idx * m + j] = (partial.value() - limit) * sign;
                    }
                }
            }
            deviations.push(dev);
        }
        Ok(Self { elements, h_max: spec.h_max, window, deviations })
    }

    pub fn elements(&self) -> &[OddSquarefree] {
        &self.elements
    }

    /// Objective for an ordering given as positions into [`Self::elements`].
    pub fn evaluate(&self, order: &[usize]) -> f64 {
        if self.h_max == 0 {
            return 0.0;
        }
        let m = self.elements.len();
        let take = &order[..self.h_max];
        let mut total = 0.0;
        for dev in &self.deviations {
            let mut worst = 0.0f64;
            for row in dev.chunks_exact(m).take(self.window) {
                let mut acc = Complex64::default();
                for &j in take {
                    acc += row[j];
                    // S uses -Im, but only magnitudes enter
                    worst = worst.max(acc.re.abs() + acc.im.abs());
                }
            }
            total += worst;
        }
        total
    }

    /// Positions of `permutation` (q values over the prefix) followed by
    /// the by-value tail.
    pub fn positions(&self, permutation: &[u64]) -> Result<Vec<usize>, SearchError> {
        let p = permutation.len();
        let mut seen = vec![false; p];
        let mut order = Vec::with_capacity(self.elements.len());
        for &v in permutation {
            let j = self.elements[..p.min(self.elements.len())]
                .iter()
                .position(|q| q.value() == v)
                .ok_or(SearchError::NotABijection(p))?;
            if std::mem::replace(&mut seen[j], true) {
                return Err(SearchError::NotABijection(p));
            }
            order.push(j);
        }
        order.extend(p..self.elements.len());
        Ok(order)
    }
}

/// The objective of one candidate permutation of the first
/// `permutation.len()` by-value elements.
pub fn objective_gap(permutation: &[u64], spec: &ObjectiveSpec) -> Result<f64, SearchError> {
    let ctx = ObjectiveContext::new(spec, permutation.len())?;
    let order = ctx.positions(permutation)?;
    Ok(ctx.evaluate(&order))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: u64,
    /// Objective of the proposed neighbour.
    pub objective: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub config: SearchConfig,
    pub rng: String,
    #[serde(rename = "initialObjective")]
    pub initial_objective: f64,
    pub best: OrderingCandidate,
    #[serde(skip)]
    pub trace: Vec<TraceEntry>,
}

/// Annealing from the by-value order; deterministic in `config.seed`.
pub fn anneal(config: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    config.validate()?;
    let ctx = ObjectiveContext::new(&config.objective, config.prefix_length)?;
    let len = config.prefix_length;
    let mut rng = SplitMix64::seed_from_u64(config.seed);
    let mut current: Vec<usize> = (0..ctx.elements.len()).collect();
    let mut current_obj = ctx.evaluate(&current);
    let initial_objective = current_obj;
    let mut best = current.clone();
    let mut best_obj = current_obj;
    let mut temperature = config.initial_temperature;
    let mut trace = Vec::with_capacity(config.iterations as usize);

    for iteration in 1..=config.iterations {
        let (i, j) = match config.neighborhood {
            Neighborhood::AdjacentSwap => {
                let i = rng.random_range(0..len - 1);
                (i, i + 1)
            }
            Neighborhood::RandomSwap => {
                let i = rng.random_range(0..len);
                let mut j = rng.random_range(0..len - 1);
                if j >= i {
                    j += 1;
                }
                (i, j)
            }
        };
        current.swap(i, j);
        let proposed = ctx.evaluate(&current);
        let delta = proposed - current_obj;
        let accepted = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
        if accepted {
            current_obj = proposed;
            if proposed < best_obj {
                best_obj = proposed;
                best.clone_from(&current);
            }
        } else {
            current.swap(i, j);
        }
        trace.push(TraceEntry { iteration, objective: proposed, accepted });
        temperature *= config.decay;
    }

    let permutation = best[..len].iter().map(|&j| ctx.elements[j].value()).collect();
    Ok(SearchOutcome {
        config: config.clone(),
        rng: SHUFFLE_ALGORITHM.split('/').next().unwrap_or_default().to_owned(),
        initial_objective,
        best: OrderingCandidate { permutation, objective: best_obj },
        trace,
    })
}

/// Writes `iteration,objective,accepted` rows.
pub fn write_trace_csv<W: Write>(trace: &[TraceEntry], mut out: W) -> io::Result<()> {
    writeln!(out, "iteration,objective,accepted")?;
    for t in trace {
        writeln!(out, "{},{},{}", t.iteration, sci17(t.objective), t.accepted)?;
    }
    Ok(())
}
