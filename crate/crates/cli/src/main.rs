//! `qorder`: command-line front end to `qorder-core`.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or precondition error.

mod args;
mod manifest;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qorder_core::format::sci17;
use qorder_core::limits::{commutativity_gap, write_surface_csv, GapOptions};
use qorder_core::qset::SHUFFLE_ALGORITHM;
use qorder_core::search::{anneal, write_trace_csv, Neighborhood, ObjectiveSpec, SearchConfig};
use qorder_core::series::{eta_accel, zeta_from_eta, SeriesMethod, SeriesResult, StripPoint};
use qorder_core::zeros::{self, load_zeros, refine_record, refine_zero, scan_and_refine, scan_zeros};
use serde_json::json;

use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "qorder", version, about = "Iterated limits over odd squarefree orderings")]
struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the identity and property suite.
    Verify {
        /// Upper limit for the exhaustive f(k) comparison.
        #[arg(long, default_value_t = 20_000)]
        k_max: u64,
        /// Write the machine-readable summary here.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Alternating zeta function eta(x + iy).
    #[command(allow_negative_numbers = true)]
    Eta {
        x: f64,
        y: f64,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Riemann zeta function via eta.
    #[command(allow_negative_numbers = true)]
    Zeta {
        x: f64,
        y: f64,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// C(n, h) and S(n, h) over a grid, as CSV.
    #[command(allow_negative_numbers = true)]
    Surface {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        /// byvalue | factorcount | shuffle:SEED:PREFIX | explicit:q1,q2,...
        #[arg(long, default_value = "byvalue")]
        ordering: String,
        /// Enumeration bound for Q (default: enough for the largest h).
        #[arg(long)]
        bound: Option<u64>,
        /// n values: start:stop[:step], a,b,c or a single value.
        #[arg(long)]
        n: String,
        /// h values, same syntax as --n.
        #[arg(long)]
        h: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Both iterated limits and their gap, as JSON.
    #[command(allow_negative_numbers = true)]
    Gap {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long, default_value = "byvalue")]
        ordering: String,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, default_value_t = 64)]
        h_max: usize,
        /// Terms for the direct estimate of the inner-h-first limit (0 skips it).
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 1e-12)]
        eta_tol: f64,
        #[arg(long, default_value_t = 1e-8)]
        convergence_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zeros of zeta on the critical line, as CSV.
    Zeros {
        #[command(subcommand)]
        action: ZerosAction,
    },
    /// Annealing search over orderings of a prefix of Q.
    Search {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        prefix: usize,
        #[arg(long, default_value_t = 1000)]
        iters: u64,
        #[arg(long, value_enum, default_value_t = NeighborhoodArg::Adjacent)]
        neighborhood: NeighborhoodArg,
        #[arg(long, default_value_t = 1e-3)]
        t0: f64,
        #[arg(long, default_value_t = 0.995)]
        decay: f64,
        /// Real parts of objective points (paired with --y).
        #[arg(long, allow_negative_numbers = true, default_values_t = [0.5])]
        x: Vec<f64>,
        #[arg(long, allow_negative_numbers = true, default_values_t = [14.134725141734694])]
        y: Vec<f64>,
        #[arg(long, default_value = "1000:2000")]
        n_window: String,
        /// Prefix length compared against the limit (default: --prefix).
        #[arg(long)]
        h_max: Option<usize>,
        #[arg(long, default_value_t = 1e-12)]
        eta_tol: f64,
        /// Trace CSV (default: stdout).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Best-ordering JSON (default: stderr).
        #[arg(long)]
        best: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ZerosAction {
    /// Grid scan of |eta(1/2 + iy)| followed by refinement.
    Scan {
        #[arg(long, default_value_t = 0.0)]
        y_min: f64,
        #[arg(long)]
        y_max: f64,
        #[arg(long, default_value_t = zeros::DEFAULT_STEP)]
        step: f64,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Report raw grid minima without refinement.
        #[arg(long)]
        no_refine: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refine ordinates near the given guesses.
    Refine {
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        window: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load a table of ordinates, one per line.
    Load {
        #[arg(long)]
        path: PathBuf,
        /// Refine each loaded ordinate within this window.
        #[arg(long)]
        refine: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NeighborhoodArg {
    Adjacent,
    Random,
}

impl From<NeighborhoodArg> for Neighborhood {
    fn from(n: NeighborhoodArg) -> Self {
        match n {
            NeighborhoodArg::Adjacent => Neighborhood::AdjacentSwap,
            NeighborhoodArg::Random => Neighborhood::RandomSwap,
        }
    }
}

enum Failure {
    /// A verification check failed.
    Check(String),
    /// Bad input, unmet precondition or I/O failure.
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("FAILED: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Verify { k_max, json, inject_fault } => cmd_verify(k_max, json, inject_fault),
        Command::Eta { x, y, tol } => cmd_value("eta", x, y, tol),
        Command::Zeta { x, y, tol } => cmd_value("zeta", x, y, tol),
        Command::Surface { x, y, ordering, bound, n, h, out } => cmd_surface(x, y, &ordering, bound, &n, &h, out),
        Command::Gap { x, y, ordering, bound, h_max, budget, eta_tol, convergence_tol, out } => {
            let options = GapOptions { eta_tol, convergence_tol };
            cmd_gap(x, y, &ordering, bound, h_max, budget, options, out)
        }
        Command::Zeros { action } => cmd_zeros(action),
        Command::Search {
            seed,
            prefix,
            iters,
            neighborhood,
            t0,
            decay,
            x,
            y,
            n_window,
            h_max,
            eta_tol,
            trace,
            best,
        } => {
            if x.len() != y.len() {
                return Err(Failure::Usage("--x and --y must be given the same number of times".into()));
            }
            let points = x.iter().zip(&y).map(|(&x, &y)| StripPoint::new(x, y)).collect::<Result<Vec<_>, _>>()?;
            let config = SearchConfig {
                seed,
                prefix_length: prefix,
                iterations: iters,
                neighborhood: neighborhood.into(),
                initial_temperature: t0,
                decay,
                objective: ObjectiveSpec {
                    points,
                    n_window: args::parse_window(&n_window).map_err(Failure::Usage)?,
                    h_max: h_max.unwrap_or(prefix),
                    eta_tol,
                },
            };
            cmd_search(config, trace, best)
        }
    }
}

/// Opens `path` for writing, or stdout.
fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut out: Box<dyn Write>, path: Option<&Path>, manifest: &RunManifest) -> CmdResult {
    out.flush()?;
    if let Some(p) = path {
        manifest.write_beside(p)?;
    }
    Ok(())
}

/// Smallest power-of-two enumeration bound (at least 64) giving `count`
/// elements of Q.
fn bound_for(count: usize) -> u64 {
    let mut bound = 64u64;
    while qorder_core::qset::enumerate_q(bound).map(|q| q.len()).unwrap_or(usize::MAX) < count {
        bound *= 2;
    }
    bound
}

fn cmd_verify(k_max: u64, json: Option<PathBuf>, inject_fault: bool) -> CmdResult {
    let summary = verify::run(&verify::VerifyOptions { k_max, inject_fault });
    for c in &summary.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:<26} {:>8.2}s  {}", c.name, c.seconds, c.detail);
    }
    if let Some(path) = &json {
        let text = serde_json::to_string_pretty(&summary)?;
        std::fs::write(path, text + "\n")?;
        let manifest = RunManifest::new(
            "verify",
            json!({ "kMax": k_max, "injectFault": inject_fault }),
            vec![],
            &[SeriesMethod::ChebyshevAccelerated.id(), SeriesMethod::AveragedTail.id()],
        );
        manifest.write_beside(path)?;
    }
    match summary.first_failure {
        None => {
            println!("all {} checks passed", summary.checks.len());
            Ok(())
        }
        Some(name) => Err(Failure::Check(format!("check {name} failed"))),
    }
}

fn cmd_value(which: &str, x: f64, y: f64, tol: f64) -> CmdResult {
    let s = StripPoint::new(x, y)?;
    let r: SeriesResult = if which == "eta" { eta_accel(s, tol)? } else { zeta_from_eta(s, tol)? };
    println!("{which}({x} + {y}i) = {:.12} {:+.12}i", r.value.re, r.value.im);
    println!("re = {}", sci17(r.value.re));
    println!("im = {}", sci17(r.value.im));
    println!("errorEstimate = {:.3e}  method = {}  termsUsed = {}", r.error_estimate, r.method.id(), r.terms_used);
    Ok(())
}

fn cmd_surface(
    x: f64,
    y: f64,
    ordering: &str,
    bound: Option<u64>,
    n: &str,
    h: &str,
    out: Option<PathBuf>,
) -> CmdResult {
    let s = StripPoint::new(x, y)?;
    let n_axis = args::parse_range(n).map_err(Failure::Usage)?;
    let h_axis: Vec<usize> = args::parse_range(h).map_err(Failure::Usage)?.into_iter().map(|v| v as usize).collect();
    let h_max = h_axis.iter().copied().max().unwrap_or(0);
    let bound = bound.unwrap_or_else(|| bound_for(h_max));
    let ord = args::parse_ordering(ordering, bound).map_err(Failure::Usage)?.enumerate()?;
    let mut sink_out = sink(out.as_deref())?;
    write_surface_csv(s, &ord, &n_axis, &h_axis, &mut sink_out)?;
    let manifest = RunManifest::new(
        "surface",
        json!({ "x": x, "y": y, "ordering": ordering, "orderingId": ord.id(), "bound": bound, "n": n, "h": h }),
        seeds_of(ordering),
        &["neumaier-compensated", SHUFFLE_ALGORITHM],
    );
    finish(sink_out, out.as_deref(), &manifest)
}

fn seeds_of(ordering: &str) -> Vec<u64> {
    ordering
        .strip_prefix("shuffle:")
        .and_then(|r| r.split(':').next())
        .and_then(|s| s.parse().ok())
        .into_iter()
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_gap(
    x: f64,
    y: f64,
    ordering: &str,
    bound: Option<u64>,
    h_max: usize,
    budget: u64,
    options: GapOptions,
    out: Option<PathBuf>,
) -> CmdResult {
    let s = StripPoint::new(x, y)?;
    let bound = bound.unwrap_or_else(|| bound_for(h_max));
    let ord = args::parse_ordering(ordering, bound).map_err(Failure::Usage)?.enumerate()?;
    let report = commutativity_gap(s, &ord, h_max, budget, options)?;
    let mut sink_out = sink(out.as_deref())?;
    writeln!(sink_out, "{}", serde_json::to_string_pretty(&report)?)?;
    let manifest = RunManifest::new(
        "gap",
        json!({ "x": x, "y": y, "ordering": ordering, "bound": bound, "hMax": h_max,
                "budget": budget, "tolerances": options }),
        seeds_of(ordering),
        &[SeriesMethod::ChebyshevAccelerated.id(), SeriesMethod::AveragedTail.id()],
    );
    finish(sink_out, out.as_deref(), &manifest)
}

fn cmd_zeros(action: ZerosAction) -> CmdResult {
    let (records, out, params) = match action {
        ZerosAction::Scan { y_min, y_max, step, threshold, tol, no_refine, out } => {
            let records = if no_refine {
                scan_zeros(y_min, y_max, step, threshold)?
            } else {
                scan_and_refine(y_min, y_max, step, threshold, tol)?
            };
            let params = json!({ "action": "scan", "yMin": y_min, "yMax": y_max, "step": step,
                                 "threshold": threshold, "tol": tol, "refine": !no_refine });
            (records, out, params)
        }
        ZerosAction::Refine { y, window, tol, out } => {
            let records = y.iter().map(|&y0| refine_zero(y0, window, tol)).collect::<Result<Vec<_>, _>>()?;
            (records, out, json!({ "action": "refine", "y": y, "window": window, "tol": tol }))
        }
        ZerosAction::Load { path, refine, tol, out } => {
            let mut records = load_zeros(&path)?;
            if let Some(window) = refine {
                records = records.iter().map(|r| refine_record(r, window, tol)).collect::<Result<_, _>>()?;
            }
            let params = json!({ "action": "load", "path": path, "refine": refine, "tol": tol });
            (records, out, params)
        }
    };
    let mut sink_out = sink(out.as_deref())?;
    zeros::write_csv(&records, &mut sink_out)?;
    let manifest =
        RunManifest::new("zeros", params, vec![], &[SeriesMethod::ChebyshevAccelerated.id(), "golden-section"]);
    finish(sink_out, out.as_deref(), &manifest)
}

fn cmd_search(config: SearchConfig, trace: Option<PathBuf>, best: Option<PathBuf>) -> CmdResult {
    let outcome = anneal(&config)?;
    let manifest = RunManifest::new(
        "search",
        serde_json::to_value(&config)?,
        vec![config.seed],
        &[SeriesMethod::ChebyshevAccelerated.id(), outcome.rng.as_str()],
    );
    let mut trace_out = sink(trace.as_deref())?;
    write_trace_csv(&outcome.trace, &mut trace_out)?;
    finish(trace_out, trace.as_deref(), &manifest)?;

    let text = serde_json::to_string_pretty(&outcome)? + "\n";
    match &best {
        Some(path) => {
            std::fs::write(path, text)?;
            manifest.write_beside(path)?;
        }
        None => eprint!("{text}"),
    }
    Ok(())
}
