//! Command-line interface: generation, sampling, corruption, completion,
//! retrieval, diagnostics, and the Monte Carlo experiment drivers.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use emac::error::EmacError;
use emac::hankel::{default_pencil, PencilShape};
use emac::harness::{
    corrupt, noise_sweep, parallelism, phase_transition, random_mask, random_signal,
    super_resolution_demo, svt_demo, svt_demo_ci, svt_demo_full, TrialSpec,
};
use emac::incoherence::incoherence_report;
use emac::io::{
    read_grid_csv, read_mask_csv, read_signal_json, select_observed, signal_to_json,
    write_grid_csv, write_mask_csv, write_signal_json, write_trace_csv, MAX_GRID_CELLS,
};
use emac::retrieval::matrix_pencil_1d;
use emac::signal::{nmse, synthesize, DataGrid, SpectralSignal};
use emac::solvers::{solve, Lambda, SolverConfig, Variant};

#[derive(Parser)]
#[command(
    name = "emac",
    version,
    about = "Recover spectrally sparse signals from partial, noisy, or corrupted samples"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a data grid from a random or supplied spectral signal
    Gen(GenArgs),
    /// Draw a uniform random sample mask for a grid
    Sample(SampleArgs),
    /// Corrupt a fraction of the masked entries with random-phase outliers
    Corrupt(CorruptArgs),
    /// Complete a partially observed grid by enhanced-matrix thresholding
    Solve(SolveArgs),
    /// Estimate mode poles and amplitudes from a completed 1-D grid
    Retrieve(RetrieveArgs),
    /// Gram-matrix conditioning diagnostics for a mode set
    Incoherence(IncoherenceArgs),
    /// Monte Carlo success rates over a (sparsity, sample-count) grid
    Phase(PhaseArgs),
    /// Mean recovery error as a function of the noise-ball radius
    NoiseSweep(NoiseSweepArgs),
    /// Super-resolution demo: extrapolate a band-limited spectrum
    DemoSr(DemoSrArgs),
    /// Noisy-recovery demo on a large grid
    DemoSvt(DemoSvtArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Load the signal from JSON instead of generating one
    #[arg(long, conflicts_with_all = ["n1", "n2", "r", "seed", "min_sep"])]
    signal: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    n1: usize,
    #[arg(long, default_value_t = 1)]
    n2: usize,
    /// Number of random modes
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Minimum pairwise wrap-around distance between mode frequencies
    #[arg(long)]
    min_sep: Option<f64>,
    /// Write the (generated or loaded) signal as JSON
    #[arg(long)]
    signal_out: Option<PathBuf>,
    /// Write the synthesized grid as CSV
    #[arg(long)]
    grid_out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    grid: PathBuf,
    /// Number of entries to observe
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output mask CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorruptArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    /// Probability that each masked entry is corrupted
    #[arg(long)]
    fraction: f64,
    /// Outlier magnitude as a multiple of the largest observed magnitude
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output grid CSV with corrupted entries substituted
    #[arg(long)]
    out: PathBuf,
    /// Write the corruption support as a mask CSV
    #[arg(long)]
    support_out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    /// exact | noisy | robust
    #[arg(long)]
    variant: String,
    /// Noise-ball radius (noisy variant)
    #[arg(long)]
    delta: Option<f64>,
    /// Sparse-component weight: "auto" or a number (robust variant)
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Output recovered grid CSV
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth grid for NMSE reporting
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Per-iteration trace CSV (t,tau,residual,rank)
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the estimated sparse outlier grid (robust variant)
    #[arg(long)]
    sparse_out: Option<PathBuf>,
}

#[derive(Args)]
struct RetrieveArgs {
    /// Completed 1-D grid (n2 = 1)
    #[arg(long)]
    grid: PathBuf,
    /// Model order
    #[arg(long)]
    r: usize,
    /// Pencil parameter; defaults to ceil((n+1)/2)
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct IncoherenceArgs {
    #[arg(long)]
    signal: PathBuf,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long, default_value_t = 11)]
    n1: usize,
    #[arg(long, default_value_t = 11)]
    n2: usize,
    /// Comma-separated sparsity values, e.g. 1,2,3
    #[arg(long, value_delimiter = ',')]
    r_list: Vec<usize>,
    /// Comma-separated sample counts, e.g. 10,25,40
    #[arg(long, value_delimiter = ',')]
    m_list: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// NMSE at or below this value counts as success
    #[arg(long, default_value_t = 1e-3)]
    success: f64,
    /// Output CSV (r,m,success_rate,trials)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NoiseSweepArgs {
    #[arg(long, default_value_t = 11)]
    n1: usize,
    #[arg(long, default_value_t = 11)]
    n2: usize,
    #[arg(long, default_value_t = 4)]
    r: usize,
    #[arg(long, default_value_t = 50)]
    m: usize,
    /// Comma-separated ball radii
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Output CSV (delta,mean_nmse)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DemoSrArgs {
    #[arg(long, default_value_t = 32)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    sources: usize,
    /// Observed low-band cutoff as a fraction of the sampling rate
    #[arg(long, default_value_t = 0.125)]
    flo: f64,
    /// Prefix for the _truth/_lowres/_recon CSV files
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args)]
struct DemoSvtArgs {
    /// Run the full-scale configuration (an hour-long job) instead of the
    /// scaled-down default
    #[arg(long)]
    slow: bool,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the recovered grid as CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

fn pencil_for(dims: (usize, usize), k1: Option<usize>, k2: Option<usize>) -> emac::Result<PencilShape> {
    match (k1, k2) {
        (None, None) => default_pencil(dims.0, dims.1),
        _ => {
            let fallback = default_pencil(dims.0, dims.1)?;
            PencilShape::new(dims, k1.unwrap_or(fallback.k1()), k2.unwrap_or(fallback.k2()))
        }
    }
}

fn check_grid_budget(n1: usize, n2: usize) -> emac::Result<()> {
    if n1.checked_mul(n2).map_or(true, |c| c == 0 || c > MAX_GRID_CELLS) {
        return Err(EmacError::DimensionMismatch(format!(
            "grid {n1}x{n2} outside supported sizes"
        )));
    }
    Ok(())
}

fn complex_pairs(values: &[num_complex::Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn run(cli: Cli) -> emac::Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen(a) => {
            let signal: SpectralSignal = match &a.signal {
                Some(path) => read_signal_json(path)?,
                None => {
                    check_grid_budget(a.n1, a.n2)?;
                    random_signal(a.seed, (a.n1, a.n2), a.r, a.min_sep)?
                }
            };
            let (n1, n2) = signal.dims();
            check_grid_budget(n1, n2)?;
            let grid = synthesize(&signal);
            if let Some(path) = &a.signal_out {
                write_signal_json(path, &signal)?;
            }
            if let Some(path) = &a.grid_out {
                write_grid_csv(path, &grid)?;
            }
            let wire: serde_json::Value = serde_json::from_str(&signal_to_json(&signal))?;
            println!(
                "{}",
                json!({
                    "signal": wire,
                    "grid_norm_fro": grid.norm_fro(),
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sample(a) => {
            let grid = read_grid_csv(&a.grid)?;
            let mask = random_mask(a.seed, grid.dims(), a.m)?;
            write_mask_csv(&a.out, &mask)?;
            println!("{}", json!({ "m": mask.len(), "dims": [grid.dims().0, grid.dims().1] }));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Corrupt(a) => {
            let grid = read_grid_csv(&a.grid)?;
            let mask = read_mask_csv(&a.mask)?;
            let observed = select_observed(&grid, &mask)?;
            let (corrupted, support) = corrupt(a.seed, &observed, a.fraction, a.scale)?;
            let mut out_grid = DataGrid::new(grid.values.clone());
            for &((k, l), v) in &corrupted {
                out_grid.values[[k, l]] = v;
            }
            write_grid_csv(&a.out, &out_grid)?;
            if let Some(path) = &a.support_out {
                write_mask_csv(path, &support)?;
            }
            println!(
                "{}",
                json!({ "observed": observed.len(), "corrupted": support.len() })
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Solve(a) => {
            let variant = match a.variant.as_str() {
                "exact" => {
                    if a.delta.is_some() || a.lambda.is_some() {
                        return Err(EmacError::InvalidSignal(
                            "--delta/--lambda do not apply to the exact variant".into(),
                        ));
                    }
                    Variant::Exact
                }
                "noisy" => {
                    if a.lambda.is_some() {
                        return Err(EmacError::InvalidSignal(
                            "--lambda does not apply to the noisy variant".into(),
                        ));
                    }
                    let delta = a.delta.ok_or_else(|| {
                        EmacError::InvalidSignal("the noisy variant requires --delta".into())
                    })?;
                    Variant::Noisy { delta }
                }
                "robust" => {
                    if a.delta.is_some() {
                        return Err(EmacError::InvalidSignal(
                            "--delta does not apply to the robust variant".into(),
                        ));
                    }
                    let lambda = match a.lambda.as_deref() {
                        None | Some("auto") => Lambda::Auto,
                        Some(text) => Lambda::Value(text.parse().map_err(|_| {
                            EmacError::InvalidSignal(format!("bad --lambda value {text:?}"))
                        })?),
                    };
                    Variant::Robust { lambda }
                }
                other => {
                    return Err(EmacError::InvalidSignal(format!(
                        "unknown variant {other:?}; expected exact, noisy, or robust"
                    )))
                }
            };
            let grid = read_grid_csv(&a.grid)?;
            let mask = read_mask_csv(&a.mask)?;
            let observed = select_observed(&grid, &mask)?;
            let shape = pencil_for(grid.dims(), a.k1, a.k2)?;
            let config = SolverConfig::default().with_max_iters(a.max_iters).with_rel_tol(a.tol);
            let mut report = solve(&observed, shape, variant, &config)?;
            if let Some(path) = &a.truth {
                let truth = read_grid_csv(path)?;
                report.nmse = Some(nmse(&report.recovered, &truth)?);
            }
            write_grid_csv(&a.out, &report.recovered)?;
            if let Some(path) = &a.trace {
                write_trace_csv(path, &report.trace)?;
            }
            if let Some(path) = &a.sparse_out {
                match &report.sparse_component {
                    Some(sparse) => write_grid_csv(path, sparse)?,
                    None => {
                        return Err(EmacError::InvalidSignal(
                            "--sparse-out applies only to the robust variant".into(),
                        ))
                    }
                }
            }
            let mut summary = json!({
                "variant": a.variant,
                "iterations": report.iterations,
                "converged": report.converged,
                "final_tau": report.trace.last().map(|s| s.tau),
                "final_residual": report.trace.last().map(|s| s.residual),
                "final_rank": report.trace.last().map(|s| s.rank),
                "nmse": report.nmse,
            });
            if let Some(sparse) = &report.sparse_component {
                let support = sparse.values.iter().filter(|v| v.norm() > 0.0).count();
                summary["sparse_support"] = json!(support);
                // The sparse threshold follows the singular-value threshold
                // (theta_t = lambda * tau_t) rather than being a fixed knob.
                summary["sparse_threshold_policy"] = json!("coupled-to-annealing");
            }
            println!("{summary}");
            Ok(if report.converged { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Cmd::Retrieve(a) => {
            let grid = read_grid_csv(&a.grid)?;
            let (n, n2) = grid.dims();
            if n2 != 1 {
                return Err(EmacError::DimensionMismatch(format!(
                    "retrieval expects a 1-D grid (n2 = 1), got {n}x{n2}"
                )));
            }
            let samples: Vec<num_complex::Complex64> = grid.values.column(0).to_vec();
            let k = a.k.unwrap_or((n + 2) / 2);
            let modes = matrix_pencil_1d(&samples, k, a.r)?;
            println!(
                "{}",
                json!({
                    "poles": complex_pairs(&modes.poles),
                    "freqs": modes.freqs,
                    "dampings": modes.dampings,
                    "amplitudes": complex_pairs(&modes.amplitudes),
                    "residual": modes.residual,
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Incoherence(a) => {
            let signal = read_signal_json(&a.signal)?;
            let shape = pencil_for(signal.dims(), a.k1, a.k2)?;
            let freqs: Vec<[f64; 2]> = signal.modes().iter().map(|m| m.freq).collect();
            let report = incoherence_report(&freqs, shape)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Phase(a) => {
            check_grid_budget(a.n1, a.n2)?;
            let mut template = TrialSpec::new((a.n1, a.n2), 1, 1, 0);
            template.max_iters = a.max_iters;
            template.rel_tol = a.tol;
            template.success_nmse = a.success;
            // A trial is over the moment it reaches the success threshold;
            // only failures need the full iteration budget.
            template.success_check_every = Some(100);
            let diagram = phase_transition(&template, &a.r_list, &a.m_list, a.trials, a.seed)?;
            std::fs::write(&a.out, diagram.to_csv())?;
            let threads = match parallelism() {
                0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
                n => n,
            };
            println!(
                "{}",
                json!({
                    "cells": a.r_list.len() * a.m_list.len(),
                    "trials_per_cell": a.trials,
                    "threads": threads,
                    "out": a.out.display().to_string(),
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::NoiseSweep(a) => {
            check_grid_budget(a.n1, a.n2)?;
            let mut template = TrialSpec::new((a.n1, a.n2), a.r, a.m, 0);
            template.max_iters = a.max_iters;
            template.rel_tol = a.tol;
            let points = noise_sweep(&template, &a.deltas, a.trials, a.seed)?;
            let mut csv = String::from("delta,mean_nmse\n");
            for p in &points {
                csv.push_str(&format!("{},{}\n", p.delta, p.mean_nmse));
            }
            std::fs::write(&a.out, csv)?;
            println!("{}", json!({ "points": points.len(), "out": a.out.display().to_string() }));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::DemoSr(a) => {
            let report = super_resolution_demo(a.n, a.sources, a.flo, &a.out_prefix)?;
            println!(
                "{}",
                json!({
                    "nmse_vs_bandlimited": report.nmse_vs_bandlimited,
                    "iterations": report.iterations,
                    "converged": report.converged,
                    "sources": report.sources,
                    "files": [
                        report.truth_path.display().to_string(),
                        report.lowres_path.display().to_string(),
                        report.recon_path.display().to_string(),
                    ],
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::DemoSvt(a) => {
            let spec = if a.slow { svt_demo_full(a.seed) } else { svt_demo_ci(a.seed) };
            let report = svt_demo(&spec)?;
            if let Some(path) = &a.out {
                write_grid_csv(path, &report.recovered)?;
            }
            println!(
                "{}",
                json!({
                    "dims": [spec.dims.0, spec.dims.1],
                    "r": spec.r,
                    "m": spec.m,
                    "snr_amplitude": spec.snr_amplitude,
                    "delta": report.delta,
                    "nmse": report.nmse,
                    "iterations": report.iterations,
                    "converged": report.converged,
                })
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
