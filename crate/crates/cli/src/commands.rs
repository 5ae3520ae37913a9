use std::thread;

use serde::Serialize;

use ncg_spectra::free_energy::{
    candidates_at, default_bracket, locate_critical, select_equilibrium, solve_ansatz, MeanDensity,
};
use ncg_spectra::montecarlo::checkpoint::{load_eigenvalues, CheckpointMeta};
use ncg_spectra::montecarlo::run_chain;
use ncg_spectra::self_consistent::BranchTracker;
use ncg_spectra::{
    compare, Ansatz, DensityTable, EquilibriumSolution, Error, GeometryModel, McConfig, McInit,
    Moments, SpectralDensity, Support,
};

use crate::output::{float, read_table, OutputDir};
use crate::{AnsatzArg, CliError, CompareArgs, CriticalArgs, EquilibriumArgs, InitArg, McArgs, ScanArgs};

#[derive(Debug, Serialize)]
struct SolutionRecord {
    ansatz: Ansatz,
    support: Vec<f64>,
    moments: Moments,
    ell: f64,
    free_energy: f64,
}

impl From<&EquilibriumSolution> for SolutionRecord {
    fn from(s: &EquilibriumSolution) -> Self {
        SolutionRecord {
            ansatz: s.ansatz,
            support: s.support.edges(),
            moments: s.moments,
            ell: s.lagrange,
            free_energy: s.free_energy,
        }
    }
}

#[derive(Debug, Serialize)]
struct EquilibriumReport {
    model: GeometryModel,
    g: f64,
    chosen: SolutionRecord,
    degenerate: bool,
    candidates: Vec<SolutionRecord>,
    density_file: String,
    mean_density_file: Option<String>,
}

fn density_rows(points: &[(f64, f64)]) -> Vec<Vec<String>> {
    points.iter().map(|&(x, r)| vec![float(x), float(r)]).collect()
}

fn mean_density_rows(mean: &MeanDensity, lo: f64, hi: f64, points: usize) -> Vec<Vec<String>> {
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            vec![float(x), float(mean.eval(x))]
        })
        .collect()
}

pub fn equilibrium(args: &EquilibriumArgs) -> Result<(), CliError> {
    args.model.require_geometry()?;
    if args.points < 2 {
        return Err(CliError::usage("--points must be at least 2"));
    }
    let candidates = match args.ansatz {
        AnsatzArg::Fixed(a) => vec![solve_ansatz(args.model, args.g, a)?],
        AnsatzArg::Auto => {
            let mut tracker = match args.model {
                GeometryModel::Plus => BranchTracker::broken_branch().ok(),
                _ => None,
            };
            candidates_at(args.model, args.g, tracker.as_mut())
        }
    };
    if candidates.is_empty() {
        return Err(CliError {
            code: CliError::NUMERICAL,
            message: format!("every branch failed at g = {}", args.g),
        });
    }
    let selection = select_equilibrium(args.model, args.g, candidates)?;
    let winner = &selection.winner;

    let mut out = OutputDir::create(&args.out)?;
    out.write_csv("density.csv", &["lambda", "rho"], &density_rows(&winner.density.sample(args.points)))?;
    let mean_density_file = match &selection.mean_density {
        Some(mean) => {
            let r = winner.density.upper_edge().max(-winner.density.lower_edge());
            let rows = mean_density_rows(mean, -r, r, args.points);
            out.write_csv("mean_density.csv", &["lambda", "rho"], &rows)?;
            Some("mean_density.csv".to_string())
        }
        None => None,
    };
    let report = EquilibriumReport {
        model: args.model,
        g: args.g,
        chosen: winner.into(),
        degenerate: selection.degenerate,
        candidates: selection.ranked.iter().map(SolutionRecord::from).collect(),
        density_file: "density.csv".into(),
        mean_density_file,
    };
    out.write_json("solution.json", &report)?;
    out.finish("equilibrium", args, vec![])?;

    println!(
        "{} g = {}: {} with support {:?}, m1 = {:.6}, m2 = {:.6}, E = {:.10}",
        args.model,
        args.g,
        winner.ansatz,
        winner.support.edges(),
        winner.moments.m1,
        winner.moments.m2,
        winner.free_energy
    );
    Ok(())
}

fn scan_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step.is_finite() && step != 0.0) {
        return Err(CliError::usage("--step must be a nonzero number"));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err(CliError::usage("scan bounds must be finite"));
    }
    let h = step.abs() * (to - from).signum();
    let n = ((to - from).abs() / step.abs() + 1e-9).floor() as usize;
    // snap to 1e-12 so that a step of 0.1 gives -3.4 rather than -3.4000000000000004
    Ok((0..=n).map(|k| ((from + h * k as f64) * 1e12).round() / 1e12).collect())
}

fn support_fields(s: &Support) -> [String; 4] {
    match s {
        Support::OneCut(c) => [String::new(), String::new(), float(c.a), float(c.b)],
        Support::TwoCut(c) => [float(c.a1), float(c.b1), float(c.a2), float(c.b2)],
    }
}

/// Symmetric candidates at each coupling, spread over worker threads.
fn symmetric_candidates(model: GeometryModel, grid: &[f64]) -> Vec<Vec<EquilibriumSolution>> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(grid.len().max(1));
    let chunk = grid.len().div_ceil(workers).max(1);
    thread::scope(|s| {
        let jobs: Vec<_> = grid
            .chunks(chunk)
            .map(|gs| s.spawn(move || gs.iter().map(|&g| candidates_at(model, g, None)).collect::<Vec<_>>()))
            .collect();
        jobs.into_iter().flat_map(|j| j.join().expect("scan worker panicked")).collect()
    })
}

/// Broken-symmetry branch along the grid, by continuation.
fn broken_candidates(grid: &[f64]) -> Vec<Result<EquilibriumSolution, Error>> {
    let mut tracker = match BranchTracker::broken_branch() {
        Ok(t) => t,
        Err(e) => return grid.iter().map(|_| Err(e.clone())).collect(),
    };
    grid.iter()
        .map(|&g| {
            let p = tracker.solve_at(g)?;
            EquilibriumSolution::from_candidate(GeometryModel::Plus, g, &p)
        })
        .collect()
}

pub fn scan(args: &ScanArgs) -> Result<(), CliError> {
    args.model.require_geometry()?;
    let grid = scan_grid(args.from, args.to, args.step)?;
    let (mut per_g, broken) = thread::scope(|s| {
        let broken = (args.model == GeometryModel::Plus).then(|| s.spawn(|| broken_candidates(&grid)));
        let sym = symmetric_candidates(args.model, &grid);
        (sym, broken.map(|b| b.join().expect("continuation panicked")))
    });
    if let Some(broken) = broken {
        for (c, b) in per_g.iter_mut().zip(broken) {
            if let Ok(sol) = b {
                c.push(sol);
            }
        }
    }

    let header = [
        "g", "ansatz", "a1", "b1", "a2", "b2", "m1", "m2", "m3", "ell", "free_energy", "chosen", "status",
    ];
    let mut rows = Vec::new();
    let mut chosen_count = 0;
    for (&g, candidates) in grid.iter().zip(per_g) {
        match select_equilibrium(args.model, g, candidates) {
            Ok(sel) => {
                chosen_count += 1;
                for (k, c) in sel.ranked.iter().enumerate() {
                    let [a1, b1, a2, b2] = support_fields(&c.support);
                    rows.push(vec![
                        float(g),
                        c.ansatz.label().into(),
                        a1,
                        b1,
                        a2,
                        b2,
                        float(c.moments.m1),
                        float(c.moments.m2),
                        float(c.moments.m3),
                        float(c.lagrange),
                        float(c.free_energy),
                        (k == 0).to_string(),
                        "ok".into(),
                    ]);
                }
            }
            Err(_) => {
                let mut row = vec![float(g)];
                row.extend(std::iter::repeat_n(String::new(), 10));
                row.push("false".into());
                row.push("no branch converged".into());
                rows.push(row);
            }
        }
    }
    let mut out = OutputDir::create(&args.out)?;
    out.write_csv("phase.csv", &header, &rows)?;
    out.finish("scan", args, vec![])?;
    println!(
        "{} scan: {} couplings, {} with a selected branch, {} rows",
        args.model,
        grid.len(),
        chosen_count,
        rows.len()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct CriticalReport {
    model: GeometryModel,
    bracket: [f64; 2],
    g_critical: f64,
}

pub fn critical(args: &CriticalArgs) -> Result<(), CliError> {
    args.model.require_geometry()?;
    let (lo, hi) = match args.bracket.as_deref() {
        Some(&[lo, hi]) => (lo, hi),
        Some(_) => return Err(CliError::usage("--bracket takes two values")),
        None => default_bracket(args.model),
    };
    let g = locate_critical(args.model, lo, hi)?;
    let mut out = OutputDir::create(&args.out)?;
    out.write_json(
        "critical.json",
        &CriticalReport {
            model: args.model,
            bracket: [lo, hi],
            g_critical: g,
        },
    )?;
    out.finish("critical", args, vec![])?;
    println!("{g:.9}");
    Ok(())
}

fn theory_density(model: GeometryModel, g: f64) -> Result<SpectralDensity, CliError> {
    if model == GeometryModel::GaussianBaseline {
        return Ok(SpectralDensity::semicircle());
    }
    let mut tracker = match model {
        GeometryModel::Plus => BranchTracker::broken_branch().ok(),
        _ => None,
    };
    let candidates = candidates_at(model, g, tracker.as_mut());
    if candidates.is_empty() {
        return Err(CliError {
            code: CliError::NUMERICAL,
            message: format!("no theoretical density at g = {g} to start from"),
        });
    }
    Ok(select_equilibrium(model, g, candidates)?.winner.density)
}

#[derive(Debug, Serialize)]
struct McSummary {
    model: GeometryModel,
    g: f64,
    n: usize,
    samples: usize,
    acceptance_rate: f64,
    final_width: f64,
    mean_energy: f64,
    mean_order_parameter: f64,
    mean_m2: f64,
    final_energy: f64,
    max_energy_drift: f64,
}

pub fn mc(args: &McArgs) -> Result<(), CliError> {
    let init = match &args.init {
        InitArg::Even => McInit::EvenlySpaced,
        InitArg::FromTheory => McInit::FromDensity(theory_density(args.model, args.g)?),
        InitArg::File(p) => McInit::Explicit(load_eigenvalues(p)?),
    };
    let config = McConfig {
        model: args.model,
        g: args.g,
        n: args.n,
        sweeps: args.sweeps,
        burn_in: args.burnin.unwrap_or(args.sweeps / 10),
        width: args.width,
        seed: args.seed,
        init,
        sample_every: args.sample_every,
    };
    config.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let run = run_chain(&config)?;
    let trace = &run.trace;

    let mut out = OutputDir::create(&args.out)?;
    let h = &run.histogram;
    let hist: Vec<Vec<String>> = (0..h.bins()).map(|k| vec![float(h.center(k)), float(h.density[k])]).collect();
    out.write_csv("histogram.csv", &["bin_center", "density"], &hist)?;
    let rows: Vec<Vec<String>> = trace
        .samples
        .iter()
        .map(|s| {
            vec![
                s.sweep.to_string(),
                float(s.order_parameter),
                float(s.m2),
                float(s.energy),
                float(s.acceptance),
            ]
        })
        .collect();
    out.write_csv("trace.csv", &["sweep", "M", "m2", "energy", "acceptance"], &rows)?;
    out.write_checkpoint(
        "checkpoint.bin",
        &trace.final_eigenvalues,
        &CheckpointMeta {
            model: args.model,
            g: args.g,
            sweeps: args.sweeps as u64,
            seed: args.seed,
        },
    )?;
    let summary = McSummary {
        model: args.model,
        g: args.g,
        n: args.n,
        samples: trace.samples.len(),
        acceptance_rate: trace.acceptance_rate,
        final_width: trace.final_width,
        mean_energy: trace.mean_energy(),
        mean_order_parameter: trace.mean_order_parameter(),
        mean_m2: trace.mean_m2(),
        final_energy: trace.final_energy,
        max_energy_drift: trace.max_energy_drift,
    };
    out.write_json("summary.json", &summary)?;
    out.finish("mc", args, vec![args.seed])?;
    println!(
        "{} g = {} N = {}: acceptance {:.3}, <E> = {:.8}, <M> = {:.6}, <m2> = {:.6}",
        args.model,
        args.g,
        args.n,
        summary.acceptance_rate,
        summary.mean_energy,
        summary.mean_order_parameter,
        summary.mean_m2
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct CompareReport {
    theory: String,
    mc: String,
    #[serde(flatten)]
    metrics: ncg_spectra::CompareMetrics,
    note: Option<String>,
}

pub fn compare(args: &CompareArgs) -> Result<(), CliError> {
    let load = |p: &std::path::Path| -> Result<DensityTable, CliError> {
        let (x, y) = read_table(p)?;
        DensityTable::new(x, y).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))
    };
    let theory = load(&args.theory)?;
    let sample = load(&args.mc)?;
    let metrics = compare::compare_densities(&theory, &sample);
    let note = metrics
        .resampled
        .then(|| "grids differ: theory resampled onto the histogram grid by linear interpolation".to_string());
    let report = CompareReport {
        theory: args.theory.display().to_string(),
        mc: args.mc.display().to_string(),
        metrics,
        note,
    };
    let mut out = OutputDir::create(&args.out)?;
    out.write_json("compare.json", &report)?;
    out.finish("compare", args, vec![])?;
    println!("L1 = {:.6}, sup = {:.6}", report.metrics.l1, report.metrics.sup);
    if let Some(n) = &report.note {
        println!("{n}");
    }
    Ok(())
}
