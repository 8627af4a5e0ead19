//! Command-line front end: loads instances, runs the solvers and
//! verification harnesses, and emits JSON results and CSV plot data.
//! Exit codes: 0 success, 2 verification failure, 1 error.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use w2net::analysis::{
    angle_at_vertex, check_linfty, counterexample_demo, verify_max_principle, LinftyVariant,
};
use w2net::corpus;
use w2net::io::{
    self, energy_profiles_csv, hgraph_sweep_csv, measure_to_json, parse_json, solution_to_json,
    AnyMeasure, BarycenterInstanceJson, NetworkInstanceJson,
};
use w2net::measures::{rasterize, EnergyFunctional, GridMeasure};
use w2net::multimarginal::{free_support_barycenter, StarWeights};
use w2net::network::{
    enumerate_topologies, optimize_network, steiner_ratio_estimate, NetworkParams,
    NetworkSolution,
};
use w2net::uniqueness::{compute_t_hgraph, compute_t_star, hgraph_threshold, HGraphSpec, Labeling};
use w2net::{Result, W2Error};

#[derive(Parser)]
#[command(name = "w2net", about = "Minimal networks in quadratic Wasserstein space")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input instance (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Output path for the JSON result; CSV side files take a .csv suffix.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Cells per axis for grid evaluations.
    #[arg(long, global = true, default_value_t = 32)]
    grid_res: usize,

    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    #[arg(long, global = true, default_value_t = 21)]
    samples_per_edge: usize,

    /// Worker threads for instance-level parallelism.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[arg(long, global = true, value_enum, default_value_t = LabelingArg::Standard)]
    labeling: LabelingArg,

    /// Lambda parameter of the global L-infinity bound.
    #[arg(long, global = true, default_value_t = 2.0)]
    lambda: f64,

    /// Number of generated instances for corpus commands.
    #[arg(long, global = true, default_value_t = 50)]
    instances: usize,
}

#[derive(Copy, Clone, ValueEnum)]
enum LabelingArg {
    Standard,
    Swapped,
}

impl From<LabelingArg> for Labeling {
    fn from(l: LabelingArg) -> Self {
        match l {
            LabelingArg::Standard => Labeling::Standard,
            LabelingArg::Swapped => Labeling::Swapped,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimize a network over the given (or all) topologies.
    Solve,
    /// Free-support barycenter of the input marginals.
    Barycenter,
    /// Check the boundary maximum principle on the solved network.
    Maxprinc,
    /// Report meeting angles at the free vertices of the solved network.
    Angles,
    /// Steiner-ratio sweep over random instances.
    SteinerRatio,
    /// Assemble and check the star T tensor for input or random weights.
    TTensor,
    /// Sweep the H-graph max eigenvalue over a/b and locate the threshold.
    HgraphSweep,
    /// Emit the non-uniqueness certificate.
    Counterexample,
    /// Check the L-infinity barycenter bound on the input marginals.
    Linfty,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn read_input(cli: &Cli) -> Result<String> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| W2Error::Other("--input is required for this command".into()))?;
    Ok(std::fs::read_to_string(path)?)
}

fn write_output(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn write_side_csv(cli: &Cli, csv: &str) -> Result<()> {
    if let Some(path) = &cli.output {
        std::fs::write(path.with_extension("csv"), csv)?;
    }
    Ok(())
}

fn solve_instance(cli: &Cli, instance: &NetworkInstanceJson) -> Result<NetworkSolution> {
    let boundary: Vec<_> = instance
        .boundary
        .iter()
        .map(|m| Ok(io::measure_from_json(m)?.as_discrete()))
        .collect::<Result<_>>()?;
    let params = NetworkParams { tol: cli.tol, ..NetworkParams::default() };
    match instance.topology.resolve()? {
        Some(t) => optimize_network(&t, &boundary, &params),
        None => {
            let mut best: Option<NetworkSolution> = None;
            for t in enumerate_topologies(instance.boundary.len(), true)? {
                let sol = optimize_network(&t, &boundary, &params)?;
                if best.as_ref().map_or(true, |b| sol.total_length < b.total_length) {
                    best = Some(sol);
                }
            }
            best.ok_or_else(|| W2Error::Other("no topology produced a solution".into()))
        }
    }
}

/// Grid covering the supports of every boundary measure with a margin.
fn covering_grid(sol: &NetworkSolution, res: usize) -> Result<GridMeasure> {
    let dim = sol.assignment[0].dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for m in &sol.assignment {
        for p in m.points() {
            for a in 0..dim {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
    }
    let bounds: Vec<(f64, f64)> = lo
        .iter()
        .zip(&hi)
        .map(|(&l, &h)| {
            let pad = 0.05 * (h - l).max(1.0);
            (l - pad, h + pad)
        })
        .collect();
    GridMeasure::uniform(bounds, vec![res; dim])
}

fn run(cli: &Cli) -> Result<bool> {
    match cli.command {
        Command::Solve => {
            let instance: NetworkInstanceJson = parse_json(&read_input(cli)?)?;
            let sol = solve_instance(cli, &instance)?;
            write_output(cli, &io::to_json_pretty(&solution_to_json(&sol))?)?;
            Ok(true)
        }
        Command::Barycenter => {
            let instance: BarycenterInstanceJson = parse_json(&read_input(cli)?)?;
            let (mus, w) = io::barycenter_instance(&instance)?;
            let out = free_support_barycenter(&mus, &w, &mus[0], 200, cli.tol)?;
            let doc = json!({
                "measure": measure_to_json(&AnyMeasure::Discrete(out.measure.clone())),
                "psi": out.psi,
                "iterations": out.iterations,
                "converged": out.converged,
            });
            write_output(cli, &serde_json::to_string_pretty(&doc)?)?;
            Ok(true)
        }
        Command::Maxprinc => {
            let instance: NetworkInstanceJson = parse_json(&read_input(cli)?)?;
            let sol = solve_instance(cli, &instance)?;
            let grid = covering_grid(&sol, cli.grid_res)?;
            let report = verify_max_principle(
                &sol,
                &EnergyFunctional::NegEntropy,
                cli.samples_per_edge,
                &grid,
            )?;
            let doc = json!({
                "functional": report.functional,
                "boundary_max": report.boundary_max,
                "network_max": report.network_max,
                "margin": report.margin,
                "tolerance": report.tolerance,
                "vacuous": report.vacuous,
                "pass": report.pass,
            });
            write_output(cli, &serde_json::to_string_pretty(&doc)?)?;
            write_side_csv(cli, &energy_profiles_csv(&report.profiles))?;
            Ok(report.pass)
        }
        Command::Angles => {
            let instance: NetworkInstanceJson = parse_json(&read_input(cli)?)?;
            let sol = solve_instance(cli, &instance)?;
            let grid = covering_grid(&sol, cli.grid_res)?;
            let mut reports = Vec::new();
            for v in sol.topology.free_indices() {
                let r = angle_at_vertex(&sol, v, &grid)?;
                reports.push(json!({
                    "vertex": r.vertex,
                    "neighbors": r.neighbors,
                    "angles": r.angles.iter().map(|&(a, b, ang)| json!([a, b, ang])).collect::<Vec<_>>(),
                    "deviations": r.deviations,
                }));
            }
            write_output(cli, &serde_json::to_string_pretty(&json!({ "vertices": reports }))?)?;
            Ok(true)
        }
        Command::SteinerRatio => {
            let params = NetworkParams::default();
            let n = cli.instances;
            let results: Vec<(usize, f64)> = run_indexed(cli.jobs, n, |i| {
                let mut rng = corpus::seeded(cli.seed, i as u64);
                let k = 2 + (i % 3); // 2..=4 terminals
                let boundary = corpus::random_boundary(&mut rng, k, 2, 4, 2.0);
                let r = steiner_ratio_estimate(&boundary, &params)?;
                Ok((i, r.ratio))
            })?;
            let min = results.iter().map(|&(_, r)| r).fold(f64::INFINITY, f64::min);
            let floor = 1.0 / 3.0_f64.sqrt() - 1e-6;
            let doc = json!({
                "instances": n,
                "ratios": results.iter().map(|&(_, r)| r).collect::<Vec<_>>(),
                "min_ratio": min,
                "bound": floor,
                "pass": min >= floor,
            });
            write_output(cli, &serde_json::to_string_pretty(&doc)?)?;
            Ok(min >= floor)
        }
        Command::TTensor => {
            let (w, n) = match &cli.input {
                Some(_) => {
                    let doc: serde_json::Value = parse_json(&read_input(cli)?)?;
                    let sigmas: Vec<f64> = serde_json::from_value(
                        doc.get("sigmas")
                            .cloned()
                            .ok_or_else(|| W2Error::Other("missing \"sigmas\"".into()))?,
                    )?;
                    let n = doc.get("n").and_then(|v| v.as_u64()).unwrap_or(1) as usize;
                    (StarWeights::new(sigmas)?, n)
                }
                None => {
                    let mut rng = corpus::seeded(cli.seed, 0);
                    (StarWeights::new(corpus::random_weights(&mut rng, 4))?, 1)
                }
            };
            let report = compute_t_star(&w, n)?;
            let doc = json!({
                "l": report.l,
                "n": report.n,
                "eigenvalues": report.eigenvalues,
                "twisted": report.twisted,
                "nondegenerate": report.nondegenerate,
                "t_negative": report.t_negative,
            });
            write_output(cli, &serde_json::to_string_pretty(&doc)?)?;
            Ok(report.t_negative)
        }
        Command::HgraphSweep => {
            let labeling: Labeling = cli.labeling.into();
            let mut rows = Vec::new();
            let mut ratio = 1.05;
            while ratio <= 8.0 + 1e-9 {
                let spec = HGraphSpec::new(ratio, 1.0, labeling, 1)?;
                let rep = compute_t_hgraph(&spec)?;
                rows.push((ratio, *rep.eigenvalues.last().unwrap(), rep.t_negative));
                ratio += 0.05;
            }
            let threshold = hgraph_threshold(labeling, 1.0, (1.05, 8.0))?;
            let csv = hgraph_sweep_csv(&rows);
            match &cli.output {
                Some(path) => std::fs::write(path, &csv)?,
                None => print!("{csv}"),
            }
            eprintln!("threshold a/b = {threshold}");
            Ok(true)
        }
        Command::Counterexample => {
            let c = counterexample_demo()?;
            let doc = json!({
                "mu1": measure_to_json(&AnyMeasure::Discrete(c.mu1.clone())),
                "mu2": measure_to_json(&AnyMeasure::Discrete(c.mu2.clone())),
                "midpoint_a": measure_to_json(&AnyMeasure::Discrete(c.nu_a.clone())),
                "midpoint_b": measure_to_json(&AnyMeasure::Discrete(c.nu_b.clone())),
                "distances": c.distances,
                "midpoint_separation": c.midpoint_separation,
                "reflection_swaps": c.reflection_swaps,
                "pass": c.pass,
            });
            write_output(cli, &serde_json::to_string_pretty(&doc)?)?;
            Ok(c.pass)
        }
        Command::Linfty => {
            let instance: BarycenterInstanceJson = parse_json(&read_input(cli)?)?;
            let w = StarWeights::new(instance.sigmas.clone())?;
            let grids: Vec<GridMeasure> = instance
                .marginals
                .iter()
                .map(|m| match io::measure_from_json(m)? {
                    AnyMeasure::Grid(g) => Ok(g),
                    AnyMeasure::Discrete(_) => Err(W2Error::Other(
                        "linfty expects grid marginals".into(),
                    )),
                })
                .collect::<Result<_>>()?;
            let mus: Vec<_> = grids.iter().map(w2net::measures::grid_to_discrete).collect();
            let out = free_support_barycenter(&mus, &w, &mus[0], 100, cli.tol)?;
            let bary = rasterize(&out.measure, &grids[0])?;
            let report = check_linfty(&bary, &grids, &w, &LinftyVariant::BarycenterBound)?;
            let doc = json!({
                "norm": report.norm,
                "bound": report.bound,
                "variant": report.variant,
                "pass": report.pass,
                "lambda": cli.lambda,
            });
            write_output(cli, &serde_json::to_string_pretty(&doc)?)?;
            Ok(report.pass)
        }
    }
}

/// Runs `f(0..n)` across `jobs` threads, returning results in index order
/// so output bytes do not depend on scheduling.
fn run_indexed<T: Send>(
    jobs: usize,
    n: usize,
    f: impl Fn(usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let jobs = jobs.max(1).min(n.max(1));
    if jobs == 1 {
        return (0..n).map(&f).collect();
    }
    let mut slots: Vec<Option<Result<T>>> = (0..n).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots_mutex = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let r = f(i);
                slots_mutex.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}
