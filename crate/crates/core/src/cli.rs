//! Command-line driver: `gen`, `solve`, `bench` and `cheeger-check`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::bench::{derive_seed, relative_error, run_benchmark, BenchConfig, Generator, SamplerConfig};
use crate::config::{SolverConfig, SolverKind};
use crate::datagen::{gen_ground_truth, gen_unit_graph};
use crate::error::{Error, Result};
use crate::graph::{dense_laplacian, ObservationSet};
use crate::greedy::learn_graph;
use crate::io::{load_graph, load_matrix, write_edge_list, write_matrix_csv};
use crate::partition::{approx_cheeger_cut, brute_force_cheeger, BRUTE_FORCE_LIMIT};
use crate::spectral::{dense_spectrum, EigenOptions, SpectralState};

#[derive(Debug, Parser)]
#[command(name = "fsgl", version, about = "Fiedler-regularized sparse graph learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a ground-truth graph and observations.
    Gen(GenArgs),
    /// Learn a graph from an observation matrix.
    Solve(SolveArgs),
    /// Sweep sample ratios and report accuracy and runtime.
    Bench(BenchArgs),
    /// Check Cheeger's inequality on given or random graphs.
    CheegerCheck(CheegerArgs),
}

#[derive(Debug, Args)]
struct SamplerArgs {
    #[arg(long, default_value = "gmm", value_parser = parse_generator)]
    generator: Generator,
    /// Student t degrees of freedom.
    #[arg(long, default_value_t = 3.0)]
    dof: f64,
    /// Mixture components.
    #[arg(long, default_value_t = 3)]
    components: usize,
    /// Edge probability of the ground-truth graph.
    #[arg(long, default_value_t = 0.2)]
    density: f64,
}

impl SamplerArgs {
    fn config(&self) -> SamplerConfig {
        SamplerConfig {
            generator: self.generator,
            density: self.density,
            dof: self.dof,
            components: self.components,
            ..SamplerConfig::default()
        }
    }
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.2)]
    mu: f64,
    /// Extra initial edges (default 3N).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 8)]
    vmin: usize,
    #[arg(long, default_value = "recursive", value_parser = parse_solver)]
    solver: SolverKind,
    /// Accepted steps between spectral refreshes.
    #[arg(long, default_value_t = 1)]
    refresh: usize,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Score determinant factors from the dense inverse.
    #[arg(long)]
    exact_logdet: bool,
    /// Score against the raw Gram matrix `X X^T` instead of `X X^T / K`.
    #[arg(long)]
    raw_gram: bool,
    /// Flat `key = value` file; its entries override flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig {
            epsilon: self.epsilon,
            alpha: self.alpha,
            gamma: self.gamma,
            mu: self.mu,
            budget_b: self.budget,
            v_min: self.vmin,
            refresh_interval: self.refresh,
            max_iters: self.max_iters,
            seed: self.seed,
            solver_kind: self.solver,
            exact_logdet: self.exact_logdet,
            normalize_gram: !self.raw_gram,
            ..SolverConfig::default()
        };
        if let Some(path) = &self.config {
            cfg.apply_overrides(&fs::read_to_string(path)?)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    k: usize,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving `x.csv` and `w_true.csv`.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Observation matrix, rows = nodes, columns = samples (`.csv` or `.mtx`).
    #[arg(long)]
    input: PathBuf,
    /// Initial graph (edge list or `.mtx`); defaults to the solver's own.
    #[arg(long)]
    init: Option<PathBuf>,
    /// Ground-truth graph for reporting relative error.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Learned edge list; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Per-step trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Graph sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "30")]
    n: Vec<usize>,
    /// Sample ratios K/N, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8,1.0")]
    ratios: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Restrict to one generator (both by default).
    #[arg(long, value_parser = parse_generator)]
    generator: Option<Generator>,
    /// Restrict to one solver (both by default).
    #[arg(long = "only", value_parser = parse_solver)]
    only: Option<SolverKind>,
    #[arg(long, default_value_t = 3.0)]
    dof: f64,
    #[arg(long, default_value_t = 3)]
    components: usize,
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.2)]
    mu: f64,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 8)]
    vmin: usize,
    #[arg(long, default_value_t = 1)]
    refresh: usize,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    #[arg(long)]
    exact_logdet: bool,
    /// Score against the raw Gram matrix `X X^T` instead of `X X^T / K`.
    #[arg(long)]
    raw_gram: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for `bench_n<N>.csv` and `summary_n<N>.csv`.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheegerArgs {
    /// Graph to check (edge list or `.mtx`); random graphs when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.4)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_generator(s: &str) -> std::result::Result<Generator, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_solver(s: &str) -> std::result::Result<SolverKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn write_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let gt = gen_ground_truth(args.n, args.sampler.density, 0.5, args.seed)?;
    let obs = args.sampler.config().sample(&gt, args.k, derive_seed(args.seed, 1))?;
    fs::create_dir_all(&args.output)?;
    write_file(&args.output.join("x.csv"), |b| write_matrix_csv(obs.x(), b))?;
    write_file(&args.output.join("w_true.csv"), |b| write_edge_list(&gt.w_star, b))?;
    eprintln!(
        "wrote {} x {} observations and {} ground-truth edges to {}",
        obs.dim(),
        obs.samples(),
        gt.w_star.edge_count(),
        args.output.display()
    );
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let cfg = args.solver.config()?;
    let obs = ObservationSet::new(load_matrix(&args.input)?)?;
    let init = args
        .init
        .as_deref()
        .map(|p| load_graph(p, Some(obs.dim())))
        .transpose()?;
    let (g, trace) = learn_graph(&obs, init, &cfg)?;

    match &args.output {
        Some(path) => write_file(path, |b| write_edge_list(&g, b))?,
        None => write_edge_list(&g, io::stdout().lock())?,
    }
    if let Some(path) = &args.trace {
        write_file(path, |b| trace.write_csv(b))?;
    }
    let lambda2 = dense_spectrum(&dense_laplacian(&g)).get(1).copied().unwrap_or(0.0);
    let mut summary = format!(
        "solver={} steps={} converged={} edges={} lambda2={:.6}",
        cfg.solver_kind,
        trace.steps(),
        trace.converged,
        g.edge_count(),
        lambda2
    );
    if let Some(path) = &args.truth {
        let truth = load_graph(path, Some(obs.dim()))?;
        summary.push_str(&format!(" re={:.6}", relative_error(&g, &truth)?));
    }
    eprintln!("{summary}");
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let mut solver = SolverConfig {
        epsilon: args.epsilon,
        alpha: args.alpha,
        gamma: args.gamma,
        mu: args.mu,
        budget_b: args.budget,
        v_min: args.vmin,
        refresh_interval: args.refresh,
        max_iters: args.max_iters,
        exact_logdet: args.exact_logdet,
        normalize_gram: !args.raw_gram,
        seed: args.seed,
        ..SolverConfig::default()
    };
    if let Some(path) = &args.config {
        solver.apply_overrides(&fs::read_to_string(path)?)?;
    }
    let cfg = BenchConfig {
        sizes: args.n.clone(),
        ratios: args.ratios.clone(),
        trials: args.trials,
        generators: args
            .generator
            .map_or_else(|| vec![Generator::Gmm, Generator::Mvt], |g| vec![g]),
        solvers: args
            .only
            .map_or_else(|| vec![SolverKind::Greedy, SolverKind::Recursive], |s| vec![s]),
        sampler: SamplerConfig {
            density: args.density,
            dof: args.dof,
            components: args.components,
            ..SamplerConfig::default()
        },
        seed: args.seed,
        solver,
        threads: None,
    };
    let report = run_benchmark(&cfg)?;
    let mut out = io::stdout().lock();
    match &args.output {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for &n in &cfg.sizes {
                write_file(&dir.join(format!("bench_n{n}.csv")), |b| report.write_csv(n, b))?;
                write_file(&dir.join(format!("summary_n{n}.csv")), |b| {
                    report.write_summary_csv(n, b)
                })?;
            }
        }
        None => {
            for &n in &cfg.sizes {
                report.write_csv(n, &mut out)?;
            }
        }
    }
    writeln!(out, "\n{}", report.summary_table())?;
    writeln!(out, "Average runtime in seconds\n{}", report.runtime_table())?;
    Ok(())
}

fn cmd_cheeger(args: &CheegerArgs) -> Result<()> {
    let graphs = match &args.input {
        Some(path) => vec![load_graph(path, None)?],
        None => (0..args.trials)
            .map(|t| gen_unit_graph(args.n, args.density, derive_seed(args.seed, t as u64)))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut out = io::stdout().lock();
    writeln!(out, "graph,n,edges,lambda2,phi,sweep_ratio,upper,ok")?;
    let mut failures = 0;
    for (i, g) in graphs.iter().enumerate() {
        let n = g.node_count();
        let state = SpectralState::compute(g, 3, 1.0, &EigenOptions::default())?;
        let lambda2 = state.fiedler_value();
        let d_max = g.degrees().into_iter().max().unwrap_or(0) as f64;
        let upper = (2.0 * lambda2 * d_max).sqrt();
        let sweep = approx_cheeger_cut(g, &state)?;
        let tol = 1e-9;
        let (phi, ok) = if n <= BRUTE_FORCE_LIMIT {
            let phi = brute_force_cheeger(g)?.ratio;
            let ok = lambda2 / 2.0 <= phi + tol && phi <= upper + tol && sweep.ratio + tol >= lambda2 / 2.0;
            (phi.to_string(), ok)
        } else {
            (String::new(), sweep.ratio + tol >= lambda2 / 2.0)
        };
        if !ok {
            failures += 1;
        }
        writeln!(
            out,
            "{i},{n},{},{lambda2},{phi},{},{upper},{ok}",
            g.edge_count(),
            sweep.ratio
        )?;
    }
    if failures > 0 {
        return Err(Error::InvalidConfig(format!("{failures} graph(s) violate Cheeger's inequality")));
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Usage errors exit with 2, data and runtime errors with 1.
pub fn cli_main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::CheegerCheck(a) => cmd_cheeger(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
