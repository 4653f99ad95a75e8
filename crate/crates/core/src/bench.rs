//! Benchmark sweeps: generate instances, solve, and report recovery error,
//! connectivity, sparsity and wall time.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{SolverConfig, SolverKind};
use crate::datagen::{gen_ground_truth, sample_gmm, sample_mvt, GroundTruth};
use crate::error::{Error, Result};
use crate::graph::{ObservationSet, WeightedGraph};
use crate::greedy::{default_init, run_greedy};
use crate::spectral::dense_spectrum;

/// Environment variable capping benchmark worker threads.
pub const THREADS_ENV: &str = "FSGL_THREADS";

/// `||W_hat - W_star||_F / ||W_star||_F` over the full symmetric matrices.
pub fn relative_error(w_hat: &WeightedGraph, w_star: &WeightedGraph) -> Result<f64> {
    if w_hat.node_count() != w_star.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {} nodes",
            w_hat.node_count(),
            w_star.node_count()
        )));
    }
    let reference = w_star.frobenius_sq();
    if reference == 0.0 {
        return Err(Error::ZeroReference);
    }
    let diff = (w_hat.to_dense() - w_star.to_dense()).norm_squared();
    Ok((diff / reference).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generator {
    Gmm,
    Mvt,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Gmm => "gmm",
            Generator::Mvt => "mvt",
        })
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gmm" => Ok(Generator::Gmm),
            "mvt" => Ok(Generator::Mvt),
            other => Err(Error::InvalidConfig(format!("unknown generator '{other}'"))),
        }
    }
}

/// Sampler settings shared by the CLI and the benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub generator: Generator,
    pub density: f64,
    pub rho: f64,
    pub dof: f64,
    pub components: usize,
    pub mean_scale: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            generator: Generator::Gmm,
            density: 0.2,
            rho: 0.5,
            dof: 3.0,
            components: 3,
            mean_scale: 1.0,
        }
    }
}

impl SamplerConfig {
    pub fn sample(&self, gt: &GroundTruth, k: usize, seed: u64) -> Result<ObservationSet> {
        match self.generator {
            Generator::Gmm => sample_gmm(gt, k, self.components, self.mean_scale, seed),
            Generator::Mvt => sample_mvt(gt, k, self.dof, seed),
        }
    }
}

/// Seed for cell `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub ratios: Vec<f64>,
    pub trials: usize,
    pub generators: Vec<Generator>,
    pub solvers: Vec<SolverKind>,
    pub sampler: SamplerConfig,
    pub solver: SolverConfig,
    pub seed: u64,
    /// Worker cap; `None` defers to `FSGL_THREADS` or the rayon default.
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![30],
            ratios: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            trials: 10,
            generators: vec![Generator::Gmm, Generator::Mvt],
            solvers: vec![SolverKind::Greedy, SolverKind::Recursive],
            sampler: SamplerConfig::default(),
            solver: SolverConfig::default(),
            seed: 0,
            threads: None,
        }
    }
}

/// One (instance, solver) result.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub generator: Generator,
    pub solver: SolverKind,
    pub ratio: f64,
    pub trial: usize,
    pub k: usize,
    pub re: f64,
    pub lambda2: f64,
    pub edges: usize,
    pub init_edges: usize,
    pub ms: f64,
    pub error: Option<String>,
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub n: usize,
    pub generator: Generator,
    pub solver: SolverKind,
    pub ratio: f64,
    pub trials: usize,
    pub failed: usize,
    pub re: (f64, f64),
    pub lambda2: (f64, f64),
    pub edges: (f64, f64),
    pub ms: (f64, f64),
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

type CellKey = (usize, Generator, SolverKind, u64);

fn solver_rank(s: SolverKind) -> u8 {
    match s {
        SolverKind::Greedy => 0,
        SolverKind::Recursive => 1,
    }
}

impl BenchReport {
    /// Mean ± std per (size, generator, solver, ratio), in that order.
    pub fn summarize(&self) -> Vec<CellSummary> {
        let mut groups: BTreeMap<(usize, Generator, u8, u64), (CellKey, Vec<&BenchRow>)> =
            BTreeMap::new();
        for r in &self.rows {
            let key = (r.n, r.generator, solver_rank(r.solver), r.ratio.to_bits());
            groups
                .entry(key)
                .or_insert_with(|| ((r.n, r.generator, r.solver, r.ratio.to_bits()), Vec::new()))
                .1
                .push(r);
        }
        groups
            .into_values()
            .map(|((n, generator, solver, ratio), rows)| {
                let ok: Vec<&BenchRow> = rows.iter().copied().filter(|r| r.error.is_none()).collect();
                let col = |f: fn(&BenchRow) -> f64| mean_std(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
                CellSummary {
                    n,
                    generator,
                    solver,
                    ratio: f64::from_bits(ratio),
                    trials: rows.len(),
                    failed: rows.len() - ok.len(),
                    re: col(|r| r.re),
                    lambda2: col(|r| r.lambda2),
                    edges: col(|r| r.edges as f64),
                    ms: col(|r| r.ms),
                }
            })
            .collect()
    }

    /// Per-trial rows for one graph size:
    /// `generator,solver,ratio,trial,re,lambda2,edges,ms`.
    pub fn write_csv<W: Write>(&self, n: usize, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["generator", "solver", "ratio", "trial", "re", "lambda2", "edges", "ms"])?;
        for r in self.rows.iter().filter(|r| r.n == n) {
            let (re, l2, edges, ms) = if r.error.is_some() {
                (String::new(), String::new(), String::new(), String::new())
            } else {
                (
                    r.re.to_string(),
                    r.lambda2.to_string(),
                    r.edges.to_string(),
                    format!("{:.3}", r.ms),
                )
            };
            w.write_record([
                r.generator.to_string(),
                r.solver.to_string(),
                r.ratio.to_string(),
                r.trial.to_string(),
                re,
                l2,
                edges,
                ms,
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// One row per (generator, solver, ratio) for one graph size.
    pub fn write_summary_csv<W: Write>(&self, n: usize, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "generator", "solver", "ratio", "trials", "failed", "re_mean", "re_std",
            "lambda2_mean", "lambda2_std", "edges_mean", "edges_std", "ms_mean", "ms_std",
        ])?;
        for s in self.summarize().into_iter().filter(|s| s.n == n) {
            w.write_record([
                s.generator.to_string(),
                s.solver.to_string(),
                s.ratio.to_string(),
                s.trials.to_string(),
                s.failed.to_string(),
                s.re.0.to_string(),
                s.re.1.to_string(),
                s.lambda2.0.to_string(),
                s.lambda2.1.to_string(),
                s.edges.0.to_string(),
                s.edges.1.to_string(),
                s.ms.0.to_string(),
                s.ms.1.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Aligned text table of the per-cell summaries.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4} {:<4} {:<9} {:>5} {:>17} {:>17} {:>15} {:>19}",
            "N", "gen", "solver", "K/N", "RE", "lambda2", "edges", "time (ms)"
        );
        for s in self.summarize() {
            let _ = writeln!(
                out,
                "{:>4} {:<4} {:<9} {:>5.2} {:>8.4} ± {:<6.4} {:>8.4} ± {:<6.4} {:>7.1} ± {:<5.1} {:>9.1} ± {:<7.1}{}",
                s.n,
                s.generator.to_string(),
                s.solver.to_string(),
                s.ratio,
                s.re.0,
                s.re.1,
                s.lambda2.0,
                s.lambda2.1,
                s.edges.0,
                s.edges.1,
                s.ms.0,
                s.ms.1,
                if s.failed > 0 { format!("  ({} failed)", s.failed) } else { String::new() }
            );
        }
        out
    }

    /// Average solve time in seconds per size and solver, over every
    /// successful row.
    pub fn runtime_table(&self) -> String {
        let mut sizes: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        sizes.sort_unstable();
        sizes.dedup();
        let avg = |n: usize, s: SolverKind| {
            let v: Vec<f64> = self
                .rows
                .iter()
                .filter(|r| r.n == n && r.solver == s && r.error.is_none())
                .map(|r| r.ms / 1e3)
                .collect();
            mean_std(&v).0
        };
        let mut out = String::new();
        let _ = writeln!(out, "{:>4} {:>12} {:>30}", "N", "Greedy (s)", "Sparse init. + recursion (s)");
        for n in sizes {
            let _ = writeln!(
                out,
                "{:>4} {:>12.3} {:>30.3}",
                n,
                avg(n, SolverKind::Greedy),
                avg(n, SolverKind::Recursive)
            );
        }
        out
    }
}

struct Cell {
    n: usize,
    generator: Generator,
    ratio: f64,
    trial: usize,
    index: u64,
}

fn samples_for(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64).round() as usize).max(1)
}

/// Solves one instance with one solver and measures only the solve call.
pub fn run_solver(
    obs: &ObservationSet,
    kind: SolverKind,
    base: &SolverConfig,
    seed: u64,
) -> Result<(WeightedGraph, usize, f64)> {
    let cfg = SolverConfig {
        solver_kind: kind,
        seed,
        ..base.clone()
    };
    let g0 = default_init(obs, &cfg)?;
    let start = Instant::now();
    let (g, _) = run_greedy(&g0, obs, &cfg)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((g, g0.edge_count(), ms))
}

fn run_cell(cell: &Cell, cfg: &BenchConfig) -> Vec<BenchRow> {
    let cell_seed = derive_seed(cfg.seed, cell.index);
    let k = samples_for(cell.n, cell.ratio);
    // ground truth shared by every cell of the same (size, trial)
    let gt_seed = derive_seed(cfg.seed ^ 0x5eed, (cell.n as u64) << 32 | cell.trial as u64);
    let data = gen_ground_truth(cell.n, cfg.sampler.density, cfg.sampler.rho, gt_seed).and_then(|gt| {
        let sampler = SamplerConfig {
            generator: cell.generator,
            ..cfg.sampler.clone()
        };
        let obs = sampler.sample(&gt, k, cell_seed)?;
        Ok((gt, obs))
    });
    cfg.solvers
        .iter()
        .map(|&solver| {
            let mut row = BenchRow {
                n: cell.n,
                generator: cell.generator,
                solver,
                ratio: cell.ratio,
                trial: cell.trial,
                k,
                re: f64::NAN,
                lambda2: f64::NAN,
                edges: 0,
                init_edges: 0,
                ms: f64::NAN,
                error: None,
            };
            let outcome = data.as_ref().map_err(|e| e.to_string()).and_then(|(gt, obs)| {
                let (g, init_edges, ms) =
                    run_solver(obs, solver, &cfg.solver, cell_seed).map_err(|e| e.to_string())?;
                let re = relative_error(&g, &gt.w_star).map_err(|e| e.to_string())?;
                let lambda2 = dense_spectrum(&crate::graph::dense_laplacian(&g))[1];
                Ok((g.edge_count(), init_edges, ms, re, lambda2))
            });
            match outcome {
                Ok((edges, init_edges, ms, re, lambda2)) => {
                    row.edges = edges;
                    row.init_edges = init_edges;
                    row.ms = ms;
                    row.re = re;
                    row.lambda2 = lambda2;
                }
                Err(e) => {
                    log::warn!(
                        "cell n={} {} {} ratio={} trial={} failed: {e}",
                        cell.n, cell.generator, solver, cell.ratio, cell.trial
                    );
                    row.error = Some(e);
                }
            }
            row
        })
        .collect()
}

fn worker_count(cfg: &BenchConfig) -> Option<usize> {
    cfg.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&t: &usize| t > 0)
    })
}

/// Runs every (size, generator, ratio, trial) cell with every solver.
/// Failed cells are recorded, not fatal.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.solver.validate()?;
    if cfg.sizes.iter().any(|&n| n < 3) {
        return Err(Error::InvalidConfig("benchmark sizes must be at least 3".into()));
    }
    if cfg.ratios.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidConfig("sample ratios must be positive".into()));
    }
    let mut cells = Vec::new();
    for &n in &cfg.sizes {
        for &generator in &cfg.generators {
            for &ratio in &cfg.ratios {
                for trial in 0..cfg.trials {
                    let index = cells.len() as u64;
                    cells.push(Cell {
                        n,
                        generator,
                        ratio,
                        trial,
                        index,
                    });
                }
            }
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = worker_count(cfg) {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let rows: Vec<BenchRow> = pool.install(|| {
        cells
            .par_iter()
            .flat_map_iter(|c| run_cell(c, cfg))
            .collect()
    });
    Ok(BenchReport { rows })
}
