//! Greedy edge weakening: refresh the spectral snapshot, score every
//! candidate, weaken the best edge while its score is negative.

use std::cmp::Ordering;
use std::io::Write;
use std::time::Instant;

use log::{debug, warn};
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::config::{SolverConfig, SolverKind};
use crate::error::{Error, Result};
use crate::graph::{build_laplacian, Edge, ObservationSet, WeightedGraph};
use crate::init::init_sparse_graph;
use crate::objective::{edge_gradient, objective_value, EdgeDelta};
use crate::partition::{PartitionPlan, PartitionStats};
use crate::spectral::{EigenOptions, SpectralState};

/// Candidate sets larger than this are scored in parallel.
const PAR_THRESHOLD: usize = 64;

/// Total order used for selection: smaller score first, then the
/// lexicographically smaller edge.
pub fn compare_deltas(a: &EdgeDelta, b: &EdgeDelta) -> Ordering {
    a.grad_h.total_cmp(&b.grad_h).then(a.edge.cmp(&b.edge))
}

pub fn better_of(a: Option<EdgeDelta>, b: Option<EdgeDelta>) -> Option<EdgeDelta> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if compare_deltas(&y, &x) == Ordering::Less { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

fn score_one(
    state: &SpectralState,
    y: &DMatrix<f64>,
    g: &WeightedGraph,
    edge: Edge,
    cfg: &SolverConfig,
) -> Result<Option<EdgeDelta>> {
    match edge_gradient(state, y, g, edge, cfg) {
        Ok(d) => Ok(Some(d)),
        Err(Error::StepTooLarge { m, n, product }) => {
            warn!("edge ({m}, {n}) ineligible: eps * q = {product:.6} >= 1");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Scores `edges` against the snapshot and returns the best one. Edges whose
/// determinant factor would be nonpositive are skipped.
pub fn best_of_edges(
    state: &SpectralState,
    y: &DMatrix<f64>,
    g: &WeightedGraph,
    edges: &[Edge],
    cfg: &SolverConfig,
) -> Result<Option<EdgeDelta>> {
    if edges.len() > PAR_THRESHOLD {
        edges
            .par_iter()
            .map(|&e| score_one(state, y, g, e, cfg))
            .try_reduce(|| None, |a, b| Ok(better_of(a, b)))
    } else {
        let mut best = None;
        for &e in edges {
            best = better_of(best, score_one(state, y, g, e, cfg)?);
        }
        Ok(best)
    }
}

/// Exhaustive scan over every edge of `g`.
pub fn exhaustive_select(
    g: &WeightedGraph,
    y: &DMatrix<f64>,
    state: &SpectralState,
    cfg: &SolverConfig,
) -> Result<Option<EdgeDelta>> {
    best_of_edges(state, y, g, &g.edge_keys(), cfg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Accept(EdgeDelta),
    Converged,
}

fn to_step(best: Option<EdgeDelta>) -> Step {
    match best {
        Some(d) if d.grad_h < 0.0 => Step::Accept(d),
        _ => Step::Converged,
    }
}

/// One greedy selection by exhaustive scan.
pub fn greedy_step(
    g: &WeightedGraph,
    y: &DMatrix<f64>,
    state: &SpectralState,
    cfg: &SolverConfig,
) -> Result<Step> {
    exhaustive_select(g, y, state, cfg).map(to_step)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub iter: usize,
    pub edge: Edge,
    pub grad_h: f64,
    /// Exact objective after the step, when recorded.
    pub objective: Option<f64>,
    /// Fiedler value of the snapshot the step was scored against.
    pub lambda2: f64,
    /// Edge count after the step.
    pub edges: usize,
    /// Milliseconds since the solve started.
    pub ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveTrace {
    pub records: Vec<StepRecord>,
    pub initial_objective: Option<f64>,
    pub converged: bool,
    pub refreshes: usize,
    /// Total eigensolver iterations across refreshes (0 on the dense path).
    pub eig_iterations: usize,
    pub partition: PartitionStats,
}

impl SolveTrace {
    pub fn steps(&self) -> usize {
        self.records.len()
    }

    /// Writes `iter,m,n,grad_h,objective,lambda2,edges,ms`. Unrecorded
    /// objectives are left empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "m", "n", "grad_h", "objective", "lambda2", "edges", "ms"])?;
        for r in &self.records {
            w.write_record([
                r.iter.to_string(),
                r.edge.0.to_string(),
                r.edge.1.to_string(),
                r.grad_h.to_string(),
                r.objective.map(|v| v.to_string()).unwrap_or_default(),
                r.lambda2.to_string(),
                r.edges.to_string(),
                format!("{:.3}", r.ms),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn eig_options(cfg: &SolverConfig) -> EigenOptions {
    EigenOptions {
        tol: cfg.eig_tol,
        max_iters: cfg.eig_max_iters,
        seed: cfg.seed,
        ..EigenOptions::default()
    }
}

/// Matrix the trace term is scored against: `X X^T`, divided by `K` when
/// `normalize_gram` is set.
pub fn scoring_gram(obs: &ObservationSet, cfg: &SolverConfig) -> DMatrix<f64> {
    if cfg.normalize_gram {
        obs.gram() / obs.samples() as f64
    } else {
        obs.gram().clone()
    }
}

/// Spectral snapshot of `g` as the solver uses it.
pub fn refresh_state(g: &WeightedGraph, samples: usize, cfg: &SolverConfig) -> Result<SpectralState> {
    let l = build_laplacian(g);
    let retained = cfg.retained_for(samples, g.node_count());
    let state = SpectralState::from_laplacian(&l, retained, cfg.alpha, &eig_options(cfg))?;
    if cfg.exact_logdet {
        state.with_exact_inverse(&l)
    } else {
        Ok(state)
    }
}

/// Selection by the configured strategy. The recursive selector keeps its
/// partition in `plan` and rebuilds it only after an edge disappears.
pub fn select(
    g: &WeightedGraph,
    y: &DMatrix<f64>,
    state: &SpectralState,
    cfg: &SolverConfig,
    plan: &mut Option<PartitionPlan>,
    stats: &mut PartitionStats,
) -> Result<Step> {
    match cfg.solver_kind {
        SolverKind::Greedy => greedy_step(g, y, state, cfg),
        SolverKind::Recursive => {
            if !plan.as_ref().is_some_and(|p| p.is_current(g)) {
                let fresh = PartitionPlan::build(g, state, cfg)?;
                stats.merge_max(&fresh.stats);
                *plan = Some(fresh);
            }
            let best = plan.as_ref().map_or(Ok(None), |p| p.select(g, state, y, cfg))?;
            Ok(to_step(best))
        }
    }
}

/// Weakens edges from `g0` until no edge has a negative score or
/// `max_iters` steps have been accepted.
pub fn run_greedy(
    g0: &WeightedGraph,
    obs: &ObservationSet,
    cfg: &SolverConfig,
) -> Result<(WeightedGraph, SolveTrace)> {
    cfg.validate()?;
    if g0.node_count() != obs.dim() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} nodes, observations have dimension {}",
            g0.node_count(),
            obs.dim()
        )));
    }
    if !g0.is_connected() {
        warn!("initial graph is disconnected");
    }
    let y = &scoring_gram(obs, cfg);
    let start = Instant::now();
    let mut g = g0.clone();
    let mut trace = SolveTrace::default();
    if cfg.objective_every > 0 {
        trace.initial_objective = Some(objective_value(&g, y, cfg)?.total);
    }

    let mut state = refresh_state(&g, obs.samples(), cfg)?;
    trace.refreshes = 1;
    trace.eig_iterations = state.iterations();
    let mut since_refresh = 0;
    let mut plan = None;

    for iter in 0..cfg.max_iters {
        if since_refresh >= cfg.refresh_interval {
            state = refresh_state(&g, obs.samples(), cfg)?;
            trace.refreshes += 1;
            trace.eig_iterations += state.iterations();
            since_refresh = 0;
        }
        let delta = match select(&g, y, &state, cfg, &mut plan, &mut trace.partition)? {
            Step::Accept(d) => d,
            Step::Converged => {
                trace.converged = true;
                break;
            }
        };
        let (m, n) = delta.edge;
        g.weaken_in_place(m, n, cfg.epsilon)?;
        since_refresh += 1;

        let objective = if cfg.objective_every > 0 && (iter + 1) % cfg.objective_every == 0 {
            Some(objective_value(&g, y, cfg)?.total)
        } else {
            None
        };
        trace.records.push(StepRecord {
            iter,
            edge: delta.edge,
            grad_h: delta.grad_h,
            objective,
            lambda2: state.fiedler_value(),
            edges: g.edge_count(),
            ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    debug!(
        "solve finished: {} steps, converged={}, {} edges",
        trace.steps(),
        trace.converged,
        g.edge_count()
    );
    Ok((g, trace))
}

/// Default starting graph for a solver: complete unit-weight graph for the
/// exhaustive greedy, sparse initialization for the recursive variant.
pub fn default_init(obs: &ObservationSet, cfg: &SolverConfig) -> Result<WeightedGraph> {
    match cfg.solver_kind {
        SolverKind::Greedy => Ok(WeightedGraph::complete(obs.dim(), 1.0)),
        SolverKind::Recursive => init_sparse_graph(obs.gram(), cfg.budget_for(obs.dim())),
    }
}

/// Learns a graph from observations, starting from `init` or the solver's
/// default initial graph.
pub fn learn_graph(
    obs: &ObservationSet,
    init: Option<WeightedGraph>,
    cfg: &SolverConfig,
) -> Result<(WeightedGraph, SolveTrace)> {
    let g0 = match init {
        Some(g) => g,
        None => default_init(obs, cfg)?,
    };
    run_greedy(&g0, obs, cfg)
}
