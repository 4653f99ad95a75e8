//! Cheeger cuts and recursive edge selection.
//!
//! The recursive selector splits the node set with a Fiedler sweep cut,
//! recurses on both sides concurrently and compares the two sub-results with
//! the cut edges. Every edge lies in exactly one of the two induced
//! sub-graphs or the cut, and all scores come from the global snapshot, so
//! the result is the same edge an exhaustive scan would pick.

use std::cmp::Ordering;

use nalgebra::DMatrix;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::graph::{build_laplacian, canonical, Edge, WeightedGraph};
use crate::greedy::{best_of_edges, better_of};
use crate::objective::EdgeDelta;
use crate::spectral::{smallest_eigenpairs, EigenOptions, SpectralState};

/// Brute-force enumeration limit.
pub const BRUTE_FORCE_LIMIT: usize = 16;

/// Fiedler values at or below this count as disconnected.
pub const CONNECTED_TOL: f64 = 1e-8;

/// A node subset `S` with `0 < |S| <= |V| / 2` and its cut edges.
#[derive(Debug, Clone, PartialEq)]
pub struct CheegerCut {
    /// Sorted members of `S`.
    pub s: Vec<usize>,
    /// Edges with exactly one endpoint in `S`, in lexicographic order.
    pub cut_edges: Vec<Edge>,
    /// `|cut_edges| / |S|`.
    pub ratio: f64,
}

impl CheegerCut {
    fn from_members(g: &WeightedGraph, mut s: Vec<usize>) -> Self {
        s.sort_unstable();
        let mut inside = vec![false; g.node_count()];
        for &v in &s {
            inside[v] = true;
        }
        let cut_edges: Vec<Edge> = g
            .edges()
            .map(|(e, _)| e)
            .filter(|&(a, b)| inside[a] != inside[b])
            .collect();
        let ratio = cut_edges.len() as f64 / s.len() as f64;
        Self { s, cut_edges, ratio }
    }
}

/// Exact Cheeger constant by enumerating all subsets.
///
/// Ties go to the smaller subset, then to the lexicographically smaller
/// member list.
pub fn brute_force_cheeger(g: &WeightedGraph) -> Result<CheegerCut> {
    let n = g.node_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if n < 2 {
        return Err(Error::DimensionMismatch("a cut needs at least two nodes".into()));
    }
    let edges: Vec<Edge> = g.edge_keys();
    // (cut, size, members)
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if 2 * size > n {
            continue;
        }
        let cut = edges
            .iter()
            .filter(|&&(a, b)| ((mask >> a) & 1) != ((mask >> b) & 1))
            .count();
        let members: Vec<usize> = (0..n).filter(|&v| (mask >> v) & 1 == 1).collect();
        let replace = match &best {
            None => true,
            Some((bc, bs, bm)) => match (cut * bs).cmp(&(bc * size)) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => (size, &members) < (*bs, bm),
            },
        };
        if replace {
            best = Some((cut, size, members));
        }
    }
    let (_, _, members) = best.expect("n >= 2 gives a nonempty candidate");
    Ok(CheegerCut::from_members(g, members))
}

/// Sweep cut over nodes ordered by `values` (ties by index): the best of the
/// `N - 1` prefix splits by `|cut| / min(|prefix|, |rest|)`, reported as the
/// smaller side. Earliest prefix wins ties.
pub fn sweep_cut(g: &WeightedGraph, values: &[f64]) -> CheegerCut {
    let n = g.node_count();
    assert_eq!(values.len(), n, "one sweep value per node");
    assert!(n >= 2, "a cut needs at least two nodes");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let adj = g.adjacency();

    let mut in_prefix = vec![false; n];
    let mut cut: usize = 0;
    // (cut, small side size, prefix length)
    let mut best: Option<(usize, usize, usize)> = None;
    for (i, &u) in order.iter().enumerate().take(n - 1) {
        for &v in &adj[u] {
            if in_prefix[v] {
                cut -= 1;
            } else {
                cut += 1;
            }
        }
        in_prefix[u] = true;
        let size = i + 1;
        let small = size.min(n - size);
        let better = match best {
            None => true,
            Some((bc, bs, _)) => cut * bs < bc * small,
        };
        if better {
            best = Some((cut, small, size));
        }
    }
    let (_, _, len) = best.expect("n >= 2");
    let members = if 2 * len <= n {
        order[..len].to_vec()
    } else {
        order[len..].to_vec()
    };
    CheegerCut::from_members(g, members)
}

/// Fiedler sweep cut of a connected graph, using `state` (the snapshot of
/// `g` itself).
pub fn approx_cheeger_cut(g: &WeightedGraph, state: &SpectralState) -> Result<CheegerCut> {
    if state.dim() != g.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "snapshot has {} nodes, graph has {}",
            state.dim(),
            g.node_count()
        )));
    }
    let lambda2 = state.fiedler_value();
    if lambda2 <= CONNECTED_TOL {
        return Err(Error::Disconnected(lambda2));
    }
    let values: Vec<f64> = state.fiedler_vector().iter().copied().collect();
    Ok(sweep_cut(g, &values))
}

/// Recursion instrumentation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PartitionStats {
    /// Recursive calls, including leaves.
    pub calls: usize,
    pub leaves: usize,
    /// Longest chain of splits from the root.
    pub max_depth: usize,
    /// Largest child fraction `|child| / |parent|` over all splits.
    pub worst_split: f64,
}

impl PartitionStats {
    fn combine(self, other: Self) -> Self {
        Self {
            calls: self.calls + other.calls,
            leaves: self.leaves + other.leaves,
            max_depth: self.max_depth.max(other.max_depth),
            worst_split: self.worst_split.max(other.worst_split),
        }
    }

    /// Folds per-selection stats into a running summary: depth and worst
    /// split take the maximum, counts accumulate.
    pub fn merge_max(&mut self, other: &Self) {
        *self = self.combine(*other);
    }
}

struct Ctx<'a> {
    g: &'a WeightedGraph,
    state: &'a SpectralState,
    v_min: usize,
    opts: EigenOptions,
}

/// Candidate edges of one graph version split into disjoint blocks: edge
/// sets of the recursion's leaves and the cut edges of every split.
///
/// Any such split yields the same argmin, so a plan stays valid while the
/// edge set is unchanged even though weights move.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartitionPlan {
    pub blocks: Vec<Vec<Edge>>,
    pub stats: PartitionStats,
    edge_count: usize,
}

impl PartitionPlan {
    /// Recursively splits `g` by Fiedler sweep cuts until pieces have at
    /// most `v_min` nodes. The root uses the Fiedler vector of `state`.
    pub fn build(g: &WeightedGraph, state: &SpectralState, cfg: &SolverConfig) -> Result<Self> {
        let ctx = Ctx {
            g,
            state,
            v_min: cfg.v_min,
            opts: EigenOptions {
                tol: cfg.eig_tol,
                max_iters: cfg.eig_max_iters,
                seed: cfg.seed,
                ..EigenOptions::default()
            },
        };
        let nodes: Vec<usize> = (0..g.node_count()).collect();
        let (blocks, stats) = recurse(&ctx, nodes, 0, true)?;
        debug_assert_eq!(blocks.iter().map(Vec::len).sum::<usize>(), g.edge_count());
        Ok(Self {
            blocks,
            stats,
            edge_count: g.edge_count(),
        })
    }

    /// Whether the plan still covers exactly the edges of `g`, assuming
    /// edges are only ever removed.
    pub fn is_current(&self, g: &WeightedGraph) -> bool {
        self.edge_count == g.edge_count()
    }

    /// Best edge over all blocks, blocks scored in parallel.
    pub fn select(
        &self,
        g: &WeightedGraph,
        state: &SpectralState,
        y: &DMatrix<f64>,
        cfg: &SolverConfig,
    ) -> Result<Option<EdgeDelta>> {
        use rayon::prelude::*;
        self.blocks
            .par_iter()
            .map(|b| best_of_edges(state, y, g, b, cfg))
            .try_reduce(|| None, |a, b| Ok(better_of(a, b)))
    }
}

/// Recursive selection of the best edge of `g` against the global snapshot.
///
/// Returns `None` only when `g` has no scorable edges.
pub fn partition_select(
    g: &WeightedGraph,
    state: &SpectralState,
    y: &DMatrix<f64>,
    cfg: &SolverConfig,
) -> Result<(Option<EdgeDelta>, PartitionStats)> {
    let plan = PartitionPlan::build(g, state, cfg)?;
    let best = plan.select(g, state, y, cfg)?;
    Ok((best, plan.stats))
}

fn to_global(nodes: &[usize], local: Edge) -> Edge {
    canonical(nodes[local.0], nodes[local.1])
}

type Blocks = (Vec<Vec<Edge>>, PartitionStats);

fn recurse(ctx: &Ctx<'_>, nodes: Vec<usize>, depth: usize, root: bool) -> Result<Blocks> {
    let sub = ctx.g.induced(&nodes);
    let mut stats = PartitionStats {
        calls: 1,
        max_depth: depth,
        ..PartitionStats::default()
    };
    if sub.edge_count() == 0 {
        stats.leaves = 1;
        return Ok((Vec::new(), stats));
    }

    if nodes.len() <= ctx.v_min {
        stats.leaves = 1;
        let edges: Vec<Edge> = sub.edge_keys().into_iter().map(|e| to_global(&nodes, e)).collect();
        return Ok((vec![edges], stats));
    }

    let comps = sub.components();
    if comps.len() > 1 {
        let parts: Vec<Vec<usize>> = comps
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| c.into_iter().map(|i| nodes[i]).collect())
            .collect();
        let largest = parts.iter().map(Vec::len).max().unwrap_or(0);
        stats.worst_split = largest as f64 / nodes.len() as f64;
        let results: Vec<Result<Blocks>> = {
            use rayon::prelude::*;
            parts
                .into_par_iter()
                .map(|p| recurse(ctx, p, depth + 1, false))
                .collect()
        };
        let mut blocks = Vec::new();
        for r in results {
            let (b, s) = r?;
            blocks.extend(b);
            stats = stats.combine(s);
        }
        return Ok((blocks, stats));
    }

    let values: Vec<f64> = if root && ctx.state.dim() == nodes.len() {
        ctx.state.fiedler_vector().iter().copied().collect()
    } else {
        let l = build_laplacian(&sub);
        let pairs = smallest_eigenpairs(&l, 2, &ctx.opts)?;
        pairs.eigvecs.column(1).iter().copied().collect()
    };
    let cut = sweep_cut(&sub, &values);

    let mut in_s = vec![false; nodes.len()];
    for &i in &cut.s {
        in_s[i] = true;
    }
    let left: Vec<usize> = cut.s.iter().map(|&i| nodes[i]).collect();
    let right: Vec<usize> = (0..nodes.len()).filter(|&i| !in_s[i]).map(|i| nodes[i]).collect();
    let cut_edges: Vec<Edge> = cut.cut_edges.iter().map(|&e| to_global(&nodes, e)).collect();
    stats.worst_split = right.len().max(left.len()) as f64 / nodes.len() as f64;

    let (a, b) = rayon::join(
        || recurse(ctx, left, depth + 1, false),
        || recurse(ctx, right, depth + 1, false),
    );
    let (mut blocks, stats_a) = a?;
    let (blocks_b, stats_b) = b?;
    blocks.extend(blocks_b);
    if !cut_edges.is_empty() {
        blocks.push(cut_edges);
    }
    Ok((blocks, stats.combine(stats_a).combine(stats_b)))
}
