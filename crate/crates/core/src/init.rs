//! Sparse initial graph: a maximum-similarity spanning tree grown Prim-style
//! over the Gram entries, plus the `b` largest remaining entries.

use std::cmp::Ordering;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{canonical, Edge, WeightedGraph};

/// `(a, pa)` beats `(b, pb)` if it has the larger value, or the same value
/// and the lexicographically smaller pair.
fn beats(a: f64, pa: Edge, b: f64, pb: Edge) -> bool {
    match a.total_cmp(&b) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => pa < pb,
    }
}

/// Builds the initial graph and also returns the tree edges in the order
/// they were attached (the first entry is the seed pair).
pub fn init_sparse_graph_traced(y: &DMatrix<f64>, b: usize) -> Result<(WeightedGraph, Vec<Edge>)> {
    let n = y.nrows();
    if n < 2 || y.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "initializer needs a square Gram matrix with N >= 2, got {}x{}",
            y.nrows(),
            y.ncols()
        )));
    }
    let available = n * (n - 1) / 2 - (n - 1);
    if b > available {
        return Err(Error::InvalidBudget {
            requested: b,
            available,
        });
    }

    // seed: largest off-diagonal entry overall
    let mut seed = (f64::NEG_INFINITY, (usize::MAX, usize::MAX));
    for i in 0..n {
        for j in i + 1..n {
            if beats(y[(i, j)], (i, j), seed.0, seed.1) {
                seed = (y[(i, j)], (i, j));
            }
        }
    }

    let mut g = WeightedGraph::new(n);
    let mut order = Vec::with_capacity(n - 1);
    let mut in_tree = vec![false; n];
    // best crossing entry for each outside node
    let mut best: Vec<(f64, Edge)> = vec![(f64::NEG_INFINITY, (usize::MAX, usize::MAX)); n];

    let attach = |u: usize, in_tree: &mut Vec<bool>, best: &mut Vec<(f64, Edge)>| {
        in_tree[u] = true;
        for j in 0..n {
            if !in_tree[j] {
                let pair = canonical(u, j);
                if beats(y[(u, j)], pair, best[j].0, best[j].1) {
                    best[j] = (y[(u, j)], pair);
                }
            }
        }
    };

    let (s0, s1) = seed.1;
    g.set_weight(s0, s1, 1.0)?;
    order.push(seed.1);
    attach(s0, &mut in_tree, &mut best);
    attach(s1, &mut in_tree, &mut best);

    for _ in 2..n {
        let mut pick: Option<usize> = None;
        for j in 0..n {
            if in_tree[j] {
                continue;
            }
            pick = match pick {
                Some(p) if !beats(best[j].0, best[j].1, best[p].0, best[p].1) => Some(p),
                _ => Some(j),
            };
        }
        let j = pick.expect("an outside node remains");
        let edge = best[j].1;
        g.set_weight(edge.0, edge.1, 1.0)?;
        order.push(edge);
        attach(j, &mut in_tree, &mut best);
    }

    if b > 0 {
        let mut rest: Vec<(f64, Edge)> = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                if !g.contains_edge(i, j) {
                    rest.push((y[(i, j)], (i, j)));
                }
            }
        }
        rest.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, (i, j)) in rest.iter().take(b) {
            g.set_weight(i, j, 1.0)?;
        }
    }
    Ok((g, order))
}

/// Connected graph with exactly `N - 1 + b` unit-weight edges.
pub fn init_sparse_graph(y: &DMatrix<f64>, b: usize) -> Result<WeightedGraph> {
    init_sparse_graph_traced(y, b).map(|(g, _)| g)
}
