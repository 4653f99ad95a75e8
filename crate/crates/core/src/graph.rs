//! Weighted undirected graphs, their combinatorial Laplacians, and the
//! observation matrices the learner consumes.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Weights at or below this value are treated as removed edges.
pub const ZERO_WEIGHT: f64 = 1e-12;

/// Node count at or below which Laplacians are stored densely.
pub const DENSE_LIMIT: usize = 64;

/// An undirected edge `(m, n)` with `m < n`.
pub type Edge = (usize, usize);

/// Orders an unordered node pair so that the smaller index comes first.
#[inline]
pub fn canonical(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Symmetric, nonnegative adjacency with zero diagonal.
///
/// Each undirected edge is stored once under its canonical key, so symmetry
/// holds by construction. Only strictly positive weights are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: BTreeMap<Edge, f64>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: BTreeMap::new(),
        }
    }

    /// Complete graph on `n` nodes with every weight set to `weight`.
    pub fn complete(n: usize, weight: f64) -> Self {
        let mut g = Self::new(n);
        for m in 0..n {
            for k in m + 1..n {
                g.edges.insert((m, k), weight);
            }
        }
        g
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut g = Self::new(n);
        for (a, b, w) in edges {
            g.set_weight(a, b, w)?;
        }
        Ok(g)
    }

    /// Sets the weight of `(a, b)`. A weight at or below [`ZERO_WEIGHT`]
    /// removes the edge.
    pub fn set_weight(&mut self, a: usize, b: usize, w: f64) -> Result<()> {
        if a == b || a >= self.n || b >= self.n {
            return Err(Error::InvalidEdge(a, b, self.n));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Parse(format!("edge ({a}, {b}) has invalid weight {w}")));
        }
        let key = canonical(a, b);
        if w <= ZERO_WEIGHT {
            self.edges.remove(&key);
        } else {
            self.edges.insert(key, w);
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        if a == b {
            return None;
        }
        self.edges.get(&canonical(a, b)).copied()
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.weight(a, b).is_some()
    }

    /// Edges in lexicographic `(m, n)` order.
    pub fn edges(&self) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.edges.iter().map(|(&e, &w)| (e, w))
    }

    pub fn edge_keys(&self) -> Vec<Edge> {
        self.edges.keys().copied().collect()
    }

    /// Weakens `(a, b)` by `eps`, returning the amount actually removed
    /// (`min(eps, w)`). The edge is deleted once its weight clamps to zero.
    pub fn weaken_in_place(&mut self, a: usize, b: usize, eps: f64) -> Result<f64> {
        let key = canonical(a, b);
        let w = *self.edges.get(&key).ok_or(Error::MissingEdge(key.0, key.1))?;
        let next = (w - eps).max(0.0);
        if next <= ZERO_WEIGHT {
            self.edges.remove(&key);
            Ok(w)
        } else {
            self.edges.insert(key, next);
            Ok(eps)
        }
    }

    /// Returns a copy of the graph with `(a, b)` weakened by `eps`.
    pub fn weaken_edge(&self, edge: Edge, eps: f64) -> Result<Self> {
        let mut g = self.clone();
        g.weaken_in_place(edge.0, edge.1, eps)?;
        Ok(g)
    }

    /// Neighbor lists, each sorted ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(m, k) in self.edges.keys() {
            adj[m].push(k);
            adj[k].push(m);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(m, k) in self.edges.keys() {
            deg[m] += 1;
            deg[k] += 1;
        }
        deg
    }

    /// Breadth-first reachability from node 0.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        reached == self.n
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut label = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = vec![start];
            label[start] = id;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &v in &adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = id;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Sub-graph induced by `nodes`, relabelled `0..nodes.len()` in the
    /// order given. Returns the sub-graph; `nodes[i]` is the original index
    /// of local node `i`.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let mut sub = Self::new(nodes.len());
        for (&(m, k), &w) in &self.edges {
            let (a, b) = (local[m], local[k]);
            if a != usize::MAX && b != usize::MAX {
                sub.edges.insert(canonical(a, b), w);
            }
        }
        sub
    }

    /// Dense symmetric adjacency matrix `W`.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.n);
        for (&(m, k), &v) in &self.edges {
            w[(m, k)] = v;
            w[(k, m)] = v;
        }
        w
    }

    /// Squared Frobenius norm of the full symmetric adjacency.
    pub fn frobenius_sq(&self) -> f64 {
        2.0 * self.edges.values().map(|w| w * w).sum::<f64>()
    }
}

/// Compressed sparse row storage of a symmetric Laplacian.
#[derive(Debug, Clone)]
pub struct SparseLaplacian {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseLaplacian {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (i, di) in d.iter_mut().enumerate() {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[p] == i {
                    *di = self.vals[p];
                }
            }
        }
        d
    }

    /// `L * x` for a block of column vectors.
    pub fn mul_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(self.n, x.ncols());
        for j in 0..x.ncols() {
            for i in 0..self.n {
                let mut acc = 0.0;
                for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[p] * x[(self.cols[p], j)];
                }
                y[(i, j)] = acc;
            }
        }
        y
    }
}

/// Combinatorial Laplacian `L = diag(W 1) - W`.
#[derive(Debug, Clone)]
pub enum LaplacianView {
    Dense(DMatrix<f64>),
    Sparse(SparseLaplacian),
}

impl LaplacianView {
    pub fn dim(&self) -> usize {
        match self {
            LaplacianView::Dense(l) => l.nrows(),
            LaplacianView::Sparse(s) => s.n,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            LaplacianView::Dense(l) => l.clone(),
            LaplacianView::Sparse(s) => {
                let mut l = DMatrix::zeros(s.n, s.n);
                for i in 0..s.n {
                    for p in s.row_ptr[i]..s.row_ptr[i + 1] {
                        l[(i, s.cols[p])] = s.vals[p];
                    }
                }
                l
            }
        }
    }

    pub fn mul_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            LaplacianView::Dense(l) => l * x,
            LaplacianView::Sparse(s) => s.mul_block(x),
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        match self {
            LaplacianView::Dense(l) => l.diagonal().iter().copied().collect(),
            LaplacianView::Sparse(s) => s.diagonal(),
        }
    }
}

/// Builds the Laplacian, dense up to [`DENSE_LIMIT`] nodes and CSR above.
pub fn build_laplacian(g: &WeightedGraph) -> LaplacianView {
    if g.node_count() <= DENSE_LIMIT {
        LaplacianView::Dense(dense_laplacian(g))
    } else {
        LaplacianView::Sparse(sparse_laplacian(g))
    }
}

pub fn dense_laplacian(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for ((m, k), w) in g.edges() {
        l[(m, k)] -= w;
        l[(k, m)] -= w;
        l[(m, m)] += w;
        l[(k, k)] += w;
    }
    l
}

pub fn sparse_laplacian(g: &WeightedGraph) -> SparseLaplacian {
    let n = g.node_count();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut diag = vec![0.0; n];
    for ((m, k), w) in g.edges() {
        rows[m].push((k, -w));
        rows[k].push((m, -w));
        diag[m] += w;
        diag[k] += w;
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for (i, mut row) in rows.into_iter().enumerate() {
        row.push((i, diag[i]));
        row.sort_unstable_by_key(|&(c, _)| c);
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    SparseLaplacian {
        n,
        row_ptr,
        cols,
        vals,
    }
}

/// `Y = X X^T`.
pub fn gram(x: &DMatrix<f64>) -> DMatrix<f64> {
    let y = x * x.transpose();
    // symmetrize away rounding asymmetry
    (&y + y.transpose()) * 0.5
}

/// `N x K` observations (one signal per column) plus the cached Gram matrix.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    x: DMatrix<f64>,
    gram: DMatrix<f64>,
}

impl ObservationSet {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if x.ncols() == 0 || x.nrows() == 0 {
            return Err(Error::DimensionMismatch(
                "observation matrix needs at least one row and one column".into(),
            ));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("observation matrix contains non-finite values".into()));
        }
        let gram = gram(&x);
        Ok(Self { x, gram })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Signal dimension `N`.
    pub fn dim(&self) -> usize {
        self.x.nrows()
    }

    /// Number of observations `K`.
    pub fn samples(&self) -> usize {
        self.x.ncols()
    }
}
