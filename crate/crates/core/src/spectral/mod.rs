//! Smallest eigenpairs of graph Laplacians, the Fiedler pair and eigen-gap,
//! and a low-rank majorizer of `(L + alpha I)^-1`.

mod lobpcg;

pub use lobpcg::{lobpcg, LobpcgResult};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{build_laplacian, LaplacianView, WeightedGraph, DENSE_LIMIT};

/// Symmetric eigendecomposition with eigenvalues sorted ascending and the
/// eigenvector columns permuted to match.
pub fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<DVector<f64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    let vecs = if cols.is_empty() {
        DMatrix::zeros(m.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    };
    (vals, vecs)
}

/// Full ascending spectrum of a dense symmetric matrix.
pub fn dense_spectrum(m: &DMatrix<f64>) -> Vec<f64> {
    let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Settings for [`smallest_eigenpairs`].
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Node count at or below which the full dense decomposition is used.
    pub dense_limit: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 500,
            seed: 0,
            dense_limit: DENSE_LIMIT,
        }
    }
}

/// The `k` smallest eigenpairs of a Laplacian.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub eigvals: Vec<f64>,
    pub eigvecs: DMatrix<f64>,
    /// Solver iterations; zero for the dense path.
    pub iterations: usize,
}

pub fn smallest_eigenpairs(l: &LaplacianView, k: usize, opts: &EigenOptions) -> Result<Eigenpairs> {
    let n = l.dim();
    if k == 0 || k > n {
        return Err(Error::InsufficientEigenpairs {
            needed: k,
            available: n,
        });
    }
    // The iterative basis spans up to three blocks; small or nearly-full
    // requests go through the dense decomposition.
    let block = k + (k / 2).max(2);
    if n <= opts.dense_limit || 3 * block > n {
        let (vals, vecs) = sorted_symmetric_eigen(&l.to_dense());
        return Ok(Eigenpairs {
            eigvals: vals[..k].to_vec(),
            eigvecs: vecs.columns(0, k).into_owned(),
            iterations: 0,
        });
    }
    let res = lobpcg(l, k, opts.tol, opts.max_iters, opts.seed)?;
    Ok(Eigenpairs {
        eigvals: res.eigvals,
        eigvecs: res.eigvecs,
        iterations: res.iterations,
    })
}

/// `Gap_2 = min_{j != 2} |lambda_2 - lambda_j|` from ascending eigenvalues.
///
/// Needs `lambda_1..lambda_3`, unless `complete` says the slice is the whole
/// spectrum (a two-node graph).
pub fn eigen_gap2(eigvals: &[f64], complete: bool) -> Result<f64> {
    match eigvals.len() {
        0 | 1 => Err(Error::InsufficientEigenpairs {
            needed: 3,
            available: eigvals.len(),
        }),
        2 if complete => Ok((eigvals[1] - eigvals[0]).abs()),
        2 => Err(Error::InsufficientEigenpairs {
            needed: 3,
            available: 2,
        }),
        _ => Ok((eigvals[1] - eigvals[0])
            .abs()
            .min((eigvals[2] - eigvals[1]).abs())),
    }
}

/// Immutable spectral snapshot of one graph version.
#[derive(Debug, Clone)]
pub struct SpectralState {
    eigvals: Vec<f64>,
    eigvecs: DMatrix<f64>,
    gap2: f64,
    alpha: f64,
    iterations: usize,
    exact_inverse: Option<DMatrix<f64>>,
}

impl SpectralState {
    /// Computes the `retained` smallest eigenpairs (floored at 3, capped at
    /// `N`) of the graph's Laplacian.
    pub fn compute(
        g: &WeightedGraph,
        retained: usize,
        alpha: f64,
        opts: &EigenOptions,
    ) -> Result<Self> {
        let l = build_laplacian(g);
        Self::from_laplacian(&l, retained, alpha, opts)
    }

    pub fn from_laplacian(
        l: &LaplacianView,
        retained: usize,
        alpha: f64,
        opts: &EigenOptions,
    ) -> Result<Self> {
        let n = l.dim();
        let k = retained.max(3).min(n);
        let pairs = smallest_eigenpairs(l, k, opts)?;
        let mut state = Self::from_eigenpairs(pairs.eigvals, pairs.eigvecs, alpha, n)?;
        state.iterations = pairs.iterations;
        Ok(state)
    }

    /// Builds a state from precomputed ascending eigenpairs of an `n`-node
    /// Laplacian.
    pub fn from_eigenpairs(
        eigvals: Vec<f64>,
        eigvecs: DMatrix<f64>,
        alpha: f64,
        n: usize,
    ) -> Result<Self> {
        if eigvecs.ncols() != eigvals.len() || eigvecs.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} eigenvalues vs {}x{} eigenvectors",
                eigvals.len(),
                eigvecs.nrows(),
                eigvecs.ncols()
            )));
        }
        let gap2 = eigen_gap2(&eigvals, eigvals.len() == n)?;
        Ok(Self {
            eigvals,
            eigvecs,
            gap2,
            alpha,
            iterations: 0,
            exact_inverse: None,
        })
    }

    /// Attaches the dense inverse of `L + alpha I` for exact determinant
    /// factors.
    pub fn with_exact_inverse(mut self, l: &LaplacianView) -> Result<Self> {
        let n = l.dim();
        let shifted = l.to_dense() + DMatrix::identity(n, n) * self.alpha;
        let inv = shifted
            .cholesky()
            .ok_or_else(|| Error::InvalidConfig("L + alpha I is not positive definite".into()))?
            .inverse();
        self.exact_inverse = Some(inv);
        Ok(self)
    }

    pub fn eigvals(&self) -> &[f64] {
        &self.eigvals
    }

    pub fn eigvecs(&self) -> &DMatrix<f64> {
        &self.eigvecs
    }

    pub fn retained(&self) -> usize {
        self.eigvals.len()
    }

    pub fn dim(&self) -> usize {
        self.eigvecs.nrows()
    }

    pub fn fiedler_value(&self) -> f64 {
        self.eigvals[1]
    }

    pub fn fiedler_vector(&self) -> nalgebra::DVectorView<'_, f64> {
        self.eigvecs.column(1)
    }

    pub fn gap2(&self) -> f64 {
        self.gap2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn exact_inverse(&self) -> Option<&DMatrix<f64>> {
        self.exact_inverse.as_ref()
    }

    /// Upper bound on `(e_m - e_n)^T (L + alpha I)^-1 (e_m - e_n)` from the
    /// retained eigenpairs; unretained directions are treated as eigenvalue
    /// zero. O(K) per pair.
    pub fn majorizer_quadform(&self, m: usize, n: usize) -> f64 {
        let inv_alpha = 1.0 / self.alpha;
        let mut q = 2.0 * inv_alpha;
        for (j, &lam) in self.eigvals.iter().enumerate() {
            let d = self.eigvecs[(m, j)] - self.eigvecs[(n, j)];
            q += d * d * (1.0 / (lam + self.alpha) - inv_alpha);
        }
        q
    }

    /// Exact quadratic form from the attached inverse, if any.
    pub fn exact_quadform(&self, m: usize, n: usize) -> Option<f64> {
        self.exact_inverse
            .as_ref()
            .map(|inv| inv[(m, m)] + inv[(n, n)] - 2.0 * inv[(m, n)])
    }
}
