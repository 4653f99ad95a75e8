//! Block eigensolver for the smallest eigenpairs of a sparse Laplacian.
//!
//! Locally optimal block preconditioned conjugate gradient with a Jacobi
//! preconditioner. Each iteration runs Rayleigh-Ritz on the orthonormalized
//! span of the current block `X`, the preconditioned residuals `W` and the
//! previous search directions `P`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::sorted_symmetric_eigen;
use crate::error::{Error, Result};
use crate::graph::LaplacianView;

#[derive(Debug, Clone)]
pub struct LobpcgResult {
    pub eigvals: Vec<f64>,
    pub eigvecs: DMatrix<f64>,
    pub iterations: usize,
}

/// Columns whose norm after projection falls below this are dropped.
const DROP_TOL: f64 = 1e-10;

/// Orthonormalizes the columns of `basis` against themselves (two passes of
/// modified Gram-Schmidt), dropping numerically dependent columns. The
/// first `keep` columns are assumed orthonormal already and are retained.
fn orthonormalize(basis: DMatrix<f64>, keep: usize) -> DMatrix<f64> {
    let n = basis.nrows();
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(basis.ncols());
    for j in 0..basis.ncols() {
        let mut v = basis.column(j).into_owned();
        if j < keep {
            cols.push(v);
            continue;
        }
        let scale = v.norm();
        if scale == 0.0 || !scale.is_finite() {
            continue;
        }
        v /= scale;
        for _ in 0..2 {
            for q in &cols {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm > DROP_TOL {
            cols.push(v / norm);
        }
    }
    if cols.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    DMatrix::from_columns(&cols)
}

/// Computes the `k` smallest eigenpairs of `op`.
///
/// Converges when every one of the `k` wanted residuals satisfies
/// `||L v - lambda v|| <= tol * (1 + |lambda|)`.
pub fn lobpcg(
    op: &LaplacianView,
    k: usize,
    tol: f64,
    max_iters: usize,
    seed: u64,
) -> Result<LobpcgResult> {
    let n = op.dim();
    let block = (k + (k / 2).max(2)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = DMatrix::from_fn(n, block, |_, _| StandardNormal.sample(&mut rng));
    let mut x = orthonormalize(init, 0);

    let precond: Vec<f64> = op
        .diagonal()
        .into_iter()
        .map(|d| if d > 1e-12 { 1.0 / d } else { 1.0 })
        .collect();

    // initial Rayleigh-Ritz on X alone
    let ax = op.mul_block(&x);
    let gram = symmetrize(x.transpose() * &ax);
    let (mut theta, coeffs) = sorted_symmetric_eigen(&gram);
    x = &x * &coeffs;
    let mut ax = ax * &coeffs;
    let mut p: Option<DMatrix<f64>> = None;
    let mut worst = f64::INFINITY;

    for iter in 0..max_iters {
        let mut r = ax.clone();
        for j in 0..x.ncols() {
            r.column_mut(j).axpy(-theta[j], &x.column(j), 1.0);
        }
        worst = (0..k)
            .map(|j| r.column(j).norm() / (1.0 + theta[j].abs()))
            .fold(0.0, f64::max);
        if worst <= tol {
            return Ok(LobpcgResult {
                eigvals: theta[..k].to_vec(),
                eigvecs: x.columns(0, k).into_owned(),
                iterations: iter,
            });
        }

        let mut w = r;
        for (i, s) in precond.iter().enumerate() {
            w.row_mut(i).scale_mut(*s);
        }

        let bx = x.ncols();
        let extra = w.ncols() + p.as_ref().map_or(0, |p| p.ncols());
        let mut stacked = DMatrix::zeros(n, bx + extra);
        stacked.columns_mut(0, bx).copy_from(&x);
        stacked.columns_mut(bx, w.ncols()).copy_from(&w);
        if let Some(p) = &p {
            stacked.columns_mut(bx + w.ncols(), p.ncols()).copy_from(p);
        }
        let q = orthonormalize(stacked, bx);
        let aq = op.mul_block(&q);
        let reduced = symmetrize(q.transpose() * &aq);
        let (vals, vecs) = sorted_symmetric_eigen(&reduced);
        let c = vecs.columns(0, block.min(vecs.ncols())).into_owned();

        let x_new = &q * &c;
        let overlap = x.transpose() * &x_new;
        let dir = &x_new - &x * overlap;
        p = Some(orthonormalize(dir, 0));
        ax = &aq * &c;
        x = x_new;
        theta = vals[..c.ncols()].to_vec();
    }

    Err(Error::ConvergenceFailure {
        iterations: max_iters,
        residual: worst,
    })
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}
