//! Synthetic ground truth and non-Gaussian observations drawn with a
//! prescribed precision matrix `Theta = L + rho I`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::{dense_laplacian, ObservationSet, WeightedGraph};
use crate::spectral::sorted_symmetric_eigen;

/// Resampling attempts before a connecting spanning tree is forced.
pub const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub w_star: WeightedGraph,
    /// Precision `L + rho I`.
    pub theta: DMatrix<f64>,
    /// Covariance `Theta^-1`.
    pub cov: DMatrix<f64>,
    /// Symmetric square root of `cov`.
    cov_sqrt: DMatrix<f64>,
    pub rho: f64,
}

impl GroundTruth {
    pub fn from_graph(w_star: WeightedGraph, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidConfig("rho must be positive".into()));
        }
        let n = w_star.node_count();
        let theta = dense_laplacian(&w_star) + DMatrix::identity(n, n) * rho;
        let (vals, vecs) = sorted_symmetric_eigen(&theta);
        let inv = DVector::from_iterator(n, vals.iter().map(|v| 1.0 / v));
        let inv_sqrt = DVector::from_iterator(n, vals.iter().map(|v| 1.0 / v.sqrt()));
        let cov = &vecs * DMatrix::from_diagonal(&inv) * vecs.transpose();
        let cov_sqrt = &vecs * DMatrix::from_diagonal(&inv_sqrt) * vecs.transpose();
        Ok(Self {
            w_star,
            theta,
            cov: (&cov + cov.transpose()) * 0.5,
            cov_sqrt: (&cov_sqrt + cov_sqrt.transpose()) * 0.5,
            rho,
        })
    }

    pub fn dim(&self) -> usize {
        self.w_star.node_count()
    }

    pub fn cov_sqrt(&self) -> &DMatrix<f64> {
        &self.cov_sqrt
    }

    /// One draw from `N(0, scale * cov)`.
    fn gaussian<R: Rng>(&self, rng: &mut R, scale: f64) -> DVector<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| StandardNormal.sample(rng));
        (&self.cov_sqrt * z) * scale.sqrt()
    }
}

/// Erdős–Rényi topology with edge probability `density`, weights uniform on
/// `[0.5, 1.5]`, resampled until connected.
pub fn gen_ground_truth(n: usize, density: f64, rho: f64, seed: u64) -> Result<GroundTruth> {
    if n < 2 {
        return Err(Error::InvalidConfig("ground truth needs at least two nodes".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidConfig("density must lie in (0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::new(n);
    for _ in 0..MAX_RESAMPLES {
        g = WeightedGraph::new(n);
        for m in 0..n {
            for k in m + 1..n {
                if rng.random::<f64>() < density {
                    g.set_weight(m, k, rng.random_range(0.5..1.5))?;
                }
            }
        }
        if g.is_connected() {
            return GroundTruth::from_graph(g, rho);
        }
    }
    // join components along a chain of their smallest members
    let comps = g.components();
    for pair in comps.windows(2) {
        g.set_weight(pair[0][0], pair[1][0], rng.random_range(0.5..1.5))?;
    }
    GroundTruth::from_graph(g, rho)
}

/// Connected Erdős–Rényi graph with every weight set to 1.
pub fn gen_unit_graph(n: usize, density: f64, seed: u64) -> Result<WeightedGraph> {
    let gt = gen_ground_truth(n, density, 1.0, seed)?;
    WeightedGraph::from_edges(n, gt.w_star.edges().map(|((a, b), _)| (a, b, 1.0)))
}

/// Gaussian mixture with shared covariance `cov`.
#[derive(Debug, Clone)]
pub struct MixtureDraw {
    pub obs: ObservationSet,
    /// Component of each column.
    pub labels: Vec<usize>,
    /// Component means as columns.
    pub means: DMatrix<f64>,
}

/// Samples `k` columns from an `n_comp`-component mixture. Means are drawn
/// once from `N(0, mean_scale^2 I)`; each sample picks a component uniformly.
pub fn sample_gmm_labeled(
    gt: &GroundTruth,
    k: usize,
    n_comp: usize,
    mean_scale: f64,
    seed: u64,
) -> Result<MixtureDraw> {
    if k == 0 || n_comp == 0 {
        return Err(Error::InvalidConfig("need at least one sample and one component".into()));
    }
    let n = gt.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means = DMatrix::from_fn(n, n_comp, |_, _| {
        mean_scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
    });
    let mut x = DMatrix::zeros(n, k);
    let mut labels = Vec::with_capacity(k);
    for j in 0..k {
        let c = rng.random_range(0..n_comp);
        let col = gt.gaussian(&mut rng, 1.0) + means.column(c);
        x.set_column(j, &col);
        labels.push(c);
    }
    Ok(MixtureDraw {
        obs: ObservationSet::new(x)?,
        labels,
        means,
    })
}

pub fn sample_gmm(
    gt: &GroundTruth,
    k: usize,
    n_comp: usize,
    mean_scale: f64,
    seed: u64,
) -> Result<ObservationSet> {
    sample_gmm_labeled(gt, k, n_comp, mean_scale, seed).map(|d| d.obs)
}

/// Multivariate Student t with `dof` degrees of freedom, scaled so that the
/// covariance of each column equals `cov`.
pub fn sample_mvt(gt: &GroundTruth, k: usize, dof: f64, seed: u64) -> Result<ObservationSet> {
    if !(dof > 2.0) {
        return Err(Error::InvalidDof(dof));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    let n = gt.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chi = ChiSquared::new(dof).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let scale = (dof - 2.0) / dof;
    let mut x = DMatrix::zeros(n, k);
    for j in 0..k {
        let z = gt.gaussian(&mut rng, scale);
        let u: f64 = chi.sample(&mut rng);
        x.set_column(j, &(z / (u / dof).sqrt()));
    }
    ObservationSet::new(x)
}
