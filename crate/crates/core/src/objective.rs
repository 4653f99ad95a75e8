//! Per-edge scoring of one weakening step and the exact objective.
//!
//! The objective is
//! `h(W) + mu ||W||_0 = tr(L Y) - log det(L + alpha I) - gamma lambda_2(L) + mu ||W||_0`.
//! Weakening edge `(m, n)` by `s` subtracts `s E` from `L` with
//! `E = (e_m - e_n)(e_m - e_n)^T`. The score of a step is an upper bound on
//! the resulting objective change:
//!
//! * trace: `s Z` with `Z = 2 Y_mn - Y_mm - Y_nn`, exact;
//! * log-det: `-log(1 - s q)` where `q` bounds the resistance-like quadratic
//!   form `(e_m - e_n)^T (L + alpha I)^-1 (e_m - e_n)` from above;
//! * Fiedler: `gamma * rho`, with `rho` bounding the drop of `lambda_2`;
//! * sparsity: `-mu` when the step deletes the edge.

use nalgebra::DMatrix;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::graph::{dense_laplacian, Edge, WeightedGraph};
use crate::spectral::{dense_spectrum, SpectralState};

/// Scored quantities for one candidate weakening.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDelta {
    pub edge: Edge,
    /// Amount actually subtracted, `min(epsilon, w)`.
    pub step: f64,
    /// Trace slope `Z_mn <= 0`.
    pub z: f64,
    /// Determinant factor `eta in (0, 1]`.
    pub eta: f64,
    /// Bound on the decrease of `lambda_2`.
    pub rho: f64,
    /// `-mu` when the step removes the edge, else 0.
    pub sparsity_gain: f64,
    pub grad_h: f64,
}

/// `Z_mn = 2 Y_mn - Y_mm - Y_nn`, the exact slope of `tr(L Y)` along `-E`.
pub fn trace_delta(y: &DMatrix<f64>, m: usize, n: usize) -> f64 {
    2.0 * y[(m, n)] - y[(m, m)] - y[(n, n)]
}

fn penalty_from_quadform(q: f64, m: usize, n: usize, eps: f64) -> Result<(f64, f64)> {
    let product = eps * q;
    if !(product < 1.0) {
        return Err(Error::StepTooLarge { m, n, product });
    }
    let eta = 1.0 - product;
    Ok((eta, -eta.ln()))
}

/// `-log eta` with `eta = 1 - eps * q` and `q` from the spectral majorizer.
/// Overestimates the exact log-determinant loss.
pub fn logdet_delta(state: &SpectralState, m: usize, n: usize, eps: f64) -> Result<f64> {
    let q = state.majorizer_quadform(m, n);
    penalty_from_quadform(q, m, n, eps).map(|(_, p)| p)
}

/// `-log eta` from the dense inverse attached to `state`.
pub fn logdet_delta_exact(state: &SpectralState, m: usize, n: usize, eps: f64) -> Result<f64> {
    let q = state
        .exact_quadform(m, n)
        .ok_or_else(|| Error::InvalidConfig("spectral state carries no exact inverse".into()))?;
    penalty_from_quadform(q, m, n, eps).map(|(_, p)| p)
}

/// Bound on how far `lambda_2` can drop when `eps E` is subtracted from `L`.
///
/// With `Gap_2 > 4 eps` the perturbation is less than half the gap and the
/// drop is at most `||eps E v_2|| = sqrt(2) eps |v_2m - v_2n|`; with
/// `Gap_2 > 2 eps` an extra `sqrt(2)` factor applies; otherwise Weyl's bound
/// `||eps E|| = 2 eps` is used.
pub fn fiedler_delta(state: &SpectralState, m: usize, n: usize, eps: f64) -> f64 {
    let gap = state.gap2();
    let v2 = state.fiedler_vector();
    let diff = (v2[m] - v2[n]).abs();
    if gap > 4.0 * eps {
        std::f64::consts::SQRT_2 * eps * diff
    } else if gap > 2.0 * eps {
        2.0 * eps * diff
    } else {
        2.0 * eps
    }
}

/// `-mu` if this step removes the edge (`w < eps`), else 0.
pub fn sparsity_delta(w: f64, eps: f64, mu: f64) -> f64 {
    if w < eps {
        -mu
    } else {
        0.0
    }
}

/// Scores weakening `edge` by `min(epsilon, w)` against the snapshot.
pub fn edge_gradient(
    state: &SpectralState,
    y: &DMatrix<f64>,
    g: &WeightedGraph,
    edge: Edge,
    cfg: &SolverConfig,
) -> Result<EdgeDelta> {
    let (m, n) = edge;
    let w = g.weight(m, n).ok_or(Error::MissingEdge(m, n))?;
    let step = cfg.epsilon.min(w);
    let z = trace_delta(y, m, n);
    let q = if cfg.exact_logdet {
        state
            .exact_quadform(m, n)
            .ok_or_else(|| Error::InvalidConfig("exact-logdet needs the dense inverse".into()))?
    } else {
        state.majorizer_quadform(m, n)
    };
    let (eta, logdet) = penalty_from_quadform(q, m, n, step)?;
    let rho = fiedler_delta(state, m, n, step);
    let sparsity_gain = sparsity_delta(w, cfg.epsilon, cfg.mu);
    let grad_h = step * z + logdet + cfg.gamma * rho + sparsity_gain;
    Ok(EdgeDelta {
        edge,
        step,
        z,
        eta,
        rho,
        sparsity_gain,
        grad_h,
    })
}

/// Terms of the exact objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveValue {
    pub trace: f64,
    pub logdet: f64,
    pub lambda2: f64,
    /// Off-diagonal nonzeros of `W` (two per stored edge).
    pub nonzeros: usize,
    pub total: f64,
}

/// Exact objective by dense computation. Monitoring only.
pub fn objective_value(g: &WeightedGraph, y: &DMatrix<f64>, cfg: &SolverConfig) -> Result<ObjectiveValue> {
    let n = g.node_count();
    if y.nrows() != n || y.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "graph has {n} nodes, Gram matrix is {}x{}",
            y.nrows(),
            y.ncols()
        )));
    }
    let l = dense_laplacian(g);
    let trace = l.component_mul(y).sum();
    let shifted = &l + DMatrix::identity(n, n) * cfg.alpha;
    let chol = shifted
        .cholesky()
        .ok_or_else(|| Error::InvalidConfig("L + alpha I is not positive definite".into()))?;
    let logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let lambda2 = if n >= 2 { dense_spectrum(&l)[1] } else { 0.0 };
    let nonzeros = 2 * g.edge_count();
    let total = trace - logdet - cfg.gamma * lambda2 + cfg.mu * nonzeros as f64;
    Ok(ObjectiveValue {
        trace,
        logdet,
        lambda2,
        nonzeros,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_laplacian;
    use crate::spectral::EigenOptions;

    fn state(g: &WeightedGraph, k: usize, alpha: f64) -> SpectralState {
        SpectralState::compute(g, k, alpha, &EigenOptions::default()).unwrap()
    }

    #[test]
    fn trace_delta_identity_and_ones() {
        assert_eq!(trace_delta(&DMatrix::identity(3, 3), 0, 2), -2.0);
        assert_eq!(trace_delta(&DMatrix::from_element(3, 3, 1.0), 0, 1), 0.0);
    }

    #[test]
    fn empty_graph_logdet_delta() {
        let s = state(&WeightedGraph::new(4), 4, 1.0);
        let p = logdet_delta(&s, 0, 3, 0.01).unwrap();
        assert!((p + 0.98f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn step_too_large_is_reported() {
        let s = state(&WeightedGraph::new(4), 4, 0.5);
        // q = 4, eps * q = 1
        assert!(matches!(
            logdet_delta(&s, 0, 1, 0.25),
            Err(Error::StepTooLarge { m: 0, n: 1, .. })
        ));
    }

    #[test]
    fn exact_logdet_requires_inverse() {
        let s = state(&WeightedGraph::new(3), 3, 1.0);
        assert!(logdet_delta_exact(&s, 0, 1, 0.01).is_err());
        let s = s.with_exact_inverse(&build_laplacian(&WeightedGraph::new(3))).unwrap();
        assert!((logdet_delta_exact(&s, 0, 1, 0.01).unwrap() + 0.98f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn fiedler_delta_regimes() {
        // P3 path: Gap2 = 1, v2 = (1, 0, -1)/sqrt(2)
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let s = state(&g, 3, 1.0);
        let v2 = s.fiedler_vector();
        let d = (v2[0] - v2[2]).abs();
        assert!((fiedler_delta(&s, 0, 2, 0.01) - std::f64::consts::SQRT_2 * 0.01 * d).abs() < 1e-15);
        // 2 eps < Gap2 = 1 <= 4 eps
        assert!((fiedler_delta(&s, 0, 2, 0.3) - 0.6 * d).abs() < 1e-14);
        // Gap2 <= 2 eps
        assert_eq!(fiedler_delta(&s, 0, 2, 0.5), 1.0);
    }

    #[test]
    fn fiedler_delta_zero_for_equal_entries() {
        let v = DMatrix::from_row_slice(
            4,
            3,
            &[
                0.5, 0.5, 0.5, //
                0.5, 0.5, -0.5, //
                0.5, -0.5, 0.5, //
                0.5, -0.5, -0.5,
            ],
        );
        let s = SpectralState::from_eigenpairs(vec![0.0, 1.0, 3.0], v, 1.0, 4).unwrap();
        assert_eq!(fiedler_delta(&s, 0, 1, 0.01), 0.0);
        assert!(fiedler_delta(&s, 0, 2, 0.01) > 0.0);
    }

    #[test]
    fn fiedler_delta_degenerate_gap_uses_weyl() {
        let s = state(&WeightedGraph::new(3), 3, 1.0);
        assert_eq!(s.gap2(), 0.0);
        assert_eq!(fiedler_delta(&s, 0, 1, 0.01), 0.02);
    }

    #[test]
    fn sparsity_delta_cases() {
        assert_eq!(sparsity_delta(0.005, 0.01, 0.2), -0.2);
        assert_eq!(sparsity_delta(0.5, 0.01, 0.2), 0.0);
        assert_eq!(sparsity_delta(0.01, 0.01, 0.2), 0.0);
    }

    #[test]
    fn objective_of_empty_graph_is_zero() {
        let cfg = SolverConfig {
            alpha: 1.0,
            ..SolverConfig::default()
        };
        let v = objective_value(&WeightedGraph::new(4), &DMatrix::identity(4, 4), &cfg).unwrap();
        assert_eq!(v.total, 0.0);
        assert_eq!(v.lambda2, 0.0);
    }

    #[test]
    fn objective_complete_graph_fiedler_term() {
        let n = 6;
        let cfg = SolverConfig {
            gamma: 0.5,
            mu: 0.0,
            ..SolverConfig::default()
        };
        let v = objective_value(&WeightedGraph::complete(n, 1.0), &DMatrix::zeros(n, n), &cfg).unwrap();
        assert!((v.lambda2 - n as f64).abs() < 1e-12);
        assert!((v.total - (-v.logdet - 0.5 * n as f64)).abs() < 1e-12);
    }

    #[test]
    fn objective_counts_both_off_diagonal_entries() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let v = objective_value(&g, &DMatrix::zeros(3, 3), &SolverConfig::default()).unwrap();
        assert_eq!(v.nonzeros, 4);
    }

    #[test]
    fn partial_step_scores_with_remaining_weight() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 0.004), (1, 2, 1.0)]).unwrap();
        let s = state(&g, 3, 0.5);
        let y = DMatrix::identity(3, 3);
        let d = edge_gradient(&s, &y, &g, (0, 1), &SolverConfig::default()).unwrap();
        assert_eq!(d.step, 0.004);
        assert_eq!(d.sparsity_gain, -0.2);
        let expect = 0.004 * d.z - d.eta.ln() + 0.5 * d.rho - 0.2;
        assert!((d.grad_h - expect).abs() < 1e-15);
    }
}
