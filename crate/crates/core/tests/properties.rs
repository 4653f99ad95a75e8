use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use fsgl::datagen::{gen_ground_truth, sample_gmm, sample_mvt};
use fsgl::graph::{build_laplacian, canonical, dense_laplacian, gram, WeightedGraph};
use fsgl::greedy::exhaustive_select;
use fsgl::init::init_sparse_graph;
use fsgl::objective::{fiedler_delta, trace_delta};
use fsgl::partition::{brute_force_cheeger, partition_select};
use fsgl::spectral::{dense_spectrum, sorted_symmetric_eigen, EigenOptions, SpectralState};
use fsgl::SolverConfig;

/// Random weighted graph on `2..=max_n` nodes, not necessarily connected.
fn graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::option::weighted(0.4, 0.05f64..2.0), n * (n - 1) / 2).prop_map(
            move |ws| {
                let mut g = WeightedGraph::new(n);
                let mut it = ws.into_iter();
                for a in 0..n {
                    for b in a + 1..n {
                        if let Some(w) = it.next().unwrap() {
                            g.set_weight(a, b, w).unwrap();
                        }
                    }
                }
                g
            },
        )
    })
}

/// Connected graph: a random spanning path plus random extra edges.
fn connected_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (graph(max_n), any::<u64>()).prop_map(|(mut g, salt)| {
        let n = g.node_count();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt);
        for w in order.windows(2) {
            if !g.contains_edge(w[0], w[1]) {
                g.set_weight(w[0], w[1], 0.5).unwrap();
            }
        }
        g
    })
}

fn observations(n: usize, k: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-3.0f64..3.0, n * k).prop_map(move |v| DMatrix::from_vec(n, k, v))
}

fn full_state(g: &WeightedGraph, alpha: f64) -> SpectralState {
    SpectralState::compute(g, g.node_count(), alpha, &EigenOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn weakening_subtracts_eps_e(g in graph(10), pick in any::<prop::sample::Index>(), eps in 0.001f64..0.05) {
        let keys = g.edge_keys();
        prop_assume!(!keys.is_empty());
        let (m, n) = keys[pick.index(keys.len())];
        prop_assume!(g.weight(m, n).unwrap() > eps);
        let after = dense_laplacian(&g.weaken_edge((m, n), eps).unwrap());
        let mut e = DMatrix::zeros(g.node_count(), g.node_count());
        e[(m, m)] = 1.0;
        e[(n, n)] = 1.0;
        e[(m, n)] = -1.0;
        e[(n, m)] = -1.0;
        prop_assert!((dense_laplacian(&g) - e * eps - after).amax() < 1e-12);
    }

    #[test]
    fn laplacian_is_psd_with_zero_row_sums(g in graph(12)) {
        let l = dense_laplacian(&g);
        for i in 0..l.nrows() {
            prop_assert!(l.row(i).sum().abs() < 1e-12);
        }
        prop_assert!(dense_spectrum(&l)[0] > -1e-10);
        prop_assert_eq!(build_laplacian(&g).to_dense(), l);
    }

    #[test]
    fn connected_iff_positive_fiedler(g in graph(12)) {
        let lambda2 = dense_spectrum(&dense_laplacian(&g))[1];
        prop_assert_eq!(g.is_connected(), lambda2 > 1e-9);
    }

    #[test]
    fn adding_an_edge_never_lowers_fiedler(g in graph(10), a in 0usize..10, b in 0usize..10, w in 0.1f64..2.0) {
        let n = g.node_count();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let mut h = g.clone();
        h.set_weight(a, b, g.weight(a, b).unwrap_or(0.0) + w).unwrap();
        let before = dense_spectrum(&dense_laplacian(&g))[1];
        let after = dense_spectrum(&dense_laplacian(&h))[1];
        prop_assert!(after >= before - 1e-10);
    }

    #[test]
    fn majorizer_dominates_exact_form(g in graph(10), k in 1usize..10, alpha in 0.2f64..2.0) {
        let l = build_laplacian(&g);
        let state = SpectralState::from_laplacian(&l, k, alpha, &EigenOptions::default())
            .unwrap()
            .with_exact_inverse(&l)
            .unwrap();
        let n = g.node_count();
        for a in 0..n {
            for b in a + 1..n {
                let exact = state.exact_quadform(a, b).unwrap();
                prop_assert!(state.majorizer_quadform(a, b) >= exact - 1e-12);
                prop_assert!(exact <= 2.0 / alpha + 1e-12);
            }
        }
    }

    #[test]
    fn fiedler_delta_bounds_true_drop(g in connected_graph(10), pick in any::<prop::sample::Index>()) {
        let eps = 0.01;
        let keys = g.edge_keys();
        let (m, n) = keys[pick.index(keys.len())];
        prop_assume!(g.weight(m, n).unwrap() >= eps);
        let state = full_state(&g, 0.5);
        let before = state.fiedler_value();
        let after = dense_spectrum(&dense_laplacian(&g.weaken_edge((m, n), eps).unwrap()))[1];
        prop_assert!(before - after <= fiedler_delta(&state, m, n, eps) + 1e-10);
        prop_assert!(after <= before + 1e-10);
    }

    #[test]
    fn trace_change_is_linear(x in observations(6, 4), g in connected_graph(6), s in 0.0f64..0.3) {
        prop_assume!(g.node_count() == 6);
        let y = gram(&x);
        let (m, n) = g.edge_keys()[0];
        let w = g.weight(m, n).unwrap();
        let tr = |step: f64| {
            let mut h = g.clone();
            h.set_weight(m, n, w + 1.0 - step).unwrap();
            (dense_laplacian(&h) * &y).trace()
        };
        let (t0, t1, t2) = (tr(0.0), tr(s), tr(2.0 * s));
        let scale = 1.0 + t0.abs();
        prop_assert!((t0 - 2.0 * t1 + t2).abs() < 1e-10 * scale);
        prop_assert!((t1 - t0 - s * trace_delta(&y, m, n)).abs() < 1e-10 * scale);
        prop_assert!(trace_delta(&y, m, n) <= 1e-12);
    }

    #[test]
    fn init_is_connected_with_exact_budget(x in observations(9, 3), frac in 0.0f64..=1.0) {
        let y = gram(&x);
        let available = 36 - 8;
        let b = (frac * available as f64) as usize;
        let g = init_sparse_graph(&y, b).unwrap();
        prop_assert_eq!(g.edge_count(), 8 + b);
        prop_assert!(g.is_connected());
        prop_assert!(g.edges().all(|(_, w)| w == 1.0));
    }

    #[test]
    fn recursive_selection_equals_exhaustive(
        g in connected_graph(24),
        x in observations(24, 5),
        v_min in 2usize..8,
    ) {
        let n = g.node_count();
        let y = gram(&x.rows(0, n).into_owned());
        let cfg = SolverConfig { v_min, ..SolverConfig::default() };
        let state = SpectralState::compute(&g, cfg.retained_for(5, n), cfg.alpha, &EigenOptions::default()).unwrap();
        let full = exhaustive_select(&g, &y, &state, &cfg).unwrap();
        let (rec, _) = partition_select(&g, &state, &y, &cfg).unwrap();
        prop_assert_eq!(full, rec);
    }

    #[test]
    fn cheeger_bounds_hold(g in connected_graph(9)) {
        let unit = WeightedGraph::from_edges(g.node_count(), g.edge_keys().into_iter().map(|(a, b)| (a, b, 1.0))).unwrap();
        let lambda2 = dense_spectrum(&dense_laplacian(&unit))[1];
        let phi = brute_force_cheeger(&unit).unwrap().ratio;
        let d_max = unit.degrees().into_iter().max().unwrap() as f64;
        prop_assert!(lambda2 / 2.0 <= phi + 1e-10);
        prop_assert!(phi <= (2.0 * lambda2 * d_max).sqrt() + 1e-10);
    }

    #[test]
    fn canonical_orders_endpoints(a in 0usize..100, b in 0usize..100) {
        let (lo, hi) = canonical(a, b);
        prop_assert!(lo <= hi);
        prop_assert_eq!(canonical(b, a), (lo, hi));
    }
}

fn sample_covariance(x: &DMatrix<f64>) -> DMatrix<f64> {
    gram(x) / x.ncols() as f64
}

#[test]
fn samplers_match_target_covariance() {
    let gt = gen_ground_truth(6, 0.5, 0.5, 17).unwrap();
    let k = 200_000;
    let mvt = sample_mvt(&gt, k, 5.0, 3).unwrap();
    let err = (sample_covariance(mvt.x()) - &gt.cov).amax();
    assert!(err < 0.05 * gt.cov.amax(), "mvt covariance error {err}");

    // zero-scale single-component mixture is a plain Gaussian
    let gmm = sample_gmm(&gt, k, 1, 0.0, 4).unwrap();
    let err = (sample_covariance(gmm.x()) - &gt.cov).amax();
    assert!(err < 0.02 * gt.cov.amax(), "gmm covariance error {err}");
}

#[test]
fn eigen_decomposition_reconstructs() {
    let g = gen_ground_truth(15, 0.3, 0.5, 2).unwrap().w_star;
    let l = dense_laplacian(&g);
    let (vals, vecs) = sorted_symmetric_eigen(&l);
    let back = &vecs * DMatrix::from_diagonal(&DVector::from_vec(vals.clone())) * vecs.transpose();
    assert!((back - l).amax() < 1e-10);
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));
}
