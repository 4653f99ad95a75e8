//! Scores every edge of a small graph and compares each score term with the
//! true change it bounds.

use fsgl::datagen::{gen_ground_truth, sample_gmm};
use fsgl::graph::{build_laplacian, dense_laplacian};
use fsgl::objective::edge_gradient;
use fsgl::spectral::{dense_spectrum, EigenOptions, SpectralState};
use fsgl::SolverConfig;

fn main() -> fsgl::Result<()> {
    let truth = gen_ground_truth(10, 0.4, 0.5, 5)?;
    let obs = sample_gmm(&truth, 4, 2, 1.0, 6)?;
    let g = truth.w_star;
    let cfg = SolverConfig::default();
    let eps = cfg.epsilon;

    // truncated spectrum, as the solver keeps it
    let l = build_laplacian(&g);
    let state = SpectralState::from_laplacian(&l, 4, cfg.alpha, &EigenOptions::default())?
        .with_exact_inverse(&l)?;
    let shift = |m: nalgebra::DMatrix<f64>| m + nalgebra::DMatrix::identity(10, 10) * cfg.alpha;
    let before = shift(dense_laplacian(&g));
    let lambda2 = dense_spectrum(&dense_laplacian(&g))[1];
    println!("gap_2 = {:.4}", state.gap2());
    println!(" edge       grad_h   logdet bound / true   lambda_2 bound / true");
    for (m, n) in g.edge_keys() {
        let d = edge_gradient(&state, obs.gram(), &g, (m, n), &cfg)?;
        let weaker = g.weaken_edge((m, n), eps)?;
        let logdet_true = before.clone().determinant().ln() - shift(dense_laplacian(&weaker)).determinant().ln();
        let drop_true = lambda2 - dense_spectrum(&dense_laplacian(&weaker))[1];
        println!(
            "({m}, {n})  {:>9.5}   {:.6} / {:.6}     {:.6} / {:.6}",
            d.grad_h,
            -d.eta.ln(),
            logdet_true,
            d.rho,
            drop_true
        );
    }
    Ok(())
}
