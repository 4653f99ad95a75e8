//! Fiedler sweep cut on two loosely joined clusters, checked against the
//! exhaustive Cheeger constant and both sides of Cheeger's inequality.

use fsgl::partition::{approx_cheeger_cut, brute_force_cheeger};
use fsgl::spectral::{EigenOptions, SpectralState};
use fsgl::WeightedGraph;

fn main() -> fsgl::Result<()> {
    let mut edges = Vec::new();
    for base in [0, 6] {
        for a in 0..6 {
            for b in a + 1..6 {
                if (a + b) % 3 != 0 {
                    edges.push((base + a, base + b, 1.0));
                }
            }
        }
    }
    edges.push((2, 8, 1.0));
    edges.push((5, 6, 1.0));
    let g = WeightedGraph::from_edges(12, edges)?;

    let state = SpectralState::compute(&g, 3, 1.0, &EigenOptions::default())?;
    let lambda2 = state.fiedler_value();
    let d_max = g.degrees().into_iter().max().unwrap_or(0) as f64;
    let sweep = approx_cheeger_cut(&g, &state)?;
    let exact = brute_force_cheeger(&g)?;

    println!("lambda_2 = {lambda2:.4}, d_max = {d_max}");
    println!("sweep cut  S = {:?}, cut edges {:?}, ratio {:.4}", sweep.s, sweep.cut_edges, sweep.ratio);
    println!("exhaustive S = {:?}, ratio {:.4}", exact.s, exact.ratio);
    println!(
        "{:.4} <= {:.4} <= {:.4}",
        lambda2 / 2.0,
        exact.ratio,
        (2.0 * lambda2 * d_max).sqrt()
    );
    Ok(())
}
