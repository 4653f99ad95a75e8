//! Builds the sparse initial graph from a Gram matrix: a maximum spanning
//! tree over the entries of `Y = X X^T` plus the `B` largest leftovers.

use fsgl::datagen::{gen_ground_truth, sample_gmm};
use fsgl::init::init_sparse_graph_traced;

fn main() -> fsgl::Result<()> {
    let truth = gen_ground_truth(12, 0.3, 0.5, 1)?;
    let obs = sample_gmm(&truth, 4, 3, 1.0, 2)?;
    let y = obs.gram();

    let b = 6;
    let (g, order) = init_sparse_graph_traced(y, b)?;
    println!("tree attachments (Y entry):");
    for (m, n) in &order {
        println!("  ({m:>2}, {n:>2})  {:8.3}", y[(*m, *n)]);
    }
    let extra: Vec<_> = g.edge_keys().into_iter().filter(|e| !order.contains(e)).collect();
    println!("extra edges: {extra:?}");
    println!("{} edges, connected: {}", g.edge_count(), g.is_connected());
    Ok(())
}
