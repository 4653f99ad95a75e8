//! Learns a graph from a handful of Student-t observations and compares it
//! with the ground truth.
//!
//! cargo run --release --example learn_graph

use fsgl::bench::relative_error;
use fsgl::datagen::{gen_ground_truth, sample_mvt};
use fsgl::graph::dense_laplacian;
use fsgl::spectral::dense_spectrum;
use fsgl::{learn_graph, SolverConfig, SolverKind};

fn main() -> fsgl::Result<()> {
    let n = 30;
    let truth = gen_ground_truth(n, 0.2, 0.5, 42)?;
    let obs = sample_mvt(&truth, 12, 3.0, 7)?;

    let cfg = SolverConfig {
        solver_kind: SolverKind::Recursive,
        objective_every: 100,
        ..SolverConfig::default()
    };
    let (g, trace) = learn_graph(&obs, None, &cfg)?;

    println!("ground truth: {} edges", truth.w_star.edge_count());
    println!("learned:      {} edges after {} steps", g.edge_count(), trace.steps());
    println!("relative error {:.4}", relative_error(&g, &truth.w_star)?);
    println!("lambda_2 {:.4}", dense_spectrum(&dense_laplacian(&g))[1]);
    for r in trace.records.iter().filter(|r| r.objective.is_some()).take(5) {
        println!("  step {:>5}: objective {:.4}", r.iter + 1, r.objective.unwrap());
    }
    println!(
        "partition: {} recursive calls, depth {}, worst split {:.2}",
        trace.partition.calls, trace.partition.max_depth, trace.partition.worst_split
    );
    Ok(())
}
