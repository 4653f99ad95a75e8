//! Small accuracy and runtime sweep: dense-start greedy against sparse
//! initialization plus recursion.
//!
//! FSGL_THREADS caps the worker count.

use fsgl::bench::{run_benchmark, BenchConfig};

fn main() -> fsgl::Result<()> {
    let cfg = BenchConfig {
        sizes: vec![12, 20],
        ratios: vec![0.2, 0.6, 1.0],
        trials: 3,
        ..BenchConfig::default()
    };
    let report = run_benchmark(&cfg)?;
    println!("{}", report.summary_table());
    println!("Average runtime in seconds\n{}", report.runtime_table());
    Ok(())
}
