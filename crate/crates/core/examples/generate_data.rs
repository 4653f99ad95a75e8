//! Draws a ground-truth graph and GMM and Student-t observations, then
//! writes them in the formats the CLI reads.

use std::fs::File;

use fsgl::datagen::{gen_ground_truth, sample_gmm_labeled, sample_mvt};
use fsgl::io::{write_edge_list, write_matrix_csv};

fn main() -> fsgl::Result<()> {
    let truth = gen_ground_truth(20, 0.2, 0.5, 9)?;
    println!("{} nodes, {} edges", truth.dim(), truth.w_star.edge_count());

    let mix = sample_gmm_labeled(&truth, 8, 3, 1.0, 10)?;
    println!("mixture labels: {:?}", mix.labels);
    let heavy = sample_mvt(&truth, 8, 3.0, 11)?;
    let peak = heavy.x().amax();
    println!("student-t largest |x|: {peak:.3}");

    let dir = std::env::temp_dir().join("fsgl-example");
    std::fs::create_dir_all(&dir)?;
    write_matrix_csv(mix.obs.x(), File::create(dir.join("x.csv"))?)?;
    write_edge_list(&truth.w_star, File::create(dir.join("w_true.csv"))?)?;
    println!("wrote {}", dir.display());
    Ok(())
}
