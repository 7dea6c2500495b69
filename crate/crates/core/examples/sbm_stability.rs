//! Train on a three-block SBM, then refit coordinates on fresh draws with a different
//! intra-block probability and measure how far the coordinates move.

use node2coords::eval::{cluster_report, stability_relative_change};
use node2coords::graph::{perturb_intra_probability, SbmParams};
use node2coords::train::{fit, fit_coordinates, TrainConfig};

fn main() -> node2coords::Result<()> {
    let sbm = SbmParams::new(vec![34, 33, 33], 0.4, 0.01)?;
    let g = sbm.generate_connected(0)?;
    let cfg = TrainConfig {
        s: 3,
        epsilon: 0.01,
        rho: 0.1,
        sinkhorn_iters: 50,
        lr: 100.0,
        batch_size: 100,
        epochs: 60,
        ..TrainConfig::default()
    };
    let base = fit(&g, &cfg)?;
    let truth = g.labels().unwrap();
    let rep = cluster_report(&base.embedding.coordinates, truth, 3, 0)?;
    println!("base graph: AMI {:.3}", rep.ami);

    for (i, p) in [0.2, 0.3, 0.4].into_iter().enumerate() {
        let g2 = perturb_intra_probability(&sbm, p, 1 + i as u64)?;
        let moved = fit_coordinates(&g2, &base.embedding.patterns, &cfg)?;
        let change = stability_relative_change(&base.embedding.coordinates, &moved.embedding.coordinates)?;
        let rep = cluster_report(&moved.embedding.coordinates, g2.labels().unwrap(), 3, 0)?;
        println!("p' = {p:.2}: relative change {change:.3}, AMI {:.3}", rep.ami);
    }
    Ok(())
}
