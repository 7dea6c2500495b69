//! Learn patterns on half of a graph, then place the held-out nodes against them.

use node2coords::eval::{classify, DEFAULT_L2};
use node2coords::graph::{downsample, SbmParams};
use node2coords::model::upsample_patterns;
use node2coords::train::{fit, fit_coordinates, TrainConfig};

fn main() -> node2coords::Result<()> {
    let g = SbmParams::new(vec![30, 30], 0.4, 0.02)?.generate_connected(5)?;
    let labels = g.labels().unwrap().to_vec();
    let (sub, kept) = downsample(&g, 0.5, 0)?;
    println!("kept {} of {} nodes", kept.len(), g.n_nodes());

    let cfg = TrainConfig {
        epsilon: 0.02,
        rho: 0.1,
        sinkhorn_iters: 50,
        lr: 100.0,
        batch_size: 30,
        epochs: 60,
        ..TrainConfig::default()
    };
    let trained = fit(&sub, &cfg)?;
    // Held-out nodes carry no pattern mass; their coordinates are still fitted.
    let patterns = upsample_patterns(&trained.embedding.patterns, &kept, g.n_nodes())?;
    let full = fit_coordinates(&g, &patterns, &cfg)?;

    let held_out: Vec<usize> = (0..g.n_nodes()).filter(|i| !kept.contains(i)).collect();
    let report = classify(&full.embedding.coordinates, &labels, &kept, &held_out, DEFAULT_L2)?;
    println!(
        "held-out accuracy {:.1}%, macro-F1 {:.1}",
        report.accuracy, report.macro_f1
    );
    Ok(())
}
