//! Node classification from learned coordinates with one-vs-rest logistic regression.

use node2coords::eval::{classify_splits, mean_scores, DEFAULT_L2};
use node2coords::graph::SbmParams;
use node2coords::train::{fit, TrainConfig};

fn main() -> node2coords::Result<()> {
    let g = SbmParams::new(vec![20, 20, 20], 0.5, 0.03)?.generate_connected(3)?;
    let labels = g.labels().unwrap().to_vec();
    let cfg = TrainConfig {
        s: 3,
        epsilon: 0.02,
        rho: 0.1,
        sinkhorn_iters: 50,
        lr: 100.0,
        batch_size: 60,
        epochs: 60,
        ..TrainConfig::default()
    };
    let coords = fit(&g, &cfg)?.embedding.coordinates;
    for ratio in [0.2, 0.5, 0.8] {
        let reports = classify_splits(&coords, &labels, ratio, 10, 0, DEFAULT_L2)?;
        let (macro_f1, accuracy) = mean_scores(&reports);
        println!(
            "train {:>3.0}%: macro-F1 {macro_f1:.2}, accuracy {accuracy:.2}",
            ratio * 100.0
        );
    }
    Ok(())
}
