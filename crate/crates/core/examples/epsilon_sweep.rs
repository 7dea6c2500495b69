//! Classification accuracy as a function of the entropic regularization.

use node2coords::eval::{epsilon_sensitivity_sweep, SplitProtocol};
use node2coords::graph::SbmParams;
use node2coords::train::TrainConfig;

fn main() -> node2coords::Result<()> {
    let g = SbmParams::new(vec![20, 20], 0.5, 0.05)?.generate_connected(7)?;
    let template = TrainConfig {
        rho: 0.1,
        sinkhorn_iters: 50,
        lr: 100.0,
        batch_size: 40,
        epochs: 40,
        ..TrainConfig::default()
    };
    let rows = epsilon_sensitivity_sweep(
        &g,
        &template,
        &[0.01, 0.03, 0.05, 0.09],
        &SplitProtocol::default(),
    )?;
    println!("epsilon  accuracy  macro_f1  loss");
    for r in rows {
        println!(
            "{:<7}  {:>8.2}  {:>8.2}  {:.4}",
            r.epsilon, r.accuracy, r.macro_f1, r.final_loss
        );
    }
    Ok(())
}
