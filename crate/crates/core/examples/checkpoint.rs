//! Save a trained model, reload it, and reuse its patterns on a perturbed graph.

use node2coords::eval::stability_relative_change;
use node2coords::graph::{perturb_add_edges, Graph};
use node2coords::model::Checkpoint;
use node2coords::train::{fit, fit_coordinates, TrainConfig};

fn main() -> node2coords::Result<()> {
    let g = Graph::load_edge_list(concat!(env!("CARGO_MANIFEST_DIR"), "/data/karate.edges"))?;
    let cfg = TrainConfig {
        sinkhorn_iters: 100,
        lr: 10.0,
        batch_size: 34,
        epochs: 30,
        ..TrainConfig::default()
    };
    let result = fit(&g, &cfg)?;
    let ck = Checkpoint {
        n_hops: cfg.n,
        tau: cfg.tau,
        epsilon: cfg.epsilon,
        rho: cfg.rho,
        sinkhorn_iters: cfg.sinkhorn_iters,
        node_ids: g.node_ids().to_vec(),
        params: result.params.clone(),
        patterns: result.embedding.patterns.clone(),
    };
    let dir = std::env::temp_dir().join("node2coords-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("checkpoint.txt");
    ck.save(&path)?;
    let reloaded = Checkpoint::load(&path)?;
    println!("checkpoint round trip exact: {}", reloaded == ck);

    let g2 = perturb_add_edges(&g, 0.05, 1)?;
    println!("perturbed graph: {} -> {} edges", g.n_edges(), g2.n_edges());
    let moved = fit_coordinates(&g2, &reloaded.patterns, &cfg)?;
    let change = stability_relative_change(&result.embedding.coordinates, &moved.embedding.coordinates)?;
    println!("relative coordinate change {change:.3}");
    Ok(())
}
