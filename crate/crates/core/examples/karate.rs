//! Two structural patterns on Zachary's karate club and the communities they induce.
//!
//! `cargo run --release --example karate -- [epochs]`

use node2coords::eval::cluster_report;
use node2coords::graph::Graph;
use node2coords::train::{fit, TrainConfig};

fn main() -> node2coords::Result<()> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let g = Graph::load_edge_list(format!("{data}/karate.edges"))?;
    let labels = g.load_labels(format!("{data}/karate.labels"))?;
    let epochs = std::env::args()
        .nth(1)
        .map_or(Ok(30), |a| a.parse())
        .expect("epochs must be an integer");
    let cfg = TrainConfig {
        epochs,
        ..TrainConfig::default()
    };
    println!("training: {cfg}");
    let result = fit(&g, &cfg)?;
    println!(
        "final loss {:.4} after {} epochs",
        result.embedding.final_loss,
        result.losses.len()
    );

    let report = cluster_report(&result.embedding.coordinates, &labels, 2, 0)?;
    println!(
        "k-means on coordinates: NMI {:.3}, AMI {:.3}",
        report.nmi, report.ami
    );
    let m = &result.embedding.patterns;
    for c in 0..m.cols() {
        let col = m.col(c);
        let top = (0..col.len()).max_by(|&a, &b| col[a].total_cmp(&col[b])).unwrap();
        println!(
            "pattern {c}: heaviest node {} (community {}), mass {:.3}",
            g.node_ids()[top],
            labels[top],
            col[top]
        );
    }
    Ok(())
}
