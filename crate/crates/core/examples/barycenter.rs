//! Batched unbalanced barycenters of two patterns for a sweep of weights.

use node2coords::graph::{diffusion_cost, Graph};
use node2coords::linalg::{Matrix, Tensor};
use node2coords::ot::{barycenter_batched, barycenter_serial, GibbsKernel};

fn main() -> node2coords::Result<()> {
    let n = 9;
    let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    let g = Graph::from_edges(n, &edges)?;
    let k = GibbsKernel::from_diffusion(&diffusion_cost(&g, 1)?, 0.05, 1.0)?;

    // Pattern 0 sits on the left end of the path, pattern 1 on the right end.
    let patterns = Matrix::from_fn(n, 2, |i, c| match (i, c) {
        (0 | 1, 0) | (7 | 8, 1) => 0.5,
        _ => 0.0,
    });
    let weights: Vec<Vec<f64>> = (0..=4)
        .map(|t| vec![1.0 - t as f64 / 4.0, t as f64 / 4.0])
        .collect();
    let batch = barycenter_batched(
        &k,
        &Tensor::constant(patterns.clone()),
        &Tensor::constant(Matrix::from_rows(&weights)?),
        200,
    )?;
    let columns = batch.as_columns();
    for (j, w) in weights.iter().enumerate() {
        let row: Vec<String> = columns.col(j).iter().map(|x| format!("{x:.3}")).collect();
        println!("lambda {:.2}/{:.2}: {}", w[0], w[1], row.join(" "));
    }

    let serial = barycenter_serial(&k, &[patterns.col(0), patterns.col(1)], &weights[2], 200)?;
    let gap = serial
        .iter()
        .zip(columns.col(2))
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("batched vs serial at 0.5/0.5: max difference {gap:.1e}");
    Ok(())
}
