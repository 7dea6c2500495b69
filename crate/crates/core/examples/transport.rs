//! Balanced and unbalanced entropic transport on a path graph's diffusion geometry.

use node2coords::graph::{diffusion_cost, Graph};
use node2coords::ot::{sinkhorn_distance, sinkhorn_unbalanced_distance, GibbsKernel};

fn main() -> node2coords::Result<()> {
    let edges: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 1)).collect();
    let g = Graph::from_edges(6, &edges)?;
    let cost = diffusion_cost(&g, 1)?;
    let left = [0.5, 0.5, 0.0, 0.0, 0.0, 0.0];
    let right = [0.0, 0.0, 0.0, 0.0, 0.5, 0.5];

    for epsilon in [0.5, 0.1, 0.05] {
        let k = GibbsKernel::from_diffusion(&cost, epsilon, 1.0)?;
        let (d, plan) = sinkhorn_distance(&k, &left, &right, 2000)?;
        println!(
            "balanced   eps={epsilon:<5} distance {d:.4} ({} iterations)",
            plan.iterations_run
        );
    }

    // Twice the mass on the target side: only the unbalanced solver accepts it.
    let heavy: Vec<f64> = right.iter().map(|x| 2.0 * x).collect();
    for rho in [0.05, 1.0, 100.0] {
        let k = GibbsKernel::from_diffusion(&cost, 0.1, rho)?;
        let (d, plan) = sinkhorn_unbalanced_distance(&k, &left, &heavy, 2000)?;
        let moved: f64 = plan.coupling.data().iter().sum();
        println!("unbalanced rho={rho:<6} distance {d:.4}, transported mass {moved:.3}");
    }
    Ok(())
}
