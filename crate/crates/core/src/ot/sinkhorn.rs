use super::{GibbsKernel, Iterations};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, DIV_FLOOR};

/// Entropic coupling `Γ = diag(u) K diag(v)`.
#[derive(Clone, Debug)]
pub struct TransportPlan {
    pub coupling: Matrix,
    /// Row scaling (source side).
    pub u: Vec<f64>,
    /// Column scaling (target side).
    pub v: Vec<f64>,
    pub iterations_run: usize,
}

pub(crate) fn check_histogram(h: &[f64], n: usize, name: &str) -> Result<f64> {
    if h.len() != n {
        return Err(Error::InvalidHistogram(format!(
            "{name} has {} entries, kernel has {n}",
            h.len()
        )));
    }
    if let Some(i) = h.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidHistogram(format!(
            "{name}[{i}] = {} is negative or not finite",
            h[i]
        )));
    }
    let mass: f64 = h.iter().sum();
    if mass <= 0.0 {
        return Err(Error::InvalidHistogram(format!("{name} has zero total mass")));
    }
    Ok(mass)
}

/// `K · x`.
pub(crate) fn kernel_apply(k: &Matrix, x: &[f64]) -> Vec<f64> {
    (0..k.rows())
        .map(|i| k.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// `Kᵀ · x`.
pub(crate) fn kernel_apply_t(k: &Matrix, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; k.cols()];
    for (i, &xi) in x.iter().enumerate() {
        for (o, kij) in out.iter_mut().zip(k.row(i)) {
            *o += kij * xi;
        }
    }
    out
}

fn scaling_loop(
    k: &GibbsKernel,
    i0: &[f64],
    i1: &[f64],
    iters: Iterations,
    exponent: f64,
) -> (f64, TransportPlan) {
    let kern = k.kernel();
    let n = i0.len();
    let update = |target: &[f64], applied: &[f64]| -> Vec<f64> {
        target
            .iter()
            .zip(applied)
            .map(|(&t, &a)| {
                let r = t / a.max(DIV_FLOOR);
                if exponent == 1.0 {
                    r
                } else {
                    r.powf(exponent)
                }
            })
            .collect()
    };
    let mut v = vec![1.0; n];
    let mut u = vec![0.0; n];
    let mut run = 0;
    for _ in 0..iters.max_iterations {
        u = update(i0, &kernel_apply(kern, &v));
        let next_v = update(i1, &kernel_apply_t(kern, &u));
        run += 1;
        let delta = next_v
            .iter()
            .zip(&v)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        v = next_v;
        if iters.tolerance.is_some_and(|tol| delta < tol) {
            break;
        }
    }
    let coupling = Matrix::from_fn(n, n, |i, j| u[i] * kern.get(i, j) * v[j]);
    let distance = coupling
        .data()
        .iter()
        .zip(k.cost().data())
        .map(|(g, c)| g * c)
        .sum();
    (
        distance,
        TransportPlan {
            coupling,
            u,
            v,
            iterations_run: run,
        },
    )
}

/// Balanced entropic transport cost `⟨C, Γ⟩` between two histograms of equal mass.
///
/// The coupling's rows follow `i0` and its columns follow `i1`; the column
/// marginal is exact after the final update.
pub fn sinkhorn_distance(
    k: &GibbsKernel,
    i0: &[f64],
    i1: &[f64],
    iterations: impl Into<Iterations>,
) -> Result<(f64, TransportPlan)> {
    let n = k.size();
    let m0 = check_histogram(i0, n, "i0")?;
    let m1 = check_histogram(i1, n, "i1")?;
    if (m0 - m1).abs() > 1e-8 * m0.max(m1) {
        return Err(Error::InvalidHistogram(format!(
            "balanced transport needs equal masses, got {m0} and {m1}"
        )));
    }
    let iters = iterations.into().validated()?;
    Ok(scaling_loop(k, i0, i1, iters, 1.0))
}

/// Unbalanced variant: each scaling update is raised to `ρ/(ρ+ε)`, so the
/// masses of `i0` and `i1` may differ.
pub fn sinkhorn_unbalanced_distance(
    k: &GibbsKernel,
    i0: &[f64],
    i1: &[f64],
    iterations: impl Into<Iterations>,
) -> Result<(f64, TransportPlan)> {
    let n = k.size();
    check_histogram(i0, n, "i0")?;
    check_histogram(i1, n, "i1")?;
    let iters = iterations.into().validated()?;
    Ok(scaling_loop(k, i0, i1, iters, k.exponent_uv))
}
