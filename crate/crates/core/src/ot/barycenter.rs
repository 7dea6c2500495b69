use super::sinkhorn::{check_histogram, kernel_apply, kernel_apply_t};
use super::{GibbsKernel, Iterations};
use crate::error::{invalid, Error, Result};
use crate::linalg::{Matrix, Tensor, DIV_FLOOR};

const SIMPLEX_TOL: f64 = 1e-8;

fn check_simplex(lambda: &[f64], context: &str) -> Result<()> {
    let sum: f64 = lambda.iter().sum();
    if lambda.iter().any(|&l| !(l >= -SIMPLEX_TOL) || !l.is_finite()) || (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(invalid(
            "lambda",
            format!("{context} is not on the probability simplex (sum {sum})"),
        ));
    }
    Ok(())
}

fn pow_if(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else {
        x.powf(e)
    }
}

/// Unbalanced Wasserstein barycenter of `patterns` with weights `lambda`,
/// one pattern at a time.
pub fn barycenter_serial(
    k: &GibbsKernel,
    patterns: &[Vec<f64>],
    lambda: &[f64],
    iterations: impl Into<Iterations>,
) -> Result<Vec<f64>> {
    let n = k.size();
    if patterns.is_empty() {
        return Err(Error::Empty("patterns"));
    }
    if patterns.len() != lambda.len() {
        return Err(invalid(
            "lambda",
            format!("{} weights for {} patterns", lambda.len(), patterns.len()),
        ));
    }
    check_simplex(lambda, "weight vector")?;
    for (s, p) in patterns.iter().enumerate() {
        check_histogram(p, n, &format!("pattern {s}"))?;
    }
    let iters = iterations.into().validated()?;
    let kern = k.kernel();
    let (a, beta, inv_beta) = (k.exponent_uv, k.exponent_in, k.exponent_out);
    let mut u = vec![vec![1.0; n]; patterns.len()];
    let mut v = vec![vec![0.0; n]; patterns.len()];
    let mut b = vec![0.0; n];
    for _ in 0..iters.max_iterations {
        let mut kv = Vec::with_capacity(patterns.len());
        for (s, p) in patterns.iter().enumerate() {
            let ktu = kernel_apply_t(kern, &u[s]);
            v[s] = p
                .iter()
                .zip(&ktu)
                .map(|(&m, &d)| pow_if(m / d.max(DIV_FLOOR), a))
                .collect();
            kv.push(kernel_apply(kern, &v[s]));
        }
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let acc: f64 = (0..patterns.len())
                    .map(|s| lambda[s] * pow_if(u[s][i] * kv[s][i], beta))
                    .sum();
                pow_if(acc, inv_beta)
            })
            .collect();
        for (us, kvs) in u.iter_mut().zip(&kv) {
            for ((ui, &bi), &d) in us.iter_mut().zip(&next).zip(kvs) {
                *ui = pow_if(bi / d.max(DIV_FLOOR), a);
            }
        }
        let delta = next.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        b = next;
        if iters.tolerance.is_some_and(|tol| delta < tol) {
            break;
        }
    }
    Ok(b)
}

/// Result of a batched barycenter computation.
#[derive(Clone, Debug)]
pub struct BarycenterBatch {
    /// J×N; row `j` is the barycenter for weight row `j`.
    pub barycenters: Tensor,
    /// Final N×(J·S) scalings; column `j·S + k` belongs to barycenter `j`, pattern `k`.
    pub u: Matrix,
    pub v: Matrix,
    pub iterations_run: usize,
}

impl BarycenterBatch {
    /// Barycenters as the columns of an N×J matrix.
    pub fn as_columns(&self) -> Matrix {
        self.barycenters.value().transpose()
    }
}

/// `J` barycenters of the same `S` patterns computed together.
///
/// `patterns` is N×S (one histogram per column) and `weights` is J×S with rows
/// on the simplex. Every iteration is recorded on the tape when either input
/// is tracked; early stopping is refused in that case.
pub fn barycenter_batched(
    k: &GibbsKernel,
    patterns: &Tensor,
    weights: &Tensor,
    iterations: impl Into<Iterations>,
) -> Result<BarycenterBatch> {
    let n = k.size();
    let (pn, s) = patterns.shape();
    let (j, ws) = weights.shape();
    if pn != n || ws != s {
        return Err(Error::Shape {
            op: "barycenter_batched",
            left: (pn, s),
            right: (j, ws),
        });
    }
    if s == 0 || j == 0 {
        return Err(Error::Empty("patterns or weights"));
    }
    for row in 0..j {
        check_simplex(weights.value().row(row), &format!("weight row {row}"))?;
    }
    if let Some(bad) = patterns
        .value()
        .data()
        .iter()
        .find(|x| !(**x >= 0.0) || !x.is_finite())
    {
        return Err(Error::InvalidHistogram(format!(
            "pattern entry {bad} is negative or not finite"
        )));
    }
    let iters = iterations.into().validated()?;
    if iters.tolerance.is_some() && (patterns.is_tracked() || weights.is_tracked()) {
        return Err(invalid(
            "iterations",
            "early stopping is only available when no gradient is recorded",
        ));
    }
    let kern = Tensor::constant(k.kernel().clone());
    let (a, beta, inv_beta) = (k.exponent_uv, k.exponent_in, k.exponent_out);
    let tiled = patterns.tile_cols(j);
    let mut u = Tensor::constant(Matrix::ones(n, j * s));
    let mut v = Tensor::constant(Matrix::zeros(n, j * s));
    let mut bary: Option<Tensor> = None;
    let mut run = 0;
    for _ in 0..iters.max_iterations {
        let ktu = kern.transpose_matmul(&u)?;
        v = tiled.ratio_pow(&ktu, a)?;
        let kv = kern.matmul(&v)?;
        let w = u.mul_pow(&kv, beta)?;
        let b = w.group_weighted_sum(weights)?.pow(inv_beta);
        u = b.repeat_cols_each(s).ratio_pow(&kv, a)?;
        run += 1;
        let delta = match &bary {
            Some(prev) => prev
                .value()
                .data()
                .iter()
                .zip(b.value().data())
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())),
            None => f64::INFINITY,
        };
        bary = Some(b);
        if iters.tolerance.is_some_and(|tol| delta < tol) {
            break;
        }
    }
    let bary = bary.expect("at least one iteration");
    Ok(BarycenterBatch {
        barycenters: bary.transpose(),
        u: u.value().clone(),
        v: v.value().clone(),
        iterations_run: run,
    })
}
