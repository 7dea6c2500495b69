use crate::error::{invalid, Result};
use crate::graph::DiffusionCost;
use crate::linalg::Matrix;

/// Gibbs kernel `K = exp(−C/ε)` together with the unbalanced scaling exponents.
#[derive(Clone, Debug)]
pub struct GibbsKernel {
    cost: Matrix,
    kernel: Matrix,
    epsilon: f64,
    rho: f64,
    /// `ρ / (ρ + ε)`, applied to every scaling update.
    pub exponent_uv: f64,
    /// `ε / (ε + ρ)`, inner exponent of the barycenter estimate.
    pub exponent_in: f64,
    /// `(ε + ρ) / ε`, outer exponent of the barycenter estimate.
    pub exponent_out: f64,
}

impl GibbsKernel {
    pub fn new(cost: Matrix, epsilon: f64, rho: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(invalid("epsilon", format!("must be positive, got {epsilon}")));
        }
        if !(rho > 0.0) {
            return Err(invalid("rho", format!("must be positive, got {rho}")));
        }
        if cost.rows() != cost.cols() {
            return Err(invalid("cost", "cost matrix must be square"));
        }
        let kernel = cost.map(|c| (-c / epsilon).exp());
        Ok(Self {
            cost,
            kernel,
            epsilon,
            rho,
            exponent_uv: rho / (rho + epsilon),
            exponent_in: epsilon / (epsilon + rho),
            exponent_out: (epsilon + rho) / epsilon,
        })
    }

    pub fn from_diffusion(cost: &DiffusionCost, epsilon: f64, rho: f64) -> Result<Self> {
        Self::new(cost.cost.clone(), epsilon, rho)
    }

    pub fn cost(&self) -> &Matrix {
        &self.cost
    }

    pub fn kernel(&self) -> &Matrix {
        &self.kernel
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn size(&self) -> usize {
        self.kernel.rows()
    }
}
