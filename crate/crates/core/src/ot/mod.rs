//! Entropic optimal transport on a fixed ground cost.

mod barycenter;
mod kernel;
mod sinkhorn;

pub use barycenter::{barycenter_batched, barycenter_serial, BarycenterBatch};
pub use kernel::GibbsKernel;
pub use sinkhorn::{sinkhorn_distance, sinkhorn_unbalanced_distance, TransportPlan};

use crate::error::{invalid, Result};

/// Iteration budget for the scaling loops.
///
/// A tolerance stops the loop once the largest change of the tracked iterate
/// drops below it. Leave it unset whenever gradients are needed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Iterations {
    pub max_iterations: usize,
    pub tolerance: Option<f64>,
}

impl Iterations {
    pub fn fixed(n: usize) -> Self {
        Self {
            max_iterations: n,
            tolerance: None,
        }
    }

    pub fn until(max_iterations: usize, tolerance: f64) -> Self {
        Self {
            max_iterations,
            tolerance: Some(tolerance),
        }
    }

    pub(crate) fn validated(self) -> Result<Self> {
        if self.max_iterations == 0 {
            return Err(invalid("iterations", "need at least one iteration"));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(invalid("tolerance", "must be positive"));
            }
        }
        Ok(self)
    }
}

impl From<usize> for Iterations {
    fn from(n: usize) -> Self {
        Self::fixed(n)
    }
}
