use rayon::prelude::*;
use serde::Serialize;

use super::classify::{classify_splits, mean_scores};
use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::train::{fit, TrainConfig};

/// One row of the ε-sensitivity table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    /// Mean accuracy in percent over the classification splits.
    pub accuracy: f64,
    pub macro_f1: f64,
    pub final_loss: f64,
}

/// Classification protocol applied to the coordinates of each sweep cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitProtocol {
    pub train_ratio: f64,
    pub n_splits: usize,
    pub seed: u64,
    pub l2: f64,
}

impl Default for SplitProtocol {
    fn default() -> Self {
        Self {
            train_ratio: 0.8,
            n_splits: 10,
            seed: 0,
            l2: super::DEFAULT_L2,
        }
    }
}

/// Trains one model per ε (all other settings from `template`) and
/// classifies the nodes of `g` from the learned coordinates.
pub fn epsilon_sensitivity_sweep(
    g: &Graph,
    template: &TrainConfig,
    epsilons: &[f64],
    protocol: &SplitProtocol,
) -> Result<Vec<EpsilonRow>> {
    let labels = g
        .labels()
        .ok_or_else(|| invalid("labels", "the ε sweep needs node labels"))?;
    epsilons
        .par_iter()
        .map(|&epsilon| {
            let cfg = TrainConfig {
                epsilon,
                ..template.clone()
            };
            let out = fit(g, &cfg)?;
            let reports = classify_splits(
                &out.embedding.coordinates,
                labels,
                protocol.train_ratio,
                protocol.n_splits,
                protocol.seed,
                protocol.l2,
            )?;
            let (macro_f1, accuracy) = mean_scores(&reports);
            Ok(EpsilonRow {
                epsilon,
                accuracy,
                macro_f1,
                final_loss: out.embedding.final_loss,
            })
        })
        .collect()
}
