//! SGD training of the autoencoder and coordinate fitting on new graphs.

mod config;

pub use config::{TrainConfig, MIN_EPSILON};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{connectivity_descriptors, diffusion_cost, Graph};
use crate::linalg::{Matrix, Tape, Tensor};
use crate::model::{decode, embed, embed_with_patterns, encode, loss, EmbeddingResult, ModelParams};
use crate::ot::GibbsKernel;

/// Epochs over which the loss must improve before training stops early.
pub const STOP_WINDOW: usize = 20;
/// Improvement over [`STOP_WINDOW`] epochs below which training stops.
pub const STOP_TOLERANCE: f64 = 1e-6;

/// Output of [`fit`].
#[derive(Clone, Debug)]
pub struct FitResult {
    pub params: ModelParams,
    pub embedding: EmbeddingResult,
    /// Mean batch loss of every completed epoch.
    pub losses: Vec<f64>,
}

/// Output of [`fit_coordinates`].
#[derive(Clone, Debug)]
pub struct TransferResult {
    pub decoder_logits: Matrix,
    pub embedding: EmbeddingResult,
    pub losses: Vec<f64>,
}

/// Kernel and descriptors of a graph under a config.
pub fn prepare(g: &Graph, cfg: &TrainConfig) -> Result<(GibbsKernel, Matrix)> {
    cfg.validate_for(g.n_nodes())?;
    let cost = diffusion_cost(g, cfg.tau)?;
    let k = GibbsKernel::from_diffusion(&cost, cfg.epsilon, cfg.rho)?;
    let z = connectivity_descriptors(g, cfg.n)?;
    Ok((k, z))
}

/// True when the best epoch loss has not improved by `STOP_TOLERANCE` within
/// the last `STOP_WINDOW` epochs.
fn converged(losses: &[f64]) -> bool {
    let n = losses.len();
    if n <= STOP_WINDOW {
        return false;
    }
    let best = |l: &[f64]| l.iter().copied().fold(f64::INFINITY, f64::min);
    best(&losses[..n - STOP_WINDOW]) - best(&losses[n - STOP_WINDOW..]) < STOP_TOLERANCE
}

/// Runs the epoch loop. `step` takes one batch and returns its loss.
fn sgd_epochs(
    cfg: &TrainConfig,
    n_nodes: usize,
    rng: &mut ChaCha8Rng,
    mut step: impl FnMut(&[usize]) -> Result<f64>,
) -> Result<Vec<f64>> {
    let mut order: Vec<usize> = (0..n_nodes).collect();
    let mut losses = Vec::with_capacity(cfg.epochs);
    let mut step_index = 0;
    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        let mut total = 0.0;
        let mut count = 0;
        for batch in order.chunks(cfg.batch_size) {
            let l = step(batch)?;
            if !l.is_finite() {
                return Err(Error::NonFiniteLoss {
                    step: step_index,
                    config: cfg.to_string(),
                });
            }
            total += l;
            count += 1;
            step_index += 1;
        }
        losses.push(total / count as f64);
        if converged(&losses) {
            break;
        }
    }
    Ok(losses)
}

/// Trains encoder and decoder on `g` from a seeded random initialization.
pub fn fit(g: &Graph, cfg: &TrainConfig) -> Result<FitResult> {
    let (k, z) = prepare(g, cfg)?;
    fit_prepared(&k, &z, cfg)
}

/// [`fit`] with the kernel and descriptors supplied by the caller.
pub fn fit_prepared(k: &GibbsKernel, z: &Matrix, cfg: &TrainConfig) -> Result<FitResult> {
    let n = z.rows();
    cfg.validate_for(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = ModelParams::init(n, cfg.s, &mut rng)?;
    let descriptors = Tensor::constant(z.clone());
    let losses = sgd_epochs(cfg, n, &mut rng, |batch| {
        let tape = Tape::new();
        let e = tape.leaf(params.encoder.clone());
        let d = tape.leaf(params.decoder_logits.clone());
        let patterns = encode(&e, &descriptors)?;
        let out = decode(k, &patterns, &d, batch, cfg.sinkhorn_iters)?;
        let target = Tensor::constant(z.select_rows(batch));
        let l = loss(&target, &out.reconstructions)?;
        let grads = l.backward()?;
        if let Some(ge) = grads.get(&e) {
            params.encoder.axpy(-cfg.lr, ge);
        }
        if let Some(gd) = grads.get(&d) {
            params.decoder_logits.axpy(-cfg.lr, gd);
        }
        Ok(l.value().get(0, 0))
    })?;
    let embedding = embed(k, z, &params, cfg.sinkhorn_iters)?;
    Ok(FitResult {
        params,
        embedding,
        losses,
    })
}

/// Fits coordinates of the nodes of `g_new` against frozen patterns.
///
/// The decoder logits start from a fresh seeded initialization and are the
/// only trained quantity.
pub fn fit_coordinates(g_new: &Graph, patterns: &Matrix, cfg: &TrainConfig) -> Result<TransferResult> {
    if patterns.rows() != g_new.n_nodes() {
        return Err(Error::Shape {
            op: "fit_coordinates",
            left: patterns.shape(),
            right: (g_new.n_nodes(), g_new.n_nodes()),
        });
    }
    let cfg = TrainConfig {
        s: patterns.cols(),
        ..cfg.clone()
    };
    let (k, z) = prepare(g_new, &cfg)?;
    fit_coordinates_prepared(&k, &z, patterns, &cfg)
}

/// [`fit_coordinates`] with the kernel and descriptors supplied by the caller.
pub fn fit_coordinates_prepared(
    k: &GibbsKernel,
    z: &Matrix,
    patterns: &Matrix,
    cfg: &TrainConfig,
) -> Result<TransferResult> {
    let n = z.rows();
    cfg.validate_for(n)?;
    if patterns.rows() != n {
        return Err(Error::Shape {
            op: "fit_coordinates",
            left: patterns.shape(),
            right: z.shape(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut logits = ModelParams::init_logits(n, patterns.cols(), &mut rng)?;
    let frozen = Tensor::constant(patterns.clone());
    let losses = sgd_epochs(cfg, n, &mut rng, |batch| {
        let tape = Tape::new();
        let d = tape.leaf(logits.clone());
        let out = decode(k, &frozen, &d, batch, cfg.sinkhorn_iters)?;
        let target = Tensor::constant(z.select_rows(batch));
        let l = loss(&target, &out.reconstructions)?;
        let grads = l.backward()?;
        if let Some(gd) = grads.get(&d) {
            logits.axpy(-cfg.lr, gd);
        }
        Ok(l.value().get(0, 0))
    })?;
    let embedding = embed_with_patterns(k, z, patterns, &logits, cfg.sinkhorn_iters)?;
    Ok(TransferResult {
        decoder_logits: logits,
        embedding,
        losses,
    })
}
