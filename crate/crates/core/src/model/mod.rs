//! The autoencoder: softmax encoder, barycentric decoder and normalized loss.

mod checkpoint;

pub use checkpoint::Checkpoint;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::linalg::{Matrix, Tensor};
use crate::ot::{barycenter_batched, GibbsKernel};

/// Trainable parameters: encoder weights `E` and decoder logits `Δ`, both N×S.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub encoder: Matrix,
    pub decoder_logits: Matrix,
}

impl ModelParams {
    pub fn new(encoder: Matrix, decoder_logits: Matrix) -> Result<Self> {
        if encoder.shape() != decoder_logits.shape() {
            return Err(Error::Shape {
                op: "ModelParams::new",
                left: encoder.shape(),
                right: decoder_logits.shape(),
            });
        }
        if encoder.cols() == 0 || encoder.rows() == 0 {
            return Err(Error::Empty("model parameters"));
        }
        Ok(Self {
            encoder,
            decoder_logits,
        })
    }

    /// Entries i.i.d. uniform on `[−0.5/√S, 0.5/√S]`.
    pub fn init(n_nodes: usize, latent_dim: usize, rng: &mut impl Rng) -> Result<Self> {
        let e = Self::init_logits(n_nodes, latent_dim, rng)?;
        let d = Self::init_logits(n_nodes, latent_dim, rng)?;
        Self::new(e, d)
    }

    pub(crate) fn init_logits(n: usize, s: usize, rng: &mut impl Rng) -> Result<Matrix> {
        if n == 0 || s == 0 {
            return Err(Error::Empty("model parameters"));
        }
        let bound = 0.5 / (s as f64).sqrt();
        Ok(Matrix::from_fn(n, s, |_, _| rng.gen_range(-bound..=bound)))
    }

    pub fn n_nodes(&self) -> usize {
        self.encoder.rows()
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.cols()
    }

    /// Errors unless the parameters fit a graph with `n_nodes` nodes.
    pub fn check_nodes(&self, n_nodes: usize) -> Result<()> {
        if self.n_nodes() != n_nodes {
            return Err(invalid(
                "params",
                format!(
                    "parameters have {} rows, graph has {n_nodes} nodes",
                    self.n_nodes()
                ),
            ));
        }
        Ok(())
    }
}

/// Patterns `M_S = softmax(Z_n E)`, normalized over the node axis.
pub fn encode(encoder: &Tensor, descriptors: &Tensor) -> Result<Tensor> {
    Ok(descriptors.matmul(encoder)?.softmax_cols())
}

/// Output of [`decode`] for a batch of nodes, one row per batch entry.
pub struct Decoded {
    /// J×N reconstructions `Ẑ_n(i, ·)`.
    pub reconstructions: Tensor,
    /// J×S coordinates `Λ(i, ·)`.
    pub coordinates: Tensor,
}

/// Reconstructs the descriptor rows of `batch` as barycenters of the patterns.
pub fn decode(
    k: &GibbsKernel,
    patterns: &Tensor,
    decoder_logits: &Tensor,
    batch: &[usize],
    iterations: usize,
) -> Result<Decoded> {
    if batch.is_empty() {
        return Err(Error::Empty("batch"));
    }
    let coordinates = decoder_logits.select_rows(batch)?.softmax_rows();
    let out = barycenter_batched(k, patterns, &coordinates, iterations)?;
    Ok(Decoded {
        reconstructions: out.barycenters,
        coordinates,
    })
}

/// `‖Z − Ẑ‖²_F / ‖Z‖²_F` over the rows given.
pub fn loss(target: &Tensor, reconstruction: &Tensor) -> Result<Tensor> {
    let norm: f64 = target.value().data().iter().map(|x| x * x).sum();
    if norm == 0.0 {
        return Err(invalid("target", "descriptor rows have zero norm"));
    }
    let diff = reconstruction.sub(target)?;
    Ok(diff.mul(&diff)?.sum_all().scale(1.0 / norm))
}

/// Full-graph embedding produced from a set of parameters.
#[derive(Clone, Debug)]
pub struct EmbeddingResult {
    /// N×S, columns on the simplex.
    pub patterns: Matrix,
    /// N×S, rows on the simplex.
    pub coordinates: Matrix,
    /// N×N.
    pub reconstructions: Matrix,
    pub final_loss: f64,
}

/// Decodes every node at once using patterns that are already computed.
pub fn embed_with_patterns(
    k: &GibbsKernel,
    descriptors: &Matrix,
    patterns: &Matrix,
    decoder_logits: &Matrix,
    iterations: usize,
) -> Result<EmbeddingResult> {
    let n = descriptors.rows();
    let all: Vec<usize> = (0..n).collect();
    let patterns_t = Tensor::constant(patterns.clone());
    let out = decode(
        k,
        &patterns_t,
        &Tensor::constant(decoder_logits.clone()),
        &all,
        iterations,
    )?;
    let l = loss(&Tensor::constant(descriptors.clone()), &out.reconstructions)?;
    Ok(EmbeddingResult {
        patterns: patterns.clone(),
        coordinates: out.coordinates.value().clone(),
        reconstructions: out.reconstructions.value().clone(),
        final_loss: l.value().get(0, 0),
    })
}

/// Encodes and decodes every node without recording gradients.
pub fn embed(
    k: &GibbsKernel,
    descriptors: &Matrix,
    params: &ModelParams,
    iterations: usize,
) -> Result<EmbeddingResult> {
    params.check_nodes(descriptors.rows())?;
    let patterns = encode(
        &Tensor::constant(params.encoder.clone()),
        &Tensor::constant(descriptors.clone()),
    )?;
    embed_with_patterns(
        k,
        descriptors,
        patterns.value(),
        &params.decoder_logits,
        iterations,
    )
}

/// Places the rows of patterns learned on a subgraph at the subgraph's node
/// positions in a graph of `n_full` nodes; all other rows are zero.
pub fn upsample_patterns(patterns: &Matrix, kept: &[usize], n_full: usize) -> Result<Matrix> {
    if kept.len() != patterns.rows() {
        return Err(invalid(
            "kept",
            format!("{} indices for {} pattern rows", kept.len(), patterns.rows()),
        ));
    }
    let mut out = Matrix::zeros(n_full, patterns.cols());
    for (r, &i) in kept.iter().enumerate() {
        if i >= n_full {
            return Err(Error::NodeOutOfRange {
                index: i,
                n_nodes: n_full,
            });
        }
        out.row_mut(i).copy_from_slice(patterns.row(r));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ot::barycenter_serial;

    #[test]
    fn zero_encoder_gives_uniform_patterns() {
        let z = Tensor::constant(Matrix::filled(4, 4, 0.25));
        let m = encode(&Tensor::constant(Matrix::zeros(4, 3)), &z).unwrap();
        assert!(m.value().data().iter().all(|&x| (x - 0.25).abs() < 1e-15));
    }

    #[test]
    fn huge_encoder_entry_saturates() {
        let z = Matrix::from_rows(&[[0.0, 1.0, 0.0], [0.5, 0.0, 0.5], [0.0, 1.0, 0.0]]).unwrap();
        let mut e = Matrix::zeros(3, 2);
        e.set(2, 1, 100.0);
        let m = encode(&Tensor::constant(e), &Tensor::constant(z)).unwrap();
        let col: Vec<f64> = m.value().col(1);
        let arg = (0..3).max_by(|&a, &b| col[a].total_cmp(&col[b])).unwrap();
        assert_eq!(arg, 1);
    }

    #[test]
    fn loss_examples() {
        let z = Tensor::constant(Matrix::identity(2));
        assert_eq!(loss(&z, &z).unwrap().value().get(0, 0), 0.0);
        let zero = Tensor::constant(Matrix::zeros(2, 2));
        assert_eq!(loss(&z, &zero).unwrap().value().get(0, 0), 1.0);
        let half = Tensor::constant(Matrix::filled(2, 2, 0.5));
        assert!((loss(&z, &half).unwrap().value().get(0, 0) - 0.5).abs() < 1e-15);
        assert!(loss(&zero, &z).is_err());
    }

    #[test]
    fn saturated_logits_pick_one_pattern() {
        let n = 4;
        let c = Matrix::from_fn(n, n, |i, j| (i as f64 - j as f64).abs());
        let k = GibbsKernel::new(c, 0.5, 0.3).unwrap();
        let p = Matrix::from_rows(&[[0.1, 0.4], [0.2, 0.3], [0.3, 0.2], [0.4, 0.1]]).unwrap();
        let delta = Matrix::from_rows(&[[20.0, -20.0]]).unwrap();
        let out = decode(&k, &p.clone().into(), &delta.into(), &[0], 50).unwrap();
        let lam = out.coordinates.value();
        assert!((lam.get(0, 0) - 1.0).abs() < 1e-15);
        let reference = barycenter_serial(&k, &[p.col(0), p.col(1)], &[1.0, 0.0], 50).unwrap();
        for (a, b) in out.reconstructions.value().row(0).iter().zip(&reference) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_logits_give_uniform_coordinates() {
        let k = GibbsKernel::new(Matrix::zeros(3, 3), 0.5, 1.0).unwrap();
        let p = Matrix::filled(3, 2, 1.0 / 3.0);
        let out = decode(&k, &p.into(), &Matrix::zeros(3, 2).into(), &[0, 2], 5).unwrap();
        assert_eq!(out.coordinates.value(), &Matrix::filled(2, 2, 0.5));
        assert!(decode(
            &k,
            &Matrix::filled(3, 2, 1.0 / 3.0).into(),
            &Matrix::zeros(3, 2).into(),
            &[3],
            5
        )
        .is_err());
    }

    #[test]
    fn upsampling_pads_with_zeros() {
        let p = Matrix::from_rows(&[[0.5, 0.2], [0.5, 0.8]]).unwrap();
        let up = upsample_patterns(&p, &[1, 3], 4).unwrap();
        assert_eq!(up.row(0), &[0.0, 0.0]);
        assert_eq!(up.row(1), &[0.5, 0.2]);
        assert_eq!(up.row(3), &[0.5, 0.8]);
        assert_eq!(up.col_sums(), vec![1.0, 1.0]);
        assert!(upsample_patterns(&p, &[1, 4], 4).is_err());
    }

    #[test]
    fn params_shape_mismatch() {
        assert!(ModelParams::new(Matrix::zeros(3, 2), Matrix::zeros(3, 3)).is_err());
        let mut rng = rand::rngs::mock::StepRng::new(0, 1 << 40);
        let p = ModelParams::init(5, 4, &mut rng).unwrap();
        assert!(p.encoder.max_abs() <= 0.25);
        assert!(p.check_nodes(6).is_err());
    }
}
