//! Reverse-mode gradients through an unrolled barycenter, checked against finite differences.

use node2coords::graph::{connectivity_descriptors, diffusion_cost, Graph};
use node2coords::linalg::{Tape, Tensor};
use node2coords::model::{decode, encode, loss, ModelParams};
use node2coords::ot::GibbsKernel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn objective(k: &GibbsKernel, z: &Tensor, e: &Tensor, d: &Tensor) -> node2coords::Result<Tensor> {
    let batch: Vec<usize> = (0..z.shape().0).collect();
    let patterns = encode(e, z)?;
    let out = decode(k, &patterns, d, &batch, 30)?;
    loss(&z.select_rows(&batch)?, &out.reconstructions)
}

fn main() -> node2coords::Result<()> {
    let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])?;
    let k = GibbsKernel::from_diffusion(&diffusion_cost(&g, 1)?, 0.5, 1.0)?;
    let z = Tensor::constant(connectivity_descriptors(&g, 1)?);
    let params = ModelParams::init(5, 2, &mut ChaCha8Rng::seed_from_u64(0))?;

    let tape = Tape::new();
    let e = tape.leaf(params.encoder.clone());
    let d = tape.leaf(params.decoder_logits.clone());
    let value = objective(&k, &z, &e, &d)?;
    let grads = value.backward()?;
    let analytic = grads.get(&e).unwrap().get(0, 0);

    let h = 1e-5;
    let shifted = |delta: f64| {
        let mut m = params.encoder.clone();
        m.set(0, 0, m.get(0, 0) + delta);
        let d = Tensor::constant(params.decoder_logits.clone());
        objective(&k, &z, &Tensor::constant(m), &d).map(|t| t.value().get(0, 0))
    };
    let numeric = (shifted(h)? - shifted(-h)?) / (2.0 * h);
    println!("loss {:.6}", value.value().get(0, 0));
    println!("dL/dE[0,0]: reverse mode {analytic:.8e}, central difference {numeric:.8e}");
    Ok(())
}
