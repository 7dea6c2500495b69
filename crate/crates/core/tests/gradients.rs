mod common;

use node2coords::graph::{connectivity_descriptors, diffusion_cost};
use node2coords::linalg::{Matrix, Tape, Tensor};
use node2coords::model::{decode, encode, loss};
use node2coords::ot::{barycenter_batched, GibbsKernel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-5;

fn random(rows: usize, cols: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(lo..hi))
}

/// Largest-entry relative error between the tape gradient and central differences,
/// one value per input.
fn gradient_errors(inputs: &[Matrix], f: impl Fn(&[Tensor]) -> Tensor) -> Vec<f64> {
    let tape = Tape::new();
    let leaves: Vec<Tensor> = inputs.iter().map(|m| tape.leaf(m.clone())).collect();
    let out = f(&leaves);
    assert_eq!(out.shape(), (1, 1));
    let grads = out.backward().unwrap();
    let eval = |ms: &[Matrix]| {
        let ts: Vec<Tensor> = ms.iter().map(|m| Tensor::constant(m.clone())).collect();
        f(&ts).value().get(0, 0)
    };
    let mut errors = Vec::new();
    for (idx, leaf) in leaves.iter().enumerate() {
        let analytic = grads
            .get(leaf)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(inputs[idx].rows(), inputs[idx].cols()));
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for r in 0..inputs[idx].rows() {
            for c in 0..inputs[idx].cols() {
                let mut plus = inputs.to_vec();
                let mut minus = inputs.to_vec();
                plus[idx].set(r, c, inputs[idx].get(r, c) + STEP);
                minus[idx].set(r, c, inputs[idx].get(r, c) - STEP);
                let fd = (eval(&plus) - eval(&minus)) / (2.0 * STEP);
                worst = worst.max((fd - analytic.get(r, c)).abs());
                scale = scale.max(fd.abs()).max(analytic.get(r, c).abs());
            }
        }
        errors.push(if scale > 0.0 { worst / scale } else { worst });
    }
    errors
}

/// Scalarises `t` with fixed random weights so every output entry contributes.
fn weighted(t: &Tensor, seed: u64) -> Tensor {
    let (r, c) = t.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Tensor::constant(random(r, c, -1.0, 1.0, &mut rng));
    t.mul(&w).unwrap().sum_all()
}

fn assert_close(name: &str, inputs: &[Matrix], f: impl Fn(&[Tensor]) -> Tensor) {
    for (i, e) in gradient_errors(inputs, f).into_iter().enumerate() {
        assert!(e <= 1e-5, "{name}: input {i} relative error {e:e}");
    }
}

#[test]
fn matmul_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random(3, 4, -1.0, 1.0, &mut rng);
    let b = random(4, 2, -1.0, 1.0, &mut rng);
    let c = random(3, 2, -1.0, 1.0, &mut rng);
    assert_close("matmul", &[a.clone(), b.clone()], |x| {
        weighted(&x[0].matmul(&x[1]).unwrap(), 2)
    });
    assert_close("transpose_matmul", &[a.clone(), c], |x| {
        weighted(&x[0].transpose_matmul(&x[1]).unwrap(), 3)
    });
    assert_close("transpose", &[a], |x| weighted(&x[0].transpose(), 4));
}

#[test]
fn elementwise_binary() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random(3, 3, 0.5, 2.0, &mut rng);
    let b = random(3, 3, 0.5, 2.0, &mut rng);
    let pair = [a, b];
    assert_close("add", &pair, |x| weighted(&x[0].add(&x[1]).unwrap(), 6));
    assert_close("sub", &pair, |x| weighted(&x[0].sub(&x[1]).unwrap(), 7));
    assert_close("mul", &pair, |x| weighted(&x[0].mul(&x[1]).unwrap(), 8));
    assert_close("div", &pair, |x| weighted(&x[0].div(&x[1]).unwrap(), 9));
    assert_close("ratio_pow", &pair, |x| {
        weighted(&x[0].ratio_pow(&x[1], 0.625).unwrap(), 10)
    });
    assert_close("mul_pow", &pair, |x| {
        weighted(&x[0].mul_pow(&x[1], 0.375).unwrap(), 11)
    });
    assert_close("mul_pow_large", &pair, |x| {
        weighted(&x[0].mul_pow(&x[1], 2.6667).unwrap(), 12)
    });
}

#[test]
fn elementwise_unary() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let a = [random(2, 5, 0.5, 2.0, &mut rng)];
    assert_close("scale", &a, |x| weighted(&x[0].scale(-1.7), 14));
    assert_close("add_scalar", &a, |x| weighted(&x[0].add_scalar(0.3), 15));
    assert_close("pow", &a, |x| weighted(&x[0].pow(1.6), 16));
    assert_close("pow_small", &a, |x| weighted(&x[0].pow(0.375), 17));
    assert_close("exp", &a, |x| weighted(&x[0].exp(), 18));
    assert_close("log", &a, |x| weighted(&x[0].log(), 19));
}

#[test]
fn reductions_and_broadcasts() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let a = [random(3, 4, -1.0, 1.0, &mut rng)];
    assert_close("sum_all", &a, |x| x[0].sum_all().scale(2.0));
    assert_close("sum_rows", &a, |x| weighted(&x[0].sum_rows(), 21));
    assert_close("sum_cols", &a, |x| weighted(&x[0].sum_cols(), 22));
    assert_close("flatten_row", &a, |x| weighted(&x[0].flatten_row(), 23));
    assert_close("repeat_cols_each", &a, |x| {
        weighted(&x[0].repeat_cols_each(3), 24)
    });
    assert_close("tile_cols", &a, |x| weighted(&x[0].tile_cols(2), 25));
    assert_close("select_rows", &a, |x| {
        weighted(&x[0].select_rows(&[2, 0, 2, 1]).unwrap(), 26)
    });
    let col = [random(3, 1, -1.0, 1.0, &mut rng)];
    assert_close("broadcast_col", &col, |x| {
        weighted(&x[0].broadcast_col(4).unwrap(), 27)
    });
    let row = [random(1, 3, -1.0, 1.0, &mut rng)];
    assert_close("broadcast_row", &row, |x| {
        weighted(&x[0].broadcast_row(5).unwrap(), 28)
    });
}

#[test]
fn grouped_sum_and_softmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let x = random(4, 6, -1.0, 1.0, &mut rng);
    let w = random(2, 3, 0.0, 1.0, &mut rng);
    assert_close("group_weighted_sum", &[x.clone(), w], |t| {
        weighted(&t[0].group_weighted_sum(&t[1]).unwrap(), 30)
    });
    assert_close("softmax_cols", &[x.clone()], |t| {
        weighted(&t[0].softmax_cols(), 31)
    });
    assert_close("softmax_rows", &[x], |t| weighted(&t[0].softmax_rows(), 32));
}

#[test]
fn composed_expression_reuses_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let a = random(3, 3, 0.5, 1.5, &mut rng);
    let b = random(3, 3, 0.5, 1.5, &mut rng);
    assert_close("composed", &[a, b], |x| {
        let p = x[0].matmul(&x[1]).unwrap();
        let q = p.mul(&x[0]).unwrap().div(&x[1].add_scalar(1.0)).unwrap();
        weighted(&q.add(&x[0]).unwrap().log(), 34)
    });
}

fn small_problem(n: usize, seed: u64, eps: f64, rho: f64) -> (GibbsKernel, Matrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = common::random_connected_graph(n, 0.4, &mut rng);
    let cost = diffusion_cost(&g, 1).unwrap();
    let k = GibbsKernel::from_diffusion(&cost, eps, rho).unwrap();
    (k, connectivity_descriptors(&g, 1).unwrap())
}

#[test]
fn barycenter_gradients() {
    let (k, _) = small_problem(5, 40, 0.5, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let patterns = random(5, 3, 0.0, 1.0, &mut rng);
    let weights = random(2, 3, 0.0, 1.0, &mut rng);
    assert_close("barycenter", &[patterns, weights], |x| {
        let p = x[0].softmax_cols();
        let w = x[1].softmax_rows();
        weighted(&barycenter_batched(&k, &p, &w, 20).unwrap().barycenters, 42)
    });
}

#[test]
fn end_to_end_model_gradients() {
    for seed in 0..3 {
        let (k, z) = small_problem(6, 100 + seed, 0.5, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
        let e = random(6, 2, -0.5, 0.5, &mut rng);
        let delta = random(6, 2, -0.5, 0.5, &mut rng);
        let zt = Tensor::constant(z.clone());
        let batch = [4, 1, 3];
        let target = Tensor::constant(z.select_rows(&batch));
        assert_close("model", &[e, delta], |x| {
            let patterns = encode(&x[0], &zt).unwrap();
            let out = decode(&k, &patterns, &x[1], &batch, 30).unwrap();
            loss(&target, &out.reconstructions).unwrap()
        });
    }
}
