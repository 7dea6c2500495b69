//! Reverse-mode differentiation over dense matrices.
//!
//! A [`Tape`] records every operation applied to tracked [`Tensor`]s. Nodes are
//! appended in evaluation order, so the tape itself is a topological order and
//! the backward sweep is a single reverse pass. Operations whose inputs are all
//! untracked produce untracked results and record nothing, which keeps
//! inference passes free of tape memory.
//!
//! ```
//! use node2coords::linalg::{Matrix, Tape};
//!
//! let tape = Tape::new();
//! let x = tape.leaf(Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap());
//! let loss = x.mul(&x).unwrap().sum_all().scale(0.5);
//! let grads = loss.backward().unwrap();
//! assert_eq!(grads.get(&x).unwrap(), x.value());
//! ```

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Floor applied to every denominator before division.
pub const DIV_FLOOR: f64 = 1e-30;

type BackwardFn = Box<dyn Fn(&Matrix, &[bool]) -> Vec<Option<Matrix>>>;

struct Node {
    parents: Vec<Option<usize>>,
    backward: Option<BackwardFn>,
}

/// Recording of tracked operations. Cloning yields another handle to the same tape.
#[derive(Clone, Default)]
pub struct Tape {
    nodes: Rc<RefCell<Vec<Node>>>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a trainable input.
    pub fn leaf(&self, value: Matrix) -> Tensor {
        let id = self.push(Node {
            parents: Vec::new(),
            backward: None,
        });
        Tensor {
            value: Rc::new(value),
            node: Some((self.clone(), id)),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, node: Node) -> usize {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(node);
        nodes.len() - 1
    }

    fn same(&self, other: &Tape) -> bool {
        Rc::ptr_eq(&self.nodes, &other.nodes)
    }

    fn backward(&self, root: usize) -> Gradients {
        let nodes = self.nodes.borrow();
        let mut grads: Vec<Option<Matrix>> = Vec::with_capacity(root + 1);
        grads.resize_with(root + 1, || None);
        grads[root] = Some(Matrix::ones(1, 1));
        let mut leaves = HashMap::new();
        for id in (0..=root).rev() {
            let Some(g) = grads[id].take() else { continue };
            let node = &nodes[id];
            let Some(f) = &node.backward else {
                leaves.insert(id, g);
                continue;
            };
            let mask: Vec<bool> = node.parents.iter().map(Option::is_some).collect();
            for (parent, pg) in node.parents.iter().zip(f(&g, &mask)) {
                if let (Some(p), Some(pg)) = (parent, pg) {
                    match &mut grads[*p] {
                        Some(acc) => acc.add_assign(&pg),
                        slot => *slot = Some(pg),
                    }
                }
            }
        }
        Gradients {
            tape: self.clone(),
            grads: leaves,
        }
    }
}

/// Gradients of a scalar with respect to the leaves that influenced it.
pub struct Gradients {
    tape: Tape,
    grads: HashMap<usize, Matrix>,
}

impl Gradients {
    /// `None` when `leaf` did not participate in the computation.
    pub fn get(&self, leaf: &Tensor) -> Option<&Matrix> {
        let (tape, id) = leaf.node.as_ref()?;
        if !tape.same(&self.tape) {
            return None;
        }
        self.grads.get(id)
    }

    pub fn len(&self) -> usize {
        self.grads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grads.is_empty()
    }
}

/// A matrix value, optionally participating in a tape.
#[derive(Clone)]
pub struct Tensor {
    value: Rc<Matrix>,
    node: Option<(Tape, usize)>,
}

impl std::fmt::Debug for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tensor")
            .field("tracked", &self.is_tracked())
            .field("value", &self.value)
            .finish()
    }
}

impl From<Matrix> for Tensor {
    fn from(m: Matrix) -> Self {
        Tensor::constant(m)
    }
}

fn record<F>(value: Matrix, inputs: &[&Tensor], backward: F) -> Tensor
where
    F: Fn(&Matrix, &[bool]) -> Vec<Option<Matrix>> + 'static,
{
    let mut tape: Option<&Tape> = None;
    for t in inputs {
        if let Some((tp, _)) = &t.node {
            match tape {
                None => tape = Some(tp),
                Some(existing) => assert!(existing.same(tp), "tensors from different tapes"),
            }
        }
    }
    let Some(tape) = tape else {
        return Tensor::constant(value);
    };
    let parents = inputs
        .iter()
        .map(|t| t.node.as_ref().map(|(_, id)| *id))
        .collect();
    let id = tape.push(Node {
        parents,
        backward: Some(Box::new(backward)),
    });
    Tensor {
        value: Rc::new(value),
        node: Some((tape.clone(), id)),
    }
}

fn shape_err(op: &'static str, a: &Matrix, b: &Matrix) -> Error {
    Error::Shape {
        op,
        left: a.shape(),
        right: b.shape(),
    }
}

/// Derivative factor of `x^e` expressed through the already computed power.
#[inline]
fn pow_slope(x: f64, out: f64, e: f64) -> f64 {
    if x != 0.0 {
        e * out / x
    } else if e == 1.0 {
        1.0
    } else {
        0.0
    }
}

impl Tensor {
    pub fn constant(value: Matrix) -> Self {
        Self {
            value: Rc::new(value),
            node: None,
        }
    }

    pub fn value(&self) -> &Matrix {
        &self.value
    }

    pub fn shape(&self) -> (usize, usize) {
        self.value.shape()
    }

    pub fn is_tracked(&self) -> bool {
        self.node.is_some()
    }

    /// Same value, detached from any tape.
    pub fn detach(&self) -> Tensor {
        Tensor {
            value: Rc::clone(&self.value),
            node: None,
        }
    }

    /// Reverse sweep from this scalar.
    pub fn backward(&self) -> Result<Gradients> {
        let Some((tape, id)) = &self.node else {
            return Err(Error::Untracked);
        };
        let (rows, cols) = self.shape();
        if (rows, cols) != (1, 1) {
            return Err(Error::NonScalarLoss { rows, cols });
        }
        Ok(tape.backward(*id))
    }

    pub fn matmul(&self, other: &Tensor) -> Result<Tensor> {
        let out = self.value.matmul(&other.value)?;
        let (a, b) = (Rc::clone(&self.value), Rc::clone(&other.value));
        Ok(record(out, &[self, other], move |g, need| {
            vec![
                need[0].then(|| g.matmul_transpose(&b).unwrap()),
                need[1].then(|| a.transpose_matmul(g).unwrap()),
            ]
        }))
    }

    /// `selfᵀ · other`.
    pub fn transpose_matmul(&self, other: &Tensor) -> Result<Tensor> {
        let out = self.value.transpose_matmul(&other.value)?;
        let (a, b) = (Rc::clone(&self.value), Rc::clone(&other.value));
        Ok(record(out, &[self, other], move |g, need| {
            vec![
                need[0].then(|| b.matmul_transpose(g).unwrap()),
                need[1].then(|| a.matmul(g).unwrap()),
            ]
        }))
    }

    pub fn transpose(&self) -> Tensor {
        record(self.value.transpose(), &[self], |g, _| vec![Some(g.transpose())])
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        let out = self.value.zip_map(&other.value, "add", |a, b| a + b)?;
        Ok(record(out, &[self, other], |g, need| {
            vec![need[0].then(|| g.clone()), need[1].then(|| g.clone())]
        }))
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        let out = self.value.zip_map(&other.value, "sub", |a, b| a - b)?;
        Ok(record(out, &[self, other], |g, need| {
            vec![need[0].then(|| g.clone()), need[1].then(|| g.scale(-1.0))]
        }))
    }

    pub fn mul(&self, other: &Tensor) -> Result<Tensor> {
        let out = self.value.zip_map(&other.value, "mul", |a, b| a * b)?;
        let (a, b) = (Rc::clone(&self.value), Rc::clone(&other.value));
        Ok(record(out, &[self, other], move |g, need| {
            vec![
                need[0].then(|| g.zip_map(&b, "mul", |g, b| g * b).unwrap()),
                need[1].then(|| g.zip_map(&a, "mul", |g, a| g * a).unwrap()),
            ]
        }))
    }

    /// Elementwise `self / max(other, DIV_FLOOR)`.
    pub fn div(&self, other: &Tensor) -> Result<Tensor> {
        let out = self
            .value
            .zip_map(&other.value, "div", |a, b| a / b.max(DIV_FLOOR))?;
        let (a, b) = (Rc::clone(&self.value), Rc::clone(&other.value));
        Ok(record(out, &[self, other], move |g, need| {
            let da = need[0].then(|| g.zip_map(&b, "div", |g, b| g / b.max(DIV_FLOOR)).unwrap());
            let db = need[1].then(|| {
                let mut d = Matrix::zeros(b.rows(), b.cols());
                for (i, o) in d.data_mut().iter_mut().enumerate() {
                    let bv = b.data()[i];
                    if bv > DIV_FLOOR {
                        *o = -g.data()[i] * a.data()[i] / (bv * bv);
                    }
                }
                d
            });
            vec![da, db]
        }))
    }

    pub fn scale(&self, c: f64) -> Tensor {
        record(self.value.scale(c), &[self], move |g, _| vec![Some(g.scale(c))])
    }

    pub fn add_scalar(&self, c: f64) -> Tensor {
        record(self.value.map(|x| x + c), &[self], |g, _| vec![Some(g.clone())])
    }

    /// Elementwise power with a scalar exponent.
    pub fn pow(&self, e: f64) -> Tensor {
        let out = self.value.map(|x| x.powf(e));
        let x = Rc::clone(&self.value);
        let y = out.clone();
        record(out, &[self], move |g, _| {
            let mut d = g.clone();
            for ((d, &x), &y) in d.data_mut().iter_mut().zip(x.data()).zip(y.data()) {
                *d *= pow_slope(x, y, e);
            }
            vec![Some(d)]
        })
    }

    pub fn exp(&self) -> Tensor {
        let out = self.value.map(f64::exp);
        let y = out.clone();
        record(out, &[self], move |g, _| {
            vec![Some(g.zip_map(&y, "exp", |g, y| g * y).unwrap())]
        })
    }

    pub fn log(&self) -> Tensor {
        let x = Rc::clone(&self.value);
        record(self.value.map(f64::ln), &[self], move |g, _| {
            vec![Some(g.zip_map(&x, "log", |g, x| g / x).unwrap())]
        })
    }

    /// Fused `(self / max(den, DIV_FLOOR))^e`, the scaling-vector update.
    pub fn ratio_pow(&self, den: &Tensor, e: f64) -> Result<Tensor> {
        let out = self
            .value
            .zip_map(&den.value, "ratio_pow", |n, d| (n / d.max(DIV_FLOOR)).powf(e))?;
        let (n, d) = (Rc::clone(&self.value), Rc::clone(&den.value));
        let y = out.clone();
        Ok(record(out, &[self, den], move |g, need| {
            let len = g.data().len();
            let mut dn = need[0].then(|| Matrix::zeros(g.rows(), g.cols()));
            let mut dd = need[1].then(|| Matrix::zeros(g.rows(), g.cols()));
            for i in 0..len {
                let (gv, nv, dv, yv) = (g.data()[i], n.data()[i], d.data()[i], y.data()[i]);
                if let Some(dn) = dn.as_mut() {
                    // ∂/∂n (n/d)^e = e·y/n
                    dn.data_mut()[i] = gv * pow_slope(nv, yv, e);
                }
                if let Some(dd) = dd.as_mut() {
                    if dv > DIV_FLOOR {
                        dd.data_mut()[i] = -gv * e * yv / dv;
                    }
                }
            }
            vec![dn, dd]
        }))
    }

    /// Fused `(self ⊙ other)^e`.
    pub fn mul_pow(&self, other: &Tensor, e: f64) -> Result<Tensor> {
        let out = self
            .value
            .zip_map(&other.value, "mul_pow", |a, b| (a * b).powf(e))?;
        let (a, b) = (Rc::clone(&self.value), Rc::clone(&other.value));
        let y = out.clone();
        Ok(record(out, &[self, other], move |g, need| {
            let len = g.data().len();
            let mut da = need[0].then(|| Matrix::zeros(g.rows(), g.cols()));
            let mut db = need[1].then(|| Matrix::zeros(g.rows(), g.cols()));
            for i in 0..len {
                let (av, bv) = (a.data()[i], b.data()[i]);
                let q = g.data()[i] * pow_slope(av * bv, y.data()[i], e);
                if let Some(da) = da.as_mut() {
                    da.data_mut()[i] = q * bv;
                }
                if let Some(db) = db.as_mut() {
                    db.data_mut()[i] = q * av;
                }
            }
            vec![da, db]
        }))
    }

    /// 1×1 sum of all entries.
    pub fn sum_all(&self) -> Tensor {
        let (r, c) = self.shape();
        record(Matrix::filled(1, 1, self.value.sum()), &[self], move |g, _| {
            vec![Some(Matrix::filled(r, c, g.get(0, 0)))]
        })
    }

    /// R×1 vector of row sums.
    pub fn sum_rows(&self) -> Tensor {
        let (r, c) = self.shape();
        let out = Matrix::column(&self.value.row_sums());
        record(out, &[self], move |g, _| {
            vec![Some(Matrix::from_fn(r, c, |i, _| g.get(i, 0)))]
        })
    }

    /// 1×C vector of column sums.
    pub fn sum_cols(&self) -> Tensor {
        let (r, c) = self.shape();
        let out = Matrix::from_vec(1, c, self.value.col_sums()).unwrap();
        record(out, &[self], move |g, _| {
            vec![Some(Matrix::from_fn(r, c, |_, j| g.get(0, j)))]
        })
    }

    /// Repeats an R×1 column `times` times: v ⊗ 1ᵀ.
    pub fn broadcast_col(&self, times: usize) -> Result<Tensor> {
        if self.value.cols() != 1 {
            return Err(Error::Shape {
                op: "broadcast_col",
                left: self.shape(),
                right: (self.value.rows(), 1),
            });
        }
        Ok(self.repeat_cols_each(times))
    }

    /// Repeats a 1×C row `times` times vertically.
    pub fn broadcast_row(&self, times: usize) -> Result<Tensor> {
        if self.value.rows() != 1 {
            return Err(Error::Shape {
                op: "broadcast_row",
                left: self.shape(),
                right: (1, self.value.cols()),
            });
        }
        let c = self.value.cols();
        let row = self.value.row(0).to_vec();
        let out = Matrix::from_fn(times, c, |_, j| row[j]);
        Ok(record(out, &[self], move |g, _| {
            vec![Some(Matrix::from_vec(1, c, g.col_sums()).unwrap())]
        }))
    }

    /// Column `j` of the input becomes columns `j*times .. (j+1)*times`.
    pub fn repeat_cols_each(&self, times: usize) -> Tensor {
        let (r, c) = self.shape();
        let src = &self.value;
        let mut out = Matrix::zeros(r, c * times);
        for i in 0..r {
            let (s, o) = (src.row(i), out.row_mut(i));
            for j in 0..c {
                o[j * times..(j + 1) * times].fill(s[j]);
            }
        }
        record(out, &[self], move |g, _| {
            let mut d = Matrix::zeros(r, c);
            for i in 0..r {
                let gr = g.row(i);
                for j in 0..c {
                    d.set(i, j, gr[j * times..(j + 1) * times].iter().sum());
                }
            }
            vec![Some(d)]
        })
    }

    /// Horizontal tiling `[X, X, …, X]` of `times` copies.
    pub fn tile_cols(&self, times: usize) -> Tensor {
        let (r, c) = self.shape();
        let src = &self.value;
        let mut out = Matrix::zeros(r, c * times);
        for i in 0..r {
            let (s, o) = (src.row(i), out.row_mut(i));
            for t in 0..times {
                o[t * c..(t + 1) * c].copy_from_slice(s);
            }
        }
        record(out, &[self], move |g, _| {
            let mut d = Matrix::zeros(r, c);
            for i in 0..r {
                let (gr, dr) = (g.row(i), d.row_mut(i));
                for t in 0..times {
                    for (dv, gv) in dr.iter_mut().zip(&gr[t * c..(t + 1) * c]) {
                        *dv += gv;
                    }
                }
            }
            vec![Some(d)]
        })
    }

    /// Row-major flattening into a 1×(R·C) row.
    pub fn flatten_row(&self) -> Tensor {
        let (r, c) = self.shape();
        let out = Matrix::from_vec(1, r * c, self.value.data().to_vec()).unwrap();
        record(out, &[self], move |g, _| {
            vec![Some(Matrix::from_vec(r, c, g.data().to_vec()).unwrap())]
        })
    }

    /// For `self` of shape R×(J·S) and `weights` J×S, returns the R×J matrix
    /// `out(r, j) = Σ_k weights(j, k) · self(r, j·S + k)`.
    pub fn group_weighted_sum(&self, weights: &Tensor) -> Result<Tensor> {
        let (r, js) = self.shape();
        let (j, s) = weights.shape();
        if j * s != js {
            return Err(shape_err("group_weighted_sum", &self.value, &weights.value));
        }
        let (w, lam) = (Rc::clone(&self.value), Rc::clone(&weights.value));
        let mut out = Matrix::zeros(r, j);
        for i in 0..r {
            let wr = w.row(i);
            for b in 0..j {
                let l = lam.row(b);
                let mut acc = 0.0;
                for k in 0..s {
                    acc += l[k] * wr[b * s + k];
                }
                out.set(i, b, acc);
            }
        }
        Ok(record(out, &[self, weights], move |g, need| {
            let dw = need[0].then(|| {
                let mut d = Matrix::zeros(r, js);
                for i in 0..r {
                    let dr = d.row_mut(i);
                    for b in 0..j {
                        let gv = g.get(i, b);
                        for k in 0..s {
                            dr[b * s + k] = gv * lam.get(b, k);
                        }
                    }
                }
                d
            });
            let dl = need[1].then(|| {
                let mut d = Matrix::zeros(j, s);
                for i in 0..r {
                    let wr = w.row(i);
                    for b in 0..j {
                        let gv = g.get(i, b);
                        for k in 0..s {
                            let cur = d.get(b, k);
                            d.set(b, k, cur + gv * wr[b * s + k]);
                        }
                    }
                }
                d
            });
            vec![dw, dl]
        }))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Result<Tensor> {
        let (r, c) = self.shape();
        if let Some(&bad) = idx.iter().find(|&&i| i >= r) {
            return Err(Error::NodeOutOfRange {
                index: bad,
                n_nodes: r,
            });
        }
        let idx = idx.to_vec();
        let out = self.value.select_rows(&idx);
        Ok(record(out, &[self], move |g, _| {
            let mut d = Matrix::zeros(r, c);
            for (k, &i) in idx.iter().enumerate() {
                for (dv, gv) in d.row_mut(i).iter_mut().zip(g.row(k)) {
                    *dv += gv;
                }
            }
            vec![Some(d)]
        }))
    }

    /// Softmax down each column (every column becomes a probability vector).
    pub fn softmax_cols(&self) -> Tensor {
        let (r, c) = self.shape();
        let x = &self.value;
        let mut out = Matrix::zeros(r, c);
        for j in 0..c {
            let m = (0..r).map(|i| x.get(i, j)).fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for i in 0..r {
                let e = (x.get(i, j) - m).exp();
                out.set(i, j, e);
                z += e;
            }
            for i in 0..r {
                out.set(i, j, out.get(i, j) / z);
            }
        }
        let y = out.clone();
        record(out, &[self], move |g, _| {
            let mut d = Matrix::zeros(r, c);
            for j in 0..c {
                let dot: f64 = (0..r).map(|i| g.get(i, j) * y.get(i, j)).sum();
                for i in 0..r {
                    d.set(i, j, y.get(i, j) * (g.get(i, j) - dot));
                }
            }
            vec![Some(d)]
        })
    }

    /// Softmax along each row.
    pub fn softmax_rows(&self) -> Tensor {
        let (r, c) = self.shape();
        let mut out = self.value.as_ref().clone();
        for i in 0..r {
            let row = out.row_mut(i);
            let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for v in row.iter_mut() {
                *v = (*v - m).exp();
                z += *v;
            }
            row.iter_mut().for_each(|v| *v /= z);
        }
        let y = out.clone();
        record(out, &[self], move |g, _| {
            let mut d = Matrix::zeros(r, c);
            for i in 0..r {
                let (gr, yr) = (g.row(i), y.row(i));
                let dot: f64 = gr.iter().zip(yr).map(|(a, b)| a * b).sum();
                for (k, dv) in d.row_mut(i).iter_mut().enumerate() {
                    *dv = yr[k] * (gr[k] - dot);
                }
            }
            vec![Some(d)]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn sum_gradient_is_ones() {
        let tape = Tape::new();
        let x = tape.leaf(Matrix::from_fn(3, 2, |i, j| (i + j) as f64));
        let g = x.sum_all().backward().unwrap();
        assert_eq!(g.get(&x).unwrap(), &Matrix::ones(3, 2));
    }

    #[test]
    fn quadratic_gradient_is_input() {
        let tape = Tape::new();
        let x = tape.leaf(m(&[&[1.0, -2.0], &[0.5, 3.0]]));
        let loss = x.mul(&x).unwrap().sum_all().scale(0.5);
        assert_eq!(loss.backward().unwrap().get(&x).unwrap(), x.value());
    }

    #[test]
    fn untracked_backward_is_error() {
        let x = Tensor::constant(Matrix::ones(1, 1));
        assert!(matches!(x.backward(), Err(Error::Untracked)));
    }

    #[test]
    fn non_scalar_backward_is_error() {
        let tape = Tape::new();
        let x = tape.leaf(Matrix::ones(2, 1));
        assert!(matches!(x.exp().backward(), Err(Error::NonScalarLoss { .. })));
    }

    #[test]
    fn non_participating_leaf_has_no_gradient() {
        let tape = Tape::new();
        let x = tape.leaf(Matrix::ones(2, 2));
        let unused = tape.leaf(Matrix::ones(2, 2));
        let g = x.sum_all().backward().unwrap();
        assert!(g.get(&unused).is_none());
        assert!(g.get(&x).is_some());
    }

    #[test]
    fn constants_record_nothing() {
        let tape = Tape::new();
        let a = Tensor::constant(Matrix::ones(2, 2));
        let b = a.exp().matmul(&a).unwrap();
        assert!(!b.is_tracked());
        assert!(tape.is_empty());
    }

    #[test]
    fn pow_edge_exponents() {
        let x = Tensor::constant(m(&[&[0.3, 2.0], &[4.0, 0.0]]));
        assert_eq!(x.pow(1.0).value(), x.value());
        assert_eq!(x.pow(0.0).value(), &Matrix::ones(2, 2));
    }

    #[test]
    fn div_of_self_is_ones() {
        let x = Tensor::constant(m(&[&[0.3, 2.0], &[4.0, 1e-3]]));
        assert_eq!(x.div(&x).unwrap().value(), &Matrix::ones(2, 2));
    }

    #[test]
    fn div_clamps_denominator() {
        let x = Tensor::constant(m(&[&[1e-40]]));
        let z = Tensor::constant(m(&[&[0.0]]));
        assert_eq!(x.div(&z).unwrap().value().get(0, 0), 1e-40 / DIV_FLOOR);
    }

    #[test]
    fn softmax_uniform_and_shift_invariant() {
        let x = Tensor::constant(Matrix::zeros(3, 2));
        for v in x.softmax_cols().value().data() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let a = Matrix::from_fn(4, 3, |i, j| (i as f64 * 0.7 - j as f64).sin() * 3.0);
        let shifted = Matrix::from_fn(4, 3, |i, j| a.get(i, j) + 5.0 * j as f64);
        let sa = Tensor::constant(a).softmax_cols();
        let sb = Tensor::constant(shifted).softmax_cols();
        for (p, q) in sa.value().data().iter().zip(sb.value().data()) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_survives_extreme_logits() {
        let x = Matrix::from_fn(5, 4, |i, j| if (i + j) % 2 == 0 { 700.0 } else { -700.0 });
        let t = Tensor::constant(x);
        for s in t.softmax_cols().value().col_sums() {
            assert!((s - 1.0).abs() < 1e-12);
        }
        for s in t.softmax_rows().value().row_sums() {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_backward_is_bitwise_identical() {
        let tape = Tape::new();
        let x = tape.leaf(Matrix::from_fn(3, 3, |i, j| 0.1 + (i * 3 + j) as f64 * 0.05));
        let y = x
            .matmul(&x)
            .unwrap()
            .pow(0.7)
            .softmax_rows()
            .sum_cols()
            .pow(2.0)
            .sum_all();
        let g1 = y.backward().unwrap().get(&x).unwrap().clone();
        let g2 = y.backward().unwrap().get(&x).unwrap().clone();
        assert_eq!(g1.data(), g2.data());
    }

    #[test]
    fn shared_subexpression_accumulates() {
        let tape = Tape::new();
        let x = tape.leaf(m(&[&[2.0]]));
        // x·x + x  ->  2x + 1
        let y = x.mul(&x).unwrap().add(&x).unwrap().sum_all();
        assert_eq!(y.backward().unwrap().get(&x).unwrap().get(0, 0), 5.0);
    }
}
