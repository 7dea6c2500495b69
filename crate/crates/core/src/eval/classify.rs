use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;

/// Default L2 strength of the logistic models.
pub const DEFAULT_L2: f64 = 1.0;
const GRAD_TOL: f64 = 1e-6;
const MAX_GD_ITERS: usize = 1_000_000;

/// Scores of one classifier on one test split.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    /// F1 of each class, in percent, indexed by class id.
    pub per_class_f1: Vec<f64>,
    /// Unweighted mean of `per_class_f1`.
    pub macro_f1: f64,
    /// Percentage of test nodes classified correctly.
    pub accuracy: f64,
    pub train_ratio: f64,
    pub split_seed: u64,
}

/// One binary L2-regularized logistic model `σ(w·x + b)`; `b` is not penalized.
#[derive(Clone, Debug)]
struct Binary {
    w: Vec<f64>,
    b: f64,
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Minimizes `0.5·l2·‖w‖² + Σ logloss` by gradient descent with step `1/Lipschitz`.
fn fit_binary(x: &Matrix, y: &[f64], l2: f64) -> Binary {
    let (n, d) = x.shape();
    let sq: f64 = x.data().iter().map(|v| v * v).sum::<f64>() + n as f64;
    let step = 1.0 / (l2 + 0.25 * sq);
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut gw = vec![0.0; d];
    for _ in 0..MAX_GD_ITERS {
        gw.iter_mut().zip(&w).for_each(|(g, wi)| *g = l2 * wi);
        let mut gb = 0.0;
        for i in 0..n {
            let row = x.row(i);
            let t: f64 = row.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>() + b;
            let r = sigmoid(t) - y[i];
            gw.iter_mut().zip(row).for_each(|(g, a)| *g += r * a);
            gb += r;
        }
        let norm = (gw.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt();
        if norm < GRAD_TOL {
            break;
        }
        w.iter_mut().zip(&gw).for_each(|(wi, g)| *wi -= step * g);
        b -= step * gb;
    }
    Binary { w, b }
}

/// One-vs-rest logistic classifier.
#[derive(Clone, Debug)]
pub struct OneVsRest {
    models: Vec<Binary>,
}

impl OneVsRest {
    /// Trains one model per class id `0..n_classes` on the rows in `train`.
    pub fn fit(features: &Matrix, labels: &[usize], train: &[usize], l2: f64) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(invalid(
                "labels",
                format!("{} labels for {} feature rows", labels.len(), features.rows()),
            ));
        }
        if !(l2 >= 0.0) {
            return Err(invalid("l2", "must be non-negative"));
        }
        if let Some(&bad) = train.iter().find(|&&i| i >= labels.len()) {
            return Err(Error::NodeOutOfRange {
                index: bad,
                n_nodes: labels.len(),
            });
        }
        let mut present: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
        present.sort_unstable();
        present.dedup();
        if present.len() < 2 {
            return Err(invalid("labels", "training set needs at least two classes"));
        }
        let n_classes = labels.iter().max().unwrap() + 1;
        let x = features.select_rows(train);
        let models = (0..n_classes)
            .map(|c| {
                let y: Vec<f64> = train.iter().map(|&i| f64::from(labels[i] == c)).collect();
                fit_binary(&x, &y, l2)
            })
            .collect();
        Ok(Self { models })
    }

    pub fn n_classes(&self) -> usize {
        self.models.len()
    }

    /// Class with the highest decision score.
    pub fn predict(&self, x: &[f64]) -> usize {
        let score = |m: &Binary| m.w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + m.b;
        (0..self.models.len())
            .max_by(|&a, &b| score(&self.models[a]).total_cmp(&score(&self.models[b])))
            .unwrap()
    }
}

/// Per-class F1 in percent and the accuracy in percent.
pub fn f1_scores(pred: &[usize], truth: &[usize], n_classes: usize) -> (Vec<f64>, f64) {
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fn_ = vec![0usize; n_classes];
    for (&p, &t) in pred.iter().zip(truth) {
        if p == t {
            tp[p] += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }
    let f1 = (0..n_classes)
        .map(|c| {
            let denom = 2 * tp[c] + fp[c] + fn_[c];
            if denom == 0 {
                0.0
            } else {
                100.0 * (2 * tp[c]) as f64 / denom as f64
            }
        })
        .collect();
    let correct: usize = tp.iter().sum();
    let acc = if pred.is_empty() {
        0.0
    } else {
        100.0 * correct as f64 / pred.len() as f64
    };
    (f1, acc)
}

/// Trains on `train`, scores on `test`.
pub fn classify(
    features: &Matrix,
    labels: &[usize],
    train: &[usize],
    test: &[usize],
    l2: f64,
) -> Result<ClassificationReport> {
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    let model = OneVsRest::fit(features, labels, train, l2)?;
    if let Some(&bad) = test.iter().find(|&&i| i >= labels.len()) {
        return Err(Error::NodeOutOfRange {
            index: bad,
            n_nodes: labels.len(),
        });
    }
    let pred: Vec<usize> = test.iter().map(|&i| model.predict(features.row(i))).collect();
    let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
    let (per_class_f1, accuracy) = f1_scores(&pred, &truth, model.n_classes());
    let macro_f1 = per_class_f1.iter().sum::<f64>() / per_class_f1.len() as f64;
    Ok(ClassificationReport {
        per_class_f1,
        macro_f1,
        accuracy,
        train_ratio: train.len() as f64 / (train.len() + test.len()) as f64,
        split_seed: 0,
    })
}

/// Stratified split: within each class, `round(ratio · size)` nodes go to
/// training, keeping at least one node of every class on each side when the
/// class has two or more nodes.
pub fn stratified_split(labels: &[usize], ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(invalid("train_ratio", "must lie strictly between 0 and 1"));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for c in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        if members.is_empty() {
            continue;
        }
        members.shuffle(&mut rng);
        let size = members.len();
        let mut take = (ratio * size as f64).round() as usize;
        if size >= 2 {
            take = take.clamp(1, size - 1);
        } else {
            take = 1;
        }
        train.extend_from_slice(&members[..take]);
        test.extend_from_slice(&members[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// `n_splits` stratified splits at `ratio`; split `s` uses seed `seed + s`.
pub fn classify_splits(
    features: &Matrix,
    labels: &[usize],
    ratio: f64,
    n_splits: usize,
    seed: u64,
    l2: f64,
) -> Result<Vec<ClassificationReport>> {
    (0..n_splits as u64)
        .map(|s| {
            let (train, test) = stratified_split(labels, ratio, seed + s)?;
            let mut r = classify(features, labels, &train, &test, l2)?;
            r.train_ratio = ratio;
            r.split_seed = seed + s;
            Ok(r)
        })
        .collect()
}

/// Mean macro-F1 and mean accuracy of a set of reports.
pub fn mean_scores(reports: &[ClassificationReport]) -> (f64, f64) {
    let n = reports.len().max(1) as f64;
    (
        reports.iter().map(|r| r.macro_f1).sum::<f64>() / n,
        reports.iter().map(|r| r.accuracy).sum::<f64>() / n,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_toy_is_perfect() {
        let x = Matrix::from_rows(&[[-1.0], [-1.0], [1.0], [1.0], [-1.0], [1.0]]).unwrap();
        let y = [0, 0, 1, 1, 0, 1];
        let r = classify(&x, &y, &[0, 1, 2, 3], &[4, 5], DEFAULT_L2).unwrap();
        assert_eq!(r.macro_f1, 100.0);
        assert_eq!(r.accuracy, 100.0);
    }

    #[test]
    fn perfect_predictions_score_100() {
        let (f1, acc) = f1_scores(&[0, 1, 2, 1], &[0, 1, 2, 1], 3);
        assert_eq!(f1, vec![100.0; 3]);
        assert_eq!(acc, 100.0);
    }

    #[test]
    fn absent_class_scores_zero() {
        let (f1, _) = f1_scores(&[0, 0], &[0, 0], 2);
        assert_eq!(f1, vec![100.0, 0.0]);
    }

    #[test]
    fn single_class_training_fails() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        assert!(OneVsRest::fit(&x, &[0, 0, 1], &[0, 1], 1.0).is_err());
    }

    #[test]
    fn split_is_stratified_and_disjoint() {
        let labels: Vec<usize> = (0..50).map(|i| usize::from(i % 5 == 0)).collect();
        let (train, test) = stratified_split(&labels, 0.8, 3).unwrap();
        assert_eq!(train.len() + test.len(), 50);
        assert!(train.iter().all(|i| !test.contains(i)));
        assert_eq!(train.iter().filter(|&&i| labels[i] == 1).count(), 8);
    }

    #[test]
    fn gradient_descent_reaches_stationarity() {
        let x = Matrix::from_rows(&[[0.1, 0.9], [0.8, 0.2], [0.5, 0.5], [0.3, 0.6]]).unwrap();
        let y = [1.0, 0.0, 1.0, 0.0];
        let m = fit_binary(&x, &y, 1.0);
        let mut g = [m.w[0], m.w[1], 0.0];
        for i in 0..4 {
            let r = sigmoid(x.get(i, 0) * m.w[0] + x.get(i, 1) * m.w[1] + m.b) - y[i];
            g[0] += r * x.get(i, 0);
            g[1] += r * x.get(i, 1);
            g[2] += r;
        }
        assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-6);
    }
}
