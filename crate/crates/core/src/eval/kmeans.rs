use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;

const MAX_LLOYD_ITERS: usize = 300;

/// Clustering returned by [`kmeans`].
#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Matrix,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus_seeds(points: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = points.rows();
    let mut centers = vec![rng.gen_range(0..n)];
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| sq_dist(points.row(i), points.row(centers[0])))
        .collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centers.push(pick);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(points.row(i), points.row(pick)));
        }
    }
    points.select_rows(&centers)
}

fn lloyd(points: &Matrix, mut centroids: Matrix) -> KMeansResult {
    let (n, dim) = points.shape();
    let k = centroids.rows();
    let mut assignments = vec![usize::MAX; n];
    for _ in 0..MAX_LLOYD_ITERS {
        let mut changed = false;
        for (i, a) in assignments.iter_mut().enumerate() {
            let best = (0..k)
                .min_by(|&x, &y| {
                    sq_dist(points.row(i), centroids.row(x))
                        .total_cmp(&sq_dist(points.row(i), centroids.row(y)))
                })
                .unwrap();
            if *a != best {
                *a = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = Matrix::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for (i, &a) in assignments.iter().enumerate() {
            counts[a] += 1;
            for (s, p) in sums.row_mut(a).iter_mut().zip(points.row(i)) {
                *s += p;
            }
        }
        for c in 0..k {
            // An emptied cluster keeps its previous centroid.
            if counts[c] > 0 {
                for (dst, s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                    *dst = s / counts[c] as f64;
                }
            }
        }
    }
    let inertia = assignments
        .iter()
        .enumerate()
        .map(|(i, &a)| sq_dist(points.row(i), centroids.row(a)))
        .sum();
    KMeansResult {
        assignments,
        centroids,
        inertia,
    }
}

/// Lloyd's algorithm from k-means++ seeds; the best of `restarts` runs by inertia.
pub fn kmeans(points: &Matrix, k: usize, seed: u64, restarts: usize) -> Result<KMeansResult> {
    let n = points.rows();
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if n == 0 {
        return Err(Error::Empty("points"));
    }
    if k > n {
        return Err(invalid("k", format!("{k} clusters for {n} points")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..restarts.max(1) {
        let run = lloyd(points, plus_plus_seeds(points, k, &mut rng));
        if best.as_ref().map_or(true, |b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_locations() {
        let p = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [0.0, 0.0], [1.0, 1.0]]).unwrap();
        let r = kmeans(&p, 2, 0, 5).unwrap();
        assert_eq!(r.inertia, 0.0);
        assert_eq!(r.assignments[0], r.assignments[2]);
        assert_ne!(r.assignments[0], r.assignments[1]);
    }

    #[test]
    fn single_cluster_has_total_variance() {
        let p = Matrix::from_rows(&[[0.0], [1.0], [2.0], [5.0]]).unwrap();
        let r = kmeans(&p, 1, 0, 1).unwrap();
        assert!(r.assignments.iter().all(|&a| a == 0));
        // Mean is 2, squared deviations 4 + 1 + 0 + 9.
        assert!((r.inertia - 14.0).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_has_zero_inertia() {
        let p = Matrix::from_rows(&[[0.0], [1.0], [2.5]]).unwrap();
        assert_eq!(kmeans(&p, 3, 7, 3).unwrap().inertia, 0.0);
    }

    #[test]
    fn rejects_bad_k() {
        let p = Matrix::zeros(3, 1);
        assert!(kmeans(&p, 0, 0, 1).is_err());
        assert!(kmeans(&p, 4, 0, 1).is_err());
    }
}
