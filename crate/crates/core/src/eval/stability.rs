use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;

/// `‖Λ − Λ′‖_F / ‖Λ′‖_F`.
pub fn stability_relative_change(reference: &Matrix, new: &Matrix) -> Result<f64> {
    if reference.shape() != new.shape() {
        return Err(Error::Shape {
            op: "stability_relative_change",
            left: reference.shape(),
            right: new.shape(),
        });
    }
    let denom = new.frobenius_norm();
    if denom == 0.0 {
        return Err(invalid("new", "coordinates have zero norm"));
    }
    let diff: f64 = reference
        .data()
        .iter()
        .zip(new.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(diff.sqrt() / denom)
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

/// Column permutation `perm` of `other` minimizing `‖reference − other[:, perm]‖_F`.
/// Returns `(perm, permuted)`, where column `j` of `permuted` is column `perm[j]` of `other`.
pub fn align_columns(reference: &Matrix, other: &Matrix) -> Result<(Vec<usize>, Matrix)> {
    if reference.shape() != other.shape() {
        return Err(Error::Shape {
            op: "align_columns",
            left: reference.shape(),
            right: other.shape(),
        });
    }
    let (n, s) = reference.shape();
    if s > 8 {
        return Err(invalid(
            "columns",
            "alignment is exhaustive and supports at most 8 columns",
        ));
    }
    // cost[a][b] = ‖ref[:, a] − other[:, b]‖²
    let cost: Vec<Vec<f64>> = (0..s)
        .map(|a| {
            (0..s)
                .map(|b| {
                    (0..n)
                        .map(|i| (reference.get(i, a) - other.get(i, b)).powi(2))
                        .sum()
                })
                .collect()
        })
        .collect();
    let best = permutations(s)
        .into_iter()
        .min_by(|p, q| {
            let cp: f64 = p.iter().enumerate().map(|(a, &b)| cost[a][b]).sum();
            let cq: f64 = q.iter().enumerate().map(|(a, &b)| cost[a][b]).sum();
            cp.total_cmp(&cq)
        })
        .unwrap_or_default();
    let permuted = Matrix::from_fn(n, s, |i, j| other.get(i, best[j]));
    Ok((best, permuted))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_is_zero() {
        let l = Matrix::from_rows(&[[0.2, 0.8], [0.6, 0.4]]).unwrap();
        assert_eq!(stability_relative_change(&l, &l).unwrap(), 0.0);
    }

    #[test]
    fn doubled_is_half() {
        let l = Matrix::from_rows(&[[0.2, 0.8], [0.6, 0.4]]).unwrap();
        let d = l.scale(2.0);
        assert!((stability_relative_change(&l, &d).unwrap() - 0.5).abs() < 1e-15);
        assert!(stability_relative_change(&l, &Matrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn alignment_recovers_swap() {
        let l = Matrix::from_rows(&[[0.1, 0.3, 0.6], [0.7, 0.2, 0.1]]).unwrap();
        let swapped = Matrix::from_fn(2, 3, |i, j| l.get(i, [2, 0, 1][j]));
        let (perm, back) = align_columns(&l, &swapped).unwrap();
        assert_eq!(back, l);
        assert_eq!(perm, vec![1, 2, 0]);
    }
}
