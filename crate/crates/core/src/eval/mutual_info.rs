use std::collections::HashMap;

use crate::error::{invalid, Error, Result};

/// Contingency table of two labelings, with unused labels dropped.
pub(crate) fn contingency(a: &[usize], b: &[usize]) -> Vec<Vec<usize>> {
    let index = |labels: &[usize]| -> (Vec<usize>, usize) {
        let mut map = HashMap::new();
        let ids = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        (ids, map.len())
    };
    let (ia, ra) = index(a);
    let (ib, rb) = index(b);
    let mut table = vec![vec![0; rb]; ra];
    for (&x, &y) in ia.iter().zip(&ib) {
        table[x][y] += 1;
    }
    table
}

fn entropy(counts: &[usize], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn mutual_info(table: &[Vec<usize>], rows: &[usize], cols: &[usize], n: f64) -> f64 {
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let nij = nij as f64;
                mi += nij / n * (n * nij / (rows[i] as f64 * cols[j] as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Expected mutual information of two labelings with the given cluster sizes
/// under random permutation of one of them.
fn expected_mutual_info(rows: &[usize], cols: &[usize], n: usize) -> f64 {
    let mut log_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        log_fact[k] = log_fact[k - 1] + (k as f64).ln();
    }
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in rows {
        for &b in cols {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            for nij in lo..=hi {
                let nf_ij = nij as f64;
                let term = nf_ij / nf * (nf * nf_ij / (a as f64 * b as f64)).ln();
                let log_p = log_fact[a] + log_fact[b] + log_fact[n - a] + log_fact[n - b]
                    - log_fact[n]
                    - log_fact[nij]
                    - log_fact[a - nij]
                    - log_fact[b - nij]
                    - log_fact[n + nij - a - b];
                emi += term * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted and normalized mutual information, `(ami, nmi)`, both normalized
/// by the arithmetic mean of the two entropies.
pub fn mutual_info_scores(pred: &[usize], truth: &[usize]) -> Result<(f64, f64)> {
    if pred.is_empty() {
        return Err(Error::Empty("labelings"));
    }
    if pred.len() != truth.len() {
        return Err(invalid(
            "labels",
            format!("{} predictions for {} truths", pred.len(), truth.len()),
        ));
    }
    let n = pred.len();
    let table = contingency(pred, truth);
    let rows: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<usize> = (0..table[0].len())
        .map(|j| table.iter().map(|r| r[j]).sum())
        .collect();
    let same_trivial = rows.len() == cols.len() && (rows.len() == 1 || rows.len() == n);
    if same_trivial {
        return Ok((1.0, 1.0));
    }
    let nf = n as f64;
    let mi = mutual_info(&table, &rows, &cols, nf);
    let mean_h = 0.5 * (entropy(&rows, nf) + entropy(&cols, nf));
    let nmi = if mean_h > 0.0 { (mi / mean_h).min(1.0) } else { 0.0 };
    let emi = expected_mutual_info(&rows, &cols, n);
    let mut denom = mean_h - emi;
    if denom.abs() < f64::EPSILON {
        denom = f64::EPSILON.copysign(denom);
    }
    let ami = (mi - emi) / denom;
    Ok((ami, nmi))
}
