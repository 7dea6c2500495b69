#![allow(dead_code)]

use std::path::PathBuf;

use node2coords::graph::Graph;
use node2coords::linalg::Matrix;
use rand::Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn karate() -> Graph {
    let g = Graph::load_edge_list(data_path("karate.edges")).unwrap();
    let labels = g.load_labels(data_path("karate.labels")).unwrap();
    g.with_labels(labels).unwrap()
}

/// Positive histogram on `n` bins with unit mass.
pub fn random_simplex(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// Connected graph: a random spanning tree plus each remaining pair with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((rng.gen_range(0..i), i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p && !edges.contains(&(i, j)) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Exact optimum of the transportation LP `min ⟨C, Γ⟩` with `Γ1 = a`, `Γᵀ1 = b`,
/// by successive shortest augmenting paths on the bipartite residual network.
pub fn transport_lp(cost: &Matrix, a: &[f64], b: &[f64]) -> f64 {
    let (m, n) = (a.len(), b.len());
    // Nodes: 0 source, 1..=m rows, m+1..=m+n columns, m+n+1 sink.
    let nodes = m + n + 2;
    let sink = nodes - 1;
    let mut cap = vec![vec![0.0f64; nodes]; nodes];
    let mut w = vec![vec![0.0f64; nodes]; nodes];
    for i in 0..m {
        cap[0][1 + i] = a[i];
        for j in 0..n {
            cap[1 + i][1 + m + j] = f64::INFINITY;
            w[1 + i][1 + m + j] = cost.get(i, j);
            w[1 + m + j][1 + i] = -cost.get(i, j);
        }
    }
    for j in 0..n {
        cap[1 + m + j][sink] = b[j];
    }
    let total: f64 = a.iter().sum();
    let mut flow = 0.0;
    let mut value = 0.0;
    let eps = 1e-15;
    while total - flow > 1e-13 {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev = vec![usize::MAX; nodes];
        dist[0] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u].is_infinite() {
                    continue;
                }
                for v in 0..nodes {
                    if cap[u][v] > eps && dist[u] + w[u][v] < dist[v] - 1e-14 {
                        dist[v] = dist[u] + w[u][v];
                        prev[v] = u;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        assert!(dist[sink].is_finite(), "no augmenting path");
        let mut push = total - flow;
        let mut v = sink;
        while v != 0 {
            let u = prev[v];
            push = push.min(cap[u][v]);
            v = u;
        }
        let mut v = sink;
        while v != 0 {
            let u = prev[v];
            cap[u][v] -= push;
            cap[v][u] += push;
            v = u;
        }
        flow += push;
        value += push * dist[sink];
    }
    value
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Reference `(ami, nmi)` from a contingency table, arithmetic normalisation.
///
/// Chance correction uses exact hypergeometric probabilities from integer binomials.
pub fn mi_oracle(table: &[Vec<u64>]) -> (f64, f64) {
    let rows: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u64> = (0..table[0].len())
        .map(|j| table.iter().map(|r| r[j]).sum())
        .collect();
    let rows: Vec<u64> = rows.into_iter().filter(|&x| x > 0).collect();
    let cols: Vec<u64> = cols.into_iter().filter(|&x| x > 0).collect();
    let n: u64 = rows.iter().sum();
    let nf = n as f64;
    if rows.len() == cols.len() && (rows.len() == 1 || rows.len() as u64 == n) {
        return (1.0, 1.0);
    }
    let h = |c: &[u64]| -> f64 {
        c.iter()
            .map(|&x| {
                let p = x as f64 / nf;
                -p * p.ln()
            })
            .sum()
    };
    let row_sums: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<u64> = (0..table[0].len())
        .map(|j| table.iter().map(|r| r[j]).sum())
        .collect();
    let mut mi = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &x) in r.iter().enumerate() {
            if x > 0 {
                let x = x as f64;
                mi += x / nf * (nf * x / (row_sums[i] as f64 * col_sums[j] as f64)).ln();
            }
        }
    }
    let mi = mi.max(0.0);
    let mean_h = 0.5 * (h(&rows) + h(&cols));
    let mut emi = 0.0;
    for &ai in &rows {
        for &bj in &cols {
            let total = binomial(n, bj) as f64;
            for k in 1..=ai.min(bj) {
                let ways = binomial(ai, k) * binomial(n - ai, bj - k);
                if ways == 0 {
                    continue;
                }
                let kf = k as f64;
                emi += ways as f64 / total * kf / nf * (nf * kf / (ai as f64 * bj as f64)).ln();
            }
        }
    }
    let nmi = if mean_h > 0.0 { (mi / mean_h).min(1.0) } else { 0.0 };
    let mut denom = mean_h - emi;
    if denom.abs() < f64::EPSILON {
        denom = f64::EPSILON.copysign(denom);
    }
    ((mi - emi) / denom, nmi)
}

/// Contingency table of two labelings.
pub fn table_of(a: &[usize], b: &[usize]) -> Vec<Vec<u64>> {
    let ra = a.iter().max().unwrap() + 1;
    let rb = b.iter().max().unwrap() + 1;
    let mut t = vec![vec![0u64; rb]; ra];
    for (&x, &y) in a.iter().zip(b) {
        t[x][y] += 1;
    }
    t
}

/// Labelings realising a contingency table.
pub fn labelings_of(table: &[Vec<u64>]) -> (Vec<usize>, Vec<usize>) {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, r) in table.iter().enumerate() {
        for (j, &x) in r.iter().enumerate() {
            for _ in 0..x {
                a.push(i);
                b.push(j);
            }
        }
    }
    (a, b)
}

/// All restricted-growth strings of length `n` with at most `k` blocks.
pub fn set_partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let used = cur.iter().max().map_or(0, |m| m + 1);
        for l in 0..=used.min(k - 1) {
            cur.push(l);
            rec(cur, n, k, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(&mut vec![0], n, k, &mut out);
    }
    out
}

/// All `r × c` nonnegative integer tables summing to `n` with no empty row or column.
pub fn contingency_tables(n: u64, r: usize, c: usize) -> Vec<Vec<Vec<u64>>> {
    fn compositions(n: u64, parts: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 1 {
            cur.push(n);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=n {
            cur.push(x);
            compositions(n - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut flat = Vec::new();
    compositions(n, r * c, &mut Vec::new(), &mut flat);
    flat.into_iter()
        .map(|v| v.chunks(c).map(|ch| ch.to_vec()).collect::<Vec<_>>())
        .filter(|t: &Vec<Vec<u64>>| {
            t.iter().all(|row| row.iter().sum::<u64>() > 0)
                && (0..c).all(|j| t.iter().map(|row| row[j]).sum::<u64>() > 0)
        })
        .collect()
}
