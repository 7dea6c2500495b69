use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;

/// Stochastic block model parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SbmParams {
    pub block_sizes: Vec<usize>,
    pub p_in: f64,
    pub q_out: f64,
}

impl SbmParams {
    pub fn new(block_sizes: Vec<usize>, p_in: f64, q_out: f64) -> Result<Self> {
        let params = Self {
            block_sizes,
            p_in,
            q_out,
        };
        params.validate()?;
        Ok(params)
    }

    /// `k` equal blocks; `n_nodes` must be divisible by `k`.
    pub fn equal(n_nodes: usize, k: usize, p_in: f64, q_out: f64) -> Result<Self> {
        if k == 0 || n_nodes % k != 0 {
            return Err(invalid(
                "n_blocks",
                format!("{n_nodes} nodes cannot be split into {k} equal blocks; pass explicit block sizes"),
            ));
        }
        Self::new(vec![n_nodes / k; k], p_in, q_out)
    }

    pub fn n_nodes(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    fn validate(&self) -> Result<()> {
        if self.block_sizes.is_empty() || self.block_sizes.contains(&0) {
            return Err(invalid("block_sizes", "need at least one non-empty block"));
        }
        if !(0.0..=1.0).contains(&self.p_in) || !(0.0..=1.0).contains(&self.q_out) {
            return Err(invalid("p_in/q_out", "probabilities must lie in [0, 1]"));
        }
        if self.q_out > self.p_in {
            return Err(invalid(
                "q_out",
                "inter-block probability exceeds intra-block probability",
            ));
        }
        Ok(())
    }

    /// Expected number of edges.
    pub fn expected_edges(&self) -> f64 {
        let intra: f64 = self
            .block_sizes
            .iter()
            .map(|&b| (b * (b.saturating_sub(1))) as f64 / 2.0)
            .sum();
        let mut inter = 0.0;
        for (i, &a) in self.block_sizes.iter().enumerate() {
            for &b in &self.block_sizes[i + 1..] {
                inter += (a * b) as f64;
            }
        }
        self.p_in * intra + self.q_out * inter
    }

    /// Draws a graph; block ids become node labels.
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        self.validate()?;
        self.draw(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Keeps drawing from one seeded stream until the graph is connected.
    pub fn generate_connected(&self, seed: u64) -> Result<Graph> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..DRAW_RETRIES {
            let g = self.draw(&mut rng)?;
            if g.is_connected() {
                return Ok(g);
            }
        }
        Err(Error::Retries(format!(
            "no connected block-model draw after {DRAW_RETRIES} attempts"
        )))
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<Graph> {
        let labels: Vec<usize> = self
            .block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &size)| std::iter::repeat(b).take(size))
            .collect();
        let n = labels.len();
        let mut adj = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let p = if labels[i] == labels[j] {
                    self.p_in
                } else {
                    self.q_out
                };
                if rng.gen::<f64>() < p {
                    adj.set(i, j, 1.0);
                    adj.set(j, i, 1.0);
                }
            }
        }
        Graph::from_adjacency(adj)?.with_labels(labels)
    }
}

/// Fresh connected draw from `template` with the intra-block probability replaced by `p_prime`.
pub fn perturb_intra_probability(template: &SbmParams, p_prime: f64, seed: u64) -> Result<Graph> {
    SbmParams::new(template.block_sizes.clone(), p_prime, template.q_out)?.generate_connected(seed)
}

/// `p' ∈ {0.15, 0.20, …, 0.40}`.
pub fn intra_probability_sweep() -> Vec<f64> {
    (0..6).map(|i| (15 + 5 * i) as f64 / 100.0).collect()
}

/// `r_p ∈ {0.01, …, 0.05}`.
pub fn add_ratio_sweep() -> Vec<f64> {
    (1..=5).map(|i| i as f64 / 100.0).collect()
}

/// `|E_p|^max = N² − |E|`.
pub fn max_added_edges(g: &Graph) -> usize {
    let n = g.n_nodes();
    n * n - g.n_edges()
}

/// Adds `⌊ratio · (N² − |E|)⌋` uniformly chosen absent edges.
pub fn perturb_add_edges(g: &Graph, ratio: f64, seed: u64) -> Result<Graph> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(invalid("ratio", "added-edge ratio must lie in (0, 1]"));
    }
    let count = (ratio * max_added_edges(g) as f64).floor() as usize;
    let n = g.n_nodes();
    let mut absent = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !g.has_edge(i, j) {
                absent.push((i, j));
            }
        }
    }
    if count > absent.len() {
        return Err(invalid(
            "ratio",
            format!(
                "{count} edges requested but only {} absent pairs exist",
                absent.len()
            ),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (chosen, _) = absent.partial_shuffle(&mut rng, count);
    let mut adj = g.adjacency().clone();
    for &(i, j) in chosen.iter() {
        adj.set(i, j, 1.0);
        adj.set(j, i, 1.0);
    }
    let mut out = Graph::from_adjacency(adj)?.with_node_ids(g.node_ids().to_vec());
    if let Some(l) = g.labels() {
        out = out.with_labels(l.to_vec())?;
    }
    Ok(out)
}

/// Subgraph induced by `nodes` (kept in the given order). External ids and labels carry over.
pub fn induced_subgraph(g: &Graph, nodes: &[usize]) -> Result<Graph> {
    let n = g.n_nodes();
    if let Some(&bad) = nodes.iter().find(|&&i| i >= n) {
        return Err(Error::NodeOutOfRange {
            index: bad,
            n_nodes: n,
        });
    }
    let a = g.adjacency();
    let sub = Matrix::from_fn(nodes.len(), nodes.len(), |i, j| a.get(nodes[i], nodes[j]));
    let ids = nodes.iter().map(|&i| g.node_ids()[i]).collect();
    let mut out = Graph::from_adjacency(sub)?.with_node_ids(ids);
    if let Some(l) = g.labels() {
        out = out.with_labels(nodes.iter().map(|&i| l[i]).collect())?;
    }
    Ok(out)
}

const DOWNSAMPLE_RETRIES: usize = 1000;
const DRAW_RETRIES: usize = 1000;

/// Connected induced subgraph on `⌊keep_ratio · N⌋` uniformly chosen nodes.
///
/// Returns the subgraph and the sorted original indices of the kept nodes.
pub fn downsample(g: &Graph, keep_ratio: f64, seed: u64) -> Result<(Graph, Vec<usize>)> {
    if !(keep_ratio > 0.0 && keep_ratio <= 1.0) {
        return Err(invalid("keep_ratio", "must lie in (0, 1]"));
    }
    let n = g.n_nodes();
    let keep = ((keep_ratio * n as f64).floor() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<usize> = (0..n).collect();
    for _ in 0..DOWNSAMPLE_RETRIES {
        let (chosen, _) = all.partial_shuffle(&mut rng, keep);
        let mut kept = chosen.to_vec();
        kept.sort_unstable();
        let sub = induced_subgraph(g, &kept)?;
        if sub.is_connected() {
            return Ok((sub, kept));
        }
    }
    Err(Error::Retries(format!(
        "no connected induced subgraph with {keep} of {n} nodes after {DOWNSAMPLE_RETRIES} draws"
    )))
}
