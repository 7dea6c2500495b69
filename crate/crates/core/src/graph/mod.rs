//! Undirected graphs, random-walk quantities and the diffusion-distance cost.

mod generate;

pub use generate::{
    add_ratio_sweep, downsample, induced_subgraph, intra_probability_sweep, max_added_edges,
    perturb_add_edges, perturb_intra_probability, SbmParams,
};

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;

/// Undirected graph with a dense symmetric adjacency matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    adjacency: Matrix,
    /// External id of each internal node index.
    node_ids: Vec<i64>,
    labels: Option<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from a (possibly weighted) symmetric nonnegative adjacency.
    pub fn from_adjacency(adjacency: Matrix) -> Result<Self> {
        let (r, c) = adjacency.shape();
        if r != c {
            return Err(Error::Shape {
                op: "from_adjacency",
                left: (r, c),
                right: (c, r),
            });
        }
        if r == 0 {
            return Err(Error::Empty("adjacency"));
        }
        for i in 0..r {
            for j in 0..r {
                let a = adjacency.get(i, j);
                if !(a >= 0.0) || !a.is_finite() {
                    return Err(invalid("adjacency", format!("entry ({i},{j}) = {a}")));
                }
                if a != adjacency.get(j, i) {
                    return Err(invalid("adjacency", format!("not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self {
            adjacency,
            node_ids: (0..r as i64).collect(),
            labels: None,
        })
    }

    /// Unweighted graph on `n` nodes. Duplicate edges collapse, self-loops are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("graph"));
        }
        let mut adj = Matrix::zeros(n, n);
        for &(a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { index: x, n_nodes: n });
                }
            }
            if a != b {
                adj.set(a, b, 1.0);
                adj.set(b, a, 1.0);
            }
        }
        Ok(Self {
            adjacency: adj,
            node_ids: (0..n as i64).collect(),
            labels: None,
        })
    }

    /// Parses whitespace-separated id pairs, one edge per line.
    ///
    /// Ids are remapped to `0..N` in order of first appearance; `#` starts a
    /// comment line.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut index: HashMap<i64, usize> = HashMap::new();
        let mut ids = Vec::new();
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut toks = line.split_whitespace();
            let (Some(a), Some(b), None) = (toks.next(), toks.next(), toks.next()) else {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected two node ids, got `{line}`"),
                });
            };
            let mut endpoint = |tok: &str| -> Result<usize> {
                let id: i64 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("`{tok}` is not an integer node id"),
                })?;
                Ok(*index.entry(id).or_insert_with(|| {
                    ids.push(id);
                    ids.len() - 1
                }))
            };
            let a = endpoint(a)?;
            let b = endpoint(b)?;
            edges.push((a, b));
        }
        if ids.is_empty() {
            return Err(Error::Empty("edge list"));
        }
        let mut g = Self::from_edges(ids.len(), &edges)?;
        g.node_ids = ids;
        Ok(g)
    }

    pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::InputNotFound(path.display().to_string()),
            _ => Error::Io(e),
        })?;
        Self::parse_edge_list(&text)
    }

    /// Serializes as an edge list using the external node ids.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{} {}", self.node_ids[a], self.node_ids[b]);
        }
        out
    }

    /// Parses `node_id class_id` lines against this graph's id space.
    ///
    /// Every node must receive a label.
    pub fn parse_labels(&self, text: &str) -> Result<Vec<usize>> {
        let index: HashMap<i64, usize> = self.node_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut labels = vec![None; self.n_nodes()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(parse_err(format!("expected `node_id class_id`, got `{line}`")));
            }
            let id: i64 = toks[0]
                .parse()
                .map_err(|_| parse_err(format!("bad node id `{}`", toks[0])))?;
            let class: usize = toks[1]
                .parse()
                .map_err(|_| parse_err(format!("bad class id `{}`", toks[1])))?;
            // Labels for nodes absent from the graph are ignored (e.g. a
            // downsampled graph read against the full label file).
            if let Some(&i) = index.get(&id) {
                labels[i] = Some(class);
            }
        }
        labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                l.ok_or_else(|| invalid("labels", format!("node id {} has no label", self.node_ids[i])))
            })
            .collect()
    }

    pub fn load_labels(&self, path: impl AsRef<Path>) -> Result<Vec<usize>> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::InputNotFound(path.display().to_string()),
            _ => Error::Io(e),
        })?;
        self.parse_labels(&text)
    }

    pub fn labels_to_string(&self) -> Option<String> {
        let labels = self.labels.as_ref()?;
        let mut out = String::new();
        for (id, l) in self.node_ids.iter().zip(labels) {
            let _ = writeln!(out, "{id} {l}");
        }
        Some(out)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n_nodes() {
            return Err(invalid(
                "labels",
                format!("{} labels for {} nodes", labels.len(), self.n_nodes()),
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub(crate) fn with_node_ids(mut self, ids: Vec<i64>) -> Self {
        debug_assert_eq!(ids.len(), self.n_nodes());
        self.node_ids = ids;
        self
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adjacency
    }

    pub fn node_ids(&self) -> &[i64] {
        &self.node_ids
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency.get(a, b) > 0.0
    }

    /// Undirected edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_nodes();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        let n = self.n_nodes();
        (0..n)
            .map(|i| (i + 1..n).filter(|&j| self.has_edge(i, j)).count())
            .sum()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency
            .row(i)
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, _)| j)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n_nodes();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    /// `d(i) = Σ_j A(i, j)`.
    pub fn degree_vector(&self) -> Vec<f64> {
        self.adjacency.row_sums()
    }

    /// Random-walk transition matrix `P(i, j) = A(i, j) / d(i)`.
    pub fn markov_matrix(&self) -> Result<Matrix> {
        let d = self.degree_vector();
        if let Some(node) = d.iter().position(|&x| x <= 0.0) {
            return Err(Error::IsolatedNode { node });
        }
        let n = self.n_nodes();
        Ok(Matrix::from_fn(n, n, |i, j| self.adjacency.get(i, j) / d[i]))
    }

    /// Stationary distribution `π(u) = d(u) / Σ d`.
    pub fn stationary_distribution(&self) -> Vec<f64> {
        let d = self.degree_vector();
        let total: f64 = d.iter().sum();
        d.iter().map(|x| x / total).collect()
    }
}

/// Diffusion-distance geometry of a graph.
#[derive(Clone, Debug)]
pub struct DiffusionCost {
    pub tau: u32,
    /// `C = D_τ`, symmetric with zero diagonal.
    pub cost: Matrix,
    /// Row-stochastic `P`.
    pub markov: Matrix,
    pub stationary: Vec<f64>,
}

/// `D_τ(i, j) = sqrt(Σ_u (P^τ(i,u) − P^τ(j,u))² / π(u))`.
pub fn diffusion_cost(g: &Graph, tau: u32) -> Result<DiffusionCost> {
    if tau == 0 {
        return Err(invalid("tau", "must be a positive integer"));
    }
    let markov = g.markov_matrix()?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let stationary = g.stationary_distribution();
    let n = g.n_nodes();
    let pt = markov.powi(tau)?;
    // Rows scaled by 1/sqrt(π) turn the weighted distance into a plain Euclidean one.
    let inv_sqrt: Vec<f64> = stationary.iter().map(|p| 1.0 / p.sqrt()).collect();
    let q = Matrix::from_fn(n, n, |i, u| pt.get(i, u) * inv_sqrt[u]);
    let mut cost = Matrix::zeros(n, n);
    for i in 0..n {
        let qi = q.row(i);
        for j in i + 1..n {
            let d2: f64 = qi.iter().zip(q.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            let d = d2.sqrt();
            cost.set(i, j, d);
            cost.set(j, i, d);
        }
    }
    Ok(DiffusionCost {
        tau,
        cost,
        markov,
        stationary,
    })
}

/// Row-normalized `(A + αI)^n`, with `α = 0` for `n = 1` and `α = 1` otherwise.
pub fn connectivity_descriptors(g: &Graph, n: u32) -> Result<Matrix> {
    if n == 0 {
        return Err(invalid("n", "hop count must be positive"));
    }
    let size = g.n_nodes();
    let alpha = if n == 1 { 0.0 } else { 1.0 };
    let mut a = g.adjacency().clone();
    for i in 0..size {
        a.set(i, i, a.get(i, i) + alpha);
    }
    let mut z = a.powi(n)?;
    for i in 0..size {
        let row = z.row_mut(i);
        let s: f64 = row.iter().sum();
        if s <= 0.0 {
            return Err(Error::IsolatedNode { node: i });
        }
        row.iter_mut().for_each(|x| *x /= s);
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::parse_edge_list("0 1\n1 2").unwrap()
    }

    #[test]
    fn parses_simple_edge_list() {
        let g = path3();
        assert_eq!(g.n_nodes(), 3);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn duplicates_collapse_after_remap() {
        let g = Graph::parse_edge_list("1 2\n2 1").unwrap();
        assert_eq!(g.n_nodes(), 2);
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(g.node_ids(), &[1, 2]);
    }

    #[test]
    fn comments_and_self_loops() {
        let g = Graph::parse_edge_list("# header\n5 5\n5 7\n\n7 9\n").unwrap();
        assert_eq!(g.n_nodes(), 3);
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.adjacency().get(0, 0), 0.0);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = Graph::parse_edge_list("0 1\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = Graph::parse_edge_list("0 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn empty_input_is_error() {
        assert!(matches!(
            Graph::parse_edge_list("# nothing\n"),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn degrees() {
        assert_eq!(path3().degree_vector(), vec![1.0, 2.0, 1.0]);
        let single = Graph::from_adjacency(Matrix::zeros(1, 1)).unwrap();
        assert_eq!(single.degree_vector(), vec![0.0]);
    }

    #[test]
    fn markov_rows() {
        let p = path3().markov_matrix().unwrap();
        assert_eq!(p.row(0), &[0.0, 1.0, 0.0]);
        assert_eq!(p.row(1), &[0.5, 0.0, 0.5]);
        assert_eq!(p.row(2), &[0.0, 1.0, 0.0]);
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = k3.markov_matrix().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.get(i, j), if i == j { 0.0 } else { 0.5 });
            }
        }
    }

    #[test]
    fn isolated_node_is_named() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(matches!(g.markov_matrix(), Err(Error::IsolatedNode { node: 2 })));
        assert!(diffusion_cost(&g, 1).is_err());
    }

    #[test]
    fn path_diffusion_distance() {
        let c = diffusion_cost(&path3(), 1).unwrap();
        assert_eq!(c.cost.get(0, 2), 0.0);
        assert!((c.cost.get(0, 1) - 2.0).abs() < 1e-12);
        assert!((c.stationary.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tau_zero_rejected() {
        assert!(diffusion_cost(&path3(), 0).is_err());
    }

    #[test]
    fn disconnected_rejected() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(diffusion_cost(&g, 1), Err(Error::Disconnected)));
    }

    #[test]
    fn descriptors_on_path() {
        let z1 = connectivity_descriptors(&path3(), 1).unwrap();
        assert_eq!(z1.row(1), &[0.5, 0.0, 0.5]);
        let z2 = connectivity_descriptors(&path3(), 2).unwrap();
        let expect = [0.4, 0.4, 0.2];
        for (a, b) in z2.row(0).iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(connectivity_descriptors(&path3(), 0).is_err());
    }

    #[test]
    fn labels_follow_external_ids() {
        let g = Graph::parse_edge_list("10 20\n20 30\n").unwrap();
        let labels = g.parse_labels("30 2\n10 0\n20 1\n99 5\n").unwrap();
        assert_eq!(labels, vec![0, 1, 2]);
        assert!(g.parse_labels("10 0\n").is_err());
    }

    #[test]
    fn asymmetric_adjacency_rejected() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(Graph::from_adjacency(a).is_err());
    }
}
