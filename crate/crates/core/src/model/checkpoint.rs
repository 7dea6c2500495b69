use std::fmt::Write as _;
use std::path::Path;

use super::ModelParams;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

const MAGIC: &str = "node2coords-checkpoint v1";

/// Trained parameters plus the settings needed to reuse them.
///
/// Stored as plain text: a header line, `key = value` lines, then the `E`,
/// `Δ` and pattern tables with one whitespace-separated row per node. Floats are written in
/// shortest round-trip form, so reloading is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub n_hops: u32,
    pub tau: u32,
    pub epsilon: f64,
    pub rho: f64,
    pub sinkhorn_iters: usize,
    /// External id of each internal node index.
    pub node_ids: Vec<i64>,
    pub params: ModelParams,
    /// Patterns `M_S` of the training graph, N×S.
    pub patterns: Matrix,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

fn write_table(out: &mut String, name: &str, m: &Matrix) {
    out.push_str(name);
    out.push('\n');
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "N = {}", p.n_nodes()).unwrap();
        writeln!(out, "S = {}", p.latent_dim()).unwrap();
        writeln!(out, "n = {}", self.n_hops).unwrap();
        writeln!(out, "tau = {}", self.tau).unwrap();
        writeln!(out, "epsilon = {:?}", self.epsilon).unwrap();
        writeln!(out, "rho = {:?}", self.rho).unwrap();
        writeln!(out, "L = {}", self.sinkhorn_iters).unwrap();
        let ids: Vec<String> = self.node_ids.iter().map(i64::to_string).collect();
        writeln!(out, "node_ids = {}", ids.join(" ")).unwrap();
        write_table(&mut out, "E", &p.encoder);
        write_table(&mut out, "Delta", &p.decoder_logits);
        write_table(&mut out, "patterns", &self.patterns);
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(MAGIC) {
            return Err(bad(format!("missing `{MAGIC}` header")));
        }
        let mut field = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(format!("missing `{key}`")))?;
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `{key} = ...`, got `{line}`")))?;
            if k.trim() != key {
                return Err(bad(format!("expected `{key}`, got `{}`", k.trim())));
            }
            Ok(v.trim().to_string())
        };
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| bad(format!("bad value for `{key}`: `{v}`")))
        }
        let n: usize = num("N", &field("N")?)?;
        let s: usize = num("S", &field("S")?)?;
        let n_hops = num("n", &field("n")?)?;
        let tau = num("tau", &field("tau")?)?;
        let epsilon = num("epsilon", &field("epsilon")?)?;
        let rho = num("rho", &field("rho")?)?;
        let sinkhorn_iters = num("L", &field("L")?)?;
        let node_ids = field("node_ids")?
            .split_whitespace()
            .map(|t| num("node_ids", t))
            .collect::<Result<Vec<i64>>>()?;
        if node_ids.len() != n {
            return Err(bad(format!("{} node ids for N = {n}", node_ids.len())));
        }
        let mut table = |name: &str| -> Result<Matrix> {
            if lines.next().map(str::trim) != Some(name) {
                return Err(bad(format!("missing `{name}` table")));
            }
            let mut data = Vec::with_capacity(n * s);
            for r in 0..n {
                let line = lines
                    .next()
                    .ok_or_else(|| bad(format!("`{name}` has {r} of {n} rows")))?;
                let row = line
                    .split_whitespace()
                    .map(|t| num(name, t))
                    .collect::<Result<Vec<f64>>>()?;
                if row.len() != s {
                    return Err(bad(format!("`{name}` row {r} has {} of {s} values", row.len())));
                }
                data.extend(row);
            }
            Matrix::from_vec(n, s, data)
        };
        let e = table("E")?;
        let d = table("Delta")?;
        let patterns = table("patterns")?;
        Ok(Self {
            n_hops,
            tau,
            epsilon,
            rho,
            sinkhorn_iters,
            node_ids,
            params: ModelParams::new(e, d)?,
            patterns,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::InputNotFound(path.display().to_string()),
            _ => e.into(),
        })?;
        Self::parse(&text)
    }
}
