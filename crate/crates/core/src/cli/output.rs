use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Full-precision float formatting: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `node_id,<prefix>_0,…` followed by one row per node.
pub fn matrix_csv(ids: &[i64], m: &Matrix, prefix: &str) -> String {
    let mut out = String::from("node_id");
    for j in 0..m.cols() {
        let _ = write!(out, ",{prefix}_{j}");
    }
    out.push('\n');
    for (i, id) in ids.iter().enumerate() {
        let _ = write!(out, "{id}");
        for &x in m.row(i) {
            let _ = write!(out, ",{}", fmt_f64(x));
        }
        out.push('\n');
    }
    out
}

/// Reads a file written by [`matrix_csv`].
pub fn parse_matrix_csv(text: &str) -> Result<(Vec<i64>, Matrix)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Empty("csv"))?;
    let cols = header.split(',').count().saturating_sub(1);
    let (mut ids, mut data) = (Vec::new(), Vec::new());
    for (lineno, line) in lines {
        let err = |msg: String| Error::Parse {
            line: lineno + 1,
            msg,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols + 1 {
            return Err(err(format!("expected {} fields, got {}", cols + 1, fields.len())));
        }
        ids.push(
            fields[0]
                .parse()
                .map_err(|_| err(format!("bad node id `{}`", fields[0])))?,
        );
        for f in &fields[1..] {
            data.push(f.parse::<f64>().map_err(|_| err(format!("bad number `{f}`")))?);
        }
    }
    if ids.is_empty() {
        return Err(Error::Empty("csv rows"));
    }
    let m = Matrix::from_vec(ids.len(), cols, data)?;
    Ok((ids, m))
}

pub fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::InputNotFound(path.display().to_string()),
        _ => Error::Io(e),
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub version: String,
    pub outputs: Vec<String>,
}

/// Collects outputs of one command in its output directory.
pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
    inputs: Vec<InputDigest>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            inputs: Vec::new(),
        })
    }

    /// Reads an input file and records its digest.
    pub fn input(&mut self, path: &Path) -> Result<String> {
        let text = read_input(path)?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(text)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value)? + "\n";
        self.write(name, &text)
    }

    pub fn finish(mut self, command: &str, config: serde_json::Value, seed: u64) -> Result<()> {
        let manifest = RunManifest {
            command: command.to_string(),
            config,
            inputs: std::mem::take(&mut self.inputs),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.written.clone(),
        };
        self.write_json("manifest.json", &manifest)
    }
}
