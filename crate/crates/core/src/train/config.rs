use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Hyper-parameters of one training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Hop count of the connectivity descriptors.
    pub n: u32,
    /// Number of structural patterns.
    pub s: usize,
    /// Random-walk steps of the diffusion cost.
    pub tau: u32,
    pub epsilon: f64,
    pub rho: f64,
    /// Sinkhorn iterations per barycenter.
    pub sinkhorn_iters: usize,
    pub lr: f64,
    /// Nodes per SGD step.
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

/// Smallest accepted `epsilon`; below it the dense kernel underflows.
pub const MIN_EPSILON: f64 = 0.005;

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n: 1,
            s: 2,
            tau: 1,
            epsilon: 0.03,
            rho: 0.05,
            sinkhorn_iters: 500,
            lr: 0.01,
            batch_size: 1,
            epochs: 300,
            seed: 0,
        }
    }
}

impl fmt::Display for TrainConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} s={} tau={} epsilon={} rho={} sinkhorn_iters={} lr={} batch={} epochs={} seed={}",
            self.n,
            self.s,
            self.tau,
            self.epsilon,
            self.rho,
            self.sinkhorn_iters,
            self.lr,
            self.batch_size,
            self.epochs,
            self.seed
        )
    }
}

impl TrainConfig {
    pub const KEYS: [&'static str; 10] = [
        "n",
        "s",
        "tau",
        "epsilon",
        "rho",
        "sinkhorn_iters",
        "lr",
        "batch",
        "epochs",
        "seed",
    ];

    /// Checks the parameters that do not depend on the graph.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        if self.s == 0 {
            return Err(invalid("s", "must be at least 1"));
        }
        if self.tau == 0 {
            return Err(invalid("tau", "must be at least 1"));
        }
        if !(self.epsilon >= MIN_EPSILON) || !self.epsilon.is_finite() {
            return Err(invalid(
                "epsilon",
                format!("must be at least {MIN_EPSILON}, got {}", self.epsilon),
            ));
        }
        if !(self.rho > 0.0) {
            return Err(invalid("rho", "must be positive"));
        }
        if self.sinkhorn_iters == 0 {
            return Err(invalid("sinkhorn_iters", "must be at least 1"));
        }
        if !(self.lr > 0.0) || !self.lr.is_finite() {
            return Err(invalid("lr", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch", "must be at least 1"));
        }
        Ok(())
    }

    pub(crate) fn validate_for(&self, n_nodes: usize) -> Result<()> {
        self.validate()?;
        if self.batch_size > n_nodes {
            return Err(invalid(
                "batch",
                format!("batch size {} exceeds {n_nodes} nodes", self.batch_size),
            ));
        }
        Ok(())
    }

    /// Sets one field from its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad value `{v}` for `{key}`"),
            })
        }
        match key {
            "n" => self.n = num(key, value)?,
            "s" => self.s = num(key, value)?,
            "tau" => self.tau = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "rho" => self.rho = num(key, value)?,
            "sinkhorn_iters" => self.sinkhorn_iters = num(key, value)?,
            "lr" => self.lr = num(key, value)?,
            "batch" => self.batch_size = num(key, value)?,
            "epochs" => self.epochs = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            _ => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("unknown config key `{key}`"),
                })
            }
        }
        Ok(())
    }

    /// Parses a flat `key = value` file. Keys that are not config fields
    /// (input paths and the like) are returned separately.
    pub fn parse(text: &str) -> Result<(Self, BTreeMap<String, String>)> {
        let mut cfg = Self::default();
        let mut extra = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if Self::KEYS.contains(&k) {
                cfg.set(k, v).map_err(|e| match e {
                    Error::Parse { msg, .. } => Error::Parse { line: idx + 1, msg },
                    other => other,
                })?;
            } else {
                extra.insert(k.to_string(), v.to_string());
            }
        }
        Ok((cfg, extra))
    }

    /// Inverse of [`TrainConfig::parse`] for the config fields.
    pub fn to_text(&self) -> String {
        format!(
            "n = {}\ns = {}\ntau = {}\nepsilon = {:?}\nrho = {:?}\nsinkhorn_iters = {}\nlr = {:?}\nbatch = {}\nepochs = {}\nseed = {}\n",
            self.n,
            self.s,
            self.tau,
            self.epsilon,
            self.rho,
            self.sinkhorn_iters,
            self.lr,
            self.batch_size,
            self.epochs,
            self.seed
        )
    }
}
