//! Command-line front end. Every command writes into one output directory
//! together with a `manifest.json` describing its inputs and outputs.

mod output;

pub use output::{fmt_f64, matrix_csv, parse_matrix_csv, sha256_hex, RunManifest};

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::eval::{
    classify_splits, cluster_report, epsilon_sensitivity_sweep, mean_scores, stability_relative_change,
    SplitProtocol, DEFAULT_L2,
};
use crate::graph::{
    add_ratio_sweep, downsample, intra_probability_sweep, perturb_add_edges, perturb_intra_probability,
    Graph, SbmParams,
};
use crate::linalg::Matrix;
use crate::model::Checkpoint;
use crate::train::{fit, fit_coordinates, TrainConfig};
use output::OutDir;

#[derive(Debug, Parser)]
#[command(
    name = "node2coords",
    version,
    about = "Graph node embeddings as Wasserstein barycentric coordinates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train patterns and coordinates on a graph.
    Train(TrainArgs),
    /// Fit coordinates of a new graph against a checkpoint's frozen patterns.
    Transfer(TransferArgs),
    /// Score coordinates against labels.
    Eval(EvalArgs),
    /// Write synthetic, perturbed or downsampled graphs.
    Generate(GenerateArgs),
    /// Train and classify once per epsilon.
    SweepEpsilon(SweepEpsilonArgs),
    /// Train once, then transfer to a series of perturbed graphs.
    SweepPerturb(SweepPerturbArgs),
}

/// Training settings. A `--config` file is read first; flags override it.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigFlags {
    /// Flat `key = value` run config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub tau: Option<u32>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub sinkhorn_iters: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigFlags {
    fn resolve(&self, out: &mut OutDir) -> Result<(TrainConfig, BTreeMap<String, String>)> {
        let (mut cfg, extra) = match &self.config {
            Some(path) => TrainConfig::parse(&out.input(path)?)?,
            None => (TrainConfig::default(), BTreeMap::new()),
        };
        macro_rules! apply {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { cfg.$field = v; })*
            };
        }
        apply!(n => n, s => s, tau => tau, epsilon => epsilon, rho => rho,
            sinkhorn_iters => sinkhorn_iters, lr => lr, batch => batch_size,
            epochs => epochs, seed => seed);
        cfg.validate()?;
        Ok((cfg, extra))
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Edge list; defaults to the config file's `graph` entry.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Optional `node_id class_id` file, used for the summary scores.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub cfg: ConfigFlags,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    /// Node ids of the training graph; nodes of the new graph not listed get
    /// zero pattern mass.
    #[arg(long)]
    pub pad_index: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Optimizer settings. Hop count, tau, epsilon, rho and Sinkhorn
    /// iterations always come from the checkpoint.
    #[command(flatten)]
    pub cfg: ConfigFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    Cluster,
    Classify,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub mode: EvalMode,
    #[arg(long)]
    pub coordinates: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Number of clusters; defaults to the number of classes.
    #[arg(long)]
    pub k: Option<usize>,
    /// Training fractions for classification.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.3,0.4,0.5,0.6,0.7,0.8")]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub splits: usize,
    #[arg(long, default_value_t = DEFAULT_L2)]
    pub l2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    Sbm,
    Perturb,
    Downsample,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub kind: GenerateKind,
    #[arg(long)]
    pub out: PathBuf,
    /// Block sizes of the stochastic block model.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Input graph for `perturb --add-ratio` and `downsample`.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Fraction of the `N² − |E|` absent slots to fill with new edges.
    #[arg(long)]
    pub add_ratio: Option<f64>,
    /// Replacement intra-block probability; draws a fresh block model.
    #[arg(long)]
    pub p_prime: Option<f64>,
    /// Fraction of nodes kept by `downsample`.
    #[arg(long)]
    pub keep: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepEpsilonArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.01,0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09"
    )]
    pub epsilons: Vec<f64>,
    #[arg(long, default_value_t = 0.8)]
    pub train_ratio: f64,
    #[arg(long, default_value_t = 10)]
    pub splits: usize,
    #[arg(long, default_value_t = DEFAULT_L2)]
    pub l2: f64,
    #[command(flatten)]
    pub cfg: ConfigFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PerturbKind {
    /// Redraw a block model with a different intra-block probability.
    Intra,
    /// Add random edges to an input graph.
    Add,
}

#[derive(Debug, Args)]
pub struct SweepPerturbArgs {
    pub kind: PerturbKind,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Seed of the base block-model draw.
    #[arg(long, default_value_t = 0)]
    pub graph_seed: u64,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Sweep values; defaults to 0.15..0.40 for `intra` and 0.01..0.05 for `add`.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
    #[command(flatten)]
    pub cfg: ConfigFlags,
}

/// Exit status for a finished command: 2 for missing inputs, 1 for any other error.
pub fn exit_code(result: &Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(Error::InputNotFound(_)) => 2,
        Err(_) => 1,
    }
}

/// Caps the global worker pool at `OTGE_THREADS` when that variable is set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("OTGE_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| invalid("OTGE_THREADS", format!("`{v}` is not a thread count")))?;
        // A pool that already exists keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Train(a) => cmd_train(&a),
        Command::Transfer(a) => cmd_transfer(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::SweepEpsilon(a) => cmd_sweep_epsilon(&a),
        Command::SweepPerturb(a) => cmd_sweep_perturb(&a),
    }
}

fn load_graph(out: &mut OutDir, path: &Path, labels: Option<&Path>) -> Result<Graph> {
    let g = Graph::parse_edge_list(&out.input(path)?)?;
    match labels {
        Some(lp) => {
            let l = g.parse_labels(&out.input(lp)?)?;
            g.with_labels(l)
        }
        None => Ok(g),
    }
}

fn loss_csv(losses: &[f64]) -> String {
    let mut s = String::from("epoch,loss\n");
    for (i, l) in losses.iter().enumerate() {
        let _ = writeln!(s, "{i},{}", fmt_f64(*l));
    }
    s
}

fn n_classes(labels: &[usize]) -> usize {
    let mut l = labels.to_vec();
    l.sort_unstable();
    l.dedup();
    l.len()
}

fn config_json(cfg: &TrainConfig) -> serde_json::Value {
    serde_json::to_value(cfg).unwrap_or_default()
}

pub fn cmd_train(a: &TrainArgs) -> Result<()> {
    let mut out = OutDir::create(&a.out)?;
    let (cfg, extra) = a.cfg.resolve(&mut out)?;
    let graph_path = a
        .graph
        .clone()
        .or_else(|| extra.get("graph").map(PathBuf::from))
        .ok_or_else(|| invalid("graph", "pass --graph or set `graph` in the config file"))?;
    let labels_path = a
        .labels
        .clone()
        .or_else(|| extra.get("labels").map(PathBuf::from));
    let g = load_graph(&mut out, &graph_path, labels_path.as_deref())?;
    let result = fit(&g, &cfg)?;
    let ids = g.node_ids();
    let ck = Checkpoint {
        n_hops: cfg.n,
        tau: cfg.tau,
        epsilon: cfg.epsilon,
        rho: cfg.rho,
        sinkhorn_iters: cfg.sinkhorn_iters,
        node_ids: ids.to_vec(),
        params: result.params.clone(),
        patterns: result.embedding.patterns.clone(),
    };
    out.write("checkpoint.txt", &ck.to_text())?;
    out.write(
        "patterns.csv",
        &matrix_csv(ids, &result.embedding.patterns, "pattern"),
    )?;
    out.write(
        "coordinates.csv",
        &matrix_csv(ids, &result.embedding.coordinates, "lambda"),
    )?;
    out.write("loss.csv", &loss_csv(&result.losses))?;
    let mut summary = json!({
        "n_nodes": g.n_nodes(),
        "epochs_run": result.losses.len(),
        "final_loss": result.embedding.final_loss,
    });
    if let Some(labels) = g.labels() {
        let rep = cluster_report(&result.embedding.coordinates, labels, n_classes(labels), cfg.seed)?;
        summary["ami"] = json!(rep.ami);
        summary["nmi"] = json!(rep.nmi);
    }
    out.write_json("summary.json", &summary)?;
    out.finish("train", config_json(&cfg), cfg.seed)
}

/// Rows of `patterns` (indexed like `ids`) rearranged for graph `g`.
/// Nodes of `g` missing from `ids` get zero rows only when `allow_pad` holds.
fn map_patterns(patterns: &Matrix, ids: &[i64], g: &Graph, allow_pad: bool) -> Result<Matrix> {
    let index: HashMap<i64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut out = Matrix::zeros(g.n_nodes(), patterns.cols());
    for (i, id) in g.node_ids().iter().enumerate() {
        match index.get(id) {
            Some(&r) => out.row_mut(i).copy_from_slice(patterns.row(r)),
            None if allow_pad => {}
            None => {
                return Err(invalid(
                    "graph",
                    format!("node id {id} is not in the checkpoint; pass --pad-index to zero-pad"),
                ))
            }
        }
    }
    if !allow_pad && g.n_nodes() != ids.len() {
        return Err(invalid(
            "graph",
            format!("checkpoint has {} nodes, graph has {}", ids.len(), g.n_nodes()),
        ));
    }
    Ok(out)
}

pub fn cmd_transfer(a: &TransferArgs) -> Result<()> {
    let mut out = OutDir::create(&a.out)?;
    let ck = Checkpoint::parse(&out.input(&a.checkpoint)?)?;
    let (flags, _) = a.cfg.resolve(&mut out)?;
    let cfg = TrainConfig {
        n: ck.n_hops,
        s: ck.params.latent_dim(),
        tau: ck.tau,
        epsilon: ck.epsilon,
        rho: ck.rho,
        sinkhorn_iters: ck.sinkhorn_iters,
        ..flags
    };
    let g = load_graph(&mut out, &a.graph, None)?;
    let patterns = match &a.pad_index {
        Some(p) => {
            let kept = parse_ids(&out.input(p)?)?;
            let set: std::collections::HashSet<i64> = kept.iter().copied().collect();
            if set.len() != ck.node_ids.len() || !ck.node_ids.iter().all(|id| set.contains(id)) {
                return Err(invalid("pad_index", "ids do not match the checkpoint's nodes"));
            }
            map_patterns(&ck.patterns, &ck.node_ids, &g, true)?
        }
        None => map_patterns(&ck.patterns, &ck.node_ids, &g, false)?,
    };
    let result = fit_coordinates(&g, &patterns, &cfg)?;
    let coords = &result.embedding.coordinates;
    out.write(
        "coordinates_transfer.csv",
        &matrix_csv(g.node_ids(), coords, "lambda"),
    )?;
    out.write("loss.csv", &loss_csv(&result.losses))?;
    let mut summary = json!({ "final_loss": result.embedding.final_loss });
    if a.pad_index.is_none() {
        let reference = crate::linalg::Tensor::constant(ck.params.decoder_logits.clone())
            .softmax_rows()
            .value()
            .clone();
        let reference = map_patterns(&reference, &ck.node_ids, &g, false)?;
        let change = stability_relative_change(&reference, coords)?;
        out.write(
            "stability.csv",
            &format!("relative_change\n{}\n", fmt_f64(change)),
        )?;
        summary["relative_change"] = json!(change);
    }
    out.write_json("summary.json", &summary)?;
    out.finish("transfer", config_json(&cfg), cfg.seed)
}

fn parse_ids(text: &str) -> Result<Vec<i64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad node id `{}`", l.trim()),
            })
        })
        .collect()
}

/// Labels from a `node_id class_id` file aligned with the rows of `ids`.
fn labels_for_ids(text: &str, ids: &[i64]) -> Result<Vec<usize>> {
    let edges: String = ids.iter().map(|id| format!("{id} {id}\n")).collect();
    let g = Graph::parse_edge_list(&edges)?;
    g.parse_labels(text)
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let mut out = OutDir::create(&a.out)?;
    let (ids, coords) = parse_matrix_csv(&out.input(&a.coordinates)?)?;
    let labels = labels_for_ids(&out.input(&a.labels)?, &ids)?;
    match a.mode {
        EvalMode::Cluster => {
            let k = a.k.unwrap_or_else(|| n_classes(&labels));
            let rep = cluster_report(&coords, &labels, k, a.seed)?;
            out.write(
                "clustering.csv",
                &format!("k,ami,nmi\n{k},{},{}\n", fmt_f64(rep.ami), fmt_f64(rep.nmi)),
            )?;
            let mut assign = String::from("node_id,cluster\n");
            for (id, c) in ids.iter().zip(&rep.assignments) {
                let _ = writeln!(assign, "{id},{c}");
            }
            out.write("assignments.csv", &assign)?;
            out.write_json("summary.json", &rep)?;
            out.finish("eval cluster", json!({ "k": k }), a.seed)
        }
        EvalMode::Classify => {
            let mut csv = String::from("train_ratio,split_seed,macro_f1,accuracy\n");
            let mut means = Vec::new();
            for &ratio in &a.ratios {
                let reps = classify_splits(&coords, &labels, ratio, a.splits, a.seed, a.l2)?;
                for r in &reps {
                    let _ = writeln!(
                        csv,
                        "{ratio},{},{},{}",
                        r.split_seed,
                        fmt_f64(r.macro_f1),
                        fmt_f64(r.accuracy)
                    );
                }
                let (f1, acc) = mean_scores(&reps);
                means.push(json!({ "train_ratio": ratio, "macro_f1": f1, "accuracy": acc }));
            }
            out.write("classification.csv", &csv)?;
            out.write_json("summary.json", &means)?;
            out.finish(
                "eval classify",
                json!({ "ratios": a.ratios, "splits": a.splits, "l2": a.l2 }),
                a.seed,
            )
        }
    }
}

fn write_graph(out: &mut OutDir, g: &Graph) -> Result<()> {
    out.write("graph.edges", &g.to_edge_list())?;
    if let Some(l) = g.labels_to_string() {
        out.write("graph.labels", &l)?;
    }
    Ok(())
}

fn sbm_params(sizes: &[usize], p: Option<f64>, q: Option<f64>) -> Result<SbmParams> {
    let p = p.ok_or_else(|| invalid("p", "required for block models"))?;
    let q = q.ok_or_else(|| invalid("q", "required for block models"))?;
    SbmParams::new(sizes.to_vec(), p, q)
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let mut out = OutDir::create(&a.out)?;
    let need_graph = |out: &mut OutDir| -> Result<Graph> {
        let path = a
            .graph
            .as_ref()
            .ok_or_else(|| invalid("graph", "this generator needs --graph"))?;
        load_graph(out, path, a.labels.as_deref())
    };
    let params = match a.kind {
        GenerateKind::Sbm => {
            let sbm = sbm_params(&a.sizes, a.p, a.q)?;
            write_graph(&mut out, &sbm.generate_connected(a.seed)?)?;
            json!({ "kind": "sbm", "sizes": a.sizes, "p": a.p, "q": a.q })
        }
        GenerateKind::Perturb => match (a.add_ratio, a.p_prime) {
            (Some(ratio), None) => {
                let g = need_graph(&mut out)?;
                write_graph(&mut out, &perturb_add_edges(&g, ratio, a.seed)?)?;
                json!({ "kind": "perturb", "add_ratio": ratio })
            }
            (None, Some(pp)) => {
                let sbm = sbm_params(&a.sizes, a.p, a.q)?;
                write_graph(&mut out, &perturb_intra_probability(&sbm, pp, a.seed)?)?;
                json!({ "kind": "perturb", "sizes": a.sizes, "p_prime": pp, "q": a.q })
            }
            _ => {
                return Err(invalid(
                    "perturb",
                    "pass exactly one of --add-ratio and --p-prime",
                ))
            }
        },
        GenerateKind::Downsample => {
            let keep = a.keep.ok_or_else(|| invalid("keep", "required for downsample"))?;
            let g = need_graph(&mut out)?;
            let (sub, kept) = downsample(&g, keep, a.seed)?;
            write_graph(&mut out, &sub)?;
            let ids: String = kept.iter().map(|&i| format!("{}\n", g.node_ids()[i])).collect();
            out.write("kept.txt", &ids)?;
            json!({ "kind": "downsample", "keep": keep })
        }
    };
    out.finish("generate", params, a.seed)
}

pub fn cmd_sweep_epsilon(a: &SweepEpsilonArgs) -> Result<()> {
    let mut out = OutDir::create(&a.out)?;
    let (cfg, _) = a.cfg.resolve(&mut out)?;
    let g = load_graph(&mut out, &a.graph, Some(&a.labels))?;
    let protocol = SplitProtocol {
        train_ratio: a.train_ratio,
        n_splits: a.splits,
        seed: cfg.seed,
        l2: a.l2,
    };
    let rows = epsilon_sensitivity_sweep(&g, &cfg, &a.epsilons, &protocol)?;
    let mut csv = String::from("epsilon,accuracy,macro_f1,final_loss\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.epsilon,
            fmt_f64(r.accuracy),
            fmt_f64(r.macro_f1),
            fmt_f64(r.final_loss)
        );
    }
    out.write("epsilon.csv", &csv)?;
    out.write_json("summary.json", &rows)?;
    let mut conf = config_json(&cfg);
    conf["train_ratio"] = json!(a.train_ratio);
    conf["splits"] = json!(a.splits);
    conf["l2"] = json!(a.l2);
    out.finish("sweep-epsilon", conf, cfg.seed)
}

pub fn cmd_sweep_perturb(a: &SweepPerturbArgs) -> Result<()> {
    let mut out = OutDir::create(&a.out)?;
    let (cfg, _) = a.cfg.resolve(&mut out)?;
    let (base, sbm) = match a.kind {
        PerturbKind::Intra => {
            let sbm = sbm_params(&a.sizes, a.p, a.q)?;
            (sbm.generate_connected(a.graph_seed)?, Some(sbm))
        }
        PerturbKind::Add => {
            let path = a
                .graph
                .as_ref()
                .ok_or_else(|| invalid("graph", "`add` sweeps need --graph"))?;
            (load_graph(&mut out, path, a.labels.as_deref())?, None)
        }
    };
    let values = if a.values.is_empty() {
        match a.kind {
            PerturbKind::Intra => intra_probability_sweep(),
            PerturbKind::Add => add_ratio_sweep(),
        }
    } else {
        a.values.clone()
    };
    let trained = fit(&base, &cfg)?;
    let reference = &trained.embedding.coordinates;
    let patterns = &trained.embedding.patterns;
    struct Cell {
        value: f64,
        relative_perturbation: f64,
        change: f64,
        scores: Option<(f64, f64)>,
        ids: Vec<i64>,
        coords: Matrix,
    }
    let cells: Vec<Cell> = values
        .par_iter()
        .enumerate()
        .map(|(idx, &value)| -> Result<Cell> {
            let seed = a.graph_seed.wrapping_add(1 + idx as u64);
            let (g, rel) = match &sbm {
                Some(s) => (
                    perturb_intra_probability(s, value, seed)?,
                    (s.p_in - value).abs() / value,
                ),
                None => (perturb_add_edges(&base, value, seed)?, value),
            };
            let mapped = map_patterns(patterns, base.node_ids(), &g, false)?;
            let res = fit_coordinates(&g, &mapped, &cfg)?;
            let coords = res.embedding.coordinates;
            let reference = map_patterns(reference, base.node_ids(), &g, false)?;
            let change = stability_relative_change(&reference, &coords)?;
            let scores = match g.labels() {
                Some(l) => {
                    let rep = cluster_report(&coords, l, n_classes(l), cfg.seed)?;
                    Some((rep.ami, rep.nmi))
                }
                None => None,
            };
            Ok(Cell {
                value,
                relative_perturbation: rel,
                change,
                scores,
                ids: g.node_ids().to_vec(),
                coords,
            })
        })
        .collect::<Result<_>>()?;
    out.write(
        "coordinates.csv",
        &matrix_csv(base.node_ids(), reference, "lambda"),
    )?;
    out.write("patterns.csv", &matrix_csv(base.node_ids(), patterns, "pattern"))?;
    let mut csv = String::from("value,relative_perturbation,relative_change,ami,nmi\n");
    for c in &cells {
        out.write(
            &format!("coordinates_transfer_{}.csv", c.value),
            &matrix_csv(&c.ids, &c.coords, "lambda"),
        )?;
        let (ami, nmi) = c
            .scores
            .map_or((String::new(), String::new()), |(x, y)| (fmt_f64(x), fmt_f64(y)));
        let _ = writeln!(
            csv,
            "{},{},{},{ami},{nmi}",
            c.value,
            fmt_f64(c.relative_perturbation),
            fmt_f64(c.change)
        );
    }
    out.write("stability.csv", &csv)?;
    let mut conf = config_json(&cfg);
    conf["kind"] = json!(format!("{:?}", a.kind).to_lowercase());
    conf["values"] = json!(values);
    conf["graph_seed"] = json!(a.graph_seed);
    if let Some(s) = &sbm {
        conf["sizes"] = json!(s.block_sizes);
        conf["p"] = json!(s.p_in);
        conf["q"] = json!(s.q_out);
    }
    out.finish("sweep-perturb", conf, cfg.seed)
}
