//! `deepmne` — diffuse, embed, and evaluate multi-network embeddings from
//! the command line.
//!
//! Each command writes its artifacts into a run directory together with a
//! `manifest.json` recording the exact inputs and parameters, so any run
//! can be reproduced — bitwise — from its manifest alone. A non-empty run
//! directory is never written into unless `--force` is given.
//!
//! Exit codes: 0 on success, 2 when the invocation or its inputs are
//! invalid, 1 when the computation itself fails (training diverged). Set
//! `DEEPMNE_LOG=info` (or `debug`) for progress lines on stderr.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;

use deepmne_core::diffusion::{rwr, transition_matrix, write_diffusion};
use deepmne_core::error::{Error, Result};
use deepmne_core::evaluation::{kfold_cv, write_scores_tsv, OvrConfig};
use deepmne_core::graph::{build_node_index, load_edge_list, load_labels, NodeIndex};
use deepmne_core::pipeline::{
    read_embedding_tsv, run_deepmne, write_embedding_tsv, EmbeddingSet, PipelineConfig,
    PipelineReport,
};

#[derive(Parser)]
#[command(
    name = "deepmne",
    version,
    about = "Multi-network node embedding: diffusion, constrained autoencoders, evaluation"
)]
struct Cli {
    /// Cap the number of worker threads (default: one per core). Results
    /// never depend on this.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Diffuse each network to its random-walk-with-restart steady state.
    Diffuse(DiffuseArgs),
    /// Embed all networks with the constrained autoencoder pipeline.
    Embed(EmbedArgs),
    /// Score an embedding by cross-validated multi-label classification.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct DiffuseArgs {
    /// Edge-list files, one network per file (`a TAB b [TAB weight]`).
    #[arg(long, required = true, num_args = 1.., value_name = "FILE")]
    edges: Vec<PathBuf>,

    /// Restart probability in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,

    /// Convergence threshold on the max-norm column update.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    /// Sweep limit before giving up on convergence.
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,

    /// Run directory for the `.dmne` matrices and manifest.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Write into a non-empty run directory.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct EmbedArgs {
    /// Run-config JSON: pipeline fields at the top level, plus an optional
    /// "edges" array of paths resolved against the config file's directory.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,

    /// Edge-list files; overrides the config's "edges" array.
    #[arg(long, num_args = 1.., value_name = "FILE")]
    edges: Vec<PathBuf>,

    /// Overrides the training seed from the config.
    #[arg(long)]
    seed: Option<u64>,

    /// Feed raw adjacency rows to the autoencoders instead of diffusion
    /// profiles (overrides the config).
    #[arg(long)]
    skip_rwr: bool,

    /// Also write the merged constraint pairs of every iteration as JSON.
    #[arg(long)]
    dump_constraints: bool,

    /// Run directory for the embedding TSVs and manifest.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Write into a non-empty run directory.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Embedding TSV: node id, then vector entries.
    #[arg(long, value_name = "FILE")]
    embeddings: PathBuf,

    /// Label file (`node TAB comma-separated-labels`). Must cover every
    /// embedded node and name no others.
    #[arg(long, value_name = "FILE")]
    labels: PathBuf,

    /// Cross-validation folds (at least 2).
    #[arg(long, default_value_t = 5)]
    folds: usize,

    /// Seed for fold assignment and the classifier probes.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Epochs for each one-vs-rest probe.
    #[arg(long, default_value_t = 300)]
    probe_epochs: usize,

    /// Learning rate for each one-vs-rest probe.
    #[arg(long, default_value_t = 1.0)]
    probe_learning_rate: f64,

    /// Optional run directory for metrics, pooled scores, and manifest;
    /// the metrics JSON always goes to stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Write into a non-empty run directory.
    #[arg(long)]
    force: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DEEPMNE_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Diffuse(args) => cmd_diffuse(args),
        Command::Embed(args) => cmd_embed(args),
        Command::Evaluate(args) => cmd_evaluate(args),
    }
}

/// Creates the run directory, refusing to touch a non-empty one without
/// `--force`.
fn prepare_run_dir(path: &Path, force: bool) -> Result<()> {
    if path.exists() {
        if !path.is_dir() {
            return Err(Error::invalid(format!(
                "{} exists and is not a directory",
                path.display()
            )));
        }
        let occupied = fs::read_dir(path).map_err(|e| Error::io(path, e))?.next().is_some();
        if occupied && !force {
            return Err(Error::invalid(format!(
                "run directory {} is not empty; pass --force to write into it",
                path.display()
            )));
        }
    } else {
        fs::create_dir_all(path).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

// --- diffuse ----------------------------------------------------------------

#[derive(Serialize)]
struct DiffuseManifest {
    command: &'static str,
    alpha: f64,
    tol: f64,
    max_iter: usize,
    networks: Vec<DiffusedNetwork>,
}

#[derive(Serialize)]
struct DiffusedNetwork {
    source: PathBuf,
    output: String,
    nodes: usize,
    edges: usize,
    converged: bool,
    iterations_used: usize,
    residual: f64,
}

fn cmd_diffuse(args: DiffuseArgs) -> Result<()> {
    if !(args.alpha > 0.0 && args.alpha <= 1.0) {
        return Err(Error::invalid(format!("--alpha must lie in (0, 1], got {}", args.alpha)));
    }
    prepare_run_dir(&args.out, args.force)?;
    let index = build_node_index(&args.edges)?;
    info!("indexed {} nodes across {} edge files", index.len(), args.edges.len());
    let mut networks = Vec::with_capacity(args.edges.len());
    for (k, path) in args.edges.iter().enumerate() {
        let graph = load_edge_list(path, &index)?;
        let t = transition_matrix(&graph.adjacency::<f64>())?;
        let d = rwr(&t, args.alpha, args.tol, args.max_iter)?;
        if !d.converged {
            warn!(
                "network {k}: residual {:.3e} after {} sweeps, target {:.3e} not reached",
                d.residual, d.iterations_used, args.tol
            );
        }
        let output = format!("network_{k:02}.dmne");
        write_diffusion(&d, &args.out.join(&output))?;
        info!(
            "network {k}: {} -> {output} ({} sweeps, residual {:.3e})",
            path.display(),
            d.iterations_used,
            d.residual
        );
        networks.push(DiffusedNetwork {
            source: path.clone(),
            output,
            nodes: graph.n(),
            edges: graph.edges().len(),
            converged: d.converged,
            iterations_used: d.iterations_used,
            residual: d.residual,
        });
    }
    let manifest = DiffuseManifest {
        command: "diffuse",
        alpha: args.alpha,
        tol: args.tol,
        max_iter: args.max_iter,
        networks,
    };
    write_json(&args.out.join("manifest.json"), &manifest)?;
    println!("wrote {} diffusion matrices to {}", args.edges.len(), args.out.display());
    Ok(())
}

// --- embed ------------------------------------------------------------------

#[derive(Serialize)]
struct EmbedManifest {
    command: &'static str,
    edges: Vec<PathBuf>,
    config: PipelineConfig,
    report: PipelineReport,
}

/// Reads the run-config JSON: [`PipelineConfig`] fields at the top level,
/// plus an optional `edges` array whose relative paths are resolved
/// against the config file's directory.
fn read_run_config(path: &Path) -> Result<(PipelineConfig, Vec<PathBuf>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::parse(path, e.line(), format!("invalid JSON: {e}")))?;
    let edges = match value.as_object_mut().and_then(|o| o.remove("edges")) {
        Some(v) => serde_json::from_value::<Vec<PathBuf>>(v)
            .map_err(|e| Error::config("/edges", e.to_string()))?,
        None => Vec::new(),
    };
    let config: PipelineConfig =
        serde_json::from_value(value).map_err(|e| Error::config("/", e.to_string()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let edges =
        edges.into_iter().map(|p| if p.is_absolute() { p } else { base.join(p) }).collect();
    Ok((config, edges))
}

#[derive(Serialize)]
struct ConstraintDump {
    stage: usize,
    rep: usize,
    per_network: Vec<NamedConstraints>,
}

#[derive(Serialize)]
struct NamedConstraints {
    must: Vec<(String, String)>,
    cannot: Vec<(String, String)>,
}

/// Constraint history with node positions translated back to identifiers.
fn constraint_dump(set: &EmbeddingSet<f64>) -> Vec<ConstraintDump> {
    let name = |i: usize| set.index.name(i).to_string();
    set.constraint_history
        .iter()
        .map(|record| ConstraintDump {
            stage: record.stage,
            rep: record.rep,
            per_network: record
                .merged
                .iter()
                .map(|cs| NamedConstraints {
                    must: cs.must.iter().map(|&(i, j)| (name(i), name(j))).collect(),
                    cannot: cs.cannot.iter().map(|&(i, j)| (name(i), name(j))).collect(),
                })
                .collect(),
        })
        .collect()
}

fn cmd_embed(args: EmbedArgs) -> Result<()> {
    let (mut config, config_edges) = read_run_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.train.seed = seed;
    }
    if args.skip_rwr {
        config.skip_rwr = true;
    }
    let edges = if args.edges.is_empty() { config_edges } else { args.edges.clone() };
    if edges.is_empty() {
        return Err(Error::invalid(
            "no edge files: pass --edges or an \"edges\" array in the config",
        ));
    }
    prepare_run_dir(&args.out, args.force)?;
    let index = build_node_index(&edges)?;
    let graphs: Vec<_> =
        edges.iter().map(|p| load_edge_list(p, &index)).collect::<Result<_>>()?;
    info!("embedding {} networks over {} shared nodes", graphs.len(), index.len());
    let set = run_deepmne::<f64>(&graphs, &config)?;
    for w in &set.report.warnings {
        warn!("{w}");
    }
    for (k, embedding) in set.per_network.iter().enumerate() {
        write_embedding_tsv(&args.out.join(format!("network_{k:02}.tsv")), &set.index, embedding)?;
    }
    write_embedding_tsv(&args.out.join("combined.tsv"), &set.index, &set.combined)?;
    if args.dump_constraints {
        write_json(&args.out.join("constraints.json"), &constraint_dump(&set))?;
    }
    let manifest =
        EmbedManifest { command: "embed", edges, config, report: set.report.clone() };
    write_json(&args.out.join("manifest.json"), &manifest)?;
    println!(
        "wrote {} ({} nodes x {} dims, {} networks)",
        args.out.join("combined.tsv").display(),
        set.combined.rows(),
        set.combined.cols(),
        set.per_network.len()
    );
    Ok(())
}

// --- evaluate ---------------------------------------------------------------

#[derive(Serialize)]
struct EvaluateManifest {
    command: &'static str,
    embeddings: PathBuf,
    labels: PathBuf,
    folds: usize,
    seed: u64,
    probe_epochs: usize,
    probe_learning_rate: f64,
}

/// Requires every embedded node to appear in the label file, naming the
/// first few that do not.
fn check_label_coverage(path: &Path, index: &NodeIndex) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labeled = BTreeSet::new();
    for line in text.lines() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        labeled.insert(line.split('\t').next().unwrap_or_default());
    }
    let missing: Vec<&str> =
        index.names().iter().map(String::as_str).filter(|n| !labeled.contains(n)).collect();
    if missing.is_empty() {
        return Ok(());
    }
    let shown = missing.iter().take(5).copied().collect::<Vec<_>>().join(", ");
    let suffix = if missing.len() > 5 {
        format!(" and {} more", missing.len() - 5)
    } else {
        String::new()
    };
    Err(Error::invalid(format!(
        "{} embedded node(s) missing from the label file {}: {shown}{suffix}",
        missing.len(),
        path.display()
    )))
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    if args.folds < 2 {
        return Err(Error::invalid(format!("--folds must be at least 2, got {}", args.folds)));
    }
    let (names, x) = read_embedding_tsv(&args.embeddings)?;
    let index = NodeIndex::from_names(names)?;
    check_label_coverage(&args.labels, &index)?;
    let labels = load_labels(&args.labels, &index)?;
    info!(
        "evaluating {} nodes x {} dims against {} labels, {} folds",
        x.rows(),
        x.cols(),
        labels.labels().len(),
        args.folds
    );
    let probe = OvrConfig { epochs: args.probe_epochs, learning_rate: args.probe_learning_rate };
    let outcome = kfold_cv(&x, labels.assignments(), args.folds, args.seed, &probe)?;
    for w in &outcome.report.warnings {
        warn!("{w}");
    }
    let mut text = serde_json::to_string_pretty(&outcome.report)
        .map_err(|e| Error::invalid(format!("metrics serialization: {e}")))?;
    text.push('\n');
    print!("{text}");
    if let Some(out) = &args.out {
        prepare_run_dir(out, args.force)?;
        let metrics_path = out.join("metrics.json");
        fs::write(&metrics_path, &text).map_err(|e| Error::io(&metrics_path, e))?;
        write_scores_tsv(&out.join("scores.tsv"), index.names(), labels.labels(), &outcome.pooled_scores)?;
        let manifest = EvaluateManifest {
            command: "evaluate",
            embeddings: args.embeddings.clone(),
            labels: args.labels.clone(),
            folds: args.folds,
            seed: args.seed,
            probe_epochs: args.probe_epochs,
            probe_learning_rate: args.probe_learning_rate,
        };
        write_json(&out.join("manifest.json"), &manifest)?;
    }
    Ok(())
}
