//! End-to-end embedding pipeline over multiple networks that share one node
//! set.
//!
//! Per network: diffuse the adjacency into node features, train a stack of
//! progressively narrower autoencoders, and between stages exchange
//! must-link / cannot-link pairs with the other networks — each network
//! trains only on pairs that every *other* network also proposed. The final
//! hidden layers are the per-network embeddings; their concatenation is the
//! combined embedding.
//!
//! Every encoder input is conditioned first: raw feature rows go through
//! [`log_rescale_columns`] and each stage's hidden output goes through
//! [`rescale_columns`] before feeding the next stage. Without this the
//! gradient scale collapses — see the function docs.
//!
//! Two schedules are supported. The default walks down the layer stack
//! once, treating stage `s` (for `s >= 2`) as constrained iteration
//! `t = s - 1` and applying constraints while `t <= iterations_T`. With
//! `repeat_schedule` every stage past the first is instead retrained
//! `iterations_T` times, re-extracting constraints from each refit.

use std::io::{BufRead, Write as _};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::constraints::{
    extract_threshold, extract_topk, merge_constraints, pairwise_pcc, sample_pair_pool,
    symmetric_difference_size, ConstraintSet,
};
use crate::diffusion::{rwr, transition_matrix};
use crate::error::{Error, Result};
use crate::graph::{NodeIndex, WeightedGraph};
use crate::matrix::Matrix;
use crate::neural::{train_semi_ae, ConstraintMatrices, TrainConfig};
use crate::scalar::Scalar;

/// How candidate pairs scored by correlation become constraints.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConstraintStrategy {
    /// Take the `floor(P * candidates)` most correlated pairs as must-link
    /// and the same number of least correlated as cannot-link.
    #[default]
    TopK,
    /// Take pairs scoring `>= f1` as must-link and `<= f2` as cannot-link.
    Threshold { f1: f64, f2: f64 },
}

fn default_rwr_alpha() -> f64 {
    0.5
}
fn default_rwr_tol() -> f64 {
    1e-8
}
fn default_rwr_max_iter() -> usize {
    1000
}
fn default_constraint_fraction() -> f64 {
    0.001
}

/// Everything a run needs besides the networks themselves. Deserializes
/// from the run-config JSON; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Layer widths starting at the input dimension (= node count),
    /// strictly decreasing; the last entry is the embedding dimension.
    pub layer_dims: Vec<usize>,
    /// Number of constrained training iterations.
    #[serde(rename = "iterations_T")]
    pub iterations: usize,
    /// Fraction of scored candidate pairs adopted per side by the `topk`
    /// strategy.
    #[serde(rename = "constraint_fraction_P", default = "default_constraint_fraction")]
    pub constraint_fraction: f64,
    #[serde(default = "default_rwr_alpha")]
    pub rwr_alpha: f64,
    #[serde(default = "default_rwr_tol")]
    pub rwr_tol: f64,
    #[serde(default = "default_rwr_max_iter")]
    pub rwr_max_iter: usize,
    /// Feed raw adjacency rows to the autoencoders instead of diffusion
    /// profiles.
    #[serde(default)]
    pub skip_rwr: bool,
    /// Retrain each stage `iterations_T` times instead of walking the
    /// stack once.
    #[serde(default)]
    pub repeat_schedule: bool,
    #[serde(default)]
    pub strategy: ConstraintStrategy,
    #[serde(default)]
    pub train: TrainConfig,
}

impl PipelineConfig {
    /// Validates against the node count `n`. Error messages carry a JSON
    /// pointer to the offending field.
    pub fn validate(&self, n: usize) -> Result<()> {
        let dims = &self.layer_dims;
        if dims.len() < 2 {
            return Err(Error::config(
                "/layer_dims",
                "need the input dimension plus at least one hidden layer",
            ));
        }
        if dims[0] != n {
            return Err(Error::config(
                "/layer_dims",
                format!("first entry {} must equal the node count {n}", dims[0]),
            ));
        }
        for w in dims.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::config(
                    "/layer_dims",
                    format!("entries must be strictly decreasing, found {} before {}", w[0], w[1]),
                ));
            }
        }
        if *dims.last().unwrap() == 0 {
            return Err(Error::config("/layer_dims", "layer widths must be positive"));
        }
        if !self.repeat_schedule && self.iterations + 2 > dims.len() {
            return Err(Error::config(
                "/iterations_T",
                format!(
                    "{} constrained iterations do not fit {} layers (at most {})",
                    self.iterations,
                    dims.len(),
                    dims.len() - 2
                ),
            ));
        }
        if self.repeat_schedule && self.iterations >= 2 && *dims.last().unwrap() < 2 {
            return Err(Error::config(
                "/layer_dims",
                "the repeat schedule re-extracts constraints from every stage, so the final layer needs at least 2 dimensions",
            ));
        }
        if !self.constraint_fraction.is_finite()
            || !(0.0..=0.5).contains(&self.constraint_fraction)
        {
            return Err(Error::config(
                "/constraint_fraction_P",
                format!("must lie in [0, 0.5], got {}", self.constraint_fraction),
            ));
        }
        if !self.rwr_alpha.is_finite() || self.rwr_alpha <= 0.0 || self.rwr_alpha > 1.0 {
            return Err(Error::config(
                "/rwr_alpha",
                format!("restart probability must lie in (0, 1], got {}", self.rwr_alpha),
            ));
        }
        if !self.rwr_tol.is_finite() || self.rwr_tol <= 0.0 {
            return Err(Error::config(
                "/rwr_tol",
                format!("tolerance must be positive, got {}", self.rwr_tol),
            ));
        }
        if self.rwr_max_iter == 0 {
            return Err(Error::config("/rwr_max_iter", "must allow at least one sweep"));
        }
        if let ConstraintStrategy::Threshold { f1, f2 } = self.strategy {
            if !f1.is_finite() || !f2.is_finite() || f2 >= f1 {
                return Err(Error::config(
                    "/strategy",
                    format!("thresholds need finite f2 < f1, got f1 = {f1}, f2 = {f2}"),
                ));
            }
        }
        if !self.train.learning_rate.is_finite() || self.train.learning_rate <= 0.0 {
            return Err(Error::config(
                "/train/learning_rate",
                format!("must be positive, got {}", self.train.learning_rate),
            ));
        }
        if self.train.batch_size == 0 {
            return Err(Error::config("/train/batch_size", "must be at least 1"));
        }
        if self.train.epochs == 0 {
            return Err(Error::config("/train/epochs", "must be at least 1"));
        }
        for (pointer, value) in [
            ("/train/lambda1", self.train.lambda1),
            ("/train/lambda2", self.train.lambda2),
            ("/train/lambda", self.train.lambda),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::config(
                    pointer,
                    format!("must be finite and non-negative, got {value}"),
                ));
            }
        }
        Ok(())
    }
}

/// Seed for one training stage, mixed from the run seed and the stage
/// number with a SplitMix64 finalizer. Deliberately independent of the
/// network (so identical networks train identically) and, under the repeat
/// schedule, of the repetition.
pub fn stage_seed(base: u64, stage: usize) -> u64 {
    let mut z = base ^ (stage as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One training pass of one network through one stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub stage: usize,
    /// Repetition number within the stage (always 1 unless
    /// `repeat_schedule`).
    pub rep: usize,
    pub in_dim: usize,
    pub out_dim: usize,
    pub constrained: bool,
    /// Merged constraints this network trained with.
    pub must_count: usize,
    pub cannot_count: usize,
    /// Pairs dropped because the other networks disagreed about their kind.
    pub merge_conflicts: usize,
    pub final_epoch_loss: f64,
    /// Constraints this network proposed after the pass (when the schedule
    /// extracts here).
    pub extracted_must: usize,
    pub extracted_cannot: usize,
    /// Candidate pairs with undefined correlation (zero-variance rows).
    pub undefined_pairs: usize,
    /// Symmetric difference against this network's previous proposal.
    pub proposal_drift: Option<usize>,
    pub millis: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkReport {
    pub network: usize,
    pub rwr_converged: bool,
    pub rwr_iterations: usize,
    pub rwr_residual: f64,
    pub stages: Vec<StageReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub nodes: usize,
    pub networks: usize,
    pub layer_dims: Vec<usize>,
    pub iterations: usize,
    pub embedding_dim: usize,
    /// Size of the scored candidate pool.
    pub candidate_pairs: usize,
    pub networks_detail: Vec<NetworkReport>,
    pub warnings: Vec<String>,
    pub total_millis: u128,
}

/// Constraints in force during one constrained pass, per network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub stage: usize,
    pub rep: usize,
    pub merged: Vec<ConstraintSet>,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct EmbeddingSet<S> {
    pub index: NodeIndex,
    /// Final hidden layer of each network, row-aligned with `index`.
    pub per_network: Vec<Matrix<S>>,
    /// Horizontal concatenation of the per-network embeddings.
    pub combined: Matrix<S>,
    pub report: PipelineReport,
    pub constraint_history: Vec<IterationRecord>,
}

/// Concatenates matrices with equal row counts side by side.
pub fn combine<S: Scalar>(parts: &[Matrix<S>]) -> Matrix<S> {
    assert!(!parts.is_empty(), "nothing to combine");
    let rows = parts[0].rows();
    assert!(parts.iter().all(|m| m.rows() == rows), "row counts differ");
    let cols = parts.iter().map(|m| m.cols()).sum();
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..rows {
        let row = out.row_mut(i);
        let mut at = 0;
        for part in parts {
            row[at..at + part.cols()].copy_from_slice(part.row(i));
            at += part.cols();
        }
    }
    out
}

struct PlannedRep {
    stage: usize,
    rep: usize,
    constrained: bool,
}

fn build_plan(config: &PipelineConfig) -> Vec<PlannedRep> {
    let stages = config.layer_dims.len() - 1;
    let mut plan = vec![PlannedRep { stage: 1, rep: 1, constrained: false }];
    for stage in 2..=stages {
        if config.repeat_schedule {
            if config.iterations == 0 {
                plan.push(PlannedRep { stage, rep: 1, constrained: false });
            } else {
                for rep in 1..=config.iterations {
                    plan.push(PlannedRep { stage, rep, constrained: true });
                }
            }
        } else {
            let constrained = stage - 1 <= config.iterations;
            plan.push(PlannedRep { stage, rep: 1, constrained });
        }
    }
    plan
}

struct Extraction {
    proposal: ConstraintSet,
    undefined: usize,
}

fn extract_proposal(
    hidden: &Matrix<impl Scalar>,
    pool: &[(usize, usize)],
    config: &PipelineConfig,
) -> Result<Extraction> {
    let scores = pairwise_pcc(hidden, pool)?;
    let mut candidates = Vec::with_capacity(pool.len());
    let mut undefined = 0;
    for (&pair, score) in pool.iter().zip(scores) {
        match score {
            Some(s) => candidates.push((pair, s)),
            None => undefined += 1,
        }
    }
    let proposal = match config.strategy {
        ConstraintStrategy::TopK => {
            let k = (config.constraint_fraction * candidates.len() as f64).floor() as usize;
            extract_topk(&candidates, k)?
        }
        ConstraintStrategy::Threshold { f1, f2 } => extract_threshold(&candidates, f1, f2)?,
    };
    Ok(Extraction { proposal, undefined })
}

/// Offset added before the log map in [`log_rescale_columns`] so that exact
/// zeros stay finite.
pub const LOG_FLOOR: f64 = 1e-6;

/// Rescales every column onto `[0, 1]` independently (min–max); constant
/// columns map to zero.
///
/// Applied to each stage's hidden output before it becomes the next stage's
/// input. Hidden activations cluster near the activation midpoint with a
/// spread that shrinks stage over stage; left alone, the next encoder sees
/// near-constant rows and its weight gradients (which scale with the input)
/// vanish. The map is affine per column, so it changes no ordering or
/// geometry within a column, and it keeps inputs inside the range a sigmoid
/// decoder can actually reproduce.
pub fn rescale_columns<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    let mut out = m.clone();
    for c in 0..out.cols() {
        let mut lo = S::infinity();
        let mut hi = S::neg_infinity();
        for r in 0..out.rows() {
            lo = lo.min(out[(r, c)]);
            hi = hi.max(out[(r, c)]);
        }
        let span = hi - lo;
        for r in 0..out.rows() {
            out[(r, c)] =
                if span > S::zero() { (out[(r, c)] - lo) / span } else { S::zero() };
        }
    }
    out
}

/// Conditions raw feature rows for the first encoder: `ln(x + 1e-6)`
/// followed by [`rescale_columns`].
///
/// Diffusion profiles are heavy-tailed: each column is dominated by the
/// start node's self-relevance while the informative neighbourhood mass
/// sits orders of magnitude lower. The log map spreads that tail so the
/// rescale doesn't flatten it against the dominant entry. For 0/1
/// adjacency features the combined map reproduces the 0/1 values exactly
/// (on columns that contain both), so the raw-adjacency path is unaffected
/// in the unweighted case.
pub fn log_rescale_columns<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    let mut shifted = m.clone();
    let floor = crate::scalar::cast::<S>(LOG_FLOOR);
    for v in shifted.data_mut() {
        *v = (*v + floor).ln();
    }
    rescale_columns(&shifted)
}

/// Runs the full pipeline over `networks` (all sharing one node index).
pub fn run_deepmne<S: Scalar>(
    networks: &[WeightedGraph],
    config: &PipelineConfig,
) -> Result<EmbeddingSet<S>> {
    let started = Instant::now();
    let k_nets = networks.len();
    if k_nets < 2 {
        return Err(Error::invalid(format!(
            "cross-network constraint exchange needs at least 2 networks, found {k_nets}"
        )));
    }
    let index = networks[0].index().clone();
    for (i, net) in networks.iter().enumerate().skip(1) {
        if net.index().names() != index.names() {
            return Err(Error::invalid(format!(
                "network {i} is indexed over a different node set than network 0"
            )));
        }
    }
    let n = index.len();
    config.validate(n)?;

    let mut warnings = Vec::new();
    let mut network_reports = Vec::with_capacity(k_nets);
    let mut inputs: Vec<Matrix<S>> = Vec::with_capacity(k_nets);
    for (i, net) in networks.iter().enumerate() {
        if config.skip_rwr {
            inputs.push(log_rescale_columns(&net.adjacency::<S>()));
            network_reports.push(NetworkReport {
                network: i,
                rwr_converged: true,
                rwr_iterations: 0,
                rwr_residual: 0.0,
                stages: Vec::new(),
            });
            continue;
        }
        let t = transition_matrix(&net.adjacency::<S>())?;
        let d = rwr(&t, config.rwr_alpha, config.rwr_tol, config.rwr_max_iter)?;
        if !d.converged {
            warnings.push(format!(
                "network {i}: diffusion stopped at residual {:.3e} after {} sweeps without reaching {:.3e}",
                d.residual, d.iterations_used, config.rwr_tol
            ));
        }
        network_reports.push(NetworkReport {
            network: i,
            rwr_converged: d.converged,
            rwr_iterations: d.iterations_used,
            rwr_residual: d.residual,
            stages: Vec::new(),
        });
        inputs.push(log_rescale_columns(&d.node_features()));
    }

    let pool = sample_pair_pool(n, config.train.seed);
    let plan = build_plan(config);
    let mut proposals: Vec<Option<ConstraintSet>> = vec![None; k_nets];
    let mut outputs: Vec<Matrix<S>> = Vec::new();
    let mut history = Vec::new();

    for (step, planned) in plan.iter().enumerate() {
        if step > 0 && plan[step - 1].stage != planned.stage {
            inputs = outputs.iter().map(rescale_columns).collect();
        }
        let out_dim = config.layer_dims[planned.stage];
        let seed = stage_seed(config.train.seed, planned.stage);
        let train_config = TrainConfig { seed, ..config.train.clone() };
        let extract_after = plan.get(step + 1).is_some_and(|next| next.constrained);

        let mut merged_record = Vec::new();
        let mut new_outputs = Vec::with_capacity(k_nets);
        for net in 0..k_nets {
            let pass_started = Instant::now();
            let (cm, must_count, cannot_count, conflicts) = if planned.constrained {
                let foreign: Vec<ConstraintSet> = (0..k_nets)
                    .filter(|&j| j != net)
                    .map(|j| {
                        proposals[j]
                            .clone()
                            .expect("constrained pass scheduled before any extraction")
                    })
                    .collect();
                let outcome = merge_constraints(&foreign)?;
                let counts =
                    (outcome.merged.must.len(), outcome.merged.cannot.len(), outcome.conflicts);
                let cm = outcome.merged.to_matrices(n)?;
                merged_record.push(outcome.merged);
                (cm, counts.0, counts.1, counts.2)
            } else {
                (ConstraintMatrices::empty(n), 0, 0, 0)
            };
            let trained = train_semi_ae(&inputs[net], &cm, out_dim, &train_config)?;
            let mut stage_report = StageReport {
                stage: planned.stage,
                rep: planned.rep,
                in_dim: inputs[net].cols(),
                out_dim,
                constrained: planned.constrained,
                must_count,
                cannot_count,
                merge_conflicts: conflicts,
                final_epoch_loss: *trained.epoch_losses.last().unwrap_or(&f64::NAN),
                extracted_must: 0,
                extracted_cannot: 0,
                undefined_pairs: 0,
                proposal_drift: None,
                millis: 0,
            };
            if extract_after {
                let extraction = extract_proposal(&trained.hidden, &pool, config)?;
                stage_report.extracted_must = extraction.proposal.must.len();
                stage_report.extracted_cannot = extraction.proposal.cannot.len();
                stage_report.undefined_pairs = extraction.undefined;
                stage_report.proposal_drift = proposals[net]
                    .as_ref()
                    .map(|prev| symmetric_difference_size(prev, &extraction.proposal));
                if extraction.undefined > 0 {
                    warnings.push(format!(
                        "network {net}, stage {}, rep {}: {} candidate pair(s) had zero-variance rows and were not scored",
                        planned.stage, planned.rep, extraction.undefined
                    ));
                }
                proposals[net] = Some(extraction.proposal);
            }
            stage_report.millis = pass_started.elapsed().as_millis();
            network_reports[net].stages.push(stage_report);
            new_outputs.push(trained.hidden);
        }
        if planned.constrained {
            history.push(IterationRecord {
                stage: planned.stage,
                rep: planned.rep,
                merged: merged_record,
            });
        }
        outputs = new_outputs;
    }

    let combined = combine(&outputs);
    let report = PipelineReport {
        nodes: n,
        networks: k_nets,
        layer_dims: config.layer_dims.clone(),
        iterations: config.iterations,
        embedding_dim: combined.cols(),
        candidate_pairs: pool.len(),
        networks_detail: network_reports,
        warnings,
        total_millis: started.elapsed().as_millis(),
    };
    Ok(EmbeddingSet { index, per_network: outputs, combined, report, constraint_history: history })
}

/// Writes an embedding as TSV: one row per node, node name first, then the
/// vector entries with 17 significant digits.
pub fn write_embedding_tsv<S: Scalar>(
    path: &Path,
    index: &NodeIndex,
    embedding: &Matrix<S>,
) -> Result<()> {
    assert_eq!(embedding.rows(), index.len(), "embedding rows must match the node index");
    let mut out = String::new();
    for i in 0..embedding.rows() {
        out.push_str(index.name(i));
        for v in embedding.row(i) {
            out.push_str(&format!("\t{:.16e}", v.to_f64().unwrap()));
        }
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads an embedding TSV written by [`write_embedding_tsv`]: node names
/// plus an `f64` matrix. Rows must be non-empty and of equal width.
pub fn read_embedding_tsv(path: &Path) -> Result<(Vec<String>, Matrix<f64>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut names = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let name = fields.next().unwrap_or_default();
        if name.is_empty() {
            return Err(Error::parse(path, lineno + 1, "missing node identifier"));
        }
        let values: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    Error::parse(path, lineno + 1, format!("malformed number {f:?}"))
                })
            })
            .collect::<Result<_>>()?;
        if values.is_empty() {
            return Err(Error::parse(path, lineno + 1, "row has no embedding values"));
        }
        if let Some(first) = rows.first() {
            if values.len() != first.len() {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("row has {} values, expected {}", values.len(), first.len()),
                ));
            }
        }
        names.push(name.to_string());
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::parse(path, 1, "embedding file is empty"));
    }
    Ok((names, Matrix::from_rows(rows)))
}
