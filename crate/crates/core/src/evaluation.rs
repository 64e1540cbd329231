//! Multi-label node classification used to score embedding quality:
//! one-vs-rest logistic regression under k-fold cross-validation, reporting
//! micro-averaged metrics over all (node, label) cells.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BoolMatrix, Matrix};
use crate::scalar::Scalar;

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// One independent logistic regression per label. Weights are kept in `f64`
/// regardless of the embedding scalar type; labels without a single positive
/// training example are flagged and score a flat 0.5.
#[derive(Debug, Clone)]
pub struct OvrModel {
    /// `labels x (features + 1)`; the last column is the bias.
    weights: Matrix<f64>,
    skipped: Vec<bool>,
}

impl OvrModel {
    pub fn labels(&self) -> usize {
        self.weights.rows()
    }

    pub fn features(&self) -> usize {
        self.weights.cols() - 1
    }

    /// True for labels that had no positive training example.
    pub fn skipped(&self) -> &[bool] {
        &self.skipped
    }

    /// Sigmoid scores in `(0, 1)`, one column per label.
    pub fn predict_scores<S: Scalar>(&self, x: &Matrix<S>) -> Matrix<f64> {
        assert_eq!(x.cols(), self.features(), "feature width mismatch");
        let l = self.labels();
        Matrix::from_fn(x.rows(), l, |i, c| {
            if self.skipped[c] {
                return 0.5;
            }
            let w = self.weights.row(c);
            let mut z = w[self.features()];
            for (k, v) in x.row(i).iter().enumerate() {
                z += w[k] * v.to_f64().unwrap();
            }
            sigmoid(z)
        })
    }
}

/// Thresholds scores at 0.5 (strictly greater counts as positive, so a
/// skipped label's flat 0.5 predicts negative).
pub fn predictions_from_scores(scores: &Matrix<f64>) -> BoolMatrix {
    BoolMatrix::from_fn(scores.rows(), scores.cols(), |i, c| scores[(i, c)] > 0.5)
}

/// Fits one-vs-rest logistic regressions by full-batch gradient descent on
/// the mean log-loss. Initial weights are uniform in `[-0.01, 0.01]` from a
/// ChaCha stream seeded with `seed`, drawn label by label, so training is
/// deterministic.
pub fn train_ovr<S: Scalar>(
    x: &Matrix<S>,
    y: &BoolMatrix,
    epochs: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<OvrModel> {
    if x.rows() == 0 {
        return Err(Error::invalid("cannot train a classifier on zero rows"));
    }
    if x.rows() != y.rows() {
        return Err(Error::invalid(format!(
            "feature matrix has {} rows but label matrix has {}",
            x.rows(),
            y.rows()
        )));
    }
    let n = x.rows();
    let d = x.cols();
    let l = y.cols();
    let xf: Vec<f64> = x.data().iter().map(|v| v.to_f64().unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Matrix::zeros(l, d + 1);
    let mut skipped = vec![false; l];
    for label in 0..l {
        for k in 0..=d {
            weights[(label, k)] = rng.gen_range(-0.01..=0.01);
        }
        let positives = (0..n).filter(|&i| y[(i, label)]).count();
        if positives == 0 {
            skipped[label] = true;
            continue;
        }
        let mut w: Vec<f64> = weights.row(label).to_vec();
        let mut grad = vec![0.0f64; d + 1];
        for _ in 0..epochs {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for i in 0..n {
                let xi = &xf[i * d..(i + 1) * d];
                let mut z = w[d];
                for k in 0..d {
                    z += w[k] * xi[k];
                }
                let err = sigmoid(z) - if y[(i, label)] { 1.0 } else { 0.0 };
                for k in 0..d {
                    grad[k] += err * xi[k];
                }
                grad[d] += err;
            }
            let scale = learning_rate / n as f64;
            for k in 0..=d {
                w[k] -= scale * grad[k];
            }
        }
        weights.row_mut(label).copy_from_slice(&w);
    }
    Ok(OvrModel { weights, skipped })
}

/// Fraction of (node, label) cells predicted correctly.
pub fn accuracy(predictions: &BoolMatrix, truth: &BoolMatrix) -> f64 {
    assert_eq!(predictions.rows(), truth.rows());
    assert_eq!(predictions.cols(), truth.cols());
    let total = predictions.rows() * predictions.cols();
    assert!(total > 0, "accuracy over zero cells is undefined");
    let agree = predictions
        .data()
        .iter()
        .zip(truth.data().iter())
        .filter(|(a, b)| a == b)
        .count();
    agree as f64 / total as f64
}

/// Micro-averaged F1: `2 TP / (2 TP + FP + FN)` pooled over all cells.
/// When there are no positives anywhere and none predicted, there are no
/// errors to punish and the score is 1.
pub fn micro_f1(predictions: &BoolMatrix, truth: &BoolMatrix) -> f64 {
    assert_eq!(predictions.rows(), truth.rows());
    assert_eq!(predictions.cols(), truth.cols());
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &t) in predictions.data().iter().zip(truth.data().iter()) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        1.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

fn pooled_cells(scores: &Matrix<f64>, truth: &BoolMatrix) -> Vec<(f64, bool)> {
    assert_eq!(scores.rows(), truth.rows());
    assert_eq!(scores.cols(), truth.cols());
    scores.data().iter().copied().zip(truth.data().iter().copied()).collect()
}

/// Micro-averaged area under the ROC curve, computed from tie-averaged
/// ranks (the Mann-Whitney statistic). `None` when the pooled cells are
/// single-class.
pub fn micro_auroc(scores: &Matrix<f64>, truth: &BoolMatrix) -> Option<f64> {
    let mut cells = pooled_cells(scores, truth);
    let n_pos = cells.iter().filter(|(_, t)| *t).count();
    let n_neg = cells.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0f64;
    let mut i = 0;
    while i < cells.len() {
        let mut j = i;
        while j < cells.len() && cells[j].0 == cells[i].0 {
            j += 1;
        }
        // Ranks are 1-based; every member of the tie block [i, j) gets the
        // block's average rank.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for cell in &cells[i..j] {
            if cell.1 {
                rank_sum += avg_rank;
            }
        }
        i = j;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos as f64 * n_neg as f64))
}

/// Micro-averaged area under the precision-recall curve: descending-score
/// sweep with tied scores admitted as one block, integrating precision
/// against recall steps. `None` when there are no positive cells.
pub fn micro_auprc(scores: &Matrix<f64>, truth: &BoolMatrix) -> Option<f64> {
    let mut cells = pooled_cells(scores, truth);
    let n_pos = cells.iter().filter(|(_, t)| *t).count();
    if n_pos == 0 {
        return None;
    }
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut area = 0.0f64;
    let mut i = 0;
    while i < cells.len() {
        let mut j = i;
        let mut block_tp = 0usize;
        let mut block_fp = 0usize;
        while j < cells.len() && cells[j].0 == cells[i].0 {
            if cells[j].1 {
                block_tp += 1;
            } else {
                block_fp += 1;
            }
            j += 1;
        }
        tp += block_tp;
        fp += block_fp;
        if block_tp > 0 {
            area += block_tp as f64 * (tp as f64 / (tp + fp) as f64);
        }
        i = j;
    }
    Some(area / n_pos as f64)
}

/// Classifier settings for cross-validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OvrConfig {
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for OvrConfig {
    fn default() -> Self {
        OvrConfig { epochs: 300, learning_rate: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub test_size: usize,
    pub accuracy: f64,
    pub micro_f1: f64,
    pub micro_auprc: Option<f64>,
    pub micro_auroc: Option<f64>,
}

/// Cross-validated evaluation: per-fold metrics, their means, and any
/// degenerate-fold exclusions. AUROC/AUPRC means skip folds where the
/// metric was undefined (single-class test cells); `None` if every fold
/// was excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub micro_f1: f64,
    pub micro_auprc: Option<f64>,
    pub micro_auroc: Option<f64>,
    pub per_fold: Vec<FoldMetrics>,
    pub fold_seed: u64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub report: MetricsReport,
    /// Out-of-fold scores row-aligned with the input: each node's scores
    /// come from the model that did not see it.
    pub pooled_scores: Matrix<f64>,
}

/// Splits `0..n` into `k` near-equal folds after a seeded shuffle; the
/// first `n % k` folds are one element larger.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    use rand::seq::SliceRandom;
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(indices[start..start + size].to_vec());
        start += size;
    }
    folds
}

/// Runs seeded k-fold cross-validation of one-vs-rest logistic regression.
pub fn kfold_cv<S: Scalar>(
    x: &Matrix<S>,
    y: &BoolMatrix,
    k: usize,
    seed: u64,
    config: &OvrConfig,
) -> Result<CvOutcome> {
    let n = x.rows();
    if y.rows() != n {
        return Err(Error::invalid(format!(
            "embedding has {n} rows but label matrix has {}",
            y.rows()
        )));
    }
    if y.cols() == 0 {
        return Err(Error::invalid("label matrix has no labels"));
    }
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, requested {k}")));
    }
    if k > n {
        return Err(Error::invalid(format!("cannot split {n} nodes into {k} folds")));
    }

    let folds = fold_assignment(n, k, seed);
    let mut per_fold = Vec::with_capacity(k);
    let mut warnings = Vec::new();
    let mut pooled_scores = Matrix::zeros(n, y.cols());
    for (f, test) in folds.iter().enumerate() {
        let test_set: BTreeSet<usize> = test.iter().copied().collect();
        let train: Vec<usize> = (0..n).filter(|i| !test_set.contains(i)).collect();
        let model = train_ovr(
            &x.select_rows(&train),
            &y.select_rows(&train),
            config.epochs,
            config.learning_rate,
            seed.wrapping_add(f as u64),
        )?;
        let skipped = model.skipped().iter().filter(|&&s| s).count();
        if skipped > 0 {
            warnings.push(format!(
                "fold {f}: {skipped} label(s) had no positive training example; their scores default to 0.5"
            ));
        }
        let scores = model.predict_scores(&x.select_rows(test));
        let truth = y.select_rows(test);
        for (local, &row) in test.iter().enumerate() {
            for c in 0..y.cols() {
                pooled_scores[(row, c)] = scores[(local, c)];
            }
        }
        let preds = predictions_from_scores(&scores);
        let auroc = micro_auroc(&scores, &truth);
        let auprc = micro_auprc(&scores, &truth);
        if auroc.is_none() {
            warnings.push(format!(
                "fold {f}: micro-AUROC undefined (test cells are single-class); excluded from the mean"
            ));
        }
        if auprc.is_none() {
            warnings.push(format!(
                "fold {f}: micro-AUPRC undefined (no positive test cell); excluded from the mean"
            ));
        }
        per_fold.push(FoldMetrics {
            fold: f,
            test_size: test.len(),
            accuracy: accuracy(&preds, &truth),
            micro_f1: micro_f1(&preds, &truth),
            micro_auprc: auprc,
            micro_auroc: auroc,
        });
    }

    let mean = |values: Vec<f64>| -> Option<f64> {
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    };
    let report = MetricsReport {
        accuracy: mean(per_fold.iter().map(|m| m.accuracy).collect()).unwrap(),
        micro_f1: mean(per_fold.iter().map(|m| m.micro_f1).collect()).unwrap(),
        micro_auprc: mean(per_fold.iter().filter_map(|m| m.micro_auprc).collect()),
        micro_auroc: mean(per_fold.iter().filter_map(|m| m.micro_auroc).collect()),
        per_fold,
        fold_seed: seed,
        warnings,
    };
    Ok(CvOutcome { report, pooled_scores })
}

/// Writes pooled scores as TSV: header `node` + label names, then one row
/// per node with 17-significant-digit scores.
pub fn write_scores_tsv(
    path: &Path,
    node_names: &[String],
    label_names: &[String],
    scores: &Matrix<f64>,
) -> Result<()> {
    assert_eq!(scores.rows(), node_names.len());
    assert_eq!(scores.cols(), label_names.len());
    let mut out = String::new();
    out.push_str("node");
    for name in label_names {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for (i, name) in node_names.iter().enumerate() {
        out.push_str(name);
        for c in 0..scores.cols() {
            out.push_str(&format!("\t{:.16e}", scores[(i, c)]));
        }
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
