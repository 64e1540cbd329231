//! Semi-supervised autoencoder: a single encoder/decoder pair whose hidden
//! layer is shaped by must-link and cannot-link node pairs.
//!
//! The training objective over a batch `X` (rows = nodes) is
//!
//! ```text
//! L = sum_i ||y_i - x_i||^2
//!   + lambda * ( lambda1 * sum_{(i,j) in M} ||h_i - h_j||^2
//!              - lambda2 * sum_{(i,j) in C} ||h_i - h_j||^2 )
//! ```
//!
//! with each unordered pair counted once. Writing `L_M = D_M - M` for the
//! Laplacian of the must-link pair graph (and likewise `L_C`), the penalty
//! equals `lambda1 tr(H^T L_M H) - lambda2 tr(H^T L_C H)`, which is how
//! [`constraint_loss_trace`] evaluates it; the hidden-layer gradient is
//! `2 lambda1 L_M H - 2 lambda2 L_C H` scaled by `lambda`. Optimization is
//! plain SGD over shuffled mini-batches; a constraint pair contributes to a
//! batch only when both endpoints landed in it.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read as _, Write as _};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{cast, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Sigmoid,
    Tanh,
}

impl Activation {
    #[inline]
    pub fn apply<S: Scalar>(self, z: S) -> S {
        match self {
            Activation::Sigmoid => S::one() / (S::one() + (-z).exp()),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activated output `y = f(z)`.
    #[inline]
    pub fn derivative_from_output<S: Scalar>(self, y: S) -> S {
        match self {
            Activation::Sigmoid => y * (S::one() - y),
            Activation::Tanh => S::one() - y * y,
        }
    }

    fn tag(self) -> u8 {
        match self {
            Activation::Sigmoid => 0,
            Activation::Tanh => 1,
        }
    }

    fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Activation::Sigmoid),
            1 => Some(Activation::Tanh),
            _ => None,
        }
    }
}

/// Fully connected layer computing `f(x W^T + b)` row-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<S> {
    /// `out_dim x in_dim`.
    pub weights: Matrix<S>,
    /// `out_dim`.
    pub bias: Vec<S>,
    pub activation: Activation,
}

impl<S: Scalar> DenseLayer<S> {
    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn forward(&self, x: &Matrix<S>) -> Matrix<S> {
        assert_eq!(x.cols(), self.in_dim(), "input width must match layer in_dim");
        let mut z = x.matmul_bt(&self.weights);
        for i in 0..z.rows() {
            let row = z.row_mut(i);
            for (v, &b) in row.iter_mut().zip(self.bias.iter()) {
                *v = self.activation.apply(*v + b);
            }
        }
        z
    }
}

/// Encoder/decoder pair with mirrored dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderPair<S> {
    pub encoder: DenseLayer<S>,
    pub decoder: DenseLayer<S>,
}

impl<S: Scalar> AutoencoderPair<S> {
    pub fn in_dim(&self) -> usize {
        self.encoder.in_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.encoder.out_dim()
    }

    pub fn encode(&self, x: &Matrix<S>) -> Matrix<S> {
        self.encoder.forward(x)
    }

    pub fn decode(&self, h: &Matrix<S>) -> Matrix<S> {
        self.decoder.forward(h)
    }

    /// Hidden representation and reconstruction in one pass.
    pub fn reconstruct(&self, x: &Matrix<S>) -> (Matrix<S>, Matrix<S>) {
        let h = self.encode(x);
        let y = self.decode(&h);
        (h, y)
    }

    pub fn is_finite(&self) -> bool {
        self.encoder.weights.is_finite()
            && self.decoder.weights.is_finite()
            && self.encoder.bias.iter().all(|v| v.is_finite())
            && self.decoder.bias.iter().all(|v| v.is_finite())
    }
}

/// Uniform Xavier init: weights from `[-b, b]` with
/// `b = sqrt(6 / (in_dim + hidden_dim))`, biases zero. Values are drawn as
/// `f64` from a ChaCha stream seeded with `seed` (encoder first, row-major,
/// then decoder), so the result is reproducible across platforms.
pub fn init_autoencoder<S: Scalar>(
    in_dim: usize,
    hidden_dim: usize,
    activation: Activation,
    seed: u64,
) -> AutoencoderPair<S> {
    assert!(in_dim > 0 && hidden_dim > 0, "layer dimensions must be positive");
    let bound = (6.0 / (in_dim + hidden_dim) as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |rows: usize, cols: usize| {
        let mut w = Matrix::zeros(rows, cols);
        for v in w.data_mut() {
            *v = cast::<S>(rng.gen_range(-bound..=bound));
        }
        w
    };
    let encoder = DenseLayer {
        weights: draw(hidden_dim, in_dim),
        bias: vec![S::zero(); hidden_dim],
        activation,
    };
    let decoder = DenseLayer {
        weights: draw(in_dim, hidden_dim),
        bias: vec![S::zero(); in_dim],
        activation,
    };
    AutoencoderPair { encoder, decoder }
}

/// Must-link and cannot-link pair sets over `n` nodes, stored sparsely with
/// endpoints normalized to `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintMatrices {
    n: usize,
    must: BTreeSet<(usize, usize)>,
    cannot: BTreeSet<(usize, usize)>,
}

impl ConstraintMatrices {
    pub fn empty(n: usize) -> Self {
        ConstraintMatrices { n, must: BTreeSet::new(), cannot: BTreeSet::new() }
    }

    pub fn from_pairs(
        n: usize,
        must: impl IntoIterator<Item = (usize, usize)>,
        cannot: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let normalize = |set: &mut BTreeSet<(usize, usize)>, pairs: &mut dyn Iterator<Item = (usize, usize)>| -> Result<()> {
            for (a, b) in pairs {
                if a == b {
                    return Err(Error::invalid(format!("constraint pair ({a}, {b}) is a self-pair")));
                }
                if a >= n || b >= n {
                    return Err(Error::invalid(format!(
                        "constraint pair ({a}, {b}) out of range for n = {n}"
                    )));
                }
                set.insert((a.min(b), a.max(b)));
            }
            Ok(())
        };
        let mut cm = ConstraintMatrices::empty(n);
        normalize(&mut cm.must, &mut must.into_iter())?;
        normalize(&mut cm.cannot, &mut cannot.into_iter())?;
        if let Some(pair) = cm.must.intersection(&cm.cannot).next() {
            return Err(Error::invalid(format!(
                "pair {pair:?} appears in both must-link and cannot-link sets"
            )));
        }
        Ok(cm)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn must(&self) -> &BTreeSet<(usize, usize)> {
        &self.must
    }

    pub fn cannot(&self) -> &BTreeSet<(usize, usize)> {
        &self.cannot
    }

    pub fn is_empty(&self) -> bool {
        self.must.is_empty() && self.cannot.is_empty()
    }

    /// Projects onto a batch: keeps pairs whose endpoints are both in
    /// `batch` and reindexes them to batch-local row positions.
    pub fn restrict(&self, batch: &[usize]) -> ConstraintMatrices {
        let local: HashMap<usize, usize> =
            batch.iter().enumerate().map(|(pos, &node)| (node, pos)).collect();
        let project = |set: &BTreeSet<(usize, usize)>| {
            set.iter()
                .filter_map(|&(i, j)| match (local.get(&i), local.get(&j)) {
                    (Some(&a), Some(&b)) => Some((a.min(b), a.max(b))),
                    _ => None,
                })
                .collect()
        };
        ConstraintMatrices { n: batch.len(), must: project(&self.must), cannot: project(&self.cannot) }
    }

    /// `L H` for the Laplacian of the given pair set, computed sparsely.
    fn laplacian_apply<S: Scalar>(pairs: &BTreeSet<(usize, usize)>, h: &Matrix<S>) -> Matrix<S> {
        let mut out = Matrix::zeros(h.rows(), h.cols());
        for &(i, j) in pairs {
            for k in 0..h.cols() {
                let diff = h[(i, k)] - h[(j, k)];
                out[(i, k)] += diff;
                out[(j, k)] -= diff;
            }
        }
        out
    }

    pub fn must_laplacian_apply<S: Scalar>(&self, h: &Matrix<S>) -> Matrix<S> {
        Self::laplacian_apply(&self.must, h)
    }

    pub fn cannot_laplacian_apply<S: Scalar>(&self, h: &Matrix<S>) -> Matrix<S> {
        Self::laplacian_apply(&self.cannot, h)
    }

    fn dense_laplacian<S: Scalar>(pairs: &BTreeSet<(usize, usize)>, n: usize) -> Matrix<S> {
        let mut l = Matrix::zeros(n, n);
        for &(i, j) in pairs {
            l[(i, i)] += S::one();
            l[(j, j)] += S::one();
            l[(i, j)] -= S::one();
            l[(j, i)] -= S::one();
        }
        l
    }

    /// Dense `D_M - M` for the must-link pair graph.
    pub fn must_laplacian_dense<S: Scalar>(&self) -> Matrix<S> {
        Self::dense_laplacian(&self.must, self.n)
    }

    /// Dense `D_C - C` for the cannot-link pair graph.
    pub fn cannot_laplacian_dense<S: Scalar>(&self) -> Matrix<S> {
        Self::dense_laplacian(&self.cannot, self.n)
    }
}

/// Knobs for one training stage. `lambda1`/`lambda2` weight the must/cannot
/// sums inside the constraint term; `lambda` weights that whole term against
/// reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda: f64,
    pub seed: u64,
    pub activation: Activation,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            batch_size: 128,
            epochs: 100,
            lambda1: 1.0,
            lambda2: 1.0,
            lambda: 0.1,
            seed: 42,
            activation: Activation::Sigmoid,
        }
    }
}

/// Sum of squared reconstruction errors over the batch.
pub fn reconstruction_loss<S: Scalar>(pair: &AutoencoderPair<S>, x: &Matrix<S>) -> S {
    let (_, y) = pair.reconstruct(x);
    let mut acc = S::zero();
    for (a, b) in y.data().iter().zip(x.data().iter()) {
        let d = *a - *b;
        acc += d * d;
    }
    acc
}

/// `lambda1 * sum_M ||h_i - h_j||^2 - lambda2 * sum_C ||h_i - h_j||^2`,
/// each unordered pair counted once. `cm` must cover exactly the rows of
/// `h` (restrict it first for a batch).
pub fn constraint_loss<S: Scalar>(
    h: &Matrix<S>,
    cm: &ConstraintMatrices,
    lambda1: f64,
    lambda2: f64,
) -> S {
    assert_eq!(h.rows(), cm.n(), "constraint sets must cover the rows of H");
    let pair_sum = |pairs: &BTreeSet<(usize, usize)>| {
        let mut acc = S::zero();
        for &(i, j) in pairs {
            for k in 0..h.cols() {
                let d = h[(i, k)] - h[(j, k)];
                acc += d * d;
            }
        }
        acc
    };
    cast::<S>(lambda1) * pair_sum(&cm.must) - cast::<S>(lambda2) * pair_sum(&cm.cannot)
}

/// Same quantity as [`constraint_loss`], evaluated through the Laplacian
/// quadratic form `lambda1 tr(H^T L_M H) - lambda2 tr(H^T L_C H)` with dense
/// matrix products. Kept as an independent route for cross-checking.
pub fn constraint_loss_trace<S: Scalar>(
    h: &Matrix<S>,
    cm: &ConstraintMatrices,
    lambda1: f64,
    lambda2: f64,
) -> S {
    assert_eq!(h.rows(), cm.n(), "constraint sets must cover the rows of H");
    let quad = |l: &Matrix<S>| {
        let lh = l.matmul(h);
        let mut acc = S::zero();
        for (a, b) in h.data().iter().zip(lh.data().iter()) {
            acc += *a * *b;
        }
        acc
    };
    cast::<S>(lambda1) * quad(&cm.must_laplacian_dense())
        - cast::<S>(lambda2) * quad(&cm.cannot_laplacian_dense())
}

/// Reconstruction plus `lambda` times the constraint term.
pub fn total_loss<S: Scalar>(
    pair: &AutoencoderPair<S>,
    x: &Matrix<S>,
    cm: &ConstraintMatrices,
    config: &TrainConfig,
) -> S {
    let (h, y) = pair.reconstruct(x);
    let mut rec = S::zero();
    for (a, b) in y.data().iter().zip(x.data().iter()) {
        let d = *a - *b;
        rec += d * d;
    }
    if config.lambda == 0.0 || cm.is_empty() {
        return rec;
    }
    rec + cast::<S>(config.lambda) * constraint_loss(&h, cm, config.lambda1, config.lambda2)
}

/// Parameter gradients, same shapes as the corresponding layer fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<S> {
    pub encoder_weights: Matrix<S>,
    pub encoder_bias: Vec<S>,
    pub decoder_weights: Matrix<S>,
    pub decoder_bias: Vec<S>,
}

fn backward<S: Scalar>(
    pair: &AutoencoderPair<S>,
    x: &Matrix<S>,
    cm: &ConstraintMatrices,
    config: &TrainConfig,
) -> (S, Gradients<S>) {
    assert_eq!(x.rows(), cm.n(), "constraint sets must cover the rows of X");
    let (h, y) = pair.reconstruct(x);
    let n = x.rows();
    let d = x.cols();
    let hd = h.cols();
    let two = cast::<S>(2.0);

    let mut rec = S::zero();
    let mut delta_o = Matrix::zeros(n, d);
    for i in 0..n {
        for c in 0..d {
            let diff = y[(i, c)] - x[(i, c)];
            rec += diff * diff;
            delta_o[(i, c)] = two * diff * pair.decoder.activation.derivative_from_output(y[(i, c)]);
        }
    }

    let decoder_weights = delta_o.transpose().matmul(&h);
    let mut decoder_bias = vec![S::zero(); d];
    for i in 0..n {
        for (c, b) in decoder_bias.iter_mut().enumerate() {
            *b += delta_o[(i, c)];
        }
    }

    let mut grad_h = delta_o.matmul(&pair.decoder.weights);
    let active = config.lambda != 0.0 && !cm.is_empty();
    let mut loss = rec;
    if active {
        let con = constraint_loss(&h, cm, config.lambda1, config.lambda2);
        loss = rec + cast::<S>(config.lambda) * con;
        let lm_h = cm.must_laplacian_apply(&h);
        let lc_h = cm.cannot_laplacian_apply(&h);
        let w_must = cast::<S>(config.lambda * 2.0 * config.lambda1);
        let w_cannot = cast::<S>(config.lambda * 2.0 * config.lambda2);
        for i in 0..n {
            for k in 0..hd {
                grad_h[(i, k)] += w_must * lm_h[(i, k)] - w_cannot * lc_h[(i, k)];
            }
        }
    }

    let mut delta_h = grad_h;
    for i in 0..n {
        for k in 0..hd {
            delta_h[(i, k)] *= pair.encoder.activation.derivative_from_output(h[(i, k)]);
        }
    }
    let encoder_weights = delta_h.transpose().matmul(x);
    let mut encoder_bias = vec![S::zero(); hd];
    for i in 0..n {
        for (k, b) in encoder_bias.iter_mut().enumerate() {
            *b += delta_h[(i, k)];
        }
    }

    (loss, Gradients { encoder_weights, encoder_bias, decoder_weights, decoder_bias })
}

/// Analytic gradients of [`total_loss`] with respect to every parameter.
pub fn gradients<S: Scalar>(
    pair: &AutoencoderPair<S>,
    x: &Matrix<S>,
    cm: &ConstraintMatrices,
    config: &TrainConfig,
) -> Gradients<S> {
    backward(pair, x, cm, config).1
}

/// One plain SGD update: `theta <- theta - lr * grad`.
pub fn sgd_step<S: Scalar>(pair: &mut AutoencoderPair<S>, grads: &Gradients<S>, lr: f64) {
    let lr = cast::<S>(lr);
    let update = |w: &mut Matrix<S>, g: &Matrix<S>| {
        for (v, &gv) in w.data_mut().iter_mut().zip(g.data().iter()) {
            *v -= lr * gv;
        }
    };
    update(&mut pair.encoder.weights, &grads.encoder_weights);
    update(&mut pair.decoder.weights, &grads.decoder_weights);
    for (b, &g) in pair.encoder.bias.iter_mut().zip(grads.encoder_bias.iter()) {
        *b -= lr * g;
    }
    for (b, &g) in pair.decoder.bias.iter_mut().zip(grads.decoder_bias.iter()) {
        *b -= lr * g;
    }
}

/// Result of one training stage.
#[derive(Debug, Clone)]
pub struct TrainedAutoencoder<S> {
    pub pair: AutoencoderPair<S>,
    /// Hidden representation of the full input, row-aligned with `X`.
    pub hidden: Matrix<S>,
    /// Summed batch losses per epoch.
    pub epoch_losses: Vec<f64>,
}

/// Trains a semi-supervised autoencoder with SGD.
///
/// Reproducibility: the seed feeds one ChaCha stream that yields an init
/// seed and a shuffle seed; given identical inputs and config the parameter
/// trajectory is bitwise identical. With an empty `cm` (or `lambda == 0`)
/// the constraint machinery is skipped entirely and training is exactly a
/// plain autoencoder run.
pub fn train_semi_ae<S: Scalar>(
    x: &Matrix<S>,
    cm: &ConstraintMatrices,
    hidden_dim: usize,
    config: &TrainConfig,
) -> Result<TrainedAutoencoder<S>> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::invalid("training input must be non-empty"));
    }
    if hidden_dim == 0 {
        return Err(Error::invalid("hidden dimension must be at least 1"));
    }
    if cm.n() != x.rows() {
        return Err(Error::invalid(format!(
            "constraint sets cover {} nodes but X has {} rows",
            cm.n(),
            x.rows()
        )));
    }
    if config.batch_size == 0 {
        return Err(Error::invalid("batch_size must be at least 1"));
    }

    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let init_seed = master.next_u64();
    let shuffle_seed = master.next_u64();
    let mut pair = init_autoencoder(x.cols(), hidden_dim, config.activation, init_seed);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(shuffle_seed);

    let mut indices: Vec<usize> = (0..x.rows()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        indices.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for (batch_idx, batch) in indices.chunks(config.batch_size).enumerate() {
            let xb = x.select_rows(batch);
            let cmb = if cm.is_empty() {
                ConstraintMatrices::empty(batch.len())
            } else {
                cm.restrict(batch)
            };
            let (loss, grads) = backward(&pair, &xb, &cmb, config);
            if !loss.is_finite() {
                return Err(Error::NonFinite { epoch, batch: batch_idx });
            }
            sgd_step(&mut pair, &grads, config.learning_rate);
            epoch_loss += loss.to_f64().unwrap();
        }
        if !pair.is_finite() {
            return Err(Error::NonFinite { epoch, batch: indices.len() / config.batch_size });
        }
        epoch_losses.push(epoch_loss);
    }

    let hidden = pair.encode(x);
    Ok(TrainedAutoencoder { pair, hidden, epoch_losses })
}

/// Plain autoencoder training: [`train_semi_ae`] with no constraints.
pub fn train_autoencoder<S: Scalar>(
    x: &Matrix<S>,
    hidden_dim: usize,
    config: &TrainConfig,
) -> Result<TrainedAutoencoder<S>> {
    train_semi_ae(x, &ConstraintMatrices::empty(x.rows()), hidden_dim, config)
}

const MAGIC: &[u8; 4] = b"SAE1";

/// Checkpoint layout: magic `SAE1`, u64 in_dim, u64 hidden_dim, u8
/// activation tag (0 = sigmoid, 1 = tanh), then little-endian f64 blocks:
/// encoder weights row-major, encoder bias, decoder weights row-major,
/// decoder bias.
pub fn save_autoencoder<S: Scalar>(pair: &AutoencoderPair<S>, path: &Path) -> Result<()> {
    let in_dim = pair.in_dim();
    let hidden = pair.hidden_dim();
    let mut buf = Vec::with_capacity(21 + (2 * in_dim * hidden + in_dim + hidden) * 8);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(in_dim as u64).to_le_bytes());
    buf.extend_from_slice(&(hidden as u64).to_le_bytes());
    buf.push(pair.encoder.activation.tag());
    let mut block = |values: &mut dyn Iterator<Item = S>| {
        for v in values {
            buf.extend_from_slice(&v.to_f64().unwrap().to_le_bytes());
        }
    };
    block(&mut pair.encoder.weights.data().iter().copied());
    block(&mut pair.encoder.bias.iter().copied());
    block(&mut pair.decoder.weights.data().iter().copied());
    block(&mut pair.decoder.bias.iter().copied());
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))
}

/// Reads a checkpoint written by [`save_autoencoder`].
pub fn load_autoencoder<S: Scalar>(path: &Path) -> Result<AutoencoderPair<S>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let fail = |msg: String| Error::invalid(format!("{}: {msg}", path.display()));
    if bytes.len() < 21 {
        return Err(fail("truncated checkpoint".into()));
    }
    if &bytes[0..4] != MAGIC {
        return Err(fail("not an autoencoder checkpoint (bad magic)".into()));
    }
    let in_dim = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
    let hidden = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let activation = Activation::from_tag(bytes[20])
        .ok_or_else(|| fail(format!("unknown activation tag {}", bytes[20])))?;
    let expected = 21 + (2 * in_dim * hidden + in_dim + hidden) * 8;
    if bytes.len() != expected {
        return Err(fail(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let mut offset = 21;
    let mut take = |count: usize| -> Vec<S> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(cast::<S>(f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap())));
            offset += 8;
        }
        out
    };
    let enc_w = take(hidden * in_dim);
    let enc_b = take(hidden);
    let dec_w = take(in_dim * hidden);
    let dec_b = take(in_dim);
    let rebuild = |rows: usize, cols: usize, data: Vec<S>| {
        let mut m = Matrix::zeros(rows, cols);
        m.data_mut().copy_from_slice(&data);
        m
    };
    Ok(AutoencoderPair {
        encoder: DenseLayer { weights: rebuild(hidden, in_dim, enc_w), bias: enc_b, activation },
        decoder: DenseLayer { weights: rebuild(in_dim, hidden, dec_w), bias: dec_b, activation },
    })
}
