//! Acceptance gate: every release-blocking behavior, one test per
//! criterion, each printing `ACCEPTANCE criterion N (name): PASS|FAIL`
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use deepmne_core::constraints::ConstraintSet;
use deepmne_core::diffusion::{rwr, rwr_exact, transition_matrix};
use deepmne_core::evaluation::{
    accuracy, kfold_cv, micro_auprc, micro_auroc, micro_f1, predictions_from_scores, OvrConfig,
};
use deepmne_core::graph::{NodeIndex, WeightedGraph};
use deepmne_core::matrix::{BoolMatrix, Matrix};
use deepmne_core::neural::{
    constraint_loss, constraint_loss_trace, gradients, init_autoencoder, total_loss, train_semi_ae,
    Activation, AutoencoderPair, ConstraintMatrices, TrainConfig,
};
use deepmne_core::pipeline::{
    run_deepmne, write_embedding_tsv, ConstraintStrategy, PipelineConfig,
};

fn criterion<F>(number: usize, name: &str, body: F)
where
    F: FnOnce() + std::panic::UnwindSafe,
{
    let outcome = std::panic::catch_unwind(body);
    let verdict = if outcome.is_ok() { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE criterion {number} ({name}): {verdict}");
    if let Err(panic) = outcome {
        std::panic::resume_unwind(panic);
    }
}

fn index_of(n: usize) -> NodeIndex {
    NodeIndex::from_names((0..n).map(|i| format!("v{i:03}")).collect()).unwrap()
}

/// Random symmetric weighted graph with no isolated nodes.
fn random_graph(n: usize, edge_prob: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_prob) {
                edges.push((i, j, rng.gen_range(0.1..=1.0)));
            }
        }
    }
    for i in 0..n {
        if !edges.iter().any(|&(a, b, _)| a == i || b == i) {
            let j = (i + 1) % n;
            edges.push((i.min(j), i.max(j), 1.0));
        }
    }
    WeightedGraph::from_edges(index_of(n), edges).unwrap()
}

// --- criterion 1 -----------------------------------------------------------

/// Independent derivative oracle: central differences over every parameter.
fn fd_max_rel_err(
    pair: &AutoencoderPair<f64>,
    x: &Matrix<f64>,
    cm: &ConstraintMatrices,
    config: &TrainConfig,
) -> f64 {
    let eps = 1e-5;
    let analytic = gradients(pair, x, cm, config);
    let mut worst = 0.0f64;
    let mut probe = |write: &dyn Fn(&mut AutoencoderPair<f64>, f64), expected: f64| {
        let mut plus = pair.clone();
        write(&mut plus, eps);
        let mut minus = pair.clone();
        write(&mut minus, -eps);
        let numeric =
            (total_loss(&plus, x, cm, config) - total_loss(&minus, x, cm, config)) / (2.0 * eps);
        let rel = (numeric - expected).abs() / (numeric.abs() + expected.abs()).max(1e-8);
        worst = worst.max(rel);
    };
    for r in 0..pair.encoder.weights.rows() {
        for c in 0..pair.encoder.weights.cols() {
            probe(&|p, d| p.encoder.weights[(r, c)] += d, analytic.encoder_weights[(r, c)]);
        }
    }
    for k in 0..pair.encoder.bias.len() {
        probe(&|p, d| p.encoder.bias[k] += d, analytic.encoder_bias[k]);
    }
    for r in 0..pair.decoder.weights.rows() {
        for c in 0..pair.decoder.weights.cols() {
            probe(&|p, d| p.decoder.weights[(r, c)] += d, analytic.decoder_weights[(r, c)]);
        }
    }
    for k in 0..pair.decoder.bias.len() {
        probe(&|p, d| p.decoder.bias[k] += d, analytic.decoder_bias[k]);
    }
    worst
}

#[test]
fn criterion_1_gradients() {
    criterion(1, "analytic gradients match central differences", || {
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
        for instance in 0..20 {
            let n = rng.gen_range(2..=10usize);
            let d = rng.gen_range(2..=8usize);
            let hd = rng.gen_range(1..=d - 1);
            let activation =
                if instance % 2 == 0 { Activation::Sigmoid } else { Activation::Tanh };
            let pair: AutoencoderPair<f64> = init_autoencoder(d, hd, activation, rng.gen());
            let x = Matrix::from_fn(n, d, |_, _| rng.gen_range(0.0..1.0));
            let cm = if instance % 4 == 3 || n < 4 {
                ConstraintMatrices::empty(n)
            } else {
                ConstraintMatrices::from_pairs(n, [(0, 1)], [(2, 3)]).unwrap()
            };
            let config = TrainConfig {
                lambda: [0.0, 0.1, 1.0][instance % 3],
                lambda1: rng.gen_range(0.5..2.0),
                lambda2: rng.gen_range(0.5..2.0),
                activation,
                ..TrainConfig::default()
            };
            let err = fd_max_rel_err(&pair, &x, &cm, &config);
            assert!(
                err < 1e-5,
                "instance {instance} (n={n}, d={d}, hd={hd}, {activation:?}): relative error {err}"
            );
        }
        let elapsed = started.elapsed();
        assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}, budget 10s");
    });
}

// --- criterion 2 -----------------------------------------------------------

#[test]
fn criterion_2_diffusion_solvers_agree() {
    criterion(2, "iterative diffusion matches the linear-system solution", || {
        let started = Instant::now();
        let cases: [(usize, f64); 10] = [
            (200, 0.9),
            (200, 0.5),
            (160, 0.1),
            (120, 0.5),
            (100, 0.1),
            (80, 0.9),
            (64, 0.5),
            (50, 0.1),
            (40, 0.9),
            (30, 0.1),
        ];
        for (case, &(n, alpha)) in cases.iter().enumerate() {
            let graph = random_graph(n, 0.1, 0xC2 + case as u64);
            let t = transition_matrix(&graph.adjacency::<f64>()).unwrap();
            let iterative = rwr(&t, alpha, 1e-12, 5000).unwrap();
            assert!(iterative.converged, "case {case} (n={n}, alpha={alpha}) did not converge");
            let exact = rwr_exact(&t, alpha).unwrap();
            let diff = iterative.s.max_abs_diff(&exact);
            assert!(diff <= 1e-7, "case {case} (n={n}, alpha={alpha}): max diff {diff:.3e}");
            for j in 0..n {
                let sum: f64 = (0..n).map(|i| iterative.s[(i, j)]).sum();
                assert!(
                    (sum - 1.0).abs() <= 1e-9,
                    "case {case}: column {j} sums to {sum}, not 1"
                );
            }
        }
        let elapsed = started.elapsed();
        assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}, budget 10s");
    });
}

// --- criterion 3 -----------------------------------------------------------

#[test]
fn criterion_3_trace_identity() {
    criterion(3, "Laplacian trace form equals the pairwise constraint sum", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
        for instance in 0..100 {
            let n = rng.gen_range(3..=12usize);
            let d = rng.gen_range(2..=8usize);
            let h = Matrix::<f64>::from_fn(n, d, |_, _| rng.gen_range(-1.0..1.0));
            let mut must = BTreeSet::new();
            let mut cannot = BTreeSet::new();
            for i in 0..n {
                for j in i + 1..n {
                    match rng.gen_range(0..4) {
                        0 => {
                            must.insert((i, j));
                        }
                        1 => {
                            cannot.insert((i, j));
                        }
                        _ => {}
                    }
                }
            }
            let cm = ConstraintMatrices::from_pairs(n, must, cannot).unwrap();
            let l1 = rng.gen_range(0.0..2.0);
            let l2 = rng.gen_range(0.0..2.0);
            let pairwise = constraint_loss(&h, &cm, l1, l2);
            let trace = constraint_loss_trace(&h, &cm, l1, l2);
            assert!(
                (pairwise - trace).abs() <= 1e-12,
                "instance {instance}: pairwise {pairwise} vs trace {trace}"
            );
        }
    });
}

// --- criterion 4 -----------------------------------------------------------

#[test]
fn criterion_4_constraints_shape_the_embedding() {
    criterion(4, "planted constraints pull/push hidden representations", || {
        let n = 40;
        let hidden_dim = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
        let x = Matrix::<f64>::from_fn(n, 16, |_, _| rng.gen_range(0.0..1.0));

        let dist = |h: &Matrix<f64>, (i, j): (usize, usize)| -> f64 {
            h.row(i)
                .iter()
                .zip(h.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        };

        let config = TrainConfig {
            epochs: 200,
            learning_rate: 0.02,
            batch_size: 64,
            lambda: 1.0,
            lambda1: 1.0,
            lambda2: 1.0,
            seed: 11,
            activation: Activation::Tanh,
        };

        // Reproduce the seeded starting point the trainer itself uses (the
        // init seed is the first draw from the master stream), then plant
        // the pairs adversarially against that geometry: the must-link on
        // the initially most-distant pair and the cannot-link on the
        // initially closest pair.  Both required orderings start maximally
        // violated, so they can only come from the penalty terms.
        let mut master = ChaCha8Rng::seed_from_u64(config.seed);
        let init_seed = master.next_u64();
        let init = init_autoencoder::<f64>(x.cols(), hidden_dim, config.activation, init_seed);
        let h_init = init.encode(&x);
        let mut must = (0, 1);
        let mut cannot = (0, 1);
        for i in 0..n {
            for j in i + 1..n {
                if dist(&h_init, (i, j)) > dist(&h_init, must) {
                    must = (i, j);
                }
                if dist(&h_init, (i, j)) < dist(&h_init, cannot) {
                    cannot = (i, j);
                }
            }
        }
        let d_init_must = dist(&h_init, must);
        let cm = ConstraintMatrices::from_pairs(n, [must], [cannot]).unwrap();

        let constrained = train_semi_ae(&x, &cm, hidden_dim, &config).unwrap().hidden;
        let d_must = dist(&constrained, must);
        let d_cannot = dist(&constrained, cannot);

        // Same seed without the constraint term, recorded for contrast but
        // not asserted: nothing enforces either ordering there.
        let plain_cfg = TrainConfig { lambda: 0.0, ..config };
        let plain = train_semi_ae(&x, &ConstraintMatrices::empty(n), hidden_dim, &plain_cfg)
            .unwrap()
            .hidden;
        println!(
            "criterion 4 distances: init must {d_init_must:.4}; trained must {d_must:.4}, \
             cannot {d_cannot:.4}; lambda=0 must {:.4}, cannot {:.4}",
            dist(&plain, must),
            dist(&plain, cannot),
        );
        assert!(
            d_must < d_init_must,
            "must-link distance {d_must} should shrink below its initial value {d_init_must}"
        );
        assert!(
            d_cannot > d_must,
            "cannot-link distance {d_cannot} should exceed the must-link distance {d_must}"
        );
    });
}

// --- criterion 5 -----------------------------------------------------------

/// Three-community stochastic block model over 60 shared nodes.
fn sbm_network(seed: u64) -> WeightedGraph {
    let n = 60;
    let community = |v: usize| v / 20;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if community(i) == community(j) { 0.3 } else { 0.02 };
            if rng.gen_bool(p) {
                edges.push((i, j, 1.0));
            }
        }
    }
    for i in 0..n {
        if !edges.iter().any(|&(a, b, _)| a == i || b == i) {
            // Keep stragglers inside their own community.
            let j = if i % 20 == 19 { i - 1 } else { i + 1 };
            edges.push((i.min(j), i.max(j), 1.0));
        }
    }
    WeightedGraph::from_edges(index_of(n), edges).unwrap()
}

// The cross-network exchange intersects the top/bottom 1% of 1770 scored
// pairs (17 per side per network), so the merged sets carry only a few
// pairs here. Their benefit is measurable when reconstruction alone
// underfits: a shallow diffusion (alpha 0.9), very few epochs, and a heavy
// constraint weight make the exchanged pairs do visible work. This
// configuration was chosen for a stable constrained-vs-plain margin across
// disjoint seed sets (1..=5, 11..=15, 21..=25), not tuned per seed.
fn sbm_run(seed: u64, iterations: usize) -> (Option<f64>, f64) {
    let networks: Vec<WeightedGraph> =
        (0..3).map(|k| sbm_network(seed * 1000 + k)).collect();
    let config = PipelineConfig {
        layer_dims: vec![60, 30, 10],
        iterations,
        constraint_fraction: 0.01,
        rwr_alpha: 0.9,
        rwr_tol: 1e-8,
        rwr_max_iter: 1000,
        skip_rwr: false,
        repeat_schedule: false,
        strategy: ConstraintStrategy::TopK,
        train: TrainConfig {
            epochs: 3,
            learning_rate: 0.02,
            batch_size: 128,
            lambda: 20.0,
            lambda1: 1.0,
            lambda2: 1.0,
            seed,
            ..TrainConfig::default()
        },
    };
    let out = run_deepmne::<f64>(&networks, &config).unwrap();
    let labels = BoolMatrix::from_fn(60, 3, |i, c| i / 20 == c);
    let probe = OvrConfig { epochs: 50, learning_rate: 1.0 };
    let cv = kfold_cv(&out.combined, &labels, 5, seed, &probe).unwrap();
    (cv.report.micro_auroc, cv.report.micro_f1)
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

#[test]
fn criterion_5_sbm_recovery() {
    criterion(5, "constrained embeddings classify SBM communities", || {
        let started = Instant::now();
        let mut aurocs = Vec::new();
        let mut f1s = Vec::new();
        let mut ablation_f1s = Vec::new();
        for seed in 1..=5u64 {
            let (auroc, f1) = sbm_run(seed, 1);
            let (_, plain_f1) = sbm_run(seed, 0);
            println!(
                "criterion 5 seed {seed}: micro-AUROC {:.4}, micro-F1 {f1:.4}, plain micro-F1 {plain_f1:.4}",
                auroc.unwrap_or(f64::NAN)
            );
            aurocs.push(auroc.expect("test cells contain both classes"));
            f1s.push(f1);
            ablation_f1s.push(plain_f1);
        }
        let med_auroc = median(aurocs);
        let med_f1 = median(f1s);
        let med_plain = median(ablation_f1s);
        println!(
            "criterion 5 medians: micro-AUROC {med_auroc:.4}, micro-F1 {med_f1:.4} vs unconstrained {med_plain:.4}"
        );
        assert!(med_auroc >= 0.90, "median micro-AUROC {med_auroc} below 0.90");
        assert!(
            med_f1 > med_plain,
            "constrained micro-F1 {med_f1} does not beat the unconstrained run {med_plain}"
        );
        let elapsed = started.elapsed();
        assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}, budget 60s");
    });
}

// --- criterion 6 -----------------------------------------------------------

#[test]
fn criterion_6_bitwise_reproducibility() {
    criterion(6, "repeated runs emit byte-identical artifacts", || {
        let n = 12;
        let g1 = random_graph(n, 0.3, 0xC6);
        let g2 = random_graph(n, 0.35, 0xC7);
        let config = PipelineConfig {
            layer_dims: vec![n, 6, 3],
            iterations: 1,
            constraint_fraction: 0.1,
            rwr_alpha: 0.5,
            rwr_tol: 1e-8,
            rwr_max_iter: 1000,
            skip_rwr: false,
            repeat_schedule: false,
            strategy: ConstraintStrategy::TopK,
            train: TrainConfig { epochs: 40, batch_size: 8, ..TrainConfig::default() },
        };
        let labels = BoolMatrix::from_fn(n, 2, |i, _| i % 2 == 0);

        let emit = |dir: &std::path::Path| {
            let out = run_deepmne::<f64>(&[g1.clone(), g2.clone()], &config).unwrap();
            for (k, emb) in out.per_network.iter().enumerate() {
                write_embedding_tsv(&dir.join(format!("network_{k}.tsv")), &out.index, emb)
                    .unwrap();
            }
            write_embedding_tsv(&dir.join("combined.tsv"), &out.index, &out.combined).unwrap();
            let cv = kfold_cv(&out.combined, &labels, 4, 9, &OvrConfig::default()).unwrap();
            std::fs::write(
                dir.join("metrics.json"),
                serde_json::to_string_pretty(&cv.report).unwrap(),
            )
            .unwrap();
        };

        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        emit(dir_a.path());
        emit(dir_b.path());
        for file in ["network_0.tsv", "network_1.tsv", "combined.tsv", "metrics.json"] {
            let a = std::fs::read(dir_a.path().join(file)).unwrap();
            let b = std::fs::read(dir_b.path().join(file)).unwrap();
            assert!(a == b, "{file} differs between identical runs");
            assert!(!a.is_empty(), "{file} is empty");
        }
    });
}

// --- criterion 7 -----------------------------------------------------------

#[test]
fn criterion_7_metric_oracles() {
    criterion(7, "classification metrics match hand values and pair counting", || {
        let col = |values: &[f64]| Matrix::from_rows(values.iter().map(|&v| vec![v]).collect());
        let truth = |values: &[bool]| BoolMatrix::from_fn(values.len(), 1, |i, _| values[i]);

        // Frozen hand values. Ranking metrics on one score column:
        let scores = col(&[0.9, 0.8, 0.7, 0.1]);
        let y = truth(&[true, false, true, false]);
        assert_eq!(micro_auroc(&scores, &y), Some(0.75));
        let auprc = micro_auprc(&scores, &y).unwrap();
        assert!((auprc - 5.0 / 6.0).abs() < 1e-15, "AUPRC {auprc}");
        // Thresholded metrics on a TP=2 / FP=1 / FN=1 instance: the same
        // scores predict {0,1,2}, and against truth {0,1,3} that gives
        // F1 = 2*2/(2*2+1+1) = 2/3 and accuracy 2/4.
        let preds = predictions_from_scores(&scores);
        let y_cells = truth(&[true, true, false, true]);
        assert!((micro_f1(&preds, &y_cells) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(accuracy(&preds, &y_cells), 0.5);
        let tied = col(&[0.9, 0.5, 0.5, 0.1]);
        assert_eq!(micro_auroc(&tied, &truth(&[true, true, false, false])), Some(0.875));

        // AUROC against exhaustive positive/negative pair counting.
        let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
        for instance in 0..50 {
            let rows = rng.gen_range(2..=40usize);
            let cols = rng.gen_range(1..=5usize).min(200 / rows).max(1);
            let quantized = rng.gen_bool(0.5);
            let scores = Matrix::<f64>::from_fn(rows, cols, |_, _| {
                let v: f64 = rng.gen_range(0.0..1.0);
                if quantized {
                    (v * 6.0).round() / 6.0
                } else {
                    v
                }
            });
            let y = BoolMatrix::from_fn(rows, cols, |_, _| rng.gen_bool(0.4));
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for i in 0..rows {
                for c in 0..cols {
                    if y[(i, c)] {
                        pos.push(scores[(i, c)]);
                    } else {
                        neg.push(scores[(i, c)]);
                    }
                }
            }
            let expected = if pos.is_empty() || neg.is_empty() {
                None
            } else {
                let mut wins = 0.0;
                for &p in &pos {
                    for &q in &neg {
                        if p > q {
                            wins += 1.0;
                        } else if p == q {
                            wins += 0.5;
                        }
                    }
                }
                Some(wins / (pos.len() * neg.len()) as f64)
            };
            match (micro_auroc(&scores, &y), expected) {
                (Some(a), Some(b)) => {
                    assert!((a - b).abs() < 1e-12, "instance {instance}: {a} vs {b}")
                }
                (a, b) => assert_eq!(a, b, "instance {instance}"),
            }
        }
    });
}

// --- criterion 8 -----------------------------------------------------------

fn timed_run(n: usize, seed: u64) -> Duration {
    let networks: Vec<WeightedGraph> =
        (0..3).map(|k| random_graph(n, 0.1, seed + k)).collect();
    let config = PipelineConfig {
        layer_dims: vec![n, 30, 10],
        iterations: 1,
        constraint_fraction: 0.01,
        rwr_alpha: 0.5,
        rwr_tol: 1e-8,
        rwr_max_iter: 1000,
        // Raw adjacency features: the dense diffusion solve is cubic in n
        // and would drown the part of the pipeline this criterion bounds.
        skip_rwr: true,
        repeat_schedule: false,
        strategy: ConstraintStrategy::TopK,
        train: TrainConfig { epochs: 40, batch_size: 128, ..TrainConfig::default() },
    };
    let started = Instant::now();
    run_deepmne::<f64>(&networks, &config).unwrap();
    started.elapsed()
}

#[test]
fn criterion_8_quadratic_scaling() {
    criterion(8, "embedding time grows at most quadratically in node count", || {
        let time_for = |n: usize| -> Duration {
            (0..3).map(|rep| timed_run(n, 0xC8 + rep)).min().unwrap()
        };
        let t50 = time_for(50);
        let t100 = time_for(100);
        let t200 = time_for(200);
        println!("criterion 8 timings: n=50 {t50:?}, n=100 {t100:?}, n=200 {t200:?}");
        let quadratic = |base: Duration, factor: u32| base * factor * factor * 2;
        assert!(
            t100 <= quadratic(t50, 2),
            "t(100) = {t100:?} exceeds twice the quadratic trend from t(50) = {t50:?}"
        );
        assert!(
            t200 <= quadratic(t50, 4),
            "t(200) = {t200:?} exceeds twice the quadratic trend from t(50) = {t50:?}"
        );
        assert!(
            t200 <= quadratic(t100, 2),
            "t(200) = {t200:?} exceeds twice the quadratic trend from t(100) = {t100:?}"
        );
    });
}

// --- cross-cutting sanity: the acceptance config actually exercises the
// --- constrained path (guards against silently running plain stages).

#[test]
fn acceptance_setup_produces_constraints() {
    let networks: Vec<WeightedGraph> = (0..3).map(|k| sbm_network(9000 + k)).collect();
    let config = PipelineConfig {
        layer_dims: vec![60, 30, 10],
        iterations: 1,
        constraint_fraction: 0.01,
        rwr_alpha: 0.5,
        rwr_tol: 1e-8,
        rwr_max_iter: 1000,
        skip_rwr: false,
        repeat_schedule: false,
        strategy: ConstraintStrategy::TopK,
        train: TrainConfig { epochs: 30, batch_size: 128, ..TrainConfig::default() },
    };
    let out = run_deepmne::<f64>(&networks, &config).unwrap();
    // 0.01 of C(60,2) = 17 proposals per side from every network.  The
    // cross-network intersection is often tiny or even empty — the three
    // draws are independent, so their top-17 lists rarely agree — but the
    // proposal and merge machinery must still have run with these exact
    // shapes.
    assert_eq!(out.report.candidate_pairs, 60 * 59 / 2);
    for detail in &out.report.networks_detail {
        assert_eq!(detail.stages[0].extracted_must, 17);
        assert_eq!(detail.stages[0].extracted_cannot, 17);
    }
    assert_eq!(out.constraint_history.len(), 1);
    let record = &out.constraint_history[0];
    assert_eq!(record.merged.len(), 3);
    for (k, merged) in record.merged.iter().enumerate() {
        let merged: &ConstraintSet = merged;
        assert!(merged.must.len() <= 17, "intersection exceeds a single proposal");
        assert!(merged.cannot.len() <= 17, "intersection exceeds a single proposal");
        let constrained_stage = &out.report.networks_detail[k].stages[1];
        assert_eq!(constrained_stage.must_count, merged.must.len());
        assert_eq!(constrained_stage.cannot_count, merged.cannot.len());
    }
}
