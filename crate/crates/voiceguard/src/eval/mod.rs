//! Class balancing, stratified k-fold cross-validation, the confusion-matrix
//! metric suite plus ROC AUC, hyperparameter sweeps, and latency benchmarks.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Label, LabeledDataset};
use crate::models::{ModelError, ModelFamily, ModelSpec, TrainedModel};

/// Cross-validation seed used throughout unless overridden.
pub const DEFAULT_SEED: u64 = 42;
/// Default fold count.
pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{label} class has only {got} rows; {needed} folds need at least {needed} per class")]
    TooFewRows {
        label: Label,
        got: usize,
        needed: usize,
    },
    #[error("both classes must be present")]
    SingleClass,
    #[error("{0} has no swept hyperparameter (sweeps cover gbt, random_forest, and knn)")]
    NotSweepable(ModelFamily),
    #[error(transparent)]
    Model(#[from] ModelError),
}

// ----------------------------------------------------------------- metrics

/// Confusion-matrix metrics (FAKE is the positive class) plus ROC AUC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub mcc: f64,
    pub roc_auc: f64,
}

impl MetricsRecord {
    pub const METRIC_NAMES: [&'static str; 6] =
        ["accuracy", "precision", "recall", "f1", "mcc", "roc_auc"];

    pub fn zero() -> Self {
        Self::from_values([0.0; 6])
    }

    pub fn values(&self) -> [f64; 6] {
        [
            self.accuracy,
            self.precision,
            self.recall,
            self.f1,
            self.mcc,
            self.roc_auc,
        ]
    }

    pub fn from_values(v: [f64; 6]) -> Self {
        MetricsRecord {
            accuracy: v[0],
            precision: v[1],
            recall: v[2],
            f1: v[3],
            mcc: v[4],
            roc_auc: v[5],
        }
    }
}

/// Compute the metric suite from true labels, hard predictions, and scores.
///
/// Degenerate denominators follow the continuity convention: precision,
/// recall, and f1 are 0 when undefined, MCC is 0 when any marginal is 0,
/// and ROC AUC is 0.5 when only one class is present.
pub fn metrics(truth: &[Label], predicted: &[Label], scores: &[f64]) -> MetricsRecord {
    assert!(!truth.is_empty());
    assert_eq!(truth.len(), predicted.len());
    assert_eq!(truth.len(), scores.len());

    let mut tp = 0.0f64;
    let mut tn = 0.0f64;
    let mut fp = 0.0f64;
    let mut fn_ = 0.0f64;
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t, p) {
            (Label::Fake, Label::Fake) => tp += 1.0,
            (Label::Real, Label::Real) => tn += 1.0,
            (Label::Real, Label::Fake) => fp += 1.0,
            (Label::Fake, Label::Real) => fn_ += 1.0,
        }
    }
    let n = truth.len() as f64;
    let accuracy = (tp + tn) / n;
    let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    let mcc = if denom > 0.0 {
        (tp * tn - fp * fn_) / denom.sqrt()
    } else {
        0.0
    };
    let roc_auc = roc_auc(truth, scores).unwrap_or(0.5);

    MetricsRecord {
        accuracy,
        precision,
        recall,
        f1,
        mcc,
        roc_auc,
    }
}

/// ROC AUC by the rank statistic: the Mann–Whitney U of the FAKE scores
/// normalized by n_pos·n_neg, with tied scores taking the midrank.
pub fn roc_auc(truth: &[Label], scores: &[f64]) -> Result<f64, EvalError> {
    assert_eq!(truth.len(), scores.len());
    let n_pos = truth.iter().filter(|&&l| l == Label::Fake).count();
    let n_neg = truth.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());

    // midranks: runs of equal scores all take the average rank of the run
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // ranks are 1-based: positions i..j hold ranks i+1 ..= j
        let midrank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if truth[idx] == Label::Fake {
                rank_sum_pos += midrank;
            }
        }
        i = j;
    }

    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

// ---------------------------------------------------------------- CVReport

/// Per-fold metrics with their mean and standard deviation, tagged with a
/// human-readable model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVReport {
    pub model: String,
    pub folds: Vec<MetricsRecord>,
    pub mean: MetricsRecord,
    pub std: MetricsRecord,
}

impl CVReport {
    pub fn empty(model: &str) -> Self {
        CVReport {
            model: model.to_string(),
            folds: Vec::new(),
            mean: MetricsRecord::zero(),
            std: MetricsRecord::zero(),
        }
    }

    /// Aggregate fold metrics; std is the sample standard deviation over
    /// the fold values (0 when there are fewer than 2 folds).
    pub fn from_folds(model: String, folds: Vec<MetricsRecord>) -> Self {
        assert!(!folds.is_empty());
        let k = folds.len() as f64;
        let mut mean = [0.0; 6];
        for fold in &folds {
            for (m, v) in mean.iter_mut().zip(fold.values()) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= k;
        }
        let mut std = [0.0; 6];
        if folds.len() > 1 {
            for fold in &folds {
                for (s, (v, m)) in std.iter_mut().zip(fold.values().iter().zip(&mean)) {
                    let d = v - m;
                    *s += d * d;
                }
            }
            for s in &mut std {
                *s = (*s / (k - 1.0)).sqrt();
            }
        }
        CVReport {
            model,
            folds,
            mean: MetricsRecord::from_values(mean),
            std: MetricsRecord::from_values(std),
        }
    }
}

// ------------------------------------------------------------------- folds

/// Stratified fold assignment: each class is shuffled by one seeded RNG
/// (REAL first, then FAKE) and dealt into `k` contiguous chunks, so every
/// row lands in exactly one validation fold and per-fold class counts stay
/// within one row of proportional.
pub fn stratified_folds(
    labels: &[Label],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, EvalError> {
    assert!(k >= 2, "cross-validation needs at least 2 folds");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    for class in [Label::Real, Label::Fake] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(EvalError::TooFewRows {
                label: class,
                got: members.len(),
                needed: k,
            });
        }
        members.shuffle(&mut rng);
        let base = members.len() / k;
        let extra = members.len() % k;
        let mut start = 0;
        for (f, fold) in folds.iter_mut().enumerate() {
            let size = base + usize::from(f < extra);
            fold.extend_from_slice(&members[start..start + size]);
            start += size;
        }
    }
    Ok(folds)
}

/// Stratified k-fold cross-validation. Folds run in parallel; per-fold fit
/// seeds derive from `seed` and the fold index, so the report is identical
/// regardless of thread count.
pub fn kfold_cv(
    ds: &LabeledDataset,
    spec: &ModelSpec,
    k: usize,
    seed: u64,
) -> Result<CVReport, EvalError> {
    let folds = stratified_folds(ds.labels(), k, seed)?;
    let fold_metrics: Vec<MetricsRecord> = folds
        .par_iter()
        .enumerate()
        .map(|(f, validation)| -> Result<MetricsRecord, EvalError> {
            let mut in_fold = vec![false; ds.len()];
            for &i in validation {
                in_fold[i] = true;
            }
            let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| !in_fold[i]).collect();
            let train = ds.subset(&train_idx);
            let fit_seed = seed.wrapping_add((f as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let model = TrainedModel::fit(spec, &train, fit_seed)?;
            let mut truth = Vec::with_capacity(validation.len());
            let mut preds = Vec::with_capacity(validation.len());
            let mut scores = Vec::with_capacity(validation.len());
            for &i in validation {
                let p = model.predict(ds.row(i));
                truth.push(ds.label(i));
                preds.push(p.label);
                scores.push(p.score);
            }
            Ok(metrics(&truth, &preds, &scores))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CVReport::from_folds(spec.describe(), fold_metrics))
}

/// Linear sweep over the family's primary hyperparameter. Fold assignments
/// are identical at every grid point because they derive only from
/// `(labels, k, seed)`.
pub fn sweep(
    ds: &LabeledDataset,
    family: ModelFamily,
    grid: &[usize],
    k: usize,
    seed: u64,
) -> Result<Vec<(usize, CVReport)>, EvalError> {
    assert!(!grid.is_empty(), "sweep grid must be non-empty");
    let name = family
        .primary_hyperparameter()
        .ok_or(EvalError::NotSweepable(family))?;
    let mut out = Vec::with_capacity(grid.len());
    for &point in grid {
        let spec = ModelSpec::new(family).with(name, point as f64)?;
        out.push((point, kfold_cv(ds, &spec, k, seed)?));
    }
    Ok(out)
}

// ----------------------------------------------------------------- balance

/// Undersample the majority class to a 1:1 ratio, then shuffle row order.
/// Seed-deterministic. A single-class dataset is returned unchanged.
pub fn balance(ds: &LabeledDataset, seed: u64) -> LabeledDataset {
    let n_real = ds.class_count(Label::Real);
    let n_fake = ds.class_count(Label::Fake);
    if n_real == 0 || n_fake == 0 {
        return ds.clone();
    }
    let (minority, majority) = if n_real <= n_fake {
        (Label::Real, Label::Fake)
    } else {
        (Label::Fake, Label::Real)
    };
    let target = n_real.min(n_fake);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut majority_idx: Vec<usize> =
        (0..ds.len()).filter(|&i| ds.label(i) == majority).collect();
    majority_idx.shuffle(&mut rng);
    majority_idx.truncate(target);

    let mut keep: Vec<usize> = (0..ds.len()).filter(|&i| ds.label(i) == minority).collect();
    keep.extend(majority_idx);
    keep.shuffle(&mut rng);
    ds.subset(&keep)
}

// ------------------------------------------------------------------- bench

/// Single-row inference latency statistics, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub mean_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    pub n_samples: usize,
    pub warmup: usize,
}

/// Seeded with-replacement row sampling shared by the benchmark and tests.
pub fn sample_indices(seed: u64, len: usize, count: usize) -> Vec<usize> {
    assert!(len > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0..len)).collect()
}

/// Time `n` single-row predictions on rows sampled with replacement, after
/// `warmup` untimed calls. Strictly single-threaded; wall time comes from
/// the monotonic high-resolution clock.
pub fn bench_latency(
    model: &TrainedModel,
    ds: &LabeledDataset,
    n: usize,
    warmup: usize,
    seed: u64,
) -> LatencyReport {
    assert!(n >= 1, "benchmark needs at least one sample");
    assert!(!ds.is_empty(), "benchmark needs a non-empty dataset");
    let indices = sample_indices(seed, ds.len(), warmup + n);
    for &i in &indices[..warmup] {
        std::hint::black_box(model.predict(ds.row(i)));
    }
    let mut total = 0.0f64;
    let mut min_ms = f64::INFINITY;
    let mut max_ms = 0.0f64;
    for &i in &indices[warmup..] {
        let row = ds.row(i);
        let start = Instant::now();
        std::hint::black_box(model.predict(row));
        let ms = start.elapsed().as_secs_f64() * 1e3;
        total += ms;
        min_ms = min_ms.min(ms);
        max_ms = max_ms.max(ms);
    }
    LatencyReport {
        mean_ms: total / n as f64,
        min_ms,
        max_ms,
        n_samples: n,
        warmup,
    }
}

// --------------------------------------------------------------------- CSV

/// One CSV row per fold, then `mean` and `std` rows.
pub fn cv_to_csv(report: &CVReport) -> String {
    let mut out = String::from("fold,accuracy,precision,recall,f1,mcc,roc_auc\n");
    let row = |tag: &str, m: &MetricsRecord| {
        let vals: Vec<String> = m.values().iter().map(|v| v.to_string()).collect();
        format!("{tag},{}\n", vals.join(","))
    };
    for (i, fold) in report.folds.iter().enumerate() {
        out.push_str(&row(&(i + 1).to_string(), fold));
    }
    out.push_str(&row("mean", &report.mean));
    out.push_str(&row("std", &report.std));
    out
}

/// One CSV row of mean metrics per grid point.
pub fn sweep_to_csv(name: &str, results: &[(usize, CVReport)]) -> String {
    let mut out = format!("{name},accuracy,precision,recall,f1,mcc,roc_auc\n");
    for (point, report) in results {
        let vals: Vec<String> = report.mean.values().iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("{point},{}\n", vals.join(",")));
    }
    out
}
