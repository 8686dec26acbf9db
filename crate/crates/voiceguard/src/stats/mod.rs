//! Dataset analysis: per-class descriptive statistics, unpaired t-tests,
//! feature/label association rankings, and the single-threshold baseline
//! classifier.

pub mod special;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{LabeledDataset, Label};
use crate::dsp::NUM_FEATURES;
use crate::eval::{metrics, stratified_folds, CVReport, EvalError};

pub use special::{betai, ln_gamma, student_t_sf};

/// Two-sided significance level for the t-test table.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("class {0} has no rows")]
    EmptyClass(Label),
    #[error("need at least two observations per sample")]
    InsufficientData,
    #[error("zero variance makes the statistic undefined")]
    ZeroVariance,
}

/// Mean, median and sample standard deviation of one feature in one class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

/// Per-class summary of one feature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureClassSummary {
    pub name: String,
    pub real: SummaryStats,
    pub fake: SummaryStats,
}

/// Unpaired two-sample t-test outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub p_value: f64,
    pub significant: bool,
    pub degrees_of_freedom: f64,
}

/// Association of one feature with the class label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureRank {
    pub name: String,
    pub pearson_r: f64,
    pub relative_entropy_bits: f64,
}

/// Threshold rule on a single feature plus its cross-validation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingleRule {
    pub feature_index: usize,
    pub feature_name: String,
    /// Fit on the full dataset; per-fold rules are refit for the report.
    pub threshold: f64,
    /// Predict FAKE when value >= threshold; otherwise when value < threshold.
    pub fake_if_geq: bool,
    pub report: CVReport,
}

impl SingleRule {
    pub fn predict(&self, value: f64) -> Label {
        let fake = if self.fake_if_geq {
            value >= self.threshold
        } else {
            value < self.threshold
        };
        if fake {
            Label::Fake
        } else {
            Label::Real
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n−1 denominator); 0 for fewer than 2 values.
fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn summarize(xs: &[f64]) -> SummaryStats {
    SummaryStats {
        mean: mean(xs),
        median: median(xs),
        std: sample_std(xs),
    }
}

/// Per-class, per-feature mean/median/sample-std table.
pub fn class_summary(ds: &LabeledDataset) -> Result<Vec<FeatureClassSummary>, StatsError> {
    for class in [Label::Real, Label::Fake] {
        if ds.class_count(class) == 0 {
            return Err(StatsError::EmptyClass(class));
        }
    }
    Ok((0..NUM_FEATURES)
        .map(|j| FeatureClassSummary {
            name: ds.feature_names()[j].clone(),
            real: summarize(&ds.class_column(Label::Real, j)),
            fake: summarize(&ds.class_column(Label::Fake, j)),
        })
        .collect())
}

/// Student's unpaired two-sample t-test with pooled variance and
/// df = n_a + n_b − 2. p-values below 1e-300 are reported as exactly 0.
pub fn t_test_unpaired(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::InsufficientData);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (sa, sb) = (sample_std(a), sample_std(b));
    let df = na + nb - 2.0;
    let pooled_var = ((na - 1.0) * sa * sa + (nb - 1.0) * sb * sb) / df;
    let se = (pooled_var * (1.0 / na + 1.0 / nb)).sqrt();

    let (t, p) = if se == 0.0 {
        if ma == mb {
            (0.0, 1.0)
        } else {
            // constant samples at different values: the statistic diverges
            return Err(StatsError::ZeroVariance);
        }
    } else {
        let t = (ma - mb) / se;
        let p = 2.0 * student_t_sf(t.abs(), df);
        (t, if p < 1e-300 { 0.0 } else { p.min(1.0) })
    };

    Ok(TTestResult {
        t_statistic: t,
        p_value: p,
        significant: p < ALPHA,
        degrees_of_freedom: df,
    })
}

/// t-test of REAL vs FAKE for every feature, in feature order.
pub fn t_test_table(ds: &LabeledDataset) -> Result<Vec<(String, TTestResult)>, StatsError> {
    (0..NUM_FEATURES)
        .map(|j| {
            let a = ds.class_column(Label::Real, j);
            let b = ds.class_column(Label::Fake, j);
            Ok((ds.feature_names()[j].clone(), t_test_unpaired(&a, &b)?))
        })
        .collect()
}

/// Point-biserial Pearson correlation between a feature and the class
/// label encoded REAL=0, FAKE=1.
pub fn pearson_corr(feature: &[f64], labels: &[Label]) -> Result<f64, StatsError> {
    if feature.len() < 2 || feature.len() != labels.len() {
        return Err(StatsError::InsufficientData);
    }
    let y: Vec<f64> = labels.iter().map(|l| l.as_f64()).collect();
    let (mx, my) = (mean(feature), mean(&y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &yv) in feature.iter().zip(&y) {
        sxy += (x - mx) * (yv - my);
        sxx += (x - mx) * (x - mx);
        syy += (yv - my) * (yv - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Information gain of the class from the feature discretized into
/// `n_bins` equal-width bins over its observed range, in bits.
pub fn relative_entropy(feature: &[f64], labels: &[Label], n_bins: usize) -> f64 {
    assert!(n_bins >= 1);
    assert_eq!(feature.len(), labels.len());
    let n = feature.len();
    if n == 0 {
        return 0.0;
    }

    let entropy = |fake: usize, total: usize| -> f64 {
        if total == 0 {
            return 0.0;
        }
        let mut h = 0.0;
        for count in [fake, total - fake] {
            if count > 0 {
                let p = count as f64 / total as f64;
                h -= p * p.log2();
            }
        }
        h
    };

    let total_fake = labels.iter().filter(|&&l| l == Label::Fake).count();
    let h_class = entropy(total_fake, n);

    let lo = feature.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = feature.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return 0.0; // one occupied bin, no gain
    }

    let mut bin_total = vec![0usize; n_bins];
    let mut bin_fake = vec![0usize; n_bins];
    for (&x, &l) in feature.iter().zip(labels) {
        let t = (x - lo) / (hi - lo);
        let b = ((t * n_bins as f64) as usize).min(n_bins - 1);
        bin_total[b] += 1;
        if l == Label::Fake {
            bin_fake[b] += 1;
        }
    }

    let mut conditional = 0.0;
    for b in 0..n_bins {
        if bin_total[b] > 0 {
            let p_bin = bin_total[b] as f64 / n as f64;
            conditional += p_bin * entropy(bin_fake[b], bin_total[b]);
        }
    }
    (h_class - conditional).max(0.0)
}

/// Pearson correlation and relative entropy for every feature, in order.
pub fn ranking(ds: &LabeledDataset, n_bins: usize) -> Result<Vec<FeatureRank>, StatsError> {
    let labels = ds.labels();
    (0..NUM_FEATURES)
        .map(|j| {
            let col = ds.column(j);
            Ok(FeatureRank {
                name: ds.feature_names()[j].clone(),
                pearson_r: pearson_corr(&col, labels)?,
                relative_entropy_bits: relative_entropy(&col, labels, n_bins),
            })
        })
        .collect()
}

/// Best threshold-and-direction rule for one feature by training accuracy.
///
/// Candidates are the midpoints of consecutive distinct sorted values plus
/// an always-REAL and an always-FAKE sentinel on the outside, so the chosen
/// rule never scores below the majority-class prior on its training split.
/// Returns (threshold, fake_if_geq, training accuracy).
fn fit_rule(values: &[f64], labels: &[Label]) -> (f64, bool, f64) {
    let n = values.len();
    assert!(n > 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());

    // prefix_real[i] / prefix_fake[i]: class counts among the i smallest
    let mut prefix_real = vec![0usize; n + 1];
    let mut prefix_fake = vec![0usize; n + 1];
    for (i, &idx) in order.iter().enumerate() {
        prefix_real[i + 1] = prefix_real[i] + usize::from(labels[idx] == Label::Real);
        prefix_fake[i + 1] = prefix_fake[i] + usize::from(labels[idx] == Label::Fake);
    }
    let (total_real, total_fake) = (prefix_real[n], prefix_fake[n]);

    let threshold_at = |i: usize| -> f64 {
        if i == 0 {
            values[order[0]] - 1.0
        } else if i == n {
            values[order[n - 1]] + 1.0
        } else {
            0.5 * (values[order[i - 1]] + values[order[i]])
        }
    };

    let mut best = (threshold_at(0), true, 0.0f64);
    for i in 0..=n {
        // only boundaries between distinct values are realizable
        if i > 0 && i < n && values[order[i - 1]] == values[order[i]] {
            continue;
        }
        let geq_correct = prefix_real[i] + (total_fake - prefix_fake[i]);
        let lt_correct = prefix_fake[i] + (total_real - prefix_real[i]);
        for (correct, fake_if_geq) in [(geq_correct, true), (lt_correct, false)] {
            let acc = correct as f64 / n as f64;
            if acc > best.2 {
                best = (threshold_at(i), fake_if_geq, acc);
            }
        }
    }
    best
}

/// Cross-validated single-feature threshold classifier: the rule is refit
/// on each training split and scored on the held-out fold; the returned
/// threshold is refit on the full dataset.
pub fn single_rule(
    ds: &LabeledDataset,
    feature_index: usize,
    folds: usize,
    seed: u64,
) -> Result<SingleRule, EvalError> {
    assert!(feature_index < NUM_FEATURES);
    let values = ds.column(feature_index);
    let labels = ds.labels();
    let fold_sets = stratified_folds(labels, folds, seed)?;

    let mut fold_metrics = Vec::with_capacity(fold_sets.len());
    let mut in_fold = vec![false; ds.len()];
    for fold in &fold_sets {
        for &i in fold {
            in_fold[i] = true;
        }
        let (mut tv, mut tl) = (Vec::new(), Vec::new());
        for i in 0..ds.len() {
            if !in_fold[i] {
                tv.push(values[i]);
                tl.push(labels[i]);
            }
        }
        let (threshold, fake_if_geq, _) = fit_rule(&tv, &tl);
        let rule = SingleRule {
            feature_index,
            feature_name: String::new(),
            threshold,
            fake_if_geq,
            report: CVReport::empty("rule"),
        };
        let truth: Vec<Label> = fold.iter().map(|&i| labels[i]).collect();
        let preds: Vec<Label> = fold.iter().map(|&i| rule.predict(values[i])).collect();
        let scores: Vec<f64> = preds.iter().map(|p| p.as_f64()).collect();
        fold_metrics.push(metrics(&truth, &preds, &scores));
        for &i in fold {
            in_fold[i] = false;
        }
    }

    let name = ds.feature_names()[feature_index].clone();
    let (threshold, fake_if_geq, _) = fit_rule(&values, labels);
    Ok(SingleRule {
        feature_index,
        feature_name: name.clone(),
        threshold,
        fake_if_geq,
        report: CVReport::from_folds(format!("single_rule({name})"), fold_metrics),
    })
}

// ---------------------------------------------------------------- rendering

/// Wide CSV mirroring the per-class summary table.
pub fn summary_csv(table: &[FeatureClassSummary]) -> String {
    let mut out =
        String::from("feature,real_mean,real_median,real_std,fake_mean,fake_median,fake_std\n");
    for row in table {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.name,
            row.real.mean,
            row.real.median,
            row.real.std,
            row.fake.mean,
            row.fake.median,
            row.fake.std
        ));
    }
    out
}

pub fn summary_text(table: &[FeatureClassSummary]) -> String {
    let mut out = format!(
        "{:<20} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
        "feature", "REAL mean", "REAL median", "REAL std", "FAKE mean", "FAKE median", "FAKE std"
    );
    for row in table {
        out.push_str(&format!(
            "{:<20} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>12.4}\n",
            row.name,
            row.real.mean,
            row.real.median,
            row.real.std,
            row.fake.mean,
            row.fake.median,
            row.fake.std
        ));
    }
    out
}

pub fn ttests_csv(table: &[(String, TTestResult)]) -> String {
    let mut out = String::from("feature,t_statistic,p_value,degrees_of_freedom,significant\n");
    for (name, t) in table {
        out.push_str(&format!(
            "{},{},{:e},{},{}\n",
            name,
            t.t_statistic,
            t.p_value,
            t.degrees_of_freedom,
            if t.significant { "Y" } else { "N" }
        ));
    }
    out
}

pub fn ttests_text(table: &[(String, TTestResult)]) -> String {
    let mut out = format!(
        "{:<20} {:>12} {:>12} {:>8} {:>5}\n",
        "feature", "t", "p", "df", "sig"
    );
    for (name, t) in table {
        out.push_str(&format!(
            "{:<20} {:>12.3} {:>12.3e} {:>8.0} {:>5}\n",
            name,
            t.t_statistic,
            t.p_value,
            t.degrees_of_freedom,
            if t.significant { "Y" } else { "N" }
        ));
    }
    out
}

pub fn ranking_csv(table: &[FeatureRank]) -> String {
    let mut out = String::from("feature,pearson_r,abs_pearson_r,relative_entropy_bits\n");
    for row in table {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.name,
            row.pearson_r,
            row.pearson_r.abs(),
            row.relative_entropy_bits
        ));
    }
    out
}

pub fn ranking_text(table: &[FeatureRank]) -> String {
    let mut out = format!(
        "{:<20} {:>10} {:>10} {:>14}\n",
        "feature", "pearson r", "|r|", "rel. entropy"
    );
    for row in table {
        out.push_str(&format!(
            "{:<20} {:>10.4} {:>10.4} {:>14.4}\n",
            row.name,
            row.pearson_r,
            row.pearson_r.abs(),
            row.relative_entropy_bits
        ));
    }
    out
}

pub fn single_rule_text(rule: &SingleRule) -> String {
    let direction = if rule.fake_if_geq { ">=" } else { "<" };
    let mut out = format!(
        "single-rule classifier on {}\npredict FAKE when {} {} {:.6}\n",
        rule.feature_name, rule.feature_name, direction, rule.threshold
    );
    out.push_str(&format!(
        "fold accuracies: {}\n",
        rule.report
            .folds
            .iter()
            .map(|m| format!("{:.4}", m.accuracy))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    out.push_str(&format!(
        "mean accuracy {:.4} (std {:.4})\nprecision {:.3}  recall {:.3}  f1 {:.3}  mcc {:.3}  roc_auc {:.3}\n",
        rule.report.mean.accuracy,
        rule.report.std.accuracy,
        rule.report.mean.precision,
        rule.report.mean.recall,
        rule.report.mean.f1,
        rule.report.mean.mcc,
        rule.report.mean.roc_auc
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::FeatureVector;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Dataset whose feature 0 is the given per-row value; the other 25
    /// features are a fixed ramp so nothing is degenerate.
    fn ds_with_feature0(values: &[f64], labels: &[Label]) -> LabeledDataset {
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut row = [0.0; NUM_FEATURES];
                row[0] = v;
                for (j, x) in row.iter_mut().enumerate().skip(1) {
                    *x = (i % 7) as f64 + j as f64 * 0.01;
                }
                FeatureVector::new(row)
            })
            .collect();
        LabeledDataset::new(rows, labels.to_vec()).unwrap()
    }

    #[test]
    fn summary_small_cases() {
        let values = [5.0, 1.0, 2.0, 3.0, 4.0];
        let labels = [Label::Fake, Label::Real, Label::Real, Label::Real, Label::Real];
        let ds = ds_with_feature0(&values, &labels);
        let table = class_summary(&ds).unwrap();

        // single-row class: mean = median = value, std = 0
        assert_eq!(table[0].fake.mean, 5.0);
        assert_eq!(table[0].fake.median, 5.0);
        assert_eq!(table[0].fake.std, 0.0);

        // {1,2,3,4}: mean 2.5, median 2.5, sample std sqrt(5/3)
        assert!((table[0].real.mean - 2.5).abs() < 1e-12);
        assert!((table[0].real.median - 2.5).abs() < 1e-12);
        assert!((table[0].real.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((table[0].real.std - 1.2910).abs() < 1e-4);

        let single = ds.subset(&[1, 2]);
        assert!(matches!(
            class_summary(&single).unwrap_err(),
            StatsError::EmptyClass(Label::Fake)
        ));
    }

    #[test]
    fn t_test_identical_and_known() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = t_test_unpaired(&a, &a).unwrap();
        assert_eq!(r.t_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.significant);
        assert_eq!(r.degrees_of_freedom, 8.0);

        // equal variances, means 3 vs 4, pooled se = 1 => t = -1
        let b = [2.0, 3.0, 4.0, 5.0, 6.0];
        let r = t_test_unpaired(&a, &b).unwrap();
        assert!((r.t_statistic + 1.0).abs() < 1e-12);
        assert!((r.p_value - 2.0 * student_t_sf(1.0, 8.0)).abs() < 1e-12);

        assert!(matches!(
            t_test_unpaired(&[1.0], &a).unwrap_err(),
            StatsError::InsufficientData
        ));
        assert!(matches!(
            t_test_unpaired(&[1.0, 1.0], &[2.0, 2.0]).unwrap_err(),
            StatsError::ZeroVariance
        ));
    }

    #[test]
    fn pearson_anchors() {
        let labels = [Label::Real, Label::Real, Label::Fake, Label::Fake];
        // feature equal to the encoding
        let r = pearson_corr(&[0.0, 0.0, 1.0, 1.0], &labels).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        // alternating pattern balanced across classes is orthogonal
        let r = pearson_corr(&[0.0, 1.0, 0.0, 1.0], &labels).unwrap();
        assert!(r.abs() < 1e-12);
        assert!(matches!(
            pearson_corr(&[2.0, 2.0, 2.0, 2.0], &labels).unwrap_err(),
            StatsError::ZeroVariance
        ));
        // single class has zero label variance
        assert!(matches!(
            pearson_corr(&[1.0, 2.0], &[Label::Real, Label::Real]).unwrap_err(),
            StatsError::ZeroVariance
        ));
    }

    #[test]
    fn relative_entropy_anchors() {
        let mut labels = vec![Label::Real; 20];
        labels.extend(vec![Label::Fake; 20]);
        let constant = vec![3.7; 40];
        assert_eq!(relative_entropy(&constant, &labels, 10), 0.0);

        let mut separated = vec![-1.0; 20];
        separated.extend(vec![1.0; 20]);
        let ig = relative_entropy(&separated, &labels, 10);
        assert!((ig - 1.0).abs() < 1e-12, "{ig}");

        // never exceeds the class entropy (1 bit when balanced)
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let noisy: Vec<f64> = (0..40).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let ig = relative_entropy(&noisy, &labels, 10);
        assert!((0.0..=1.0).contains(&ig));
    }

    #[test]
    fn single_rule_separable_and_permuted() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 400;
        let mut labels: Vec<Label> = (0..n)
            .map(|i| if i < n / 2 { Label::Real } else { Label::Fake })
            .collect();
        labels.shuffle(&mut rng);

        // perfectly separable: REAL below 0, FAKE above
        let sep: Vec<f64> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| l.as_pm1() * (1.0 + (i % 13) as f64 * 0.05))
            .collect();
        let ds = ds_with_feature0(&sep, &labels);
        let rule = single_rule(&ds, 0, 10, 42).unwrap();
        for fold in &rule.report.folds {
            assert_eq!(fold.accuracy, 1.0);
        }
        assert!(rule.fake_if_geq);
        assert!(rule.threshold.abs() < 1.0);

        // labels independent of the feature: near-chance mean accuracy
        let noise: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let ds = ds_with_feature0(&noise, &labels);
        let rule = single_rule(&ds, 0, 10, 42).unwrap();
        let acc = rule.report.mean.accuracy;
        assert!((acc - 0.5).abs() < 0.05, "permuted accuracy {acc}");

        // the full-data rule never loses to the majority prior
        let correct = (0..n)
            .filter(|&i| rule.predict(noise[i]) == labels[i])
            .count();
        let prior = labels.iter().filter(|&&l| l == Label::Fake).count().max(
            labels.iter().filter(|&&l| l == Label::Real).count(),
        );
        assert!(correct >= prior);
    }

    #[test]
    fn renderers_are_well_formed() {
        let values = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let labels = [
            Label::Real,
            Label::Real,
            Label::Real,
            Label::Fake,
            Label::Fake,
            Label::Fake,
        ];
        let ds = ds_with_feature0(&values, &labels);

        let summary = summary_csv(&class_summary(&ds).unwrap());
        assert_eq!(summary.lines().count(), NUM_FEATURES + 1);
        assert!(summary.starts_with("feature,real_mean"));

        let tt = t_test_table(&ds).unwrap();
        let csv = ttests_csv(&tt);
        assert_eq!(csv.lines().count(), NUM_FEATURES + 1);
        assert!(csv.lines().nth(1).unwrap().starts_with("chroma_stft,"));
        let text = ttests_text(&tt);
        assert!(text.contains("chroma_stft"));

        let rk = ranking(&ds, 10).unwrap();
        assert_eq!(rk.len(), NUM_FEATURES);
        assert!(ranking_csv(&rk).contains("mfcc20,"));
        assert!(ranking_text(&rk).contains("pearson"));

        let rule = single_rule(&ds, 0, 3, 42).unwrap();
        let text = single_rule_text(&rule);
        assert!(text.contains("predict FAKE when chroma_stft"));
        assert!(text.contains("mean accuracy"));
    }

    proptest! {
        #[test]
        fn t_test_is_antisymmetric(
            a in proptest::collection::vec(-50.0f64..50.0, 3..24),
            b in proptest::collection::vec(-50.0f64..50.0, 3..24),
        ) {
            prop_assume!(sample_std(&a) > 1e-9 || sample_std(&b) > 1e-9);
            let ab = t_test_unpaired(&a, &b).unwrap();
            let ba = t_test_unpaired(&b, &a).unwrap();
            prop_assert!((ab.t_statistic + ba.t_statistic).abs() < 1e-9);
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-9);
        }

        #[test]
        fn pearson_affine_invariance(
            xs in proptest::collection::vec(-10.0f64..10.0, 8..32),
            scale in 0.01f64..50.0,
            shift in -100.0f64..100.0,
        ) {
            let labels: Vec<Label> = (0..xs.len())
                .map(|i| if i % 2 == 0 { Label::Real } else { Label::Fake })
                .collect();
            let base = pearson_corr(&xs, &labels);
            prop_assume!(base.is_ok());
            let base = base.unwrap();
            let moved: Vec<f64> = xs.iter().map(|&x| scale * x + shift).collect();
            let r2 = pearson_corr(&moved, &labels).unwrap();
            prop_assert!((base - r2).abs() < 1e-7);
            let neg: Vec<f64> = xs.iter().map(|&x| -x).collect();
            let r3 = pearson_corr(&neg, &labels).unwrap();
            prop_assert!((base + r3).abs() < 1e-7);
        }
    }
}
