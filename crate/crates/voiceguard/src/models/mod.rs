//! Nine classifier families behind one fit/predict/score interface, plus
//! versioned JSON persistence.
//!
//! Every family trains on standardized rows: `fit` learns per-feature mean
//! and standard deviation from the training split and bakes them into the
//! [`TrainedModel`], so `predict` accepts raw feature vectors.

pub mod bayes;
pub mod forest;
pub mod gbt;
mod linalg;
pub mod linear;
pub mod knn;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Label, LabeledDataset};
use crate::dsp::{FeatureVector, NUM_FEATURES};

pub use bayes::{BernoulliNbModel, GaussianNbModel};
pub use forest::ForestModel;
pub use gbt::{GbtModel, GbtParams};
pub use knn::KnnModel;
pub use linear::{LdaModel, QdaModel, RidgeModel, SgdModel};

/// Marker string at the top of every persisted model file.
pub const MODEL_FORMAT: &str = "voiceguard-model";
/// Model file schema version this build reads and writes.
pub const MODEL_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("degenerate training data: {0}")]
    DegenerateTraining(String),
    #[error("invalid hyperparameter `{name}` = {value} for {family}: expected {expected}")]
    InvalidHyperparameter {
        family: ModelFamily,
        name: String,
        value: f64,
        expected: String,
    },
    #[error("unknown model family {0:?} (expected one of: gbt, random_forest, lda, qda, ridge, gaussian_nb, bernoulli_nb, knn, sgd_linear)")]
    UnknownFamily(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("corrupt model file: {0}")]
    CorruptModelFile(String),
    #[error("unsupported model file version {found} (this build reads version {expected})")]
    VersionMismatch { found: u64, expected: u64 },
}

// ------------------------------------------------------------ ModelFamily

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Gbt,
    RandomForest,
    Lda,
    Qda,
    Ridge,
    GaussianNb,
    BernoulliNb,
    Knn,
    SgdLinear,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 9] = [
        ModelFamily::Gbt,
        ModelFamily::RandomForest,
        ModelFamily::Lda,
        ModelFamily::Qda,
        ModelFamily::Ridge,
        ModelFamily::GaussianNb,
        ModelFamily::BernoulliNb,
        ModelFamily::Knn,
        ModelFamily::SgdLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Gbt => "gbt",
            ModelFamily::RandomForest => "random_forest",
            ModelFamily::Lda => "lda",
            ModelFamily::Qda => "qda",
            ModelFamily::Ridge => "ridge",
            ModelFamily::GaussianNb => "gaussian_nb",
            ModelFamily::BernoulliNb => "bernoulli_nb",
            ModelFamily::Knn => "knn",
            ModelFamily::SgdLinear => "sgd_linear",
        }
    }

    /// The hyperparameter a linear sweep varies for this family, if any.
    pub fn primary_hyperparameter(self) -> Option<&'static str> {
        match self {
            ModelFamily::Gbt => Some("rounds"),
            ModelFamily::RandomForest => Some("trees"),
            ModelFamily::Knn => Some("k"),
            _ => None,
        }
    }

    fn param_defs(self) -> &'static [ParamDef] {
        const GBT: &[ParamDef] = &[
            ParamDef::int("rounds", 100.0, 1.0),
            ParamDef::int("max_depth", 6.0, 1.0),
            ParamDef::pos("learning_rate", 0.3),
            ParamDef::nonneg("lambda", 1.0),
            ParamDef::nonneg("min_child_weight", 1.0),
        ];
        const FOREST: &[ParamDef] = &[ParamDef::int("trees", 100.0, 1.0)];
        const RIDGE: &[ParamDef] = &[ParamDef::nonneg("alpha", 1.0)];
        const BNB: &[ParamDef] = &[ParamDef::pos("alpha", 1.0)];
        const KNN: &[ParamDef] = &[ParamDef::int("k", 5.0, 1.0)];
        const SGD: &[ParamDef] = &[
            ParamDef::pos("learning_rate", 0.01),
            ParamDef::int("epochs", 100.0, 1.0),
        ];
        match self {
            ModelFamily::Gbt => GBT,
            ModelFamily::RandomForest => FOREST,
            ModelFamily::Ridge => RIDGE,
            ModelFamily::BernoulliNb => BNB,
            ModelFamily::Knn => KNN,
            ModelFamily::SgdLinear => SGD,
            ModelFamily::Lda | ModelFamily::Qda | ModelFamily::GaussianNb => &[],
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelFamily {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Ok(match norm.as_str() {
            "gbt" | "xgboost" | "gradientboosting" => ModelFamily::Gbt,
            "rf" | "randomforest" | "forest" => ModelFamily::RandomForest,
            "lda" => ModelFamily::Lda,
            "qda" => ModelFamily::Qda,
            "ridge" => ModelFamily::Ridge,
            "gnb" | "gaussiannb" | "naivebayes" => ModelFamily::GaussianNb,
            "bnb" | "bernoullinb" => ModelFamily::BernoulliNb,
            "knn" => ModelFamily::Knn,
            "sgd" | "sgdlinear" => ModelFamily::SgdLinear,
            _ => return Err(ModelError::UnknownFamily(s.to_string())),
        })
    }
}

struct ParamDef {
    name: &'static str,
    default: f64,
    integer: bool,
    min: f64,
    min_exclusive: bool,
}

impl ParamDef {
    const fn int(name: &'static str, default: f64, min: f64) -> Self {
        ParamDef { name, default, integer: true, min, min_exclusive: false }
    }
    const fn pos(name: &'static str, default: f64) -> Self {
        ParamDef { name, default, integer: false, min: 0.0, min_exclusive: true }
    }
    const fn nonneg(name: &'static str, default: f64) -> Self {
        ParamDef { name, default, integer: false, min: 0.0, min_exclusive: false }
    }

    fn expected(&self) -> String {
        let kind = if self.integer { "an integer" } else { "a number" };
        let bound = if self.min_exclusive { ">" } else { "≥" };
        format!("{kind} {bound} {}", self.min)
    }

    fn check(&self, family: ModelFamily, value: f64) -> Result<(), ModelError> {
        let ok = value.is_finite()
            && (!self.integer || value.fract() == 0.0)
            && if self.min_exclusive { value > self.min } else { value >= self.min };
        if ok {
            Ok(())
        } else {
            Err(ModelError::InvalidHyperparameter {
                family,
                name: self.name.to_string(),
                value,
                expected: self.expected(),
            })
        }
    }
}

// -------------------------------------------------------------- ModelSpec

/// A model family plus its hyperparameter overrides. Unset hyperparameters
/// take the documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    #[serde(default)]
    pub hyperparameters: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn new(family: ModelFamily) -> Self {
        ModelSpec {
            family,
            hyperparameters: BTreeMap::new(),
        }
    }

    /// Set one hyperparameter, validating the name and range.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ModelError> {
        let def = self
            .family
            .param_defs()
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| ModelError::InvalidHyperparameter {
                family: self.family,
                name: name.to_string(),
                value,
                expected: Self::known_names(self.family),
            })?;
        def.check(self.family, value)?;
        self.hyperparameters.insert(name.to_string(), value);
        Ok(())
    }

    pub fn with(mut self, name: &str, value: f64) -> Result<Self, ModelError> {
        self.set(name, value)?;
        Ok(self)
    }

    /// Effective value of a hyperparameter (override or default).
    ///
    /// Panics if `name` is not a hyperparameter of this family; callers go
    /// through [`ModelSpec::set`] for user input.
    pub fn get(&self, name: &str) -> f64 {
        if let Some(&v) = self.hyperparameters.get(name) {
            return v;
        }
        self.family
            .param_defs()
            .iter()
            .find(|d| d.name == name)
            .unwrap_or_else(|| panic!("{} has no hyperparameter {name:?}", self.family))
            .default
    }

    fn get_usize(&self, name: &str) -> usize {
        self.get(name) as usize
    }

    /// Check every stored override against the family's table.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, &value) in &self.hyperparameters {
            let def = self
                .family
                .param_defs()
                .iter()
                .find(|d| d.name == name.as_str())
                .ok_or_else(|| ModelError::InvalidHyperparameter {
                    family: self.family,
                    name: name.clone(),
                    value,
                    expected: Self::known_names(self.family),
                })?;
            def.check(self.family, value)?;
        }
        Ok(())
    }

    fn known_names(family: ModelFamily) -> String {
        let names: Vec<&str> = family.param_defs().iter().map(|d| d.name).collect();
        if names.is_empty() {
            format!("no hyperparameters (the {family} family takes none)")
        } else {
            format!("one of: {}", names.join(", "))
        }
    }

    /// Human-readable `family(k=v, ...)` string for reports.
    pub fn describe(&self) -> String {
        if self.hyperparameters.is_empty() {
            self.family.to_string()
        } else {
            let parts: Vec<String> = self
                .hyperparameters
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            format!("{}({})", self.family, parts.join(", "))
        }
    }
}

// ------------------------------------------------------------ Standardizer

/// Per-feature affine normalization learned from the training split.
/// Uses the population standard deviation; zero-variance features get
/// std = 1 so they pass through unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[[f64; NUM_FEATURES]]) -> Self {
        assert!(!x.is_empty());
        let n = x.len() as f64;
        let mut means = vec![0.0; NUM_FEATURES];
        for row in x {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut stds = vec![0.0; NUM_FEATURES];
        for row in x {
            for j in 0..NUM_FEATURES {
                let d = row[j] - means[j];
                stds[j] += d * d;
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Standardizer { means, stds }
    }

    pub fn apply(&self, row: &[f64; NUM_FEATURES]) -> [f64; NUM_FEATURES] {
        let mut out = [0.0; NUM_FEATURES];
        for j in 0..NUM_FEATURES {
            out[j] = (row[j] - self.means[j]) / self.stds[j];
        }
        out
    }

    fn apply_all(&self, x: &[[f64; NUM_FEATURES]]) -> Vec<[f64; NUM_FEATURES]> {
        x.iter().map(|r| self.apply(r)).collect()
    }
}

// ------------------------------------------------------------ TrainedModel

/// Learned state for one family. Each variant holds everything `predict`
/// needs after standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyParams {
    Gbt(GbtModel),
    RandomForest(ForestModel),
    Lda(LdaModel),
    Qda(QdaModel),
    Ridge(RidgeModel),
    GaussianNb(GaussianNbModel),
    BernoulliNb(BernoulliNbModel),
    Knn(KnnModel),
    SgdLinear(SgdModel),
}

/// Classifier output: the hard label and a monotone FAKE-confidence score
/// (a probability or vote fraction in [0, 1] for most families; a raw
/// margin for the ridge classifier).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

/// A fitted classifier: the spec it was built from, the standardizer
/// learned on its training split, and the family parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub standardizer: Standardizer,
    pub params: FamilyParams,
}

impl TrainedModel {
    /// Fit `spec` on `train`. Deterministic given `(spec, train, seed)`.
    ///
    /// Families that reduce to the class prior still fit on single-class
    /// data; LDA and QDA need both classes (and ≥ 2 rows per class for a
    /// covariance) and return `DegenerateTraining` otherwise.
    pub fn fit(spec: &ModelSpec, train: &LabeledDataset, seed: u64) -> Result<Self, ModelError> {
        spec.validate()?;
        if train.is_empty() {
            return Err(ModelError::DegenerateTraining(
                "training set is empty".to_string(),
            ));
        }
        let raw: Vec<[f64; NUM_FEATURES]> = train.rows().iter().map(|r| r.0).collect();
        let labels = train.labels();
        let standardizer = Standardizer::fit(&raw);
        let x = standardizer.apply_all(&raw);

        let params = match spec.family {
            ModelFamily::Gbt => {
                let y01: Vec<f64> = labels.iter().map(|l| l.as_f64()).collect();
                let p = GbtParams {
                    rounds: spec.get_usize("rounds"),
                    max_depth: spec.get_usize("max_depth"),
                    learning_rate: spec.get("learning_rate"),
                    lambda: spec.get("lambda"),
                    min_child_weight: spec.get("min_child_weight"),
                };
                FamilyParams::Gbt(GbtModel::fit(&x, &y01, &p))
            }
            ModelFamily::RandomForest => FamilyParams::RandomForest(ForestModel::fit(
                &x,
                labels,
                spec.get_usize("trees"),
                seed,
            )),
            ModelFamily::Lda => FamilyParams::Lda(LdaModel::fit(&x, labels).ok_or_else(|| {
                ModelError::DegenerateTraining(
                    "LDA needs both classes and at least 3 rows".to_string(),
                )
            })?),
            ModelFamily::Qda => FamilyParams::Qda(QdaModel::fit(&x, labels).ok_or_else(|| {
                ModelError::DegenerateTraining(
                    "QDA needs at least 2 rows in each class".to_string(),
                )
            })?),
            ModelFamily::Ridge => FamilyParams::Ridge(
                RidgeModel::fit(&x, labels, spec.get("alpha")).ok_or_else(|| {
                    ModelError::DegenerateTraining("ridge normal equations are singular".to_string())
                })?,
            ),
            ModelFamily::GaussianNb => FamilyParams::GaussianNb(GaussianNbModel::fit(&x, labels)),
            ModelFamily::BernoulliNb => {
                FamilyParams::BernoulliNb(BernoulliNbModel::fit(&x, labels, spec.get("alpha")))
            }
            ModelFamily::Knn => {
                let k = spec.get_usize("k");
                if k > x.len() {
                    return Err(ModelError::InvalidHyperparameter {
                        family: spec.family,
                        name: "k".to_string(),
                        value: k as f64,
                        expected: format!("an integer ≤ the number of training rows ({})", x.len()),
                    });
                }
                FamilyParams::Knn(KnnModel::fit(&x, labels, k))
            }
            ModelFamily::SgdLinear => FamilyParams::SgdLinear(SgdModel::fit(
                &x,
                labels,
                spec.get("learning_rate"),
                spec.get_usize("epochs"),
                seed,
            )),
        };

        Ok(TrainedModel {
            spec: spec.clone(),
            standardizer,
            params,
        })
    }

    /// Classify one raw (unstandardized) feature row.
    pub fn predict(&self, features: &FeatureVector<f64>) -> Prediction {
        let row = self.standardizer.apply(&features.0);
        let (score, fake) = match &self.params {
            FamilyParams::Gbt(m) => {
                let p = m.probability(&row);
                (p, p >= 0.5)
            }
            FamilyParams::RandomForest(m) => {
                let s = m.score(&row);
                (s, s >= 0.5)
            }
            FamilyParams::Lda(m) => {
                let p = m.probability(&row);
                (p, p >= 0.5)
            }
            FamilyParams::Qda(m) => {
                let p = m.probability(&row);
                (p, p >= 0.5)
            }
            FamilyParams::Ridge(m) => {
                let margin = m.margin(&row);
                (margin, margin >= 0.0)
            }
            FamilyParams::GaussianNb(m) => {
                let p = m.probability(&row);
                (p, p >= 0.5)
            }
            FamilyParams::BernoulliNb(m) => {
                let p = m.probability(&row);
                (p, p >= 0.5)
            }
            FamilyParams::Knn(m) => (m.score(&row), m.vote(&row) == Label::Fake),
            FamilyParams::SgdLinear(m) => {
                let p = m.probability(&row);
                (p, p >= 0.5)
            }
        };
        Prediction {
            label: if fake { Label::Fake } else { Label::Real },
            score,
        }
    }

    /// FAKE-confidence score alone (see [`Prediction::score`]).
    pub fn score(&self, features: &FeatureVector<f64>) -> f64 {
        self.predict(features).score
    }

    /// Serialize to the versioned model-file JSON. Byte-deterministic for
    /// equal models.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Envelope<'a> {
            format: &'static str,
            version: u64,
            model: &'a TrainedModel,
        }
        let mut text = serde_json::to_string_pretty(&Envelope {
            format: MODEL_FORMAT,
            version: MODEL_VERSION,
            model: self,
        })
        .expect("model serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| ModelError::CorruptModelFile(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| ModelError::CorruptModelFile("top level is not an object".to_string()))?;
        match obj.get("format").and_then(|v| v.as_str()) {
            Some(MODEL_FORMAT) => {}
            _ => {
                return Err(ModelError::CorruptModelFile(format!(
                    "missing or wrong `format` marker (expected {MODEL_FORMAT:?})"
                )))
            }
        }
        let version = obj
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| ModelError::CorruptModelFile("missing numeric `version`".to_string()))?;
        if version != MODEL_VERSION {
            return Err(ModelError::VersionMismatch {
                found: version,
                expected: MODEL_VERSION,
            });
        }
        let body = obj
            .get("model")
            .ok_or_else(|| ModelError::CorruptModelFile("missing `model` body".to_string()))?;
        serde_json::from_value(body.clone()).map_err(|e| ModelError::CorruptModelFile(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}
