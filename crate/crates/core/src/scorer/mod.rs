//! Per-indicator answer classifiers.
//!
//! Each (language, level, session, indicator) gets its own [`Scorer`]: a
//! z-scoring step followed by an [`Mlp`] that outputs probabilities for the
//! scores 0, 1 and 2.

mod mlp;
mod standardize;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use mlp::{argmax, Gradients, Mlp, TrainConfig, ADAGRAD_EPSILON, DEFAULT_LEARNING_RATE, N_CLASSES};
pub use standardize::Standardizer;

use crate::corpus::{GroupKey, Indicator};
use crate::features::FeatureVector;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NnError {
    #[error("input has {got} features, the model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no training data")]
    EmptyTrainingData,
    #[error("label {0} is not a valid class")]
    InvalidLabel(usize),
    #[error("training produced non-finite parameters")]
    Diverged,
    #[error("model file: {0}")]
    Format(String),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

pub const MODEL_FORMAT: &str = "l2grade-mlp";
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// SHA-256 over `id\tlabel` lines in the given order.
pub fn training_fingerprint<S: AsRef<str>>(ids: &[S], labels: &[usize]) -> String {
    let mut h = Sha256::new();
    for (id, y) in ids.iter().zip(labels) {
        h.update(id.as_ref().as_bytes());
        h.update(format!("\t{y}\n").as_bytes());
    }
    hex::encode(h.finalize())
}

/// A trained classifier for one indicator of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct Scorer {
    pub group: Option<GroupKey>,
    pub indicator: Option<Indicator>,
    pub standardizer: Standardizer,
    pub mlp: Mlp,
    pub train_config: TrainConfig,
    pub fingerprint: String,
    pub n_train: usize,
    pub loss_curve: Vec<f64>,
}

impl Scorer {
    /// Fit standardization on `rows`, then train a fresh
    /// `[d, d, d, d, 3]` network seeded with `seed`.
    pub fn fit<S: AsRef<str>>(
        rows: &[&[f64]],
        labels: &[usize],
        ids: &[S],
        seed: u64,
        learning_rate: f64,
        config: TrainConfig,
    ) -> Result<Self, NnError> {
        if rows.is_empty() {
            return Err(NnError::EmptyTrainingData);
        }
        let dim = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(NnError::DimensionMismatch { expected: dim, got: bad.len() });
        }
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        let x = Array2::from_shape_vec((rows.len(), dim), flat).expect("rectangular rows");
        let standardizer = Standardizer::fit(x.view());
        let z = standardizer.apply_rows(x.view());
        let mut mlp = Mlp::init(&Mlp::scorer_widths(dim), seed).with_learning_rate(learning_rate);
        let loss_curve = mlp.train(z.view(), labels, config)?;
        if !mlp.parameters_finite() {
            return Err(NnError::Diverged);
        }
        Ok(Scorer {
            group: None,
            indicator: None,
            standardizer,
            mlp,
            train_config: config,
            fingerprint: training_fingerprint(ids, labels),
            n_train: rows.len(),
            loss_curve,
        })
    }

    pub fn with_key(mut self, group: GroupKey, indicator: Indicator) -> Self {
        self.group = Some(group);
        self.indicator = Some(indicator);
        self
    }

    pub fn input_width(&self) -> usize {
        self.mlp.input_width()
    }

    pub fn probabilities(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        if x.len() != self.standardizer.dim() {
            return Err(NnError::DimensionMismatch { expected: self.standardizer.dim(), got: x.len() });
        }
        self.mlp.forward(&self.standardizer.apply(x))
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, NnError> {
        Ok(argmax(&self.probabilities(x)?))
    }

    pub fn predict_vector(&self, v: &FeatureVector) -> Result<u8, NnError> {
        Ok(self.predict(v.as_slice())? as u8)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_FORMAT_VERSION,
            group: self.group,
            indicator: self.indicator,
            widths: self.mlp.widths().to_vec(),
            seed: self.mlp.seed(),
            learning_rate: self.mlp.learning_rate(),
            train_config: self.train_config,
            fingerprint: self.fingerprint.clone(),
            n_train: self.n_train,
            loss_curve: self.loss_curve.clone(),
            standardizer: self.standardizer.clone(),
            layers: self
                .mlp
                .weights()
                .iter()
                .zip(self.mlp.biases())
                .map(|(w, b)| LayerFile {
                    weights: w.rows().into_iter().map(|r| r.to_vec()).collect(),
                    bias: b.to_vec(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    /// Parse a model file. `expected_input`, when given, must match the
    /// stored input width.
    pub fn from_json(text: &str, expected_input: Option<usize>) -> Result<Self, NnError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| NnError::Format(e.to_string()))?;
        if file.format != MODEL_FORMAT || file.version != MODEL_FORMAT_VERSION {
            return Err(NnError::Format(format!("unsupported format {} v{}", file.format, file.version)));
        }
        if file.widths.len() < 2 || file.layers.len() != file.widths.len() - 1 {
            return Err(NnError::Format("layer count does not match widths".into()));
        }
        if let Some(expected) = expected_input {
            if file.widths[0] != expected {
                return Err(NnError::DimensionMismatch { expected, got: file.widths[0] });
            }
        }
        if file.standardizer.dim() != file.widths[0] || file.standardizer.std.len() != file.widths[0] {
            return Err(NnError::Format("standardization width does not match input".into()));
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (l, layer) in file.layers.into_iter().enumerate() {
            let (n_in, n_out) = (file.widths[l], file.widths[l + 1]);
            if layer.weights.len() != n_out || layer.bias.len() != n_out || layer.weights.iter().any(|r| r.len() != n_in) {
                return Err(NnError::Format(format!("layer {l} has the wrong shape")));
            }
            let flat: Vec<f64> = layer.weights.into_iter().flatten().collect();
            weights.push(Array2::from_shape_vec((n_out, n_in), flat).expect("checked shape"));
            biases.push(Array1::from(layer.bias));
        }
        let mlp = Mlp::from_parts(file.widths, weights, biases, file.learning_rate, file.seed);
        Ok(Scorer {
            group: file.group,
            indicator: file.indicator,
            standardizer: file.standardizer,
            mlp,
            train_config: file.train_config,
            fingerprint: file.fingerprint,
            n_train: file.n_train,
            loss_curve: file.loss_curve,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), NnError> {
        crate::corpus::io::write_bytes(path, self.to_json().as_bytes())
            .map_err(|e| NnError::Io { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn load(path: &Path, expected_input: Option<usize>) -> Result<Self, NnError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| NnError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        Self::from_json(&text, expected_input)
    }
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    group: Option<GroupKey>,
    indicator: Option<Indicator>,
    widths: Vec<usize>,
    seed: u64,
    learning_rate: f64,
    train_config: TrainConfig,
    fingerprint: String,
    n_train: usize,
    loss_curve: Vec<f64>,
    standardizer: Standardizer,
    layers: Vec<LayerFile>,
}

/// Trained scorers keyed by group and indicator.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelGroup {
    pub models: BTreeMap<(GroupKey, Indicator), Scorer>,
}

impl ModelGroup {
    pub fn insert(&mut self, group: GroupKey, indicator: Indicator, scorer: Scorer) {
        self.models.insert((group, indicator), scorer.with_key(group, indicator));
    }

    pub fn get(&self, group: GroupKey, indicator: Indicator) -> Option<&Scorer> {
        self.models.get(&(group, indicator))
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// File name of a stored scorer, e.g. `en_A1_S1.fluency.json`.
    pub fn file_name(group: GroupKey, indicator: Indicator) -> String {
        format!("{}.{}.json", group.slug(), indicator.name())
    }

    pub fn save_dir(&self, dir: &Path) -> Result<(), NnError> {
        for ((g, i), s) in &self.models {
            s.save(&dir.join(Self::file_name(*g, *i)))?;
        }
        Ok(())
    }

    /// Load every `*.json` model in `dir`.
    pub fn load_dir(dir: &Path, expected_input: Option<usize>) -> Result<Self, NnError> {
        let io_err = |e: std::io::Error| NnError::Io { path: dir.to_path_buf(), message: e.to_string() };
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(io_err)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut group = ModelGroup::default();
        for p in paths {
            let s = Scorer::load(&p, expected_input)?;
            let (Some(g), Some(i)) = (s.group, s.indicator) else {
                return Err(NnError::Format(format!("{} has no group/indicator key", p.display())));
            };
            group.models.insert((g, i), s);
        }
        Ok(group)
    }
}
