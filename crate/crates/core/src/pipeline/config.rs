use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::corpus::Language;
use crate::features::{FeatureOptions, LexiconFiles, LmFeatureOptions, TranscriptionOptions, DEFAULT_BOW_SIZE, LM_ORDERS};
use crate::scorer::{TrainConfig, DEFAULT_LEARNING_RATE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// Annotated utterances, JSON Lines.
    pub utterances: PathBuf,
    /// Phone alignments, JSON Lines. Without it the pronunciation block is
    /// zero for every answer.
    #[serde(default)]
    pub alignments: Option<PathBuf>,
    /// Out-of-domain sentences, one per line.
    #[serde(default)]
    pub ood_english: Option<PathBuf>,
    #[serde(default)]
    pub ood_german: Option<PathBuf>,
}

impl DataConfig {
    pub fn ood_for(&self, language: Language) -> Option<&Path> {
        match language {
            Language::English => self.ood_english.as_deref(),
            Language::German => self.ood_german.as_deref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { train_fraction: 2.0 / 3.0, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LmConfig {
    pub orders: Vec<usize>,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig { orders: LM_ORDERS.to_vec() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    pub bow_size: usize,
    /// Training-split answers are featurized with LMs and bag-of-words sets
    /// built without their own speaker fold; 0 uses the full training split.
    pub cross_fit_folds: usize,
    pub count_hesitations: bool,
    pub c_undefined_without_oov: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { bow_size: DEFAULT_BOW_SIZE, cross_fit_folds: 5, count_hesitations: true, c_undefined_without_oov: false }
    }
}

impl FeatureConfig {
    pub fn options(&self) -> FeatureOptions {
        FeatureOptions {
            lm: LmFeatureOptions { c_undefined_without_oov: self.c_undefined_without_oov },
            transcription: TranscriptionOptions { count_hesitations: self.count_hesitations },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NnConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for NnConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        NnConfig { epochs: t.epochs, batch_size: t.batch_size, learning_rate: DEFAULT_LEARNING_RATE, seed: 7 }
    }
}

impl NnConfig {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig { epochs: self.epochs, batch_size: self.batch_size }
    }
}

/// Everything a pipeline run depends on. Relative paths are resolved against
/// the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    pub data: DataConfig,
    pub lexicons: LexiconFiles,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub lm: LmConfig,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub nn: NnConfig,
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::ConfigInvalid(e.to_string()))?;
        cfg.resolve_paths(base_dir);
        Ok(cfg)
    }

    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut cfg: PipelineConfig =
            serde_json::from_str(text).map_err(|e| PipelineError::ConfigInvalid(e.to_string()))?;
        cfg.resolve_paths(base_dir);
        Ok(cfg)
    }

    /// Read a `.json` or TOML (any other extension) config file.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::ConfigInvalid(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json(&text, base)
        } else {
            Self::from_toml(&text, base)
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn resolve_paths(&mut self, base: &Path) {
        resolve(base, &mut self.output_dir);
        resolve(base, &mut self.data.utterances);
        for p in [&mut self.data.alignments, &mut self.data.ood_english, &mut self.data.ood_german].into_iter().flatten() {
            resolve(base, p);
        }
        let l = &mut self.lexicons;
        for p in [&mut l.english, &mut l.german, &mut l.italian] {
            resolve(base, p);
        }
        for p in [
            &mut l.stop_english,
            &mut l.stop_german,
            &mut l.stop_italian,
            &mut l.corrections,
            &mut l.reference_english,
            &mut l.reference_german,
        ]
        .into_iter()
        .flatten()
        {
            resolve(base, p);
        }
    }

    /// Every input file referenced by the config.
    pub fn input_paths(&self) -> Vec<&Path> {
        let mut out: Vec<&Path> = vec![&self.data.utterances];
        for p in [&self.data.alignments, &self.data.ood_english, &self.data.ood_german].into_iter().flatten() {
            out.push(p);
        }
        out.extend(self.lexicons.all_paths());
        out
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::ConfigInvalid(m));
        for p in self.input_paths() {
            if !p.is_file() {
                return bad(format!("input file {} does not exist", p.display()));
            }
        }
        let f = self.split.train_fraction;
        if !(f > 0.0 && f < 1.0) {
            return bad(format!("split.train_fraction {f} is outside (0, 1)"));
        }
        if self.lm.orders != LM_ORDERS {
            return bad(format!("lm.orders must be {LM_ORDERS:?}; the feature layout depends on it"));
        }
        if self.features.bow_size == 0 {
            return bad("features.bow_size must be positive".into());
        }
        if self.features.cross_fit_folds == 1 {
            return bad("features.cross_fit_folds must be 0 (off) or at least 2".into());
        }
        if self.nn.epochs == 0 || self.nn.batch_size == 0 {
            return bad("nn.epochs and nn.batch_size must be positive".into());
        }
        if !(self.nn.learning_rate.is_finite() && self.nn.learning_rate > 0.0) {
            return bad(format!("nn.learning_rate {} must be positive", self.nn.learning_rate));
        }
        Ok(())
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}
