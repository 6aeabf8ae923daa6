//! Configuration-driven orchestration, the synthetic corpus generator and
//! the transcription agreement tool.
//!
//! Stages communicate only through files in the output directory, so each
//! one can run on its own:
//!
//! 1. [`ingest`]: validate inputs, write the speaker-disjoint split;
//! 2. [`train_lms`]: LM collections a–e per question, 4 orders each, and
//!    bag-of-words sets;
//! 3. [`extract`]: one 116-entry feature vector per utterance;
//! 4. [`train`]: six classifiers per (language, level, session);
//! 5. [`score`]: predictions for both splits;
//! 6. [`evaluate`]: CC/WK/Corr report and the leakage check.

mod agreement;
mod config;
mod stages;
mod synth;

use std::path::PathBuf;

use thiserror::Error;

pub use agreement::{agreement, cmd_agreement, read_transcription_file, AgreementRow, AgreementTable};
pub use config::{DataConfig, FeatureConfig, LmConfig, NnConfig, PipelineConfig, SplitConfig};
pub use stages::{
    check_leakage, evaluate, extract, ingest, model_seed, record_stage, run_pipeline, score, sha256_file, train,
    train_lms, Artifacts, FeatureRecord, InputDigest, LeakageReport, LmTextRecord, PredictionRecord, QuestionContext,
    RunManifest, RunSummary, SetRef, SplitFile, SplitName, StageTiming, TrainingRecord,
};
pub use synth::{generate_synthetic, planted_rule_scores, write_synthetic, Planted, SyntheticCorpus, SyntheticSpec};

use crate::corpus::CorpusError;
use crate::features::FeatureError;
use crate::lm::LmError;
use crate::metrics::MetricsError;
use crate::scorer::NnError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("utterance {utterance_id}: {source}")]
    InUtterance { utterance_id: String, source: Box<PipelineError> },
    #[error("{} is missing; run the earlier stages first", .0.display())]
    MissingArtifact(PathBuf),
    #[error("{}: {message}", path.display())]
    Artifact { path: PathBuf, message: String },
    #[error("utterance ids do not match: {0}")]
    IdMismatch(String),
    #[error("eval utterances leaked into training inputs: {0}")]
    Leakage(String),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

impl PipelineError {
    /// Process exit code: 1 for configuration problems, 2 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::ConfigInvalid(_) => 1,
            _ => 2,
        }
    }
}
