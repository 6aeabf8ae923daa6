//! Automatic grading of spoken second-language answers.
//!
//! The crate turns annotated transcriptions and phone-alignment files into a
//! 116-dimensional feature vector per answer, trains one small feedforward
//! classifier per (language, level, session, indicator) against expert scores
//! in `{0, 1, 2}`, and evaluates predictions with correct classification,
//! linear weighted kappa and Pearson correlation.
//!
//! The building blocks:
//!
//! - [`corpus`]: data model, the transcription marker parser, alignment
//!   records, speaker-disjoint splits and LM training-text assembly.
//! - [`lm`]: interpolated Witten-Bell n-gram models and per-sentence
//!   accounting (`log P`, `log P_OOV`, `N_W`, `N_OOV`, `N_bo`).
//! - [`features`]: the 100 LM features, 11 transcription features and
//!   5 pronunciation features.
//! - [`scorer`]: the ReLU/softmax network trained with AdaGrad.
//! - [`metrics`]: confusion matrices, CC, WK, correlation and word accuracy.
//! - [`pipeline`]: configuration-driven orchestration, the synthetic corpus
//!   generator and the transcription agreement tool.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod corpus;
pub mod distance;
pub mod features;
pub mod lm;
pub mod metrics;
pub mod pipeline;
pub mod scorer;

pub use corpus::{
    AnnotatedUtterance, CleanTranscript, Indicator, Language, Level, PhoneAlignment, QuestionKey,
    ScoreVector, Session,
};

pub use features::{FeatureVector, FEATURE_DIM};
pub use lm::{NgramModel, SentenceScore};
pub use metrics::{ConfusionMatrix, EvalReport, EvaluationReport};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineError, SyntheticSpec};
pub use scorer::{Mlp, Scorer};


