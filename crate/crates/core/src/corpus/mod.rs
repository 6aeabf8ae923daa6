//! Data model, transcription parsing, speaker splits and LM text assembly.

mod alignment;
pub mod io;
mod lm_sets;
mod split;
mod transcript;
mod types;

use std::path::PathBuf;

use thiserror::Error;

pub use alignment::{is_silence, AlignmentIndex, AlignmentSystem, PhoneAlignment, PhoneSegment, SILENCE_LABELS};
pub use lm_sets::{
    build_lm_training_sets, select_best_answers, select_best_answers_with_fallback, training_text, BestAnswers,
    LmSet, LmTrainingSets, TextSet,
};
pub use split::{split_by_speaker, Split};
pub use transcript::{
    is_hesitation_surface, parse_transcription, CleanTranscript, NoiseLabel, SourceLanguage, Token, TokenFlags, HESITATION_SURFACE,
};
pub use types::{AnnotatedUtterance, GroupKey, Indicator, Language, Level, QuestionKey, ScoreVector, Session};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("unbalanced marker at byte {position}")]
    UnbalancedMarker { position: usize },
    #[error("unknown language tag `@{tag}(` at byte {position}")]
    UnknownLanguageTag { tag: String, position: usize },
    #[error("utterance {utterance_id}: {source}")]
    InUtterance { utterance_id: String, source: Box<CorpusError> },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("train fraction {0} is outside (0, 1)")]
    InvalidFraction(f64),
    #[error("no out-of-domain text for {0}")]
    MissingOutOfDomainText(Language),
    #[error("no in-domain training text for {0}")]
    NoInDomainText(Language),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}:{line}: {message}", path.display())]
    Json { path: PathBuf, line: usize, message: String },
}
