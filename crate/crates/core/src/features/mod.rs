//! The 116-dimensional answer representation.
//!
//! 100 LM features (5 text sets x 4 orders x 5 features), 11 transcription
//! features and 5 pronunciation features; see [`FeatureVector`] for the
//! layout.

mod lexicon;
mod lm_block;
mod pronunciation;
mod spell;
mod transcription;
mod vector;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lexicon::{default_stop_words, LexiconFiles, Lexicons, WordLanguage};
pub use lm_block::{lm_feature_block, LmFeatureOptions, UNDEFINED_AVERAGE};
pub use pronunciation::{confidence, pronunciation_features, PRONUNCIATION_FEATURE_NAMES};
pub use spell::{correct_tokens, spell_correct};
pub use transcription::{
    is_content_word, resolve_language, transcription_features, BowSet, TranscriptionOptions, DEFAULT_BOW_SIZE,
    TRANSCRIPTION_FEATURE_NAMES,
};
pub use vector::{
    assemble_vector, feature_names, lm_block_offset, FeatureVector, FEATURE_DIM, LM_BLOCKS, LM_FEATURES, LM_ORDERS,
    PRONUNCIATION_FEATURES, TRANSCRIPTION_FEATURES,
};

use crate::corpus::{CleanTranscript, CorpusError, PhoneAlignment};
use crate::lm::NgramModel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error("expected {expected} LM blocks, got {got}")]
    BlockCountMismatch { expected: usize, got: usize },
    #[error("alignments belong to different utterances: {best} vs {native}")]
    UtteranceMismatch { best: String, native: String },
    #[error("feature vector must have {expected} entries, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("feature {0} is not finite")]
    NonFinite(usize),
    #[error("{}: {message}", path.display())]
    Lexicon { path: PathBuf, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureOptions {
    #[serde(default)]
    pub lm: LmFeatureOptions,
    #[serde(default)]
    pub transcription: TranscriptionOptions,
}

/// Everything needed to featurize answers to one question.
pub struct FeatureContext<'a> {
    /// The 20 models in canonical order: sets a–e outer, orders 1–4 inner.
    pub lms: Vec<&'a NgramModel>,
    pub lexicons: &'a Lexicons,
    pub bow: &'a BowSet,
    pub options: FeatureOptions,
}

impl FeatureContext<'_> {
    /// Feature vector of one parsed answer. `alignments` holds the best
    /// non-native and the native alignment, when both are available.
    pub fn extract(
        &self,
        transcript: &CleanTranscript,
        alignments: Option<(&PhoneAlignment, &PhoneAlignment)>,
    ) -> Result<FeatureVector, FeatureError> {
        let words: Vec<&str> = transcript
            .scored_tokens(self.options.transcription.count_hesitations)
            .into_iter()
            .map(|t| t.surface.as_str())
            .collect();
        let lm_blocks: Vec<[f64; 5]> =
            self.lms.iter().map(|m| lm_feature_block(&m.score_sentence(&words), self.options.lm)).collect();
        let transcription = transcription_features(transcript, self.lexicons, self.bow, self.options.transcription);
        let pronunciation = match alignments {
            Some((best, native)) => Some(pronunciation_features(best, native)?),
            None => None,
        };
        assemble_vector(&lm_blocks, transcription, pronunciation)
    }
}
