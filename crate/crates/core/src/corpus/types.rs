use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CorpusError;

/// Target language of a proficiency test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Language {
    English,
    German,
}

impl Language {
    pub const ALL: [Language; 2] = [Language::English, Language::German];

    pub fn code(self) -> &'static str {
        match self {
            Language::English => "en",
            Language::German => "de",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::English => "English",
            Language::German => "German",
        })
    }
}

impl FromStr for Language {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "english" | "en" => Ok(Language::English),
            "german" | "de" => Ok(Language::German),
            _ => Err(CorpusError::Schema(format!("unknown language `{s}`"))),
        }
    }
}

/// CEFR proficiency level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    A1,
    A2,
    B1,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::A1, Level::A2, Level::B1];
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Question session: `S1` holds common questions, `S2` test-specific ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Session {
    S1,
    S2,
}

impl Session {
    pub const ALL: [Session; 2] = [Session::S1, Session::S2];
}

impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Position of a question in the language > level > session > question
/// hierarchy. Equality on a prefix of the fields defines each grouping level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuestionKey {
    pub language: Language,
    pub level: Level,
    pub session: Session,
    pub question_id: String,
}

impl QuestionKey {
    pub fn new(language: Language, level: Level, session: Session, question_id: impl Into<String>) -> Self {
        Self { language, level, session, question_id: question_id.into() }
    }

    pub fn group(&self) -> GroupKey {
        GroupKey { language: self.language, level: self.level, session: self.session }
    }

    pub fn same_level(&self, other: &QuestionKey) -> bool {
        self.language == other.language && self.level == other.level
    }

    pub fn same_session(&self, other: &QuestionKey) -> bool {
        self.same_level(other) && self.session == other.session
    }

    pub fn same_question(&self, other: &QuestionKey) -> bool {
        self.same_session(other) && self.question_id == other.question_id
    }
}

impl fmt::Display for QuestionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}/{}", self.language.code(), self.level, self.session, self.question_id)
    }
}

/// The (language, level, session) triple that classifiers are grouped by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub language: Language,
    pub level: Level,
    pub session: Session,
}

impl GroupKey {
    /// File-system friendly name, e.g. `en_A1_S2`.
    pub fn slug(&self) -> String {
        format!("{}_{}_{}", self.language.code(), self.level, self.session)
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.language, self.level, self.session)
    }
}

/// One of the six expert-scored proficiency indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    AnswerRelevance,
    SyntacticalCorrectness,
    LexicalProperties,
    Pronunciation,
    Fluency,
    CommunicativeSkills,
}

impl Indicator {
    pub const ALL: [Indicator; 6] = [
        Indicator::AnswerRelevance,
        Indicator::SyntacticalCorrectness,
        Indicator::LexicalProperties,
        Indicator::Pronunciation,
        Indicator::Fluency,
        Indicator::CommunicativeSkills,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Indicator::AnswerRelevance => "answer_relevance",
            Indicator::SyntacticalCorrectness => "syntactical_correctness",
            Indicator::LexicalProperties => "lexical_properties",
            Indicator::Pronunciation => "pronunciation",
            Indicator::Fluency => "fluency",
            Indicator::CommunicativeSkills => "communicative_skills",
        }
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Six indicator scores, each in `{0, 1, 2}`. The total is always their sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScoreVector([u8; 6]);

impl ScoreVector {
    pub const MAX_TOTAL: u8 = 12;

    pub fn new(scores: [u8; 6]) -> Result<Self, CorpusError> {
        if let Some(bad) = scores.iter().find(|&&s| s > 2) {
            return Err(CorpusError::Schema(format!("indicator score {bad} outside {{0,1,2}}")));
        }
        Ok(Self(scores))
    }

    pub fn get(&self, indicator: Indicator) -> u8 {
        self.0[indicator.index()]
    }

    pub fn as_array(&self) -> [u8; 6] {
        self.0
    }

    pub fn total(&self) -> u8 {
        self.0.iter().sum()
    }
}

/// One spoken answer with its marked-up transcription.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedUtterance {
    pub utterance_id: String,
    pub speaker_id: String,
    pub question: QuestionKey,
    pub raw_text: String,
    pub scores: Option<ScoreVector>,
}

/// On-disk shape of an utterance: one JSON object per line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct UtteranceRecord {
    pub utterance_id: String,
    pub speaker_id: String,
    pub question: QuestionKey,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<[u8; 6]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<u8>,
}

impl TryFrom<UtteranceRecord> for AnnotatedUtterance {
    type Error = CorpusError;

    fn try_from(rec: UtteranceRecord) -> Result<Self, Self::Error> {
        let scores = match rec.scores {
            Some(raw) => {
                let sv = ScoreVector::new(raw)?;
                if let Some(total) = rec.total {
                    if total != sv.total() {
                        return Err(CorpusError::Schema(format!(
                            "utterance {}: total {} does not equal indicator sum {}",
                            rec.utterance_id,
                            total,
                            sv.total()
                        )));
                    }
                }
                Some(sv)
            }
            None if rec.total.is_some() => {
                return Err(CorpusError::Schema(format!(
                    "utterance {}: total given without indicator scores",
                    rec.utterance_id
                )))
            }
            None => None,
        };
        Ok(AnnotatedUtterance {
            utterance_id: rec.utterance_id,
            speaker_id: rec.speaker_id,
            question: rec.question,
            raw_text: rec.raw_text,
            scores,
        })
    }
}

impl From<&AnnotatedUtterance> for UtteranceRecord {
    fn from(u: &AnnotatedUtterance) -> Self {
        UtteranceRecord {
            utterance_id: u.utterance_id.clone(),
            speaker_id: u.speaker_id.clone(),
            question: u.question.clone(),
            raw_text: u.raw_text.clone(),
            scores: u.scores.map(|s| s.as_array()),
            total: u.scores.map(|s| s.total()),
        }
    }
}
