use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Language};

/// Labels that mark silence or non-speech in an alignment.
pub const SILENCE_LABELS: [&str; 3] = ["sil", "nsn", "spn"];

pub fn is_silence(phone: &str) -> bool {
    SILENCE_LABELS.contains(&phone)
}

/// Which recognizer produced an alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentSystem {
    NonNativeBest,
    NativeEn,
    NativeDe,
}

impl AlignmentSystem {
    /// The native-speaker system matching the answer's target language.
    pub fn native_for(language: Language) -> Self {
        match language {
            Language::English => AlignmentSystem::NativeEn,
            Language::German => AlignmentSystem::NativeDe,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhoneSegment {
    pub phone: String,
    pub n_frames: u32,
    pub mean_log_likelihood: f64,
}

impl PhoneSegment {
    pub fn is_silence(&self) -> bool {
        is_silence(&self.phone)
    }
}

/// Frame-to-phone alignment of one utterance by one recognizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhoneAlignment {
    pub utterance_id: String,
    pub system: AlignmentSystem,
    pub segments: Vec<PhoneSegment>,
}

impl PhoneAlignment {
    pub fn validate(&self) -> Result<(), CorpusError> {
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.n_frames == 0 {
                return Err(CorpusError::Schema(format!(
                    "alignment {}/{:?}: segment {i} has zero frames",
                    self.utterance_id, self.system
                )));
            }
            if !seg.mean_log_likelihood.is_finite() {
                return Err(CorpusError::Schema(format!(
                    "alignment {}/{:?}: segment {i} has a non-finite likelihood",
                    self.utterance_id, self.system
                )));
            }
        }
        Ok(())
    }

    pub fn total_frames(&self) -> u64 {
        self.segments.iter().map(|s| u64::from(s.n_frames)).sum()
    }

    /// Phone labels with silence and noise segments removed.
    pub fn speech_phones(&self) -> Vec<&str> {
        self.segments.iter().filter(|s| !s.is_silence()).map(|s| s.phone.as_str()).collect()
    }
}

/// Alignments looked up by `(utterance_id, system)`.
#[derive(Debug, Clone, Default)]
pub struct AlignmentIndex {
    map: BTreeMap<(String, AlignmentSystem), PhoneAlignment>,
}

impl AlignmentIndex {
    pub fn insert(&mut self, alignment: PhoneAlignment) -> Result<(), CorpusError> {
        let key = (alignment.utterance_id.clone(), alignment.system);
        if self.map.contains_key(&key) {
            return Err(CorpusError::DuplicateId(format!("{} ({:?})", key.0, key.1)));
        }
        self.map.insert(key, alignment);
        Ok(())
    }

    pub fn get(&self, utterance_id: &str, system: AlignmentSystem) -> Option<&PhoneAlignment> {
        self.map.get(&(utterance_id.to_string(), system))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PhoneAlignment> {
        self.map.values()
    }
}

impl FromIterator<PhoneAlignment> for AlignmentIndex {
    /// Later duplicates replace earlier ones.
    fn from_iter<I: IntoIterator<Item = PhoneAlignment>>(iter: I) -> Self {
        let map = iter.into_iter().map(|a| ((a.utterance_id.clone(), a.system), a)).collect();
        AlignmentIndex { map }
    }
}
