use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::spell::{correct_tokens, spell_correct};
use super::{Lexicons, WordLanguage};
use crate::corpus::{is_hesitation_surface, CleanTranscript, Language, SourceLanguage, Token};

pub const DEFAULT_BOW_SIZE: usize = 50;

pub const TRANSCRIPTION_FEATURE_NAMES: [&str; 11] = [
    "n_words",
    "n_content_words",
    "n_oov_reference",
    "oov_reference_fraction",
    "n_italian_words",
    "n_english_words",
    "n_german_words",
    "n_spelling_corrections",
    "bow_matches",
    "bow_per_word",
    "bow_per_content_word",
];

/// Most frequent content words of the best training answers for a question.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BowSet {
    /// `(word, frequency)`, most frequent first, ties alphabetical.
    pub words: Vec<(String, u32)>,
    #[serde(skip)]
    lookup: HashSet<String>,
}

impl BowSet {
    /// Count content words (after spelling correction) over `texts` and keep
    /// the `k` most frequent.
    pub fn build<S: AsRef<str>>(texts: &[S], language: Language, lexicons: &Lexicons, k: usize) -> Self {
        let lang = WordLanguage::from(language);
        let mut freq: BTreeMap<String, u32> = BTreeMap::new();
        for text in texts {
            for raw in text.as_ref().split_whitespace() {
                if is_hesitation_surface(raw) {
                    continue;
                }
                let (word, _) = spell_correct(raw, lang, lexicons);
                if !lexicons.is_stop_word(lang, &word) {
                    *freq.entry(word).or_default() += 1;
                }
            }
        }
        let mut words: Vec<(String, u32)> = freq.into_iter().collect();
        words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        words.truncate(k);
        Self::from_words(words)
    }

    pub fn from_words(words: Vec<(String, u32)>) -> Self {
        let lookup = words.iter().map(|(w, _)| w.clone()).collect();
        BowSet { words, lookup }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.lookup.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptionOptions {
    /// Keep hesitation tokens in the word count (and everywhere else).
    pub count_hesitations: bool,
}

impl Default for TranscriptionOptions {
    fn default() -> Self {
        TranscriptionOptions { count_hesitations: true }
    }
}

/// Language a token counts under for the Italian/English/German features.
///
/// Code-switched tokens take their marked language. Unmarked tokens are
/// looked up in the target-language list, then Italian, then the other
/// target language; a word found nowhere counts as the target language.
pub fn resolve_language(token: &Token, target: Language, lexicons: &Lexicons) -> WordLanguage {
    match token.source_language {
        SourceLanguage::Italian => WordLanguage::Italian,
        SourceLanguage::English => WordLanguage::English,
        SourceLanguage::German => WordLanguage::German,
        SourceLanguage::Target | SourceLanguage::Unknown => {
            let target = WordLanguage::from(target);
            let other = match target {
                WordLanguage::English => WordLanguage::German,
                _ => WordLanguage::English,
            };
            [target, WordLanguage::Italian, other]
                .into_iter()
                .find(|&l| lexicons.contains(l, &token.surface))
                .unwrap_or(target)
        }
    }
}

/// Whether a token is a content word: not a hesitation and not in the stop
/// list of its resolved language.
pub fn is_content_word(token: &Token, target: Language, lexicons: &Lexicons) -> bool {
    !token.flags.hesitation && !lexicons.is_stop_word(resolve_language(token, target, lexicons), &token.surface)
}

/// The eleven transcription features, in the order of
/// [`TRANSCRIPTION_FEATURE_NAMES`].
///
/// Spelling correction runs on the tokens not marked as code-switched; it
/// feeds only the correction count and the bag-of-words match.
pub fn transcription_features(
    transcript: &CleanTranscript,
    lexicons: &Lexicons,
    bow: &BowSet,
    options: TranscriptionOptions,
) -> [f64; 11] {
    let target = transcript.target_language;
    let tokens = transcript.scored_tokens(options.count_hesitations);
    let n_w = tokens.len();

    let mut content = 0usize;
    let mut oov = 0usize;
    let mut by_lang = [0usize; 3];
    let mut bow_hits = 0usize;
    for tok in &tokens {
        let lang = resolve_language(tok, target, lexicons);
        by_lang[lang as usize] += 1;
        if !lexicons.in_reference(target, &tok.surface) {
            oov += 1;
        }
        if is_content_word(tok, target, lexicons) {
            content += 1;
            let corrected = if tok.source_language == SourceLanguage::Target {
                spell_correct(&tok.surface, target.into(), lexicons).0
            } else {
                tok.surface.clone()
            };
            if bow.contains(&corrected) {
                bow_hits += 1;
            }
        }
    }
    let target_surfaces: Vec<&str> = tokens
        .iter()
        .filter(|t| t.source_language == SourceLanguage::Target && !t.flags.hesitation)
        .map(|t| t.surface.as_str())
        .collect();
    let (_, corrections) = correct_tokens(&target_surfaces, target.into(), lexicons);

    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    [
        n_w as f64,
        content as f64,
        oov as f64,
        ratio(oov, n_w),
        by_lang[WordLanguage::Italian as usize] as f64,
        by_lang[WordLanguage::English as usize] as f64,
        by_lang[WordLanguage::German as usize] as f64,
        corrections as f64,
        bow_hits as f64,
        ratio(bow_hits, n_w),
        ratio(bow_hits, content),
    ]
}
