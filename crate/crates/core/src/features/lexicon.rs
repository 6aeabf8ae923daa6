use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::corpus::{io::read_lines, Language};

/// Languages with a word list: the two target languages plus Italian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WordLanguage {
    English,
    German,
    Italian,
}

impl WordLanguage {
    pub const ALL: [WordLanguage; 3] = [WordLanguage::English, WordLanguage::German, WordLanguage::Italian];

    fn index(self) -> usize {
        self as usize
    }
}

impl From<Language> for WordLanguage {
    fn from(l: Language) -> Self {
        match l {
            Language::English => WordLanguage::English,
            Language::German => WordLanguage::German,
        }
    }
}

const DEFAULT_STOP_WORDS: [&str; 3] = [
    include_str!("../../data/stopwords.en.txt"),
    include_str!("../../data/stopwords.de.txt"),
    include_str!("../../data/stopwords.it.txt"),
];

/// The built-in stop list of a language.
pub fn default_stop_words(lang: WordLanguage) -> Vec<&'static str> {
    DEFAULT_STOP_WORDS[lang.index()].lines().map(str::trim).filter(|w| !w.is_empty()).collect()
}

#[derive(Debug, Clone, Default)]
struct WordList {
    words: HashSet<String>,
    /// Characters used by the list, for edit-distance-1 candidate generation.
    alphabet: BTreeSet<char>,
}

impl WordList {
    fn new<I: IntoIterator<Item = String>>(words: I) -> Self {
        let words: HashSet<String> = words.into_iter().map(|w| w.trim().to_lowercase()).filter(|w| !w.is_empty()).collect();
        let alphabet = words.iter().flat_map(|w| w.chars()).collect();
        WordList { words, alphabet }
    }
}

/// Word lists, stop lists, the correction table and the reference lexicons.
///
/// Everything is stored lowercase.
#[derive(Debug, Clone, Default)]
pub struct Lexicons {
    words: [WordList; 3],
    stop_words: [HashSet<String>; 3],
    corrections: BTreeMap<String, String>,
    reference: [Option<HashSet<String>>; 2],
}

/// Paths of the plain-text files backing [`Lexicons`].
///
/// Word lists and stop lists hold one word per line; the correction table
/// holds `wrong<TAB>right` pairs. Stop lists default to the small built-in
/// lists and reference lexicons default to the target-language word list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LexiconFiles {
    pub english: PathBuf,
    pub german: PathBuf,
    pub italian: PathBuf,
    #[serde(default)]
    pub stop_english: Option<PathBuf>,
    #[serde(default)]
    pub stop_german: Option<PathBuf>,
    #[serde(default)]
    pub stop_italian: Option<PathBuf>,
    #[serde(default)]
    pub corrections: Option<PathBuf>,
    #[serde(default)]
    pub reference_english: Option<PathBuf>,
    #[serde(default)]
    pub reference_german: Option<PathBuf>,
}

impl LexiconFiles {
    pub fn all_paths(&self) -> Vec<&Path> {
        let mut out: Vec<&Path> = vec![&self.english, &self.german, &self.italian];
        for p in [
            &self.stop_english,
            &self.stop_german,
            &self.stop_italian,
            &self.corrections,
            &self.reference_english,
            &self.reference_german,
        ]
        .into_iter()
        .flatten()
        {
            out.push(p);
        }
        out
    }
}

fn lower_set<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> HashSet<String> {
    words
        .into_iter()
        .map(|w| w.as_ref().trim().to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

impl Lexicons {
    /// Lexicons with the built-in stop lists and no words.
    pub fn new() -> Self {
        let stop_words = DEFAULT_STOP_WORDS.map(|text| lower_set(text.lines()));
        Lexicons { stop_words, ..Default::default() }
    }

    pub fn with_words<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, lang: WordLanguage, words: I) -> Self {
        self.words[lang.index()] = WordList::new(words.into_iter().map(|w| w.as_ref().to_string()));
        self
    }

    pub fn with_stop_words<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, lang: WordLanguage, words: I) -> Self {
        self.stop_words[lang.index()] = lower_set(words);
        self
    }

    pub fn with_correction(mut self, wrong: &str, right: &str) -> Self {
        let (wrong, right) = (wrong.trim().to_lowercase(), right.trim().to_lowercase());
        assert!(!wrong.is_empty() && !right.is_empty(), "correction pairs must be nonempty");
        self.corrections.insert(wrong, right);
        self
    }

    pub fn with_reference<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, lang: Language, words: I) -> Self {
        self.reference[lang as usize] = Some(lower_set(words));
        self
    }

    pub fn load(files: &LexiconFiles) -> Result<Self, FeatureError> {
        let read = |p: &Path| read_lines(p).map_err(FeatureError::from);
        let mut lex = Lexicons::new()
            .with_words(WordLanguage::English, read(&files.english)?)
            .with_words(WordLanguage::German, read(&files.german)?)
            .with_words(WordLanguage::Italian, read(&files.italian)?);
        for (lang, path) in [
            (WordLanguage::English, &files.stop_english),
            (WordLanguage::German, &files.stop_german),
            (WordLanguage::Italian, &files.stop_italian),
        ] {
            if let Some(p) = path {
                lex = lex.with_stop_words(lang, read(p)?);
            }
        }
        if let Some(p) = &files.corrections {
            for (i, line) in read(p)?.iter().enumerate() {
                let (wrong, right) = line.split_once('\t').ok_or_else(|| FeatureError::Lexicon {
                    path: p.clone(),
                    message: format!("line {}: expected `wrong<TAB>right`", i + 1),
                })?;
                if wrong.trim().is_empty() || right.trim().is_empty() {
                    return Err(FeatureError::Lexicon {
                        path: p.clone(),
                        message: format!("line {}: empty correction", i + 1),
                    });
                }
                lex = lex.with_correction(wrong, right);
            }
        }
        for (lang, path) in [(Language::English, &files.reference_english), (Language::German, &files.reference_german)] {
            if let Some(p) = path {
                lex = lex.with_reference(lang, read(p)?);
            }
        }
        Ok(lex)
    }

    pub fn contains(&self, lang: WordLanguage, word: &str) -> bool {
        self.words[lang.index()].words.contains(word)
    }

    pub fn is_stop_word(&self, lang: WordLanguage, word: &str) -> bool {
        self.stop_words[lang.index()].contains(word)
    }

    pub fn correction(&self, word: &str) -> Option<&str> {
        self.corrections.get(word).map(String::as_str)
    }

    /// Reference lexicon used for the OOV percentage; the target-language
    /// word list unless a separate one was loaded.
    pub fn in_reference(&self, lang: Language, word: &str) -> bool {
        match &self.reference[lang as usize] {
            Some(set) => set.contains(word),
            None => self.contains(lang.into(), word),
        }
    }

    pub(crate) fn alphabet(&self, lang: WordLanguage) -> &BTreeSet<char> {
        &self.words[lang.index()].alphabet
    }
}
