//! Parser for marked-up transcriptions.
//!
//! The marker grammar is written down in `grammar/transcription.ebnf`. In
//! short:
//!
//! | marker            | meaning                                         |
//! |-------------------|-------------------------------------------------|
//! | `@voices`         | other voices in the background, no token        |
//! | `@<label>`        | any other bare label is a noise event, no token |
//! | `@hes`            | hesitation, yields the token `ehm`              |
//! | `@it( … )`        | code-switched span (also `@en(`, `@de(`)         |
//! | `( … )`           | whispered span                                  |
//! | `#word`           | badly pronounced word                           |
//!
//! Words are lowercased and stripped of `.,!?;:`. The surface forms `eh`,
//! `ehm` and `mmh` are hesitations wherever they occur.

use serde::{Deserialize, Serialize};

use super::{CorpusError, Language};

/// Surface given to the token produced by a bare `@hes` label.
pub const HESITATION_SURFACE: &str = "ehm";

const HESITATION_FORMS: [&str; 3] = ["eh", "ehm", "mmh"];
const SENTENCE_PUNCTUATION: [char; 6] = ['.', ',', '!', '?', ';', ':'];

/// Whether a cleaned surface form is one of the hesitation forms.
pub fn is_hesitation_surface(surface: &str) -> bool {
    HESITATION_FORMS.contains(&surface)
}

/// Language a token was spoken in, as far as the markup tells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SourceLanguage {
    /// Not marked; presumably the language under test.
    Target,
    Italian,
    English,
    German,
    Unknown,
}

impl SourceLanguage {
    fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "it" => Some(SourceLanguage::Italian),
            "en" => Some(SourceLanguage::English),
            "de" => Some(SourceLanguage::German),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenFlags {
    pub hesitation: bool,
    pub badly_pronounced: bool,
    pub whispered: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub source_language: SourceLanguage,
    pub flags: TokenFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseLabel {
    Voices,
    Other,
}

/// A transcription with all markers resolved into token attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanTranscript {
    pub target_language: Language,
    pub tokens: Vec<Token>,
    /// Noise events in order of appearance.
    pub noise_labels: Vec<NoiseLabel>,
}

impl CleanTranscript {
    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    /// Token surfaces joined by single spaces, hesitations included.
    pub fn text(&self) -> String {
        self.surfaces().collect::<Vec<_>>().join(" ")
    }

    /// Surfaces with hesitation tokens removed, as used for agreement scoring.
    pub fn words_without_hesitations(&self) -> Vec<String> {
        self.tokens
            .iter()
            .filter(|t| !t.flags.hesitation)
            .map(|t| t.surface.clone())
            .collect()
    }

    /// The token list used for scoring, optionally dropping hesitations.
    pub fn scored_tokens(&self, count_hesitations: bool) -> Vec<&Token> {
        self.tokens
            .iter()
            .filter(|t| count_hesitations || !t.flags.hesitation)
            .collect()
    }

    pub fn noise_count(&self, label: NoiseLabel) -> usize {
        self.noise_labels.iter().filter(|&&l| l == label).count()
    }
}

enum Span {
    CodeSwitch(SourceLanguage, usize),
    Whisper(usize),
}

impl Span {
    fn position(&self) -> usize {
        match self {
            Span::CodeSwitch(_, p) | Span::Whisper(p) => *p,
        }
    }
}

struct Parser {
    target: Language,
    spans: Vec<Span>,
    word: String,
    word_badly_pronounced: bool,
    tokens: Vec<Token>,
    noise: Vec<NoiseLabel>,
}

impl Parser {
    fn current_language(&self) -> SourceLanguage {
        self.spans
            .iter()
            .rev()
            .find_map(|s| match s {
                Span::CodeSwitch(lang, _) => Some(*lang),
                Span::Whisper(_) => None,
            })
            .unwrap_or(SourceLanguage::Target)
    }

    fn whispered(&self) -> bool {
        self.spans.iter().any(|s| matches!(s, Span::Whisper(_)))
    }

    fn push_token(&mut self, surface: String, badly_pronounced: bool) {
        let hesitation = is_hesitation_surface(&surface);
        let flags = TokenFlags { hesitation, badly_pronounced, whispered: self.whispered() };
        self.tokens.push(Token { surface, source_language: self.current_language(), flags });
    }

    fn flush(&mut self) {
        let bad = std::mem::take(&mut self.word_badly_pronounced);
        if self.word.is_empty() {
            return;
        }
        let surface: String = self
            .word
            .chars()
            .filter(|c| !SENTENCE_PUNCTUATION.contains(c))
            .flat_map(char::to_lowercase)
            .collect();
        self.word.clear();
        if !surface.is_empty() {
            self.push_token(surface, bad);
        }
    }

    fn finish(mut self) -> Result<CleanTranscript, CorpusError> {
        self.flush();
        if let Some(open) = self.spans.last() {
            return Err(CorpusError::UnbalancedMarker { position: open.position() });
        }
        Ok(CleanTranscript { target_language: self.target, tokens: self.tokens, noise_labels: self.noise })
    }
}

/// Resolve the markers in `raw_text` into tokens and noise labels.
///
/// Errors carry the byte offset of the offending marker.
pub fn parse_transcription(raw_text: &str, target_language: Language) -> Result<CleanTranscript, CorpusError> {
    let mut p = Parser {
        target: target_language,
        spans: Vec::new(),
        word: String::new(),
        word_badly_pronounced: false,
        tokens: Vec::new(),
        noise: Vec::new(),
    };
    let mut chars = raw_text.char_indices().peekable();
    while let Some((pos, c)) = chars.next() {
        match c {
            c if c.is_whitespace() => p.flush(),
            '(' => {
                p.flush();
                p.spans.push(Span::Whisper(pos));
            }
            ')' => {
                p.flush();
                if p.spans.pop().is_none() {
                    return Err(CorpusError::UnbalancedMarker { position: pos });
                }
            }
            '@' => {
                p.flush();
                let mut label = String::new();
                while let Some(&(_, lc)) = chars.peek() {
                    if lc.is_alphanumeric() || lc == '_' {
                        label.push(lc.to_ascii_lowercase());
                        chars.next();
                    } else {
                        break;
                    }
                }
                if matches!(chars.peek(), Some(&(_, '('))) {
                    chars.next();
                    let lang = SourceLanguage::from_tag(&label)
                        .ok_or_else(|| CorpusError::UnknownLanguageTag { tag: label.clone(), position: pos })?;
                    p.spans.push(Span::CodeSwitch(lang, pos));
                } else {
                    match label.as_str() {
                        "voices" => p.noise.push(NoiseLabel::Voices),
                        "hes" => p.push_token(HESITATION_SURFACE.to_string(), false),
                        _ => p.noise.push(NoiseLabel::Other),
                    }
                }
            }
            '#' => {
                if p.word.is_empty() {
                    p.word_badly_pronounced = true;
                }
            }
            c => p.word.push(c),
        }
    }
    p.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn code_switch_example() {
        let t = parse_transcription("I am 10 years old @it(io ho già risposto)", Language::English).unwrap();
        assert_eq!(t.tokens.len(), 9);
        assert_eq!(t.text(), "i am 10 years old io ho già risposto");
        for tok in &t.tokens[..5] {
            assert_eq!(tok.source_language, SourceLanguage::Target);
        }
        for tok in &t.tokens[5..] {
            assert_eq!(tok.source_language, SourceLanguage::Italian);
        }
    }

    #[test]
    fn empty_input() {
        let t = parse_transcription("", Language::German).unwrap();
        assert!(t.tokens.is_empty());
        assert!(t.noise_labels.is_empty());
    }

    #[test]
    fn badly_pronounced_and_voices() {
        let t = parse_transcription("#house @voices hello", Language::English).unwrap();
        assert_eq!(t.surfaces().collect::<Vec<_>>(), ["house", "hello"]);
        assert!(t.tokens[0].flags.badly_pronounced);
        assert!(!t.tokens[1].flags.badly_pronounced);
        assert_eq!(t.noise_labels, vec![NoiseLabel::Voices]);
    }

    #[test]
    fn whispered_and_hesitations() {
        let t = parse_transcription("Well, (I think) @hes ehm yes! @laugh", Language::English).unwrap();
        assert_eq!(t.text(), "well i think ehm ehm yes");
        assert!(t.tokens[1].flags.whispered && t.tokens[2].flags.whispered);
        assert!(!t.tokens[0].flags.whispered);
        assert!(t.tokens[3].flags.hesitation && t.tokens[4].flags.hesitation);
        assert_eq!(t.noise_labels, vec![NoiseLabel::Other]);
        assert_eq!(t.words_without_hesitations(), ["well", "i", "think", "yes"]);
    }

    #[test]
    fn nested_spans() {
        let t = parse_transcription("ja @it(allora (non so)) gut", Language::German).unwrap();
        let langs: Vec<_> = t.tokens.iter().map(|t| t.source_language).collect();
        assert_eq!(
            langs,
            [
                SourceLanguage::Target,
                SourceLanguage::Italian,
                SourceLanguage::Italian,
                SourceLanguage::Italian,
                SourceLanguage::Target
            ]
        );
        assert!(t.tokens[2].flags.whispered && !t.tokens[1].flags.whispered);
    }

    #[test]
    fn unbalanced_markers_report_position() {
        assert_eq!(
            parse_transcription("hello )", Language::English),
            Err(CorpusError::UnbalancedMarker { position: 6 })
        );
        assert_eq!(
            parse_transcription("a @it(b c", Language::English),
            Err(CorpusError::UnbalancedMarker { position: 2 })
        );
    }

    #[test]
    fn unknown_language_tag_is_echoed() {
        assert_eq!(
            parse_transcription("x @fr(bonjour)", Language::English),
            Err(CorpusError::UnknownLanguageTag { tag: "fr".into(), position: 2 })
        );
    }

    proptest! {
        #[test]
        fn surfaces_never_carry_markers(raw in "[a-zA-Z@#() .,!?éà]{0,40}") {
            match parse_transcription(&raw, Language::English) {
                Ok(t) => {
                    let joined = t.text();
                    prop_assert!(!joined.contains(['@', '#', '(', ')']));
                    prop_assert!(t.tokens.iter().all(|tok| !tok.surface.is_empty()));
                }
                Err(CorpusError::UnbalancedMarker { .. }) | Err(CorpusError::UnknownLanguageTag { .. }) => {}
                Err(other) => prop_assert!(false, "undeclared error {other:?}"),
            }
        }
    }
}
