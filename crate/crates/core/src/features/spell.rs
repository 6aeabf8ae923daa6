//! Lexicon-based spelling correction for learner transcripts.

use std::collections::BTreeSet;

use super::{Lexicons, WordLanguage};

/// Longest correction-table key, in tokens, tried by [`correct_tokens`].
const MAX_PHRASE: usize = 3;

/// Every string at edit distance exactly one from `word` over `alphabet`.
fn edits1(word: &str, alphabet: &BTreeSet<char>) -> BTreeSet<String> {
    let chars: Vec<char> = word.chars().collect();
    let mut out = BTreeSet::new();
    let joined = |v: &[char]| v.iter().collect::<String>();
    for i in 0..=chars.len() {
        if i < chars.len() {
            let mut v = chars.clone();
            v.remove(i);
            out.insert(joined(&v));
            for &c in alphabet {
                if c != chars[i] {
                    let mut v = chars.clone();
                    v[i] = c;
                    out.insert(joined(&v));
                }
            }
        }
        for &c in alphabet {
            let mut v = chars.clone();
            v.insert(i, c);
            out.insert(joined(&v));
        }
    }
    out.remove(word);
    out
}

/// Correct one lowercase token.
///
/// A correction-table entry wins; an in-lexicon word is left alone;
/// otherwise the token is replaced when exactly one lexicon word lies at edit
/// distance 1. Tokens containing digits are never changed. The flag is set
/// iff the token was replaced.
pub fn spell_correct(token: &str, lang: WordLanguage, lexicons: &Lexicons) -> (String, bool) {
    if let Some(fixed) = lexicons.correction(token) {
        return (fixed.to_string(), fixed != token);
    }
    if token.is_empty() || lexicons.contains(lang, token) || token.chars().any(|c| c.is_ascii_digit()) {
        return (token.to_string(), false);
    }
    let mut found: Option<String> = None;
    for cand in edits1(token, lexicons.alphabet(lang)) {
        if lexicons.contains(lang, &cand) {
            if found.is_some() {
                return (token.to_string(), false);
            }
            found = Some(cand);
        }
    }
    match found {
        Some(w) => (w, true),
        None => (token.to_string(), false),
    }
}

/// Correct a token sequence, trying multi-word correction-table keys first
/// (longest match, left to right). Returns the corrected words and the number
/// of input tokens that were changed.
pub fn correct_tokens<S: AsRef<str>>(tokens: &[S], lang: WordLanguage, lexicons: &Lexicons) -> (Vec<String>, usize) {
    let mut out = Vec::with_capacity(tokens.len());
    let mut changed = 0;
    let mut i = 0;
    'outer: while i < tokens.len() {
        for len in (2..=MAX_PHRASE.min(tokens.len() - i)).rev() {
            let phrase = tokens[i..i + len].iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
            if let Some(fixed) = lexicons.correction(&phrase) {
                if fixed != phrase {
                    changed += len;
                }
                out.extend(fixed.split_whitespace().map(str::to_string));
                i += len;
                continue 'outer;
            }
        }
        let (w, corrected) = spell_correct(tokens[i].as_ref(), lang, lexicons);
        changed += usize::from(corrected);
        out.push(w);
        i += 1;
    }
    (out, changed)
}
