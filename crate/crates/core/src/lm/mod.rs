//! Back-off n-gram language models with interpolated Witten-Bell smoothing.
//!
//! For a context `h` with `c(h)` continuation tokens of `T(h)` distinct
//! types, and `h'` the context with its oldest word dropped:
//!
//! ```text
//! P(w | h) = (c(h w) + T(h) * P(w | h')) / (c(h) + T(h))
//! P(w | h) = P(w | h')                      if c(h) = 0
//! P(w)     = (c(w) + T * 1/(V + 1)) / (N + T)
//! ```
//!
//! The unigram level interpolates with a uniform distribution over the `V`
//! vocabulary words plus `<unk>`, so every word has nonzero probability in
//! every context and the unknown token takes its share of the unseen mass.
//!
//! Sentences start with a single `<s>` context symbol; no end symbol is
//! predicted. All log-probabilities are natural logs.

mod format;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SENTENCE_START: &str = "<s>";
pub const UNKNOWN: &str = "<unk>";
pub const MAX_ORDER: usize = 4;

const UNK_ID: u32 = 0;
const BOS_ID: u32 = 1;
const FIRST_WORD_ID: u32 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LmError {
    #[error("n-gram order {0} outside 1..={MAX_ORDER}")]
    InvalidOrder(usize),
    #[error("training text contains no tokens")]
    EmptyTrainingText,
    #[error("context of length {len} is too long for an order-{order} model")]
    ContextTooLong { len: usize, order: usize },
    #[error("model file line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct ContextStats {
    /// Tokens observed after the context.
    total: u64,
    /// Distinct word types observed after the context.
    distinct: u64,
}

/// An immutable trained model.
#[derive(Debug, Clone)]
pub struct NgramModel {
    order: usize,
    /// Word strings by id; ids 0 and 1 are `<unk>` and `<s>`.
    words: Vec<String>,
    ids: HashMap<String, u32>,
    /// `counts[k]` holds the (k+1)-grams.
    counts: Vec<HashMap<Vec<u32>, u64>>,
    /// `contexts[k]` holds continuation statistics of length-k contexts.
    contexts: Vec<HashMap<Vec<u32>, ContextStats>>,
    sentences: u64,
}

/// Per-sentence accounting against one model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    /// Natural-log probability of the whole sentence.
    pub log_p: f64,
    /// Sum of the log-probabilities at out-of-vocabulary positions.
    pub log_p_oov: f64,
    pub n_w: u32,
    pub n_oov: u32,
    /// Tokens whose full-order n-gram was never seen in training.
    pub n_bo: u32,
}

impl NgramModel {
    /// Count n-grams of up to `order` words over whitespace-tokenized
    /// sentences. Blank sentences are skipped.
    pub fn train<S: AsRef<str>>(texts: &[S], order: usize) -> Result<Self, LmError> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(LmError::InvalidOrder(order));
        }
        let sentences: Vec<Vec<&str>> = texts
            .iter()
            .map(|t| t.as_ref().split_whitespace().collect::<Vec<_>>())
            .filter(|s| !s.is_empty())
            .collect();
        if sentences.is_empty() {
            return Err(LmError::EmptyTrainingText);
        }
        let vocab: BTreeSet<&str> = sentences
            .iter()
            .flatten()
            .copied()
            .filter(|w| *w != SENTENCE_START && *w != UNKNOWN)
            .collect();
        let mut words = vec![UNKNOWN.to_string(), SENTENCE_START.to_string()];
        words.extend(vocab.iter().map(|w| w.to_string()));
        let ids: HashMap<String, u32> = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();

        let mut counts: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); order];
        for sentence in &sentences {
            let mut padded = Vec::with_capacity(sentence.len() + 1);
            padded.push(BOS_ID);
            padded.extend(sentence.iter().map(|w| ids.get(*w).copied().unwrap_or(UNK_ID)));
            *counts[0].entry(vec![BOS_ID]).or_default() += 1;
            for end in 1..padded.len() {
                for k in 0..order.min(end + 1) {
                    *counts[k].entry(padded[end - k..=end].to_vec()).or_default() += 1;
                }
            }
        }
        let mut model = NgramModel {
            order,
            words,
            ids,
            counts,
            contexts: Vec::new(),
            sentences: sentences.len() as u64,
        };
        model.rebuild_contexts();
        Ok(model)
    }

    fn rebuild_contexts(&mut self) {
        let mut contexts: Vec<HashMap<Vec<u32>, ContextStats>> = vec![HashMap::new(); self.order];
        for (k, table) in self.counts.iter().enumerate() {
            for (gram, &c) in table {
                let (ctx, last) = gram.split_at(k);
                if last[0] == BOS_ID {
                    continue;
                }
                let st = contexts[k].entry(ctx.to_vec()).or_default();
                st.total += c;
                st.distinct += 1;
            }
        }
        self.contexts = contexts;
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of distinct training words, excluding `<s>` and `<unk>`.
    pub fn vocab_size(&self) -> usize {
        self.words.len() - FIRST_WORD_ID as usize
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.words[FIRST_WORD_ID as usize..].iter().map(String::as_str)
    }

    pub fn contains(&self, word: &str) -> bool {
        matches!(self.ids.get(word), Some(&id) if id >= FIRST_WORD_ID)
    }

    /// Training count of an n-gram given as words (`<s>` allowed first).
    pub fn count(&self, ngram: &[&str]) -> u64 {
        if ngram.is_empty() || ngram.len() > self.order {
            return 0;
        }
        let ids: Option<Vec<u32>> = ngram.iter().map(|w| self.ids.get(*w).copied()).collect();
        ids.and_then(|ids| self.counts[ngram.len() - 1].get(&ids).copied()).unwrap_or(0)
    }

    fn word_id(&self, word: &str) -> u32 {
        match self.ids.get(word) {
            Some(&id) if id >= FIRST_WORD_ID => id,
            _ => UNK_ID,
        }
    }

    fn context_id(&self, word: &str) -> u32 {
        self.ids.get(word).copied().unwrap_or(UNK_ID)
    }

    fn prob_ids(&self, word: u32, context: &[u32]) -> f64 {
        let k = context.len();
        if k == 0 {
            let stats = self.contexts[0].get(&[][..]).copied().unwrap_or_default();
            let uniform = 1.0 / (self.vocab_size() as f64 + 1.0);
            let c = self.counts[0].get(&[word][..]).copied().unwrap_or(0);
            return (c as f64 + stats.distinct as f64 * uniform) / (stats.total + stats.distinct) as f64;
        }
        let lower = self.prob_ids(word, &context[1..]);
        match self.contexts[k].get(context) {
            None => lower,
            Some(st) => {
                let mut gram = Vec::with_capacity(k + 1);
                gram.extend_from_slice(context);
                gram.push(word);
                let c = self.counts[k].get(&gram).copied().unwrap_or(0);
                (c as f64 + st.distinct as f64 * lower) / (st.total + st.distinct) as f64
            }
        }
    }

    /// Smoothed `P(word | context)`, oldest context word first.
    ///
    /// Words outside the vocabulary are scored as `<unk>`. `<s>` may appear
    /// in the context.
    pub fn prob(&self, word: &str, context: &[&str]) -> Result<f64, LmError> {
        if context.len() >= self.order {
            return Err(LmError::ContextTooLong { len: context.len(), order: self.order });
        }
        let ctx: Vec<u32> = context.iter().map(|w| self.context_id(w)).collect();
        Ok(self.prob_ids(self.word_id(word), &ctx))
    }

    /// Probability of every vocabulary word, then `<unk>`, after `context`.
    pub fn distribution(&self, context: &[&str]) -> Result<Vec<f64>, LmError> {
        if context.len() >= self.order {
            return Err(LmError::ContextTooLong { len: context.len(), order: self.order });
        }
        let ctx: Vec<u32> = context.iter().map(|w| self.context_id(w)).collect();
        let mut out: Vec<f64> =
            (FIRST_WORD_ID..self.words.len() as u32).map(|w| self.prob_ids(w, &ctx)).collect();
        out.push(self.prob_ids(UNK_ID, &ctx));
        Ok(out)
    }

    /// Score a token sequence, starting from `<s>`.
    pub fn score_sentence<S: AsRef<str>>(&self, tokens: &[S]) -> SentenceScore {
        let mut history = Vec::with_capacity(tokens.len() + 1);
        history.push(BOS_ID);
        history.extend(tokens.iter().map(|t| self.word_id(t.as_ref())));

        let mut score = SentenceScore::default();
        let mut gram = Vec::with_capacity(self.order);
        for end in 1..history.len() {
            let word = history[end];
            let ctx = &history[end.saturating_sub(self.order - 1)..end];
            let lp = self.prob_ids(word, ctx).ln();
            score.log_p += lp;
            score.n_w += 1;
            if word == UNK_ID {
                score.n_oov += 1;
                score.log_p_oov += lp;
            }
            gram.clear();
            gram.extend_from_slice(ctx);
            gram.push(word);
            if !self.counts[ctx.len()].contains_key(&gram) {
                score.n_bo += 1;
            }
        }
        score
    }
}
