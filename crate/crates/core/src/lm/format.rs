//! Text serialization of [`NgramModel`].
//!
//! ```text
//! l2grade-ngram 1
//! order 2
//! smoothing witten-bell-interpolated
//! log_base e
//! vocab_size 3
//! sentences 2
//! ngrams
//! 1<TAB><s><TAB>2<TAB>-
//! 1<TAB><unk><TAB>0<TAB>0.0416…
//! 1<TAB>a<TAB>3<TAB>0.5416…
//! 2<TAB><s> a<TAB>2<TAB>0.8472…
//! ```
//!
//! One record per n-gram: length, space-joined words, training count and the
//! smoothed probability of the last word given the others (`-` for `<s>`).
//! Records are sorted by length, then by word sequence, so the output is
//! byte-stable for identical training text. Loading rebuilds the model from
//! the counts alone.

use std::collections::HashMap;
use std::fmt::Write;

use super::{LmError, NgramModel, BOS_ID, FIRST_WORD_ID, MAX_ORDER, SENTENCE_START, UNKNOWN, UNK_ID};

const MAGIC: &str = "l2grade-ngram 1";
const SMOOTHING: &str = "witten-bell-interpolated";

impl NgramModel {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "order {}", self.order).unwrap();
        writeln!(out, "smoothing {SMOOTHING}").unwrap();
        writeln!(out, "log_base e").unwrap();
        writeln!(out, "vocab_size {}", self.vocab_size()).unwrap();
        writeln!(out, "sentences {}", self.sentences).unwrap();
        writeln!(out, "ngrams").unwrap();

        let unk_prob = self.prob_ids(UNK_ID, &[]);
        for (k, table) in self.counts.iter().enumerate() {
            let mut records: Vec<(Vec<&str>, u64, &Vec<u32>)> = table
                .iter()
                .map(|(gram, &c)| (gram.iter().map(|&id| self.words[id as usize].as_str()).collect(), c, gram))
                .collect();
            records.sort_by(|a, b| a.0.cmp(&b.0));
            if k == 0 {
                writeln!(out, "1\t{UNKNOWN}\t0\t{unk_prob}").unwrap();
            }
            for (words, count, gram) in records {
                let last = *gram.last().unwrap();
                if last == BOS_ID {
                    writeln!(out, "{}\t{}\t{}\t-", k + 1, words.join(" "), count).unwrap();
                } else {
                    let p = self.prob_ids(last, &gram[..k]);
                    writeln!(out, "{}\t{}\t{}\t{}", k + 1, words.join(" "), count, p).unwrap();
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LmError> {
        let err = |line: usize, message: String| LmError::Format { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |name: &str| -> Result<(usize, String), LmError> {
            let (n, line) = lines.next().ok_or_else(|| err(0, format!("missing `{name}`")))?;
            Ok((n, line.to_string()))
        };

        let (n, magic) = header("magic")?;
        if magic != MAGIC {
            return Err(err(n, format!("expected `{MAGIC}`")));
        }
        let mut field = |name: &str| -> Result<(usize, String), LmError> {
            let (n, line) = header(name)?;
            let value = line
                .strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| err(n, format!("expected `{name} <value>`")))?;
            Ok((n, value.to_string()))
        };
        let (n, order) = field("order")?;
        let order: usize = order.parse().map_err(|_| err(n, "bad order".into()))?;
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(err(n, format!("order {order} unsupported")));
        }
        let (n, smoothing) = field("smoothing")?;
        if smoothing != SMOOTHING {
            return Err(err(n, format!("unsupported smoothing `{smoothing}`")));
        }
        let (n, base) = field("log_base")?;
        if base != "e" {
            return Err(err(n, format!("unsupported log base `{base}`")));
        }
        let (n, vocab_size) = field("vocab_size")?;
        let vocab_size: usize = vocab_size.parse().map_err(|_| err(n, "bad vocab_size".into()))?;
        let (n, sentences) = field("sentences")?;
        let sentences: u64 = sentences.parse().map_err(|_| err(n, "bad sentences".into()))?;
        let (n, marker) = header("ngrams")?;
        if marker != "ngrams" {
            return Err(err(n, "expected `ngrams`".into()));
        }

        let mut raw: Vec<(Vec<String>, u64)> = Vec::new();
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            if parts.len() != 4 {
                return Err(err(n, "expected 4 tab-separated fields".into()));
            }
            let len: usize = parts[0].parse().map_err(|_| err(n, "bad n-gram length".into()))?;
            let words: Vec<String> = parts[1].split(' ').map(str::to_string).collect();
            if len == 0 || len > order || words.len() != len {
                return Err(err(n, "n-gram length mismatch".into()));
            }
            let count: u64 = parts[2].parse().map_err(|_| err(n, "bad count".into()))?;
            if words == [UNKNOWN] {
                continue;
            }
            raw.push((words, count));
        }

        let mut vocab: Vec<String> = raw
            .iter()
            .filter(|(w, _)| w.len() == 1 && w[0] != SENTENCE_START)
            .map(|(w, _)| w[0].clone())
            .collect();
        vocab.sort();
        vocab.dedup();
        if vocab.len() != vocab_size {
            return Err(err(0, format!("vocab_size {vocab_size} but {} unigrams", vocab.len())));
        }
        let mut words = vec![UNKNOWN.to_string(), SENTENCE_START.to_string()];
        words.extend(vocab);
        let ids: HashMap<String, u32> = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        debug_assert_eq!(ids[SENTENCE_START], BOS_ID);
        debug_assert_eq!(ids.len() as u32, FIRST_WORD_ID + vocab_size as u32);

        let mut counts: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); order];
        for (gram, c) in raw {
            let ids: Vec<u32> = gram
                .iter()
                .map(|w| ids.get(w).copied().ok_or_else(|| err(0, format!("word `{w}` missing from unigrams"))))
                .collect::<Result<_, _>>()?;
            counts[ids.len() - 1].insert(ids, c);
        }
        let mut model = NgramModel { order, words, ids, counts, contexts: Vec::new(), sentences };
        model.rebuild_contexts();
        Ok(model)
    }
}
