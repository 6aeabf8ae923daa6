//! Oracles and data builders shared by the integration tests and the
//! acceptance suite. Nothing here calls into the code under test except to
//! compare against it.
#![allow(dead_code)]

use std::collections::BTreeSet;

use l2grade::lm::SentenceScore;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Interpolated Witten-Bell model evaluated by scanning the raw sentences
/// for every count it needs.
pub struct BruteForceLm {
    order: usize,
    /// Sentences with a leading `<s>`.
    padded: Vec<Vec<String>>,
    vocab: BTreeSet<String>,
}

impl BruteForceLm {
    pub fn new(sentences: &[&str], order: usize) -> Self {
        let padded: Vec<Vec<String>> = sentences
            .iter()
            .map(|s| std::iter::once("<s>").chain(s.split_whitespace()).map(str::to_string).collect::<Vec<_>>())
            .filter(|s| s.len() > 1)
            .collect();
        let vocab = padded.iter().flat_map(|s| s[1..].iter().cloned()).collect();
        BruteForceLm { order, padded, vocab }
    }

    /// Occurrences of `gram` ending at a word position (never at the `<s>`).
    fn count(&self, gram: &[&str]) -> u64 {
        let mut n = 0;
        for s in &self.padded {
            for end in 1..s.len() {
                if end + 1 < gram.len() {
                    continue;
                }
                let start = end + 1 - gram.len();
                if s[start..=end].iter().zip(gram).all(|(a, b)| a == b) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Total continuation count and number of distinct continuations of `h`.
    fn continuations(&self, h: &[&str]) -> (u64, u64) {
        let mut seen = BTreeSet::new();
        let mut total = 0;
        for s in &self.padded {
            for end in 1..s.len() {
                if end < h.len() {
                    continue;
                }
                let start = end - h.len();
                if s[start..end].iter().zip(h).all(|(a, b)| a == b) {
                    total += 1;
                    seen.insert(s[end].clone());
                }
            }
        }
        (total, seen.len() as u64)
    }

    pub fn prob(&self, w: &str, h: &[&str]) -> f64 {
        let w = if self.vocab.contains(w) { w } else { "<unk>" };
        if h.is_empty() {
            let (n, t) = self.continuations(&[]);
            let uniform = 1.0 / (self.vocab.len() as f64 + 1.0);
            return (self.count(&[w]) as f64 + t as f64 * uniform) / (n + t) as f64;
        }
        let lower = self.prob(w, &h[1..]);
        let (c_h, t_h) = self.continuations(h);
        if c_h == 0 {
            return lower;
        }
        let mut gram = h.to_vec();
        gram.push(w);
        (self.count(&gram) as f64 + t_h as f64 * lower) / (c_h + t_h) as f64
    }

    pub fn score(&self, tokens: &[&str]) -> SentenceScore {
        let mut history = vec!["<s>"];
        history.extend_from_slice(tokens);
        let mut s = SentenceScore::default();
        for i in 1..history.len() {
            let start = i.saturating_sub(self.order - 1);
            let ctx = &history[start..i];
            let w = history[i];
            let lp = self.prob(w, ctx).ln();
            s.log_p += lp;
            s.n_w += 1;
            let oov = !self.vocab.contains(w);
            if oov {
                s.n_oov += 1;
                s.log_p_oov += lp;
            }
            let mut gram = ctx.to_vec();
            gram.push(w);
            if oov || self.count(&gram) == 0 {
                s.n_bo += 1;
            }
        }
        s
    }
}

/// Random sentences over a small alphabet of words, so that n-grams repeat.
pub fn random_corpus(rng: &mut ChaCha8Rng, n_sentences: usize, vocab: usize, max_len: usize) -> Vec<String> {
    (0..n_sentences)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len).map(|_| format!("w{}", rng.gen_range(0..vocab))).collect::<Vec<_>>().join(" ")
        })
        .collect()
}

/// Three ordered classes cut from a random projection, with a gap of
/// `2 * margin` around both cut points, so the set is linearly separable by
/// construction: class scores `-s - t`, `0`, `s - t` classify it exactly.
pub fn separable_set(n: usize, dim: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let (t, margin) = (0.25, 0.05);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (mut xs, mut ys) = (Vec::with_capacity(n), Vec::with_capacity(n));
    while xs.len() < n {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / norm;
        if (s.abs() - t).abs() < margin {
            continue;
        }
        ys.push(if s < -t { 0 } else if s > t { 2 } else { 1 });
        xs.push(x);
    }
    (xs, ys)
}

/// Multiclass perceptron with a bias input. Returns the number of epochs
/// until an epoch with no mistakes, or `None` if that never happened.
pub fn perceptron_epochs(xs: &[Vec<f64>], ys: &[usize], n_classes: usize, max_epochs: usize) -> Option<usize> {
    let dim = xs[0].len() + 1;
    let mut w = vec![vec![0.0; dim]; n_classes];
    for epoch in 1..=max_epochs {
        let mut mistakes = 0;
        for (x, &y) in xs.iter().zip(ys) {
            let score = |k: usize| w[k][..dim - 1].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[k][dim - 1];
            let mut best = 0;
            for k in 1..n_classes {
                if score(k) > score(best) {
                    best = k;
                }
            }
            if best != y {
                mistakes += 1;
                for (i, xi) in x.iter().chain(std::iter::once(&1.0)).enumerate() {
                    w[y][i] += xi;
                    w[best][i] -= xi;
                }
            }
        }
        if mistakes == 0 {
            return Some(epoch);
        }
    }
    None
}

/// Independent re-statement of the synthetic labeling rule table:
/// defect counts `< s` give 2, `< 4s` give 1, else 0; topic words the
/// reverse; phone log-likelihood above `-1 - s/2` gives 2, above
/// `-1 - 3s/2` gives 1.
pub fn rule_oracle(
    topic: u32,
    misspelled: u32,
    borrowed: u32,
    log_likelihood: f64,
    pauses: u32,
    code_switched: u32,
    s: f64,
) -> [u8; 6] {
    let defect = |n: u32| match f64::from(n) {
        v if v < s => 2,
        v if v < 4.0 * s => 1,
        _ => 0,
    };
    let pron = if log_likelihood > -1.0 - s / 2.0 {
        2
    } else if log_likelihood > -1.0 - 1.5 * s {
        1
    } else {
        0
    };
    [2 - defect(topic), defect(misspelled), defect(borrowed), pron, defect(pauses), defect(code_switched)]
}

/// `n` distinct reference words and a copy with the first `k` replaced.
pub fn substituted_pair(n: usize, k: usize) -> (Vec<String>, Vec<String>) {
    let reference: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
    let mut other = reference.clone();
    for (i, w) in other.iter_mut().enumerate().take(k) {
        *w = format!("x{i}");
    }
    (reference, other)
}
