use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AnnotatedUtterance, CorpusError};

/// A speaker-disjoint partition of a corpus.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Vec<AnnotatedUtterance>,
    pub eval: Vec<AnnotatedUtterance>,
}

impl Split {
    pub fn train_speakers(&self) -> BTreeSet<&str> {
        self.train.iter().map(|u| u.speaker_id.as_str()).collect()
    }

    pub fn eval_speakers(&self) -> BTreeSet<&str> {
        self.eval.iter().map(|u| u.speaker_id.as_str()).collect()
    }
}

/// Partition utterances by speaker so that no speaker appears on both sides.
///
/// The number of training speakers is `round(train_fraction * n_speakers)`,
/// the closest achievable ratio. Speakers are shuffled with a ChaCha8 stream
/// seeded by `seed` after sorting, so the result does not depend on corpus
/// order. Utterances keep their input order within each side.
pub fn split_by_speaker(
    corpus: &[AnnotatedUtterance],
    train_fraction: f64,
    seed: u64,
) -> Result<Split, CorpusError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(train_fraction));
    }
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut speakers: Vec<&str> = corpus
        .iter()
        .map(|u| u.speaker_id.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    speakers.shuffle(&mut rng);
    let n_train = (train_fraction * speakers.len() as f64).round() as usize;
    let train_set: BTreeSet<&str> = speakers[..n_train].iter().copied().collect();

    let (train, eval) = corpus
        .iter()
        .cloned()
        .partition(|u| train_set.contains(u.speaker_id.as_str()));
    Ok(Split { train, eval })
}
