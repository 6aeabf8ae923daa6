//! Assembly of the five LM training-text collections and of the "best answer"
//! pools used for bag-of-words features.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{parse_transcription, AnnotatedUtterance, CorpusError, QuestionKey, ScoreVector};

/// The five nested text collections, from broadest to narrowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LmSet {
    OutOfDomain,
    AllInDomain,
    Level,
    Session,
    Question,
}

impl LmSet {
    pub const ALL: [LmSet; 5] =
        [LmSet::OutOfDomain, LmSet::AllInDomain, LmSet::Level, LmSet::Session, LmSet::Question];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Whether an in-domain utterance with key `other` belongs to this
    /// collection for `key`. Always false for the out-of-domain set.
    pub fn admits(self, key: &QuestionKey, other: &QuestionKey) -> bool {
        match self {
            LmSet::OutOfDomain => false,
            LmSet::AllInDomain => key.language == other.language,
            LmSet::Level => key.same_level(other),
            LmSet::Session => key.same_session(other),
            LmSet::Question => key.same_question(other),
        }
    }

    /// Stable identifier of the collection selected by this set for `key`.
    pub fn id_for(self, key: &QuestionKey) -> String {
        let lang = key.language.code();
        match self {
            LmSet::OutOfDomain => format!("{lang}.ood"),
            LmSet::AllInDomain => format!("{lang}.all"),
            LmSet::Level => format!("{lang}.{}", key.level),
            LmSet::Session => format!("{lang}.{}.{}", key.level, key.session),
            LmSet::Question => format!("{lang}.{}.{}.{}", key.level, key.session, key.question_id),
        }
    }

    fn parent(self) -> Option<LmSet> {
        match self {
            LmSet::OutOfDomain | LmSet::AllInDomain => None,
            LmSet::Level => Some(LmSet::AllInDomain),
            LmSet::Session => Some(LmSet::Level),
            LmSet::Question => Some(LmSet::Session),
        }
    }
}

impl fmt::Display for LmSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LmSet::OutOfDomain => "a:out_of_domain",
            LmSet::AllInDomain => "b:all_in_domain",
            LmSet::Level => "c:level",
            LmSet::Session => "d:session",
            LmSet::Question => "e:question",
        })
    }
}

/// One assembled collection.
#[derive(Debug, Clone, PartialEq)]
pub struct TextSet {
    /// The slot this collection fills.
    pub slot: LmSet,
    /// The collection actually used; differs from `slot` after a fallback.
    pub source: LmSet,
    /// Identifier of the actual collection (see [`LmSet::id_for`]).
    pub id: String,
    /// Training utterances that contributed, empty for out-of-domain text.
    pub utterance_ids: Vec<String>,
    pub sentences: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmTrainingSets {
    pub sets: [TextSet; 5],
}

impl LmTrainingSets {
    pub fn get(&self, slot: LmSet) -> &TextSet {
        &self.sets[slot.index()]
    }

    /// Slots whose own collection was empty, with the ancestor that replaced it.
    pub fn fallbacks(&self) -> Vec<(LmSet, LmSet)> {
        self.sets.iter().filter(|s| s.slot != s.source).map(|s| (s.slot, s.source)).collect()
    }
}

/// Clean in-domain text of an utterance: markers removed, hesitations kept.
pub fn training_text(utterance: &AnnotatedUtterance) -> Result<String, CorpusError> {
    Ok(parse_transcription(&utterance.raw_text, utterance.question.language)?.text())
}

/// Build collections (a)–(e) for `key` from the training split.
///
/// An empty (c), (d) or (e) is replaced by its nearest nonempty ancestor, so
/// that every key always yields five usable collections. The replacement is
/// visible through [`LmTrainingSets::fallbacks`].
pub fn build_lm_training_sets(
    train: &[AnnotatedUtterance],
    key: &QuestionKey,
    out_of_domain: &[String],
) -> Result<LmTrainingSets, CorpusError> {
    if out_of_domain.iter().all(|s| s.trim().is_empty()) {
        return Err(CorpusError::MissingOutOfDomainText(key.language));
    }
    if train.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }

    let mut in_domain: Vec<(&QuestionKey, &str, String)> = Vec::new();
    for u in train.iter().filter(|u| u.question.language == key.language) {
        let text = training_text(u)?;
        if !text.is_empty() {
            in_domain.push((&u.question, u.utterance_id.as_str(), text));
        }
    }
    if in_domain.is_empty() {
        return Err(CorpusError::NoInDomainText(key.language));
    }

    let collect = |slot: LmSet| -> (Vec<String>, Vec<String>) {
        in_domain
            .iter()
            .filter(|(k, _, _)| slot.admits(key, k))
            .map(|(_, id, text)| (id.to_string(), text.clone()))
            .unzip()
    };

    let ood = TextSet {
        slot: LmSet::OutOfDomain,
        source: LmSet::OutOfDomain,
        id: LmSet::OutOfDomain.id_for(key),
        utterance_ids: Vec::new(),
        sentences: out_of_domain.iter().filter(|s| !s.trim().is_empty()).cloned().collect(),
    };

    let mut sets = vec![ood];
    for slot in [LmSet::AllInDomain, LmSet::Level, LmSet::Session, LmSet::Question] {
        let mut source = slot;
        let (mut ids, mut sentences) = collect(slot);
        while sentences.is_empty() {
            // AllInDomain is nonempty, so the walk terminates
            source = source.parent().expect("all in-domain set is nonempty");
            (ids, sentences) = collect(source);
        }
        sets.push(TextSet { slot, source, id: source.id_for(key), utterance_ids: ids, sentences });
    }
    let sets: [TextSet; 5] = sets.try_into().expect("five collections");
    Ok(LmTrainingSets { sets })
}

/// Best-scored training answers for one scope.
#[derive(Debug, Clone, PartialEq)]
pub struct BestAnswers {
    /// The scope the answers were drawn from.
    pub scope: LmSet,
    /// True when no answer had the maximum total and the top quartile was used.
    pub quartile_fallback: bool,
    pub utterance_ids: Vec<String>,
    pub texts: Vec<String>,
}

fn best_of<'a>(pool: &[(&'a AnnotatedUtterance, ScoreVector)]) -> (bool, Vec<&'a AnnotatedUtterance>) {
    let perfect: Vec<_> =
        pool.iter().filter(|(_, s)| s.total() == ScoreVector::MAX_TOTAL).map(|(u, _)| *u).collect();
    if !perfect.is_empty() || pool.is_empty() {
        return (false, perfect);
    }
    let mut totals: Vec<u8> = pool.iter().map(|(_, s)| s.total()).collect();
    totals.sort_unstable_by(|a, b| b.cmp(a));
    let k = pool.len().div_ceil(4);
    let threshold = totals[k - 1];
    (true, pool.iter().filter(|(_, s)| s.total() >= threshold).map(|(u, _)| *u).collect())
}

fn best_in_scope(train: &[AnnotatedUtterance], key: &QuestionKey, scope: LmSet) -> Result<BestAnswers, CorpusError> {
    let pool: Vec<_> = train
        .iter()
        .filter(|u| scope.admits(key, &u.question))
        .filter_map(|u| u.scores.map(|s| (u, s)))
        .collect();
    let (quartile_fallback, chosen) = best_of(&pool);
    let mut utterance_ids = Vec::with_capacity(chosen.len());
    let mut texts = Vec::with_capacity(chosen.len());
    for u in chosen {
        utterance_ids.push(u.utterance_id.clone());
        texts.push(training_text(u)?);
    }
    Ok(BestAnswers { scope, quartile_fallback, utterance_ids, texts })
}

/// Answers to `key`'s question whose total is the maximum (12).
///
/// When none reach 12, the top quartile by total is returned instead, ties
/// at the cut included. Unscored utterances are ignored.
pub fn select_best_answers(train: &[AnnotatedUtterance], key: &QuestionKey) -> Result<BestAnswers, CorpusError> {
    best_in_scope(train, key, LmSet::Question)
}

/// Like [`select_best_answers`], but widens the scope to session, level and
/// language when the question has no scored training answers at all.
pub fn select_best_answers_with_fallback(
    train: &[AnnotatedUtterance],
    key: &QuestionKey,
) -> Result<BestAnswers, CorpusError> {
    let mut scope = LmSet::Question;
    loop {
        let best = best_in_scope(train, key, scope)?;
        match scope.parent() {
            Some(parent) if best.utterance_ids.is_empty() => scope = parent,
            _ => return Ok(best),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Language, Level, Session};

    fn utt(id: &str, key: &QuestionKey, text: &str, scores: [u8; 6]) -> AnnotatedUtterance {
        AnnotatedUtterance {
            utterance_id: id.into(),
            speaker_id: format!("spk-{id}"),
            question: key.clone(),
            raw_text: text.into(),
            scores: Some(ScoreVector::new(scores).unwrap()),
        }
    }

    fn key(level: Level, session: Session, q: &str) -> QuestionKey {
        QuestionKey::new(Language::English, level, session, q)
    }

    fn synthetic_corpus() -> Vec<AnnotatedUtterance> {
        let mut out = Vec::new();
        let mut n = 0;
        for level in [Level::A1, Level::B1] {
            for session in Session::ALL {
                for q in ["q1", "q2"] {
                    // a different count per cell so that set sizes are informative
                    for _ in 0..(1 + n % 3) {
                        out.push(utt(&format!("u{n}"), &key(level, session, q), &format!("word{n} @voices ehm"), [1; 6]));
                        n += 1;
                    }
                }
            }
        }
        out.push(AnnotatedUtterance {
            question: QuestionKey::new(Language::German, Level::A1, Session::S1, "q1"),
            ..utt("g0", &key(Level::A1, Session::S1, "q1"), "hallo", [2; 6])
        });
        out
    }

    #[test]
    fn set_sizes_match_brute_force_filters() {
        let corpus = synthetic_corpus();
        let ood = vec!["some general text".to_string()];
        for level in [Level::A1, Level::B1] {
            for session in Session::ALL {
                for q in ["q1", "q2"] {
                    let k = key(level, session, q);
                    let sets = build_lm_training_sets(&corpus, &k, &ood).unwrap();
                    let count = |f: &dyn Fn(&AnnotatedUtterance) -> bool| corpus.iter().filter(|u| f(u)).count();
                    let en = |u: &AnnotatedUtterance| u.question.language == Language::English;
                    assert_eq!(sets.get(LmSet::OutOfDomain).sentences.len(), 1);
                    assert_eq!(sets.get(LmSet::AllInDomain).sentences.len(), count(&en));
                    assert_eq!(
                        sets.get(LmSet::Level).sentences.len(),
                        count(&|u| en(u) && u.question.level == level)
                    );
                    assert_eq!(
                        sets.get(LmSet::Session).sentences.len(),
                        count(&|u| en(u) && u.question.level == level && u.question.session == session)
                    );
                    assert_eq!(
                        sets.get(LmSet::Question).sentences.len(),
                        count(&|u| en(u)
                            && u.question.level == level
                            && u.question.session == session
                            && u.question.question_id == q)
                    );
                    assert!(sets.fallbacks().is_empty());
                }
            }
        }
    }

    #[test]
    fn text_is_cleaned_with_hesitations_kept() {
        let corpus = synthetic_corpus();
        let sets = build_lm_training_sets(&corpus, &key(Level::A1, Session::S1, "q1"), &["x".into()]).unwrap();
        assert_eq!(sets.get(LmSet::Question).sentences[0], "word0 ehm");
    }

    #[test]
    fn single_question_corpus_degenerates() {
        let k = key(Level::A2, Session::S2, "only");
        let corpus: Vec<_> = (0..4).map(|i| utt(&format!("u{i}"), &k, "a b", [0; 6])).collect();
        let sets = build_lm_training_sets(&corpus, &k, &["x".into()]).unwrap();
        let b = &sets.get(LmSet::AllInDomain).sentences;
        for slot in [LmSet::Level, LmSet::Session, LmSet::Question] {
            assert_eq!(&sets.get(slot).sentences, b);
        }
    }

    #[test]
    fn level_filter_excludes_other_levels() {
        let corpus = synthetic_corpus();
        let sets = build_lm_training_sets(&corpus, &key(Level::A1, Session::S1, "q1"), &["x".into()]).unwrap();
        let level_ids = &sets.get(LmSet::Level).utterance_ids;
        for u in &corpus {
            if u.question.level == Level::B1 {
                assert!(!level_ids.contains(&u.utterance_id));
            }
        }
    }

    #[test]
    fn unseen_question_falls_back_to_session() {
        let corpus = synthetic_corpus();
        let sets = build_lm_training_sets(&corpus, &key(Level::A1, Session::S2, "q9"), &["x".into()]).unwrap();
        assert_eq!(sets.fallbacks(), vec![(LmSet::Question, LmSet::Session)]);
        assert_eq!(sets.get(LmSet::Question).sentences, sets.get(LmSet::Session).sentences);
        assert_eq!(sets.get(LmSet::Question).id, "en.A1.S2");
    }

    #[test]
    fn missing_out_of_domain_text() {
        let corpus = synthetic_corpus();
        let err = build_lm_training_sets(&corpus, &key(Level::A1, Session::S1, "q1"), &[]).unwrap_err();
        assert_eq!(err, CorpusError::MissingOutOfDomainText(Language::English));
    }

    #[test]
    fn best_answers_all_perfect() {
        let k = key(Level::A1, Session::S1, "q1");
        let corpus: Vec<_> = (0..3).map(|i| utt(&format!("u{i}"), &k, "x", [2; 6])).collect();
        let best = select_best_answers(&corpus, &k).unwrap();
        assert_eq!(best.utterance_ids, ["u0", "u1", "u2"]);
        assert!(!best.quartile_fallback);
    }

    #[test]
    fn best_answers_mixed_scores_match_filter() {
        let k = key(Level::A1, Session::S1, "q1");
        let scores = [[2; 6], [2, 2, 2, 2, 2, 1], [0; 6], [2; 6], [1; 6]];
        let corpus: Vec<_> = scores.iter().enumerate().map(|(i, s)| utt(&format!("u{i}"), &k, "x", *s)).collect();
        let best = select_best_answers(&corpus, &k).unwrap();
        let expected: Vec<_> = corpus
            .iter()
            .filter(|u| u.scores.unwrap().total() == 12)
            .map(|u| u.utterance_id.clone())
            .collect();
        assert_eq!(best.utterance_ids, expected);
    }

    #[test]
    fn best_answers_top_quartile_fallback() {
        let k = key(Level::A1, Session::S1, "q1");
        // totals: 3, 10, 7, 10, 5, 9, 1, 8 -> sorted desc 10,10,9,8,... ; k = 2 -> threshold 10
        let totals = [3u8, 10, 7, 10, 5, 9, 1, 8];
        let corpus: Vec<_> = totals
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let mut s = [0u8; 6];
                let mut left = t;
                for slot in s.iter_mut() {
                    *slot = left.min(2);
                    left -= *slot;
                }
                utt(&format!("u{i}"), &k, "x", s)
            })
            .collect();
        let best = select_best_answers(&corpus, &k).unwrap();
        assert!(best.quartile_fallback);

        // sort-and-slice oracle
        let mut sorted: Vec<_> = corpus.iter().map(|u| u.scores.unwrap().total()).collect();
        sorted.sort();
        sorted.reverse();
        let cut = sorted[corpus.len().div_ceil(4) - 1];
        let expected: Vec<_> = corpus
            .iter()
            .filter(|u| u.scores.unwrap().total() >= cut)
            .map(|u| u.utterance_id.clone())
            .collect();
        assert_eq!(best.utterance_ids, expected);
        assert_eq!(best.utterance_ids, ["u1", "u3"]);
    }

    #[test]
    fn best_answers_widen_scope_for_unseen_question() {
        let corpus = synthetic_corpus();
        let best = select_best_answers_with_fallback(&corpus, &key(Level::A1, Session::S1, "nope")).unwrap();
        assert_eq!(best.scope, LmSet::Session);
        assert!(!best.utterance_ids.is_empty());
    }
}
