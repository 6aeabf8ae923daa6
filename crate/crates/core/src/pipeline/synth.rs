//! Seeded generator of annotated corpora with known score rules.
//!
//! Every utterance gets a latent band in `{0, 1, 2}` per indicator, drawn
//! around a per-speaker ability. The band fixes a planted quantity that
//! surfaces in one feature family:
//!
//! | indicator               | planted quantity                 | rule (`s` = signal strength)          |
//! |-------------------------|----------------------------------|---------------------------------------|
//! | answer relevance        | topic words of the question      | `n < s` → 0, `n < 4s` → 1, else 2     |
//! | syntactical correctness | one-edit misspellings            | `n < s` → 2, `n < 4s` → 1, else 0     |
//! | lexical properties      | words borrowed from the other L2 | as above                              |
//! | pronunciation           | mean phone log-likelihood `ll`   | `ll > -1-s/2` → 2, `ll > -1-3s/2` → 1 |
//! | fluency                 | pauses (silence plus hesitation) | as syntactical correctness            |
//! | communicative skills    | Italian words in `@it(...)`      | as syntactical correctness            |
//!
//! The rule output is the label, except that with probability `label_noise`
//! it moves one step (towards 1, or from 1 to a random neighbour).

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::corpus::io::{write_alignments, write_bytes, write_corpus, write_jsonl};
use crate::corpus::{
    AlignmentSystem, AnnotatedUtterance, Indicator, Language, Level, PhoneAlignment, PhoneSegment, QuestionKey,
    ScoreVector, Session,
};
use crate::features::{default_stop_words, spell_correct, Lexicons, WordLanguage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub languages: Vec<Language>,
    pub levels: Vec<Level>,
    pub sessions: Vec<Session>,
    pub questions_per_session: usize,
    /// Speakers per (language, level); each answers every question of its
    /// level once.
    pub speakers_per_level: usize,
    pub general_vocab_size: usize,
    pub topic_words_per_question: usize,
    pub italian_vocab_size: usize,
    pub ood_sentences: usize,
    /// Scales the planted quantities and the rule thresholds; in `[1, 5]`.
    pub signal_strength: f64,
    pub label_noise: f64,
    /// Probability that an indicator band equals the speaker's ability
    /// rather than being drawn uniformly.
    pub ability_coupling: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            seed: 2018,
            languages: Language::ALL.to_vec(),
            levels: vec![Level::A1, Level::A2],
            sessions: vec![Session::S1],
            questions_per_session: 3,
            speakers_per_level: 168,
            general_vocab_size: 600,
            topic_words_per_question: 6,
            italian_vocab_size: 120,
            ood_sentences: 400,
            signal_strength: 1.0,
            label_noise: 0.02,
            ability_coupling: 0.5,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::ConfigInvalid(format!("synthetic spec: {m}")));
        if self.languages.is_empty() || self.levels.is_empty() || self.sessions.is_empty() {
            return bad("languages, levels and sessions must be nonempty");
        }
        if self.questions_per_session == 0 || self.speakers_per_level == 0 {
            return bad("questions_per_session and speakers_per_level must be positive");
        }
        if self.general_vocab_size < 20 || self.topic_words_per_question == 0 || self.italian_vocab_size < 10 {
            return bad("vocabularies are too small");
        }
        if !(1.0..=5.0).contains(&self.signal_strength) {
            return bad("signal_strength must lie in [1, 5]");
        }
        if !(0.0..=0.5).contains(&self.label_noise) || !(0.0..=1.0).contains(&self.ability_coupling) {
            return bad("label_noise must lie in [0, 0.5] and ability_coupling in [0, 1]");
        }
        Ok(())
    }

    pub fn n_utterances(&self) -> usize {
        self.languages.len()
            * self.levels.len()
            * self.speakers_per_level
            * self.sessions.len()
            * self.questions_per_session
    }
}

/// Planted quantities of one utterance and the labels derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Planted {
    pub utterance_id: String,
    pub n_topic_words: u32,
    pub n_misspelled: u32,
    pub n_borrowed: u32,
    pub phone_log_likelihood: f64,
    pub phone_substitution_rate: f64,
    pub n_pauses: u32,
    pub n_code_switched: u32,
    /// Scores given by the rules alone.
    pub rule_scores: [u8; 6],
    /// Scores after label noise; these are the corpus scores.
    pub scores: [u8; 6],
}

fn defect_rule(n: u32, s: f64) -> u8 {
    let n = f64::from(n);
    if n < s {
        2
    } else if n < 4.0 * s {
        1
    } else {
        0
    }
}

/// Scores the rules assign to planted quantities at signal strength `s`.
pub fn planted_rule_scores(p: &Planted, s: f64) -> [u8; 6] {
    let pron = if p.phone_log_likelihood > -1.0 - 0.5 * s {
        2
    } else if p.phone_log_likelihood > -1.0 - 1.5 * s {
        1
    } else {
        0
    };
    [
        2 - defect_rule(p.n_topic_words, s),
        defect_rule(p.n_misspelled, s),
        defect_rule(p.n_borrowed, s),
        pron,
        defect_rule(p.n_pauses, s),
        defect_rule(p.n_code_switched, s),
    ]
}

/// A generated corpus with everything the pipeline needs.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub spec: SyntheticSpec,
    pub utterances: Vec<AnnotatedUtterance>,
    pub alignments: Vec<PhoneAlignment>,
    pub planted: Vec<Planted>,
    pub out_of_domain: BTreeMap<Language, Vec<String>>,
    /// Sorted word lists, stop words included.
    pub word_lists: BTreeMap<WordLanguage, Vec<String>>,
}

impl SyntheticCorpus {
    pub fn lexicons(&self) -> Lexicons {
        self.word_lists.iter().fold(Lexicons::new(), |lex, (lang, words)| lex.with_words(*lang, words))
    }
}

struct Style {
    onsets: &'static [&'static str],
    vowels: &'static [&'static str],
    codas: &'static [&'static str],
}

const ENGLISH: Style = Style {
    onsets: &["b", "c", "d", "f", "g", "h", "l", "m", "n", "p", "r", "s", "t", "v", "w", "br", "cr", "dr", "fl", "gr", "pl", "sl", "st", "tr"],
    vowels: &["a", "e", "i", "o", "u", "ea", "oo", "ai"],
    codas: &["", "n", "t", "r", "s", "ck", "nd", "ll", "m"],
};

const GERMAN: Style = Style {
    onsets: &["b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "w", "z", "sch", "st", "kr", "br", "pf", "schw"],
    vowels: &["a", "e", "i", "o", "u", "ei", "au", "ie"],
    codas: &["", "n", "r", "t", "ch", "ng", "st", "l"],
};

const ITALIAN: Style = Style {
    onsets: &["b", "c", "d", "f", "g", "l", "m", "n", "p", "r", "s", "t", "v", "ch", "gl", "gn", "sc"],
    vowels: &["a", "e", "i", "o", "u"],
    codas: &[""],
};

fn style_for(lang: WordLanguage) -> &'static Style {
    match lang {
        WordLanguage::English => &ENGLISH,
        WordLanguage::German => &GERMAN,
        WordLanguage::Italian => &ITALIAN,
    }
}

fn make_word(style: &Style, rng: &mut ChaCha8Rng) -> String {
    let n_syl = if rng.gen_bool(0.7) { 2 } else { 3 };
    let mut w = String::new();
    for i in 0..n_syl {
        w.push_str(style.onsets.choose(rng).unwrap());
        w.push_str(style.vowels.choose(rng).unwrap());
        if i + 1 == n_syl || rng.gen_bool(0.2) {
            w.push_str(style.codas.choose(rng).unwrap());
        }
    }
    w
}

fn fresh_words(style: &Style, n: usize, used: &mut HashSet<String>, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = make_word(style, rng);
        if w.chars().count() >= 4 && used.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

fn misspell(word: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let i = rng.gen_range(1..chars.len());
    match rng.gen_range(0..3) {
        0 if VOWELS.contains(&chars[i]) => {
            let others: Vec<char> = VOWELS.iter().copied().filter(|&v| v != chars[i]).collect();
            chars[i] = *others.choose(rng).unwrap();
        }
        1 => {
            chars.remove(i);
        }
        _ => chars.insert(i, chars[i]),
    }
    chars.into_iter().collect()
}

struct Vocabulary {
    stop: BTreeMap<Language, Vec<String>>,
    general: BTreeMap<Language, Vec<String>>,
    misspelled: BTreeMap<String, String>,
    topic: BTreeMap<QuestionKey, Vec<String>>,
    italian: Vec<String>,
    borrowed: BTreeMap<Language, Vec<String>>,
    word_lists: BTreeMap<WordLanguage, Vec<String>>,
}

fn other_l2(lang: Language) -> Language {
    match lang {
        Language::English => Language::German,
        Language::German => Language::English,
    }
}

fn build_vocabulary(spec: &SyntheticSpec, keys: &[QuestionKey], rng: &mut ChaCha8Rng) -> Vocabulary {
    let mut used: HashSet<String> = HashSet::new();
    for lang in WordLanguage::ALL {
        used.extend(default_stop_words(lang).into_iter().map(str::to_string));
    }
    used.extend(["eh", "ehm", "mmh"].map(str::to_string));

    // a pool twice the needed size, later trimmed to words that have a
    // uniquely correctable misspelling
    let mut pool: BTreeMap<Language, Vec<String>> = BTreeMap::new();
    for &lang in &spec.languages {
        pool.insert(lang, fresh_words(style_for(lang.into()), 2 * spec.general_vocab_size, &mut used, rng));
    }
    let mut topic = BTreeMap::new();
    for key in keys {
        topic.insert(key.clone(), fresh_words(style_for(key.language.into()), spec.topic_words_per_question, &mut used, rng));
    }
    let italian = fresh_words(&ITALIAN, spec.italian_vocab_size, &mut used, rng);
    let mut borrow_pool: BTreeMap<Language, Vec<String>> = BTreeMap::new();
    for &lang in &spec.languages {
        borrow_pool.insert(lang, fresh_words(style_for(other_l2(lang).into()), 60, &mut used, rng));
    }

    let mut word_lists: BTreeMap<WordLanguage, Vec<String>> = BTreeMap::new();
    for lang in WordLanguage::ALL {
        word_lists.insert(lang, default_stop_words(lang).into_iter().map(str::to_string).collect());
    }
    for (lang, words) in &pool {
        word_lists.get_mut(&(*lang).into()).unwrap().extend(words.iter().cloned());
    }
    for (key, words) in &topic {
        word_lists.get_mut(&key.language.into()).unwrap().extend(words.iter().cloned());
    }
    word_lists.get_mut(&WordLanguage::Italian).unwrap().extend(italian.iter().cloned());
    for (lang, words) in &borrow_pool {
        word_lists.get_mut(&other_l2(*lang).into()).unwrap().extend(words.iter().cloned());
    }
    let lexicons = word_lists.iter().fold(Lexicons::new(), |lex, (l, w)| lex.with_words(*l, w));

    // unmarked words of the other foreign language; only those no spelling
    // correction maps onto a target word are kept
    let mut borrowed = BTreeMap::new();
    for &lang in &spec.languages {
        let kept: Vec<String> = borrow_pool[&lang]
            .iter()
            .filter(|w| !spell_correct(w, lang.into(), &lexicons).1)
            .cloned()
            .collect();
        assert!(kept.len() >= 10, "too few borrowable words");
        borrowed.insert(lang, kept);
    }

    let mut general = BTreeMap::new();
    let mut misspelled = BTreeMap::new();
    for (&lang, candidates) in &pool {
        let mut kept = Vec::new();
        for w in candidates {
            if kept.len() == spec.general_vocab_size {
                break;
            }
            for _ in 0..8 {
                let m = misspell(w, rng);
                if used.contains(&m) || WordLanguage::ALL.iter().any(|&l| lexicons.contains(l, &m)) {
                    continue;
                }
                if spell_correct(&m, lang.into(), &lexicons) == (w.clone(), true) {
                    used.insert(m.clone());
                    misspelled.insert(w.clone(), m);
                    kept.push(w.clone());
                    break;
                }
            }
        }
        general.insert(lang, kept);
    }
    // words of the pool that were not kept stay in the lexicon; they are
    // real words the generator never uses
    let mut stop = BTreeMap::new();
    for &lang in &spec.languages {
        stop.insert(lang, default_stop_words(lang.into()).into_iter().map(str::to_string).collect());
    }
    for words in word_lists.values_mut() {
        words.sort();
        words.dedup();
    }
    Vocabulary { stop, general, misspelled, topic, italian, borrowed, word_lists }
}

enum Piece {
    Word(String),
    Misspelled(String),
    Hesitation(&'static str),
    CodeSwitch(Vec<String>),
    Noise,
}

fn draw_count(band: u8, positive: bool, s: f64, rng: &mut ChaCha8Rng) -> u32 {
    // `positive` quantities grow with the band, defects shrink with it
    let level = if positive { band } else { 2 - band };
    let base = match level {
        0 => 0.0,
        1 => f64::from(rng.gen_range(2..=3u32)),
        _ => f64::from(rng.gen_range(5..=6u32)),
    };
    (s * base).round() as u32
}

fn add_noise(score: u8, p: f64, rng: &mut ChaCha8Rng) -> u8 {
    if !rng.gen_bool(p) {
        return score;
    }
    match score {
        1 => {
            if rng.gen_bool(0.5) {
                0
            } else {
                2
            }
        }
        _ => 1,
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Render pieces as marked-up transcription text and the spoken sequence
/// used for the alignment (`None` marks a noise event).
fn render(pieces: &[Piece], rng: &mut ChaCha8Rng) -> (String, Vec<Option<String>>) {
    let mut parts: Vec<String> = Vec::with_capacity(pieces.len());
    let mut spoken = Vec::new();
    let mut first_word = true;
    let mut whispered = false;
    for (i, piece) in pieces.iter().enumerate() {
        let last = i + 1 == pieces.len();
        match piece {
            Piece::Word(w) | Piece::Misspelled(w) => {
                spoken.push(Some(w.clone()));
                let mut text = if first_word { capitalize(w) } else { w.clone() };
                first_word = false;
                if last {
                    text.push('.');
                } else if matches!(piece, Piece::Word(_)) && !whispered && rng.gen_bool(0.05) {
                    text = format!("({text})");
                    whispered = true;
                } else if rng.gen_bool(0.05) {
                    text = format!("#{text}");
                } else if rng.gen_bool(0.08) {
                    text.push(',');
                }
                parts.push(text);
            }
            Piece::Hesitation(h) => {
                spoken.push(Some("ehm".to_string()));
                parts.push(h.to_string());
            }
            Piece::CodeSwitch(words) => {
                spoken.extend(words.iter().map(|w| Some(w.clone())));
                parts.push(format!("@it({})", words.join(" ")));
            }
            Piece::Noise => {
                spoken.push(None);
                parts.push("@voices".to_string());
            }
        }
    }
    (parts.join(" "), spoken)
}

fn phone_segment(phone: &str, frames: u32, ll: f64) -> PhoneSegment {
    PhoneSegment { phone: phone.to_string(), n_frames: frames, mean_log_likelihood: ll }
}

fn alignments_for(
    id: &str,
    language: Language,
    spoken: &[Option<String>],
    planted: &Planted,
    rng: &mut ChaCha8Rng,
) -> [PhoneAlignment; 2] {
    let n_gaps = spoken.len().saturating_sub(1).max(1);
    let mut pause_after: Vec<usize> = (0..n_gaps).collect();
    pause_after.shuffle(rng);
    pause_after.truncate(planted.n_pauses as usize);

    let mut best = vec![phone_segment("sil", rng.gen_range(8..=20), -0.5)];
    let mut native = best.clone();
    let alphabet: Vec<char> = "abdefgiklmnoprstuvz".chars().collect();
    for (i, item) in spoken.iter().enumerate() {
        match item {
            None => {
                let seg = phone_segment("nsn", rng.gen_range(15..=30), -0.8);
                best.push(seg.clone());
                native.push(seg);
            }
            Some(word) => {
                for c in word.chars() {
                    let frames = rng.gen_range(3..=9);
                    let ll = planted.phone_log_likelihood + rng.gen_range(-0.3..=0.3);
                    best.push(phone_segment(&c.to_string(), frames, ll));
                    let native_phone = if rng.gen_bool(planted.phone_substitution_rate) {
                        alphabet.iter().copied().filter(|&a| a != c).collect::<Vec<_>>().choose(rng).copied().unwrap()
                    } else {
                        c
                    };
                    let native_ll = planted.phone_log_likelihood - 0.2 + rng.gen_range(-0.3..=0.3);
                    native.push(phone_segment(&native_phone.to_string(), frames, native_ll));
                }
            }
        }
        if pause_after.contains(&i) {
            let seg = phone_segment("sil", rng.gen_range(40..=60), -0.5);
            best.push(seg.clone());
            native.push(seg);
        }
    }
    let tail = phone_segment("sil", rng.gen_range(8..=20), -0.5);
    best.push(tail.clone());
    native.push(tail);
    [
        PhoneAlignment { utterance_id: id.to_string(), system: AlignmentSystem::NonNativeBest, segments: best },
        PhoneAlignment { utterance_id: id.to_string(), system: AlignmentSystem::native_for(language), segments: native },
    ]
}

fn filler(vocab: &Vocabulary, lang: Language, n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.4) {
                vocab.stop[&lang].choose(rng).unwrap().clone()
            } else {
                vocab.general[&lang].choose(rng).unwrap().clone()
            }
        })
        .collect()
}

/// Generate a corpus. Identical specs give identical output.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus, PipelineError> {
    spec.validate()?;
    let s = spec.signal_strength;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut keys = Vec::new();
    for &language in &spec.languages {
        for &level in &spec.levels {
            for &session in &spec.sessions {
                for q in 1..=spec.questions_per_session {
                    keys.push(QuestionKey::new(language, level, session, format!("q{q}")));
                }
            }
        }
    }
    let vocab = build_vocabulary(spec, &keys, &mut rng);

    let mut utterances = Vec::with_capacity(spec.n_utterances());
    let mut alignments = Vec::with_capacity(2 * spec.n_utterances());
    let mut planted_all = Vec::with_capacity(spec.n_utterances());
    for &language in &spec.languages {
        for &level in &spec.levels {
            for spk in 0..spec.speakers_per_level {
                let speaker_id = format!("{}-{level}-s{spk:03}", language.code());
                let ability: u8 = rng.gen_range(0..3);
                for key in keys.iter().filter(|k| k.language == language && k.level == level) {
                    let utterance_id = format!("{speaker_id}-{}-{}", key.session, key.question_id);
                    let mut bands = [0u8; 6];
                    for b in &mut bands {
                        *b = if rng.gen_bool(spec.ability_coupling) { ability } else { rng.gen_range(0..3) };
                    }
                    let pron_band = f64::from(bands[Indicator::Pronunciation.index()]);
                    let mut planted = Planted {
                        utterance_id: utterance_id.clone(),
                        n_topic_words: draw_count(bands[0], true, s, &mut rng),
                        n_misspelled: draw_count(bands[1], false, s, &mut rng),
                        n_borrowed: draw_count(bands[2], false, s, &mut rng),
                        phone_log_likelihood: -1.0 - s * (2.0 - pron_band) + rng.gen_range(-0.25 * s..=0.25 * s),
                        phone_substitution_rate: [0.25, 0.12, 0.02][bands[3] as usize],
                        n_pauses: draw_count(bands[4], false, s, &mut rng),
                        n_code_switched: draw_count(bands[5], false, s, &mut rng),
                        rule_scores: [0; 6],
                        scores: [0; 6],
                    };
                    planted.rule_scores = planted_rule_scores(&planted, s);
                    for (out, &r) in planted.scores.iter_mut().zip(&planted.rule_scores) {
                        *out = add_noise(r, spec.label_noise, &mut rng);
                    }

                    let n_fill = match level {
                        Level::A1 => rng.gen_range(7..=10),
                        Level::A2 => rng.gen_range(10..=14),
                        Level::B1 => rng.gen_range(13..=18),
                    };
                    let mut pieces: Vec<Piece> =
                        filler(&vocab, language, n_fill, &mut rng).into_iter().map(Piece::Word).collect();
                    // misspelled general words, inserted next to the filler
                    let mut replaced = 0;
                    while replaced < planted.n_misspelled {
                        let w = vocab.general[&language].choose(&mut rng).unwrap();
                        let pos = rng.gen_range(0..=pieces.len());
                        pieces.insert(pos, Piece::Misspelled(vocab.misspelled[w].clone()));
                        replaced += 1;
                    }
                    let insert = |piece: Piece, rng: &mut ChaCha8Rng, pieces: &mut Vec<Piece>| {
                        let pos = rng.gen_range(0..=pieces.len());
                        pieces.insert(pos, piece);
                    };
                    for _ in 0..planted.n_topic_words {
                        let w = vocab.topic[key].choose(&mut rng).unwrap().clone();
                        insert(Piece::Word(w), &mut rng, &mut pieces);
                    }
                    for _ in 0..planted.n_borrowed {
                        let w = vocab.borrowed[&language].choose(&mut rng).unwrap().clone();
                        insert(Piece::Word(w), &mut rng, &mut pieces);
                    }
                    for _ in 0..planted.n_pauses {
                        let h = *["ehm", "eh", "@hes"].choose(&mut rng).unwrap();
                        insert(Piece::Hesitation(h), &mut rng, &mut pieces);
                    }
                    if planted.n_code_switched > 0 {
                        let words = (0..planted.n_code_switched)
                            .map(|_| vocab.italian.choose(&mut rng).unwrap().clone())
                            .collect();
                        insert(Piece::CodeSwitch(words), &mut rng, &mut pieces);
                    }
                    if rng.gen_bool(0.2) {
                        insert(Piece::Noise, &mut rng, &mut pieces);
                    }
                    let (raw_text, spoken) = render(&pieces, &mut rng);
                    alignments.extend(alignments_for(&utterance_id, language, &spoken, &planted, &mut rng));
                    utterances.push(AnnotatedUtterance {
                        utterance_id,
                        speaker_id: speaker_id.clone(),
                        question: key.clone(),
                        raw_text,
                        scores: Some(ScoreVector::new(planted.scores).expect("scores in range")),
                    });
                    planted_all.push(planted);
                }
            }
        }
    }

    let mut out_of_domain = BTreeMap::new();
    for &language in &spec.languages {
        let lang_topics: Vec<&String> =
            keys.iter().filter(|k| k.language == language).flat_map(|k| &vocab.topic[k]).collect();
        let mut lines = Vec::with_capacity(spec.ood_sentences);
        for _ in 0..spec.ood_sentences {
            let n = rng.gen_range(6..=15);
            let mut words = filler(&vocab, language, n, &mut rng);
            for w in &mut words {
                if rng.gen_bool(0.03) {
                    *w = lang_topics.choose(&mut rng).unwrap().to_string();
                }
            }
            words[0] = capitalize(&words[0]);
            lines.push(format!("{}.", words.join(" ")));
        }
        out_of_domain.insert(language, lines);
    }

    Ok(SyntheticCorpus {
        spec: spec.clone(),
        utterances,
        alignments,
        planted: planted_all,
        out_of_domain,
        word_lists: vocab.word_lists,
    })
}

/// Write the corpus files and a `pipeline.toml` pointing at them into `dir`.
/// Returns the path of the config file.
pub fn write_synthetic(corpus: &SyntheticCorpus, dir: &Path) -> Result<PathBuf, PipelineError> {
    write_corpus(&dir.join("corpus.jsonl"), &corpus.utterances)?;
    write_alignments(&dir.join("alignments.jsonl"), &corpus.alignments)?;
    write_jsonl(&dir.join("planted.jsonl"), &corpus.planted)?;
    let spec = serde_json::to_string_pretty(&corpus.spec).expect("spec serializes") + "\n";
    write_bytes(&dir.join("spec.json"), spec.as_bytes())?;
    for (lang, lines) in &corpus.out_of_domain {
        write_bytes(&dir.join(format!("ood.{}.txt", lang.code())), (lines.join("\n") + "\n").as_bytes())?;
    }
    for (lang, words) in &corpus.word_lists {
        let code = match lang {
            WordLanguage::English => "en",
            WordLanguage::German => "de",
            WordLanguage::Italian => "it",
        };
        write_bytes(&dir.join(format!("lexicon.{code}.txt")), (words.join("\n") + "\n").as_bytes())?;
    }
    let mut config = String::from("output_dir = \"out\"\n\n[data]\nutterances = \"corpus.jsonl\"\nalignments = \"alignments.jsonl\"\n");
    for lang in corpus.out_of_domain.keys() {
        let field = match lang {
            Language::English => "ood_english",
            Language::German => "ood_german",
        };
        config.push_str(&format!("{field} = \"ood.{}.txt\"\n", lang.code()));
    }
    config.push_str(
        "\n[lexicons]\nenglish = \"lexicon.en.txt\"\ngerman = \"lexicon.de.txt\"\nitalian = \"lexicon.it.txt\"\n",
    );
    let path = dir.join("pipeline.toml");
    write_bytes(&path, config.as_bytes())?;
    Ok(path)
}
