use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{PipelineConfig, PipelineError};
use crate::corpus::io::{read_alignments, read_corpus, read_jsonl, read_lines, write_bytes, write_jsonl};
use crate::corpus::{
    build_lm_training_sets, parse_transcription, select_best_answers_with_fallback, split_by_speaker, AlignmentIndex,
    AlignmentSystem, AnnotatedUtterance, GroupKey, Indicator, Language, LmSet, QuestionKey, Split,
};
use crate::features::{feature_names, BowSet, FeatureContext, FeatureVector, Lexicons, FEATURE_DIM};
use crate::lm::NgramModel;
use crate::metrics::{EvalReport, EvaluationReport, GroupResult};
use crate::scorer::{ModelGroup, Scorer};

/// File layout of a pipeline output directory.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub root: PathBuf,
}

impl Artifacts {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Artifacts { root: root.into() }
    }

    pub fn split(&self) -> PathBuf {
        self.root.join("split.json")
    }

    pub fn lm_dir(&self) -> PathBuf {
        self.root.join("lms")
    }

    pub fn lm_file(&self, set_id: &str, order: usize) -> PathBuf {
        self.lm_dir().join(format!("{set_id}.o{order}.lm"))
    }

    pub fn lm_texts(&self) -> PathBuf {
        self.root.join("lm_texts.json")
    }

    pub fn contexts(&self) -> PathBuf {
        self.root.join("contexts.json")
    }

    pub fn features(&self) -> PathBuf {
        self.root.join("features").join("features.jsonl")
    }

    pub fn features_tsv(&self) -> PathBuf {
        self.root.join("features").join("features.tsv")
    }

    pub fn models_dir(&self) -> PathBuf {
        self.root.join("models")
    }

    pub fn training_data(&self) -> PathBuf {
        self.root.join("training-data.json")
    }

    pub fn predictions(&self) -> PathBuf {
        self.root.join("predictions.jsonl")
    }

    pub fn report_text(&self) -> PathBuf {
        self.root.join("report.txt")
    }

    pub fn report_json(&self) -> PathBuf {
        self.root.join("report.json")
    }

    pub fn leakage(&self) -> PathBuf {
        self.root.join("leakage.json")
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join("run-manifest.json")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Eval,
}

impl SplitName {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::Train => "train",
            SplitName::Eval => "eval",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitFile {
    pub seed: u64,
    pub train_fraction: f64,
    pub train: Vec<String>,
    pub eval: Vec<String>,
    /// Training speakers per cross-fitting fold; empty when cross-fitting is off.
    pub folds: Vec<Vec<String>>,
}

impl SplitFile {
    pub fn fold_of(&self) -> BTreeMap<&str, usize> {
        self.folds.iter().enumerate().flat_map(|(k, f)| f.iter().map(move |s| (s.as_str(), k))).collect()
    }
}

/// Deal the training speakers into `k` folds after a seeded shuffle.
fn speaker_folds(split: &Split, k: usize, seed: u64) -> Vec<Vec<String>> {
    if k == 0 {
        return Vec::new();
    }
    let mut speakers: Vec<String> = split.train_speakers().into_iter().map(str::to_string).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf01d);
    speakers.shuffle(&mut rng);
    let mut folds = vec![Vec::new(); k];
    for (i, s) in speakers.into_iter().enumerate() {
        folds[i % k].push(s);
    }
    for f in &mut folds {
        f.sort();
    }
    folds
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetRef {
    pub slot: LmSet,
    pub source: LmSet,
    pub id: String,
}

/// LM collections and bag-of-words set used to featurize one question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionContext {
    /// Cross-fitting fold whose answers this context featurizes; `None` for
    /// the context built from the whole training split.
    pub fold: Option<usize>,
    pub key: QuestionKey,
    pub sets: Vec<SetRef>,
    pub bow_scope: LmSet,
    pub bow_quartile_fallback: bool,
    pub bow_utterance_ids: Vec<String>,
    pub bow: Vec<(String, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmTextRecord {
    pub id: String,
    pub n_sentences: usize,
    pub utterance_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub utterance_id: String,
    pub split: SplitName,
    pub question: QuestionKey,
    pub scores: Option<[u8; 6]>,
    pub checksum: String,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub group: GroupKey,
    pub indicator: Indicator,
    pub seed: u64,
    pub fingerprint: String,
    pub n_train: usize,
    pub utterance_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub utterance_id: String,
    pub split: SplitName,
    pub question: QuestionKey,
    pub predicted: [u8; 6],
    pub reference: Option<[u8; 6]>,
}

/// Eval-split utterances found in any training input; all counts of
/// `overlaps` must be zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub eval_utterances: usize,
    pub lm_text_utterances: usize,
    pub bow_utterances: usize,
    pub model_utterances: usize,
    pub overlaps: BTreeMap<String, Vec<String>>,
}

impl LeakageReport {
    pub fn is_clean(&self) -> bool {
        self.overlaps.values().all(Vec::is_empty)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Provenance of an output directory. Unlike every other artifact it holds
/// wall-clock timings and is therefore not byte-stable across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_hash: String,
    pub split_seed: u64,
    pub nn_seed: u64,
    pub inputs: Vec<InputDigest>,
    pub stages: Vec<StageTiming>,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> PipelineError + '_ {
    move |e| PipelineError::Io { path: path.to_path_buf(), message: e.to_string() }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    if !path.exists() {
        return Err(PipelineError::MissingArtifact(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Artifact { path: path.to_path_buf(), message: e.to_string() })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
    text.push('\n');
    Ok(write_bytes(path, text.as_bytes())?)
}

fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, PipelineError> {
    if !path.exists() {
        return Err(PipelineError::MissingArtifact(path.to_path_buf()));
    }
    Ok(read_jsonl(path)?)
}

pub fn sha256_file(path: &Path) -> Result<String, PipelineError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Seed of the network for one (group, indicator), derived from the base seed.
pub fn model_seed(base: u64, group: GroupKey, indicator: Indicator) -> u64 {
    let d = Sha256::digest(format!("{}/{}", group.slug(), indicator.name()).as_bytes());
    base ^ u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

fn in_utterance(id: &str) -> impl FnOnce(PipelineError) -> PipelineError + '_ {
    move |e| PipelineError::InUtterance { utterance_id: id.to_string(), source: Box::new(e) }
}

fn load_corpus(config: &PipelineConfig) -> Result<Vec<AnnotatedUtterance>, PipelineError> {
    Ok(read_corpus(&config.data.utterances)?)
}

fn load_split(config: &PipelineConfig, artifacts: &Artifacts) -> Result<(Split, SplitFile), PipelineError> {
    let corpus = load_corpus(config)?;
    let file: SplitFile = read_json(&artifacts.split())?;
    let train: BTreeSet<&str> = file.train.iter().map(String::as_str).collect();
    let eval: BTreeSet<&str> = file.eval.iter().map(String::as_str).collect();
    let known: BTreeSet<&str> = corpus.iter().map(|u| u.utterance_id.as_str()).collect();
    if train.len() + eval.len() != known.len() || train.iter().chain(&eval).any(|id| !known.contains(id)) {
        return Err(PipelineError::IdMismatch(format!(
            "{} does not match the corpus; rerun ingest",
            artifacts.split().display()
        )));
    }
    let (train, eval) = corpus.into_iter().partition(|u| train.contains(u.utterance_id.as_str()));
    Ok((Split { train, eval }, file))
}

fn load_alignments(config: &PipelineConfig) -> Result<Option<AlignmentIndex>, PipelineError> {
    match &config.data.alignments {
        Some(p) => Ok(Some(read_alignments(p)?)),
        None => Ok(None),
    }
}

/// Validate the inputs and write the speaker-disjoint split.
pub fn ingest(config: &PipelineConfig) -> Result<Split, PipelineError> {
    config.validate()?;
    let artifacts = Artifacts::new(&config.output_dir);
    let corpus = load_corpus(config)?;
    if let Some(index) = load_alignments(config)? {
        log::info!("{} alignments", index.len());
    }
    let split = split_by_speaker(&corpus, config.split.train_fraction, config.split.seed)?;
    log::info!(
        "{} utterances: {} train ({} speakers), {} eval ({} speakers)",
        corpus.len(),
        split.train.len(),
        split.train_speakers().len(),
        split.eval.len(),
        split.eval_speakers().len()
    );
    let file = SplitFile {
        seed: config.split.seed,
        train_fraction: config.split.train_fraction,
        train: split.train.iter().map(|u| u.utterance_id.clone()).collect(),
        eval: split.eval.iter().map(|u| u.utterance_id.clone()).collect(),
        folds: speaker_folds(&split, config.features.cross_fit_folds, config.split.seed),
    };
    write_json(&artifacts.split(), &file)?;
    Ok(split)
}

fn out_of_domain_text(config: &PipelineConfig, language: Language) -> Result<Vec<String>, PipelineError> {
    let Some(path) = config.data.ood_for(language) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        match parse_transcription(line, language) {
            Ok(t) if !t.tokens.is_empty() => out.push(t.text()),
            Ok(_) => {}
            Err(e) => log::warn!("{}:{}: skipped: {e}", path.display(), i + 1),
        }
    }
    Ok(out)
}

/// Train the LMs of every question context and build the bag-of-words sets.
///
/// Contexts built from the whole training split serve the eval split. With
/// cross-fitting on, each training fold gets its own contexts, built from
/// the other folds only, so that training answers are featurized the same
/// way as unseen ones.
pub fn train_lms(config: &PipelineConfig) -> Result<usize, PipelineError> {
    config.validate()?;
    let artifacts = Artifacts::new(&config.output_dir);
    let (split, split_file) = load_split(config, &artifacts)?;
    let lexicons = Lexicons::load(&config.lexicons)?;
    let all_keys: BTreeSet<QuestionKey> = split.train.iter().chain(&split.eval).map(|u| u.question.clone()).collect();
    let mut ood: BTreeMap<Language, Vec<String>> = BTreeMap::new();
    for lang in all_keys.iter().map(|k| k.language).collect::<BTreeSet<_>>() {
        ood.insert(lang, out_of_domain_text(config, lang)?);
    }

    let mut jobs: Vec<(Option<usize>, Vec<AnnotatedUtterance>, BTreeSet<QuestionKey>)> =
        vec![(None, split.train.clone(), all_keys)];
    let fold_of = split_file.fold_of();
    for k in 0..split_file.folds.len() {
        let (held_out, rest): (Vec<_>, Vec<_>) =
            split.train.iter().cloned().partition(|u| fold_of.get(u.speaker_id.as_str()) == Some(&k));
        let keys = held_out.iter().map(|u| u.question.clone()).collect();
        jobs.push((Some(k), rest, keys));
    }

    let mut texts: BTreeMap<String, LmTextRecord> = BTreeMap::new();
    let mut contexts = Vec::new();
    for (fold, train, keys) in &jobs {
        let prefix = fold.map(|k| format!("f{k}.")).unwrap_or_default();
        for key in keys {
            let sets = build_lm_training_sets(train, key, &ood[&key.language])?;
            if fold.is_none() {
                for (slot, source) in sets.fallbacks() {
                    log::info!("{key}: LM set {slot} falls back to {source}");
                }
            }
            let mut refs = Vec::with_capacity(5);
            for set in &sets.sets {
                let id = format!("{prefix}{}", set.id);
                if !texts.contains_key(&id) {
                    for &order in &config.lm.orders {
                        let model = NgramModel::train(&set.sentences, order)?;
                        write_bytes(&artifacts.lm_file(&id, order), model.to_text().as_bytes())?;
                    }
                    texts.insert(
                        id.clone(),
                        LmTextRecord {
                            id: id.clone(),
                            n_sentences: set.sentences.len(),
                            utterance_ids: set.utterance_ids.clone(),
                        },
                    );
                }
                refs.push(SetRef { slot: set.slot, source: set.source, id });
            }
            let best = select_best_answers_with_fallback(train, key)?;
            if fold.is_none() && best.scope != LmSet::Question {
                log::info!("{key}: best answers taken from the {} scope", best.scope);
            }
            let bow = BowSet::build(&best.texts, key.language, &lexicons, config.features.bow_size);
            contexts.push(QuestionContext {
                fold: *fold,
                key: key.clone(),
                sets: refs,
                bow_scope: best.scope,
                bow_quartile_fallback: best.quartile_fallback,
                bow_utterance_ids: best.utterance_ids,
                bow: bow.words,
            });
        }
    }
    write_json(&artifacts.lm_texts(), &texts.into_values().collect::<Vec<_>>())?;
    write_json(&artifacts.contexts(), &contexts)?;
    Ok(contexts.len())
}

fn load_lms(artifacts: &Artifacts, contexts: &[QuestionContext], orders: &[usize]) -> Result<BTreeMap<(String, usize), NgramModel>, PipelineError> {
    let mut lms = BTreeMap::new();
    for set in contexts.iter().flat_map(|c| &c.sets) {
        for &order in orders {
            let k = (set.id.clone(), order);
            if lms.contains_key(&k) {
                continue;
            }
            let path = artifacts.lm_file(&set.id, order);
            if !path.exists() {
                return Err(PipelineError::MissingArtifact(path));
            }
            let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
            lms.insert(k, NgramModel::from_text(&text)?);
        }
    }
    Ok(lms)
}

/// Compute the feature vector of every utterance.
pub fn extract(config: &PipelineConfig) -> Result<usize, PipelineError> {
    config.validate()?;
    let artifacts = Artifacts::new(&config.output_dir);
    let (split, split_file) = load_split(config, &artifacts)?;
    let fold_of = split_file.fold_of();
    let lexicons = Lexicons::load(&config.lexicons)?;
    let alignments = load_alignments(config)?;
    let contexts: Vec<QuestionContext> = read_json(&artifacts.contexts())?;
    let lms = load_lms(&artifacts, &contexts, &config.lm.orders)?;
    let bows: BTreeMap<(Option<usize>, &QuestionKey), BowSet> =
        contexts.iter().map(|c| ((c.fold, &c.key), BowSet::from_words(c.bow.clone()))).collect();
    let by_key: BTreeMap<(Option<usize>, &QuestionKey), &QuestionContext> =
        contexts.iter().map(|c| ((c.fold, &c.key), c)).collect();
    let options = config.features.options();

    let mut records = Vec::with_capacity(split.train.len() + split.eval.len());
    let tagged = split.train.iter().map(|u| (SplitName::Train, u)).chain(split.eval.iter().map(|u| (SplitName::Eval, u)));
    for (name, u) in tagged {
        let fold = match name {
            SplitName::Train => fold_of.get(u.speaker_id.as_str()).copied(),
            SplitName::Eval => None,
        };
        let ctx = by_key.get(&(fold, &u.question)).ok_or_else(|| {
            in_utterance(&u.utterance_id)(PipelineError::MissingArtifact(artifacts.contexts()))
        })?;
        let mut models = Vec::with_capacity(20);
        for set in &ctx.sets {
            for &order in &config.lm.orders {
                models.push(&lms[&(set.id.clone(), order)]);
            }
        }
        let fc = FeatureContext { lms: models, lexicons: &lexicons, bow: &bows[&(fold, &u.question)], options };
        let transcript = parse_transcription(&u.raw_text, u.question.language)
            .map_err(|e| in_utterance(&u.utterance_id)(e.into()))?;
        let pair = alignments.as_ref().and_then(|index| {
            let best = index.get(&u.utterance_id, AlignmentSystem::NonNativeBest);
            let native = index.get(&u.utterance_id, AlignmentSystem::native_for(u.question.language));
            match (best, native) {
                (Some(b), Some(n)) => Some((b, n)),
                _ => None,
            }
        });
        if pair.is_none() {
            log::warn!("{}: alignment missing, pronunciation features are zero", u.utterance_id);
        }
        let features = fc.extract(&transcript, pair).map_err(|e| in_utterance(&u.utterance_id)(e.into()))?;
        records.push(FeatureRecord {
            utterance_id: u.utterance_id.clone(),
            split: name,
            question: u.question.clone(),
            scores: u.scores.map(|s| s.as_array()),
            checksum: features.checksum(),
            features,
        });
    }
    write_jsonl(&artifacts.features(), &records)?;

    let mut tsv = String::from("utterance_id\tsplit");
    for n in feature_names() {
        tsv.push('\t');
        tsv.push_str(&n);
    }
    tsv.push('\n');
    for r in &records {
        let _ = write!(tsv, "{}\t{}", r.utterance_id, r.split.as_str());
        for v in r.features.as_slice() {
            let _ = write!(tsv, "\t{v}");
        }
        tsv.push('\n');
    }
    write_bytes(&artifacts.features_tsv(), tsv.as_bytes())?;
    Ok(records.len())
}

/// Train six classifiers per (language, level, session) on the training split.
pub fn train(config: &PipelineConfig) -> Result<usize, PipelineError> {
    config.validate()?;
    let artifacts = Artifacts::new(&config.output_dir);
    let records: Vec<FeatureRecord> = read_records(&artifacts.features())?;
    let mut groups: BTreeMap<GroupKey, Vec<(&FeatureRecord, [u8; 6])>> = BTreeMap::new();
    for r in &records {
        if let (SplitName::Train, Some(scores)) = (r.split, r.scores) {
            groups.entry(r.question.group()).or_default().push((r, scores));
        }
    }
    let mut models = ModelGroup::default();
    let mut training = Vec::new();
    for (group, rows) in &groups {
        let x: Vec<&[f64]> = rows.iter().map(|(r, _)| r.features.as_slice()).collect();
        let ids: Vec<&str> = rows.iter().map(|(r, _)| r.utterance_id.as_str()).collect();
        for indicator in Indicator::ALL {
            let labels: Vec<usize> = rows.iter().map(|(_, s)| usize::from(s[indicator.index()])).collect();
            let seed = model_seed(config.nn.seed, *group, indicator);
            let started = Instant::now();
            let scorer = Scorer::fit(&x, &labels, &ids, seed, config.nn.learning_rate, config.nn.train_config())?;
            log::info!(
                "{} {indicator}: {} samples, final loss {:.4} ({:.1}s)",
                group.slug(),
                rows.len(),
                scorer.loss_curve.last().copied().unwrap_or(f64::NAN),
                started.elapsed().as_secs_f64()
            );
            training.push(TrainingRecord {
                group: *group,
                indicator,
                seed,
                fingerprint: scorer.fingerprint.clone(),
                n_train: rows.len(),
                utterance_ids: ids.iter().map(|s| s.to_string()).collect(),
            });
            models.insert(*group, indicator, scorer);
        }
    }
    let dir = artifacts.models_dir();
    if dir.exists() {
        std::fs::remove_dir_all(&dir).map_err(io_err(&dir))?;
    }
    models.save_dir(&dir)?;
    write_json(&artifacts.training_data(), &training)?;
    Ok(models.len())
}

/// Predict all six indicators for every utterance with a trained group.
pub fn score(config: &PipelineConfig) -> Result<usize, PipelineError> {
    let artifacts = Artifacts::new(&config.output_dir);
    let records: Vec<FeatureRecord> = read_records(&artifacts.features())?;
    let dir = artifacts.models_dir();
    if !dir.exists() {
        return Err(PipelineError::MissingArtifact(dir));
    }
    let models = ModelGroup::load_dir(&dir, Some(FEATURE_DIM))?;
    let mut out = Vec::with_capacity(records.len());
    let mut missing: BTreeSet<GroupKey> = BTreeSet::new();
    for r in &records {
        let group = r.question.group();
        let mut predicted = [0u8; 6];
        let mut complete = true;
        for indicator in Indicator::ALL {
            match models.get(group, indicator) {
                Some(m) => {
                    predicted[indicator.index()] =
                        m.predict_vector(&r.features).map_err(|e| in_utterance(&r.utterance_id)(e.into()))?
                }
                None => complete = false,
            }
        }
        if !complete {
            if missing.insert(group) {
                log::warn!("no trained models for {}; its utterances are not scored", group.slug());
            }
            continue;
        }
        out.push(PredictionRecord {
            utterance_id: r.utterance_id.clone(),
            split: r.split,
            question: r.question.clone(),
            predicted,
            reference: r.scores,
        });
    }
    write_jsonl(&artifacts.predictions(), &out)?;
    Ok(out.len())
}

/// Compare every input that fed training (LM texts, best answers, network
/// data) with the eval split.
pub fn check_leakage(artifacts: &Artifacts) -> Result<LeakageReport, PipelineError> {
    let split: SplitFile = read_json(&artifacts.split())?;
    let eval: BTreeSet<&str> = split.eval.iter().map(String::as_str).collect();
    let texts: Vec<LmTextRecord> = read_json(&artifacts.lm_texts())?;
    let contexts: Vec<QuestionContext> = read_json(&artifacts.contexts())?;
    let training: Vec<TrainingRecord> = read_json(&artifacts.training_data())?;

    let lm_ids: BTreeSet<&str> = texts.iter().flat_map(|t| &t.utterance_ids).map(String::as_str).collect();
    let bow_ids: BTreeSet<&str> = contexts.iter().flat_map(|c| &c.bow_utterance_ids).map(String::as_str).collect();
    let nn_ids: BTreeSet<&str> = training.iter().flat_map(|t| &t.utterance_ids).map(String::as_str).collect();
    let overlap = |ids: &BTreeSet<&str>| ids.intersection(&eval).map(|s| s.to_string()).collect::<Vec<_>>();
    let mut overlaps = BTreeMap::new();
    overlaps.insert("lm_texts".to_string(), overlap(&lm_ids));
    overlaps.insert("bow".to_string(), overlap(&bow_ids));
    overlaps.insert("models".to_string(), overlap(&nn_ids));
    Ok(LeakageReport {
        eval_utterances: eval.len(),
        lm_text_utterances: lm_ids.len(),
        bow_utterances: bow_ids.len(),
        model_utterances: nn_ids.len(),
        overlaps,
    })
}

/// Reference and predicted scores per (split, group, indicator).
type ScorePairs = BTreeMap<(SplitName, GroupKey, Indicator), (Vec<u8>, Vec<u8>)>;

/// Per-group and per-language results on both splits, plus the leakage check.
pub fn evaluate(config: &PipelineConfig) -> Result<EvaluationReport, PipelineError> {
    let artifacts = Artifacts::new(&config.output_dir);
    let predictions: Vec<PredictionRecord> = read_records(&artifacts.predictions())?;
    let mut pairs: ScorePairs = BTreeMap::new();
    for p in &predictions {
        let Some(reference) = p.reference else { continue };
        for indicator in Indicator::ALL {
            let e = pairs.entry((p.split, p.question.group(), indicator)).or_default();
            e.0.push(reference[indicator.index()]);
            e.1.push(p.predicted[indicator.index()]);
        }
    }
    let mut results = Vec::with_capacity(pairs.len());
    for ((split, group, indicator), (refs, hyps)) in pairs {
        results.push(GroupResult {
            group,
            indicator,
            split: split.as_str().to_string(),
            report: EvalReport::from_pairs(&refs, &hyps)?,
        });
    }
    let report = EvaluationReport::new(results);
    write_bytes(&artifacts.report_text(), report.to_text().as_bytes())?;
    write_bytes(&artifacts.report_json(), report.to_json().as_bytes())?;

    let leakage = check_leakage(&artifacts)?;
    write_json(&artifacts.leakage(), &leakage)?;
    if !leakage.is_clean() {
        return Err(PipelineError::Leakage(format!("{:?}", leakage.overlaps)));
    }
    Ok(report)
}

/// Record timing and input digests of a finished stage in the run manifest.
pub fn record_stage(config: &PipelineConfig, stage: &str, seconds: f64) -> Result<(), PipelineError> {
    let artifacts = Artifacts::new(&config.output_dir);
    let mut manifest = read_json::<RunManifest>(&artifacts.manifest()).ok().unwrap_or_else(|| RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: String::new(),
        split_seed: 0,
        nn_seed: 0,
        inputs: Vec::new(),
        stages: Vec::new(),
    });
    manifest.config_hash = config.hash();
    manifest.split_seed = config.split.seed;
    manifest.nn_seed = config.nn.seed;
    manifest.inputs = config
        .input_paths()
        .into_iter()
        .map(|p| Ok(InputDigest { path: p.to_path_buf(), sha256: sha256_file(p)? }))
        .collect::<Result<_, PipelineError>>()?;
    manifest.stages.retain(|s| s.stage != stage);
    manifest.stages.push(StageTiming { stage: stage.to_string(), seconds });
    write_json(&artifacts.manifest(), &manifest)
}

/// Output of [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub artifacts: Artifacts,
    pub report: EvaluationReport,
    pub leakage: LeakageReport,
}

/// Run every stage in order.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    config.validate()?;
    let artifacts = Artifacts::new(&config.output_dir);
    let timed = |name: &str, f: &dyn Fn() -> Result<(), PipelineError>| -> Result<(), PipelineError> {
        let t = Instant::now();
        f()?;
        record_stage(config, name, t.elapsed().as_secs_f64())
    };
    timed("ingest", &|| ingest(config).map(|_| ()))?;
    timed("train-lms", &|| train_lms(config).map(|_| ()))?;
    timed("extract", &|| extract(config).map(|_| ()))?;
    timed("train", &|| train(config).map(|_| ()))?;
    timed("score", &|| score(config).map(|_| ()))?;
    let t = Instant::now();
    let report = evaluate(config)?;
    record_stage(config, "evaluate", t.elapsed().as_secs_f64())?;
    let leakage = check_leakage(&artifacts)?;
    Ok(RunSummary { artifacts, report, leakage })
}
