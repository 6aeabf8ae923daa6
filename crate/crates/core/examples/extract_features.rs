//! Extract the 116-entry feature vector of one answer.
//!
//! LM, bag-of-words and lexicon inputs come from a small synthetic corpus;
//! the answer is taken from the eval side of a speaker split.

use l2grade::corpus::{
    build_lm_training_sets, parse_transcription, select_best_answers_with_fallback, split_by_speaker, AlignmentSystem,
};
use l2grade::features::{feature_names, BowSet, FeatureContext, FeatureOptions, DEFAULT_BOW_SIZE, FEATURE_DIM};
use l2grade::lm::NgramModel;
use l2grade::pipeline::{generate_synthetic, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec { speakers_per_level: 12, ood_sentences: 50, ..SyntheticSpec::default() };
    let corpus = generate_synthetic(&spec)?;
    let lexicons = corpus.lexicons();
    let split = split_by_speaker(&corpus.utterances, 2.0 / 3.0, 1)?;
    let answer = &split.eval[0];
    let key = &answer.question;

    let sets = build_lm_training_sets(&split.train, key, &corpus.out_of_domain[&key.language])?;
    let mut models = Vec::new();
    for set in &sets.sets {
        for order in 1..=4 {
            models.push(NgramModel::train(&set.sentences, order)?);
        }
    }
    let best = select_best_answers_with_fallback(&split.train, key)?;
    let bow = BowSet::build(&best.texts, key.language, &lexicons, DEFAULT_BOW_SIZE);
    let ctx = FeatureContext { lms: models.iter().collect(), lexicons: &lexicons, bow: &bow, options: FeatureOptions::default() };

    let find = |system| corpus.alignments.iter().find(|a| a.utterance_id == answer.utterance_id && a.system == system);
    let pair = find(AlignmentSystem::NonNativeBest).zip(find(AlignmentSystem::native_for(key.language)));
    let transcript = parse_transcription(&answer.raw_text, key.language)?;
    let v = ctx.extract(&transcript, pair)?;

    println!("{}: {}", answer.utterance_id, answer.raw_text);
    println!("expert scores: {:?}\n", answer.scores.map(|s| s.as_array()));
    assert_eq!(v.as_slice().len(), FEATURE_DIM);
    for (i, (name, value)) in feature_names().iter().zip(v.as_slice()).enumerate() {
        // the LM block is long; show its first and last set only
        if (20..80).contains(&i) {
            continue;
        }
        println!("{i:>3} {name:<28} {value:>10.4}");
    }
    println!("\nchecksum {}", v.checksum());
    Ok(())
}
