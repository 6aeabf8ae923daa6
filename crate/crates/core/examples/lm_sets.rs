//! Speaker-disjoint split and the five nested LM training collections.
//!
//! Builds a small synthetic corpus, splits it by speaker and assembles
//! collections (a) out-of-domain to (e) same question for one question,
//! along with the best-answer set used for the bag-of-words features.

use l2grade::corpus::{build_lm_training_sets, select_best_answers_with_fallback, split_by_speaker};
use l2grade::pipeline::{generate_synthetic, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec { speakers_per_level: 12, ood_sentences: 50, ..SyntheticSpec::default() };
    let corpus = generate_synthetic(&spec)?;
    let split = split_by_speaker(&corpus.utterances, 2.0 / 3.0, 1)?;
    println!(
        "{} utterances: {} train ({} speakers), {} eval ({} speakers)",
        corpus.utterances.len(),
        split.train.len(),
        split.train_speakers().len(),
        split.eval.len(),
        split.eval_speakers().len()
    );
    assert!(split.train_speakers().is_disjoint(&split.eval_speakers()));

    let key = &split.eval[0].question;
    let ood = &corpus.out_of_domain[&key.language];
    let sets = build_lm_training_sets(&split.train, key, ood)?;
    println!("\ncollections for {key}:");
    for set in &sets.sets {
        println!("  {:<14} {:>4} sentences  id {}", set.slot.to_string(), set.sentences.len(), set.id);
    }
    println!("fallbacks: {:?}", sets.fallbacks());

    let best = select_best_answers_with_fallback(&split.train, key)?;
    println!(
        "\nbest answers: {} from scope {}{}",
        best.texts.len(),
        best.scope,
        if best.quartile_fallback { " (top quartile, no perfect total)" } else { "" }
    );
    for t in best.texts.iter().take(3) {
        println!("  {t}");
    }
    Ok(())
}
