//! Train Witten-Bell n-gram models of orders 1 to 4 and score a sentence.
//!
//! Prints the per-sentence accounting and the five LM features derived from it.

use l2grade::features::{lm_feature_block, LmFeatureOptions};
use l2grade::lm::NgramModel;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = [
        "i like to play football with my friends",
        "i like to read books",
        "my friends like to play tennis",
        "i play football on sunday",
        "my sister likes to read",
    ];
    let sentence: Vec<&str> = "i like to play chess with my sister".split(' ').collect();
    println!("sentence: {}\n", sentence.join(" "));
    println!("order   log P  log P_oov  N_W  N_oov  N_bo | features a..e");
    for order in 1..=4 {
        let lm = NgramModel::train(&text, order)?;
        let s = lm.score_sentence(&sentence);
        let f = lm_feature_block(&s, LmFeatureOptions::default());
        println!(
            "{order:>5} {:>7.3} {:>10.3} {:>4} {:>6} {:>5} | {:.3} {:.3} {:.3} {:.3} {:.3}",
            s.log_p, s.log_p_oov, s.n_w, s.n_oov, s.n_bo, f[0], f[1], f[2], f[3], f[4]
        );
    }

    let lm = NgramModel::train(&text, 3)?;
    let context = ["like", "to"];
    println!("\nP(w | like to) under the trigram model:");
    for w in ["play", "read", "football", "chess"] {
        println!("  {w:<9} {:.4}", lm.prob(w, &context)?);
    }
    Ok(())
}
