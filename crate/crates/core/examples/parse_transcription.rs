//! Parse marked-up transcriptions and show what each marker turns into.
//!
//! Usage: `cargo run --example parse_transcription [-- "<transcription>"]`

use l2grade::corpus::{parse_transcription, Language};

fn main() {
    let inputs: Vec<String> = match std::env::args().nth(1) {
        Some(text) => vec![text],
        None => vec![
            "I am 10 years old @it(io ho già risposto)".into(),
            "Well, (I think) @hes my #favourite sport is ehm football. @voices".into(),
            "Ich wohne in @en(the city) mit meiner Familie".into(),
            "unbalanced (span".into(),
        ],
    };
    for raw in &inputs {
        println!("{raw}");
        match parse_transcription(raw, Language::English) {
            Ok(t) => {
                for tok in &t.tokens {
                    let mut flags = Vec::new();
                    if tok.flags.hesitation {
                        flags.push("hesitation");
                    }
                    if tok.flags.whispered {
                        flags.push("whispered");
                    }
                    if tok.flags.badly_pronounced {
                        flags.push("badly pronounced");
                    }
                    println!("  {:<12} {:<8?} {}", tok.surface, tok.source_language, flags.join(", "));
                }
                println!("  noise labels: {:?}", t.noise_labels);
                println!("  LM text:      {}", t.text());
                println!("  for WA:       {}", t.words_without_hesitations().join(" "));
            }
            Err(e) => println!("  error: {e}"),
        }
        println!();
    }
}
