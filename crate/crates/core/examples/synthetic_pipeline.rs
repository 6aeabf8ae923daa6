//! Generate a synthetic corpus and run the whole pipeline on it.
//!
//! ```text
//! cargo run --release --example synthetic_pipeline -- /tmp/l2grade-demo
//! ```

use std::path::PathBuf;
use std::time::Instant;

use l2grade::pipeline::{generate_synthetic, run_pipeline, write_synthetic, PipelineConfig, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("l2grade-demo"));

    let corpus = generate_synthetic(&SyntheticSpec::default())?;
    println!("generated {} utterances", corpus.utterances.len());
    let config_path = write_synthetic(&corpus, &dir)?;

    let started = Instant::now();
    let config = PipelineConfig::load(&config_path)?;
    let summary = run_pipeline(&config)?;
    println!("{}", summary.report.to_text());
    println!("leakage check clean: {}", summary.leakage.is_clean());
    println!("artifacts in {} ({:.1}s)", summary.artifacts.root.display(), started.elapsed().as_secs_f64());
    Ok(())
}
