use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use l2grade::pipeline::{self, PipelineConfig, PipelineError, SyntheticSpec};

#[derive(Parser)]
#[command(name = "l2grade", version, about = "Grade spoken L2 answers from transcriptions and phone alignments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate inputs and write the speaker-disjoint split.
    Ingest(StageArgs),
    /// Train the n-gram LMs and bag-of-words sets of every question.
    TrainLms(StageArgs),
    /// Write one 116-entry feature vector per utterance.
    Extract(StageArgs),
    /// Train six classifiers per (language, level, session).
    Train(StageArgs),
    /// Predict scores for both splits.
    Score(StageArgs),
    /// Write the CC/WK/Corr report and check for leakage.
    Evaluate(StageArgs),
    /// Run every stage in order.
    Run(StageArgs),
    /// Word accuracy of one transcription file against another.
    Agreement {
        /// Reference transcriptions, `utterance_id<TAB>text` per line.
        reference: PathBuf,
        /// Transcriptions to compare, same ids in the same order.
        other: PathBuf,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Generate a synthetic corpus with planted score rules.
    Synth {
        /// Directory for the corpus, lexicons and a ready pipeline.toml.
        #[arg(long)]
        out: PathBuf,
        /// JSON file with a synthetic spec; flags below override it.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        speakers_per_level: Option<usize>,
        #[arg(long)]
        label_noise: Option<f64>,
        #[arg(long)]
        signal_strength: Option<f64>,
    },
}

#[derive(Args)]
struct StageArgs {
    /// Pipeline config, TOML or `.json`.
    #[arg(long, short)]
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    bow_size: Option<usize>,
    #[arg(long)]
    cross_fit_folds: Option<usize>,
    #[arg(long)]
    nn_seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
}

impl StageArgs {
    fn load(&self) -> Result<PipelineConfig, PipelineError> {
        let mut c = PipelineConfig::load(&self.config)?;
        if let Some(v) = &self.output_dir {
            c.output_dir = v.clone();
        }
        if let Some(v) = self.split_seed {
            c.split.seed = v;
        }
        if let Some(v) = self.train_fraction {
            c.split.train_fraction = v;
        }
        if let Some(v) = self.bow_size {
            c.features.bow_size = v;
        }
        if let Some(v) = self.cross_fit_folds {
            c.features.cross_fit_folds = v;
        }
        if let Some(v) = self.nn_seed {
            c.nn.seed = v;
        }
        if let Some(v) = self.epochs {
            c.nn.epochs = v;
        }
        if let Some(v) = self.batch_size {
            c.nn.batch_size = v;
        }
        if let Some(v) = self.learning_rate {
            c.nn.learning_rate = v;
        }
        c.validate()?;
        Ok(c)
    }
}

fn stage<T>(
    args: &StageArgs,
    name: &str,
    f: impl FnOnce(&PipelineConfig) -> Result<T, PipelineError>,
) -> Result<(PipelineConfig, T), PipelineError> {
    let config = args.load()?;
    let t = Instant::now();
    let out = f(&config)?;
    pipeline::record_stage(&config, name, t.elapsed().as_secs_f64())?;
    Ok((config, out))
}

fn run(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Ingest(a) => {
            let (c, split) = stage(&a, "ingest", pipeline::ingest)?;
            println!("{} train / {} eval utterances -> {}", split.train.len(), split.eval.len(), c.output_dir.display());
        }
        Command::TrainLms(a) => {
            let (_, n) = stage(&a, "train-lms", pipeline::train_lms)?;
            println!("{n} question contexts");
        }
        Command::Extract(a) => {
            let (_, n) = stage(&a, "extract", pipeline::extract)?;
            println!("{n} feature vectors");
        }
        Command::Train(a) => {
            let (_, n) = stage(&a, "train", pipeline::train)?;
            println!("{n} models");
        }
        Command::Score(a) => {
            let (_, n) = stage(&a, "score", pipeline::score)?;
            println!("{n} utterances scored");
        }
        Command::Evaluate(a) => {
            let (_, report) = stage(&a, "evaluate", pipeline::evaluate)?;
            print!("{}", report.to_text());
        }
        Command::Run(a) => {
            let config = a.load()?;
            let summary = pipeline::run_pipeline(&config)?;
            print!("{}", summary.report.to_text());
            println!("\nleakage check clean: {}", summary.leakage.is_clean());
        }
        Command::Agreement { reference, other, json } => {
            let table = pipeline::cmd_agreement(&reference, &other)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&table).expect("table serializes"));
            } else {
                print!("{}", table.to_text());
            }
        }
        Command::Synth { out, spec, seed, speakers_per_level, label_noise, signal_strength } => {
            let mut s = match spec {
                Some(p) => {
                    let text = std::fs::read_to_string(&p)
                        .map_err(|e| PipelineError::ConfigInvalid(format!("{}: {e}", p.display())))?;
                    serde_json::from_str(&text).map_err(|e| PipelineError::ConfigInvalid(format!("{}: {e}", p.display())))?
                }
                None => SyntheticSpec::default(),
            };
            s.seed = seed.unwrap_or(s.seed);
            s.speakers_per_level = speakers_per_level.unwrap_or(s.speakers_per_level);
            s.label_noise = label_noise.unwrap_or(s.label_noise);
            s.signal_strength = signal_strength.unwrap_or(s.signal_strength);
            let corpus = pipeline::generate_synthetic(&s)?;
            let config = pipeline::write_synthetic(&corpus, &out)?;
            println!("{} utterances; config at {}", corpus.utterances.len(), config.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
