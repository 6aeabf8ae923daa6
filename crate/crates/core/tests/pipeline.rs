use std::collections::BTreeMap;
use std::process::Command;

use l2grade::corpus::Indicator;
use l2grade::pipeline::{
    generate_synthetic, run_pipeline, write_synthetic, Artifacts, PipelineConfig, SyntheticSpec, TrainingRecord,
};
use l2grade::scorer::ModelGroup;

fn small_run(dir: &std::path::Path) -> (PipelineConfig, l2grade::pipeline::RunSummary) {
    let spec = SyntheticSpec { speakers_per_level: 24, ood_sentences: 60, ..SyntheticSpec::default() };
    let path = write_synthetic(&generate_synthetic(&spec).unwrap(), dir).unwrap();
    let mut config = PipelineConfig::load(&path).unwrap();
    config.nn.epochs = 10;
    let summary = run_pipeline(&config).unwrap();
    (config, summary)
}

#[test]
fn artifact_structure() {
    let dir = tempfile::tempdir().unwrap();
    let (config, summary) = small_run(dir.path());
    let artifacts = Artifacts::new(&config.output_dir);

    let mut per_group: BTreeMap<String, usize> = BTreeMap::new();
    for entry in std::fs::read_dir(artifacts.models_dir()).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        *per_group.entry(name.split('.').next().unwrap().to_string()).or_default() += 1;
    }
    assert_eq!(per_group.len(), 4);
    assert!(per_group.values().all(|&n| n == 6), "{per_group:?}");
    let models = ModelGroup::load_dir(&artifacts.models_dir(), Some(116)).unwrap();
    assert_eq!(models.len(), 24);

    // 4 groups x 3 questions x 5 sets x 4 orders on the full training split,
    // plus the cross-fitting folds
    let n_lm_files = std::fs::read_dir(artifacts.lm_dir()).unwrap().count();
    assert!(n_lm_files.is_multiple_of(4) && n_lm_files >= 4 * 2, "{n_lm_files}");

    for split in ["train", "eval"] {
        for indicator in Indicator::ALL {
            assert!(summary.report.results.iter().any(|r| r.split == split && r.indicator == indicator));
        }
    }
    let text = std::fs::read_to_string(artifacts.report_text()).unwrap();
    assert!(text.contains("CC") && text.contains("WK") && text.contains("Corr"));
    assert!(summary.leakage.is_clean());

    let training: Vec<TrainingRecord> =
        serde_json::from_str(&std::fs::read_to_string(artifacts.training_data()).unwrap()).unwrap();
    assert_eq!(training.len(), 24);
    for t in &training {
        let model = models.get(t.group, t.indicator).unwrap();
        assert_eq!(model.fingerprint, t.fingerprint);
        assert_eq!(model.n_train, t.utterance_ids.len());
    }
    assert!(artifacts.manifest().is_file());
}

#[test]
fn cli_stages_and_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_l2grade");
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(bin)
        .args(["synth", "--speakers-per-level", "12", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let config = dir.path().join("pipeline.toml");
    for stage in ["ingest", "train-lms", "extract", "train", "score", "evaluate"] {
        let out = Command::new(bin).arg(stage).arg("--config").arg(&config).args(["--epochs", "3"]).output().unwrap();
        assert!(out.status.success(), "{stage}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert!(dir.path().join("out/report.txt").is_file());

    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    let cfg = config.to_str().unwrap();
    assert_eq!(code(&["ingest", "--config", cfg, "--train-fraction", "1.5"]), Some(1));
    assert_eq!(code(&["ingest", "--config", "/does/not/exist.toml"]), Some(1));
    assert_eq!(code(&["frobnicate"]), Some(1));

    // a corrupt corpus file is a data error
    std::fs::write(dir.path().join("corpus.jsonl"), "{not json\n").unwrap();
    assert_eq!(code(&["ingest", "--config", cfg]), Some(2));
    // later stages without their inputs are data errors too
    std::fs::remove_file(dir.path().join("out/contexts.json")).unwrap();
    assert_eq!(code(&["extract", "--config", cfg]), Some(2));

    let (a, b) = (dir.path().join("a.tsv"), dir.path().join("b.tsv"));
    std::fs::write(&a, "u1\tone two three four\n").unwrap();
    std::fs::write(&b, "u1\tone two tree four\n").unwrap();
    let out = Command::new(bin).arg("agreement").arg(&a).arg(&b).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("75.00%"));
}
