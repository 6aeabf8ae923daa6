//! Train one score classifier on toy data, evaluate it and round-trip the
//! model file.

use l2grade::metrics::EvalReport;
use l2grade::scorer::{Scorer, TrainConfig, DEFAULT_LEARNING_RATE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blobs(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [[-2.0, 0.0], [0.0, 2.0], [2.0, 0.0]];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let c = i % 3;
        let mut row: Vec<f64> = centers[c].iter().map(|m| m + rng.gen_range(-0.8..0.8)).collect();
        row.extend((0..6).map(|_| rng.gen_range(-1.0..1.0)));
        rows.push(row);
        labels.push(c);
    }
    (rows, labels)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (train_x, train_y) = blobs(300, 1);
    let (test_x, test_y) = blobs(150, 2);
    let ids: Vec<String> = (0..train_x.len()).map(|i| format!("u{i}")).collect();
    let rows: Vec<&[f64]> = train_x.iter().map(Vec::as_slice).collect();
    let config = TrainConfig { epochs: 50, batch_size: 32 };
    let scorer = Scorer::fit(&rows, &train_y, &ids, 7, DEFAULT_LEARNING_RATE, config)?;
    let curve = &scorer.loss_curve;
    println!("loss: epoch 1 {:.4}, epoch {} {:.4}", curve[0], curve.len(), curve[curve.len() - 1]);

    let predicted: Vec<u8> = test_x.iter().map(|x| scorer.predict(x).map(|c| c as u8)).collect::<Result<_, _>>()?;
    let reference: Vec<u8> = test_y.iter().map(|&c| c as u8).collect();
    let report = EvalReport::from_pairs(&reference, &predicted)?;
    println!("held-out CC {:.3}  WK {:.3}  Corr {:.3}", report.cc, report.wk, report.corr);
    println!("probabilities of the first test row: {:?}", scorer.probabilities(&test_x[0])?);

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("toy.json");
    scorer.save(&path)?;
    let loaded = Scorer::load(&path, Some(8))?;
    assert_eq!(loaded.predict(&test_x[0])?, scorer.predict(&test_x[0])?);
    println!("model file {} bytes, fingerprint {}", std::fs::metadata(&path)?.len(), &loaded.fingerprint[..16]);
    println!("loading it as a 116-input model: {}", Scorer::load(&path, Some(116)).unwrap_err());
    Ok(())
}
