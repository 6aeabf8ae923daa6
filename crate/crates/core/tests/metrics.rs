mod common;

use common::substituted_pair;
use l2grade::metrics::{pearson, pearson_scores, word_accuracy, ConfusionMatrix, EvalReport};
use l2grade::pipeline::{agreement, cmd_agreement, PipelineError};
use proptest::prelude::*;

#[test]
fn pearson_hand_example() {
    // x = (1, 2, 3, 4), y = (2, 1, 4, 3): means 2.5, sxy = 3, sxx = syy = 5
    let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
    assert!((r - 0.6).abs() < 1e-15);
    assert_eq!(pearson_scores(&[0, 1, 2, 1], &[0, 1, 2, 1]).unwrap(), 1.0);
}

#[test]
fn report_is_consistent_with_its_matrix() {
    let refs = [0, 1, 2, 2, 1, 0, 2, 1, 1, 0];
    let hyps = [0, 1, 1, 2, 1, 1, 2, 0, 1, 0];
    let r = EvalReport::from_pairs(&refs, &hyps).unwrap();
    let m = ConfusionMatrix::from_pairs(&refs, &hyps).unwrap();
    assert_eq!(r.matrix, m);
    assert_eq!(r.n, 10);
    assert_eq!(r.cc, 0.7);
}

#[test]
fn table_three_pairs_from_token_sequences() {
    for (n, k, percent) in [(965, 237, 75.44), (822, 139, 83.09), (1370, 302, 77.96), (1290, 226, 82.48)] {
        let (a, b) = substituted_pair(n, k);
        let wa = word_accuracy(&a, &b).unwrap();
        assert_eq!((wa.n_ref, wa.n_err), (n, k));
        assert!((wa.percent() - percent).abs() <= 0.005, "{n} {k}: {}", wa.percent());
    }
}

proptest! {
    #[test]
    fn substitutions_give_one_minus_k_over_n(n in 1usize..60, frac in 0.0f64..=1.0) {
        let k = (frac * n as f64).floor() as usize;
        let (a, b) = substituted_pair(n, k);
        let lines = |v: &[String]| vec![("u1".to_string(), v.join(" "))];
        let t = agreement(&lines(&a), &lines(&b)).unwrap();
        let pooled = t.pooled.unwrap();
        prop_assert_eq!(pooled.n_err, k);
        prop_assert!((pooled.wa - (1.0 - k as f64 / n as f64)).abs() < 1e-12);
    }

    #[test]
    fn edit_distance_is_a_metric(
        a in prop::collection::vec(0u8..4, 0..12),
        b in prop::collection::vec(0u8..4, 0..12),
        c in prop::collection::vec(0u8..4, 0..12),
    ) {
        let words = |v: &[u8]| v.iter().map(|x| format!("w{x}")).collect::<Vec<_>>();
        let (a, b, c) = (words(&a), words(&b), words(&c));
        let d = |x: &[String], y: &[String]| -> usize {
            if x.is_empty() { y.len() } else { word_accuracy(x, y).unwrap().n_err }
        };
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }
}

#[test]
fn agreement_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    std::fs::write(&a, "u1\tI like @hes dogs\nu2\t(my) #house is big\n").unwrap();
    std::fs::write(&b, "u1\ti like cats\nu2\tmy house is big @voices\n").unwrap();
    std::fs::write(&c, "u2\tmy house is big\nu1\ti like dogs\n").unwrap();
    let t = cmd_agreement(&a, &b).unwrap();
    let p = t.pooled.unwrap();
    assert_eq!((p.n_ref, p.n_err), (7, 1));
    assert!(t.to_text().contains("85.71%"));
    assert!(cmd_agreement(&a, &a).unwrap().to_text().contains("100.00%"));
    assert!(matches!(cmd_agreement(&a, &c), Err(PipelineError::IdMismatch(_))));
}
