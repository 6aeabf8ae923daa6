//! Evaluation metrics: correct classification, linear weighted kappa,
//! Pearson correlation and word accuracy.

use l2grade::metrics::{correct_classification, pearson_scores, weighted_kappa, ConfusionMatrix, EvalReport, WordAccuracy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let refs = [0, 0, 1, 1, 1, 2, 2, 2, 2, 1, 0, 2];
    let hyps = [0, 1, 1, 1, 2, 2, 2, 1, 2, 1, 0, 2];
    let m = ConfusionMatrix::from_pairs(&refs, &hyps)?;
    println!("confusion matrix (rows = expert, columns = predicted):");
    for row in m.counts {
        println!("  {row:?}");
    }
    println!("CC   {:.4}", correct_classification(&m)?);
    println!("WK   {:.4}", weighted_kappa(&m)?);
    println!("Corr {:.4}", pearson_scores(&refs, &hyps)?);

    // a model that always predicts the same score leaves kappa's chance
    // disagreement at zero and the correlation undefined
    let flat = EvalReport::from_pairs(&refs, &[1; 12])?;
    println!("\nconstant predictions: CC {:.3} WK {:.3} Corr {:.3} notes {:?}", flat.cc, flat.wk, flat.corr, flat.notes);

    println!("\nword accuracy from (transcribed words, different words):");
    for (n_ref, n_err) in [(965, 237), (822, 139), (1370, 302), (1290, 226)] {
        let wa = WordAccuracy::from_counts(n_ref, n_err)?;
        println!("  {n_ref:>5} {n_err:>4}  {:.2}%", wa.percent());
    }
    Ok(())
}
