//! Classification metrics (CC, linear WK, Pearson correlation) and word
//! accuracy between transcriptions.

mod report;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use report::{EvaluationReport, GroupResult, LanguageAverage, ReferenceRow, PUBLISHED_REFERENCE};

use crate::distance::levenshtein;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("expected disagreement is zero while observed disagreement is not")]
    DegenerateMarginals,
    #[error("correlation undefined for a constant sequence")]
    ConstantSequence,
    #[error("sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least two observations")]
    TooShort,
    #[error("reference transcription has no words")]
    EmptyReference,
    #[error("score {0} is outside 0..=2")]
    InvalidScore(u8),
}

pub const N_SCORES: usize = 3;

/// 3x3 counts, rows indexed by the reference score and columns by the
/// predicted score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; N_SCORES]; N_SCORES],
}

impl ConfusionMatrix {
    pub fn new(counts: [[u64; N_SCORES]; N_SCORES]) -> Self {
        ConfusionMatrix { counts }
    }

    pub fn from_pairs(refs: &[u8], hyps: &[u8]) -> Result<Self, MetricsError> {
        if refs.len() != hyps.len() {
            return Err(MetricsError::LengthMismatch(refs.len(), hyps.len()));
        }
        let mut m = ConfusionMatrix::default();
        for (&r, &h) in refs.iter().zip(hyps) {
            m.add(r, h)?;
        }
        Ok(m)
    }

    pub fn add(&mut self, reference: u8, predicted: u8) -> Result<(), MetricsError> {
        for s in [reference, predicted] {
            if usize::from(s) >= N_SCORES {
                return Err(MetricsError::InvalidScore(s));
            }
        }
        self.counts[usize::from(reference)][usize::from(predicted)] += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for i in 0..N_SCORES {
            for j in 0..N_SCORES {
                self.counts[i][j] += other.counts[i][j];
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..N_SCORES).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_totals(&self) -> [u64; N_SCORES] {
        self.counts.map(|r| r.iter().sum())
    }

    pub fn column_totals(&self) -> [u64; N_SCORES] {
        let mut c = [0; N_SCORES];
        for row in &self.counts {
            for (j, v) in row.iter().enumerate() {
                c[j] += v;
            }
        }
        c
    }

    pub fn is_diagonal(&self) -> bool {
        (0..N_SCORES).all(|i| (0..N_SCORES).all(|j| i == j || self.counts[i][j] == 0))
    }
}

/// Fraction of utterances whose predicted score equals the reference.
pub fn correct_classification(m: &ConfusionMatrix) -> Result<f64, MetricsError> {
    match m.total() {
        0 => Err(MetricsError::EmptyMatrix),
        n => Ok(m.trace() as f64 / n as f64),
    }
}

/// Linear weighted kappa, `1 - sum(d * O) / sum(d * E)` with
/// `d_ij = |i - j| / 2`, `O` the observed and `E` the chance proportions.
///
/// When both disagreements vanish the value is 1. When only the expected one
/// does, [`MetricsError::DegenerateMarginals`] is returned.
pub fn weighted_kappa(m: &ConfusionMatrix) -> Result<f64, MetricsError> {
    let n = m.total();
    if n == 0 {
        return Err(MetricsError::EmptyMatrix);
    }
    let n = n as f64;
    let rows = m.row_totals();
    let cols = m.column_totals();
    let mut observed = 0.0;
    let mut expected = 0.0;
    for i in 0..N_SCORES {
        for j in 0..N_SCORES {
            let d = i.abs_diff(j) as f64 / (N_SCORES - 1) as f64;
            observed += d * m.counts[i][j] as f64 / n;
            expected += d * (rows[i] as f64 * cols[j] as f64) / (n * n);
        }
    }
    if expected == 0.0 {
        return if observed == 0.0 { Ok(1.0) } else { Err(MetricsError::DegenerateMarginals) };
    }
    Ok(1.0 - observed / expected)
}

/// Product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(MetricsError::TooShort);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricsError::ConstantSequence);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// [`pearson`] over integer scores.
pub fn pearson_scores(refs: &[u8], hyps: &[u8]) -> Result<f64, MetricsError> {
    let xs: Vec<f64> = refs.iter().map(|&v| f64::from(v)).collect();
    let ys: Vec<f64> = hyps.iter().map(|&v| f64::from(v)).collect();
    pearson(&xs, &ys)
}

/// Word-level agreement of a hypothesis transcription with a reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordAccuracy {
    /// `1 - n_err / n_ref`; negative when errors outnumber reference words.
    pub wa: f64,
    pub n_ref: usize,
    pub n_err: usize,
}

impl WordAccuracy {
    pub fn from_counts(n_ref: usize, n_err: usize) -> Result<Self, MetricsError> {
        if n_ref == 0 {
            return Err(MetricsError::EmptyReference);
        }
        Ok(WordAccuracy { wa: 1.0 - n_err as f64 / n_ref as f64, n_ref, n_err })
    }

    pub fn percent(&self) -> f64 {
        100.0 * self.wa
    }

    pub fn word_error_rate(&self) -> f64 {
        1.0 - self.wa
    }
}

/// Word accuracy of `hyp` against `reference`; both should already be
/// stripped of labels and hesitations.
pub fn word_accuracy<S: AsRef<str>>(reference: &[S], hyp: &[S]) -> Result<WordAccuracy, MetricsError> {
    let r: Vec<&str> = reference.iter().map(|s| s.as_ref()).collect();
    let h: Vec<&str> = hyp.iter().map(|s| s.as_ref()).collect();
    WordAccuracy::from_counts(r.len(), levenshtein(&r, &h))
}

/// CC, WK and correlation of one set of predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub cc: f64,
    pub wk: f64,
    pub corr: f64,
    pub matrix: ConfusionMatrix,
    pub n: u64,
    /// Conditions under which WK or Corr were set to 0 instead of computed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl EvalReport {
    /// Undefined WK (degenerate marginals) or Corr (a constant sequence)
    /// are reported as 0 with a note.
    pub fn from_pairs(refs: &[u8], hyps: &[u8]) -> Result<Self, MetricsError> {
        let matrix = ConfusionMatrix::from_pairs(refs, hyps)?;
        let cc = correct_classification(&matrix)?;
        let mut notes = Vec::new();
        let wk = match weighted_kappa(&matrix) {
            Ok(v) => v,
            Err(e @ MetricsError::DegenerateMarginals) => {
                notes.push(format!("wk: {e}"));
                0.0
            }
            Err(e) => return Err(e),
        };
        let corr = match pearson_scores(refs, hyps) {
            Ok(v) => v,
            Err(e @ (MetricsError::ConstantSequence | MetricsError::TooShort)) => {
                notes.push(format!("corr: {e}"));
                0.0
            }
            Err(e) => return Err(e),
        };
        Ok(EvalReport { cc, wk, corr, matrix, n: matrix.total(), notes })
    }
}
