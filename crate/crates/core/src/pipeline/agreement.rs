use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::PipelineError;
use crate::corpus::io::read_lines;
use crate::corpus::{parse_transcription, Language};
use crate::metrics::{word_accuracy, WordAccuracy};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementRow {
    pub utterance_id: String,
    pub n_ref: usize,
    pub n_err: usize,
    /// `None` when the reference transcription has no words.
    pub wa: Option<f64>,
}

/// Word accuracy of a second transcription against a first one, per
/// utterance and pooled over all words.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementTable {
    pub rows: Vec<AgreementRow>,
    pub pooled: Option<WordAccuracy>,
}

impl AgreementTable {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<24} {:>17} {:>15} {:>8}", "utterance", "transcribed words", "different words", "WA");
        for r in &self.rows {
            let wa = r.wa.map_or_else(|| "-".to_string(), |v| format!("{:.2}%", 100.0 * v));
            let _ = writeln!(out, "{:<24} {:>17} {:>15} {:>8}", r.utterance_id, r.n_ref, r.n_err, wa);
        }
        let (n_ref, n_err, wa) = match &self.pooled {
            Some(p) => (p.n_ref, p.n_err, format!("{:.2}%", p.percent())),
            None => (0, self.rows.iter().map(|r| r.n_err).sum(), "-".to_string()),
        };
        let _ = writeln!(out, "{:<24} {:>17} {:>15} {:>8}", "total", n_ref, n_err, wa);
        out
    }
}

/// Parse `utterance_id<TAB>transcription` lines.
pub fn read_transcription_file(path: &Path) -> Result<Vec<(String, String)>, PipelineError> {
    read_lines(path)?
        .into_iter()
        .enumerate()
        .map(|(i, line)| match line.split_once('\t') {
            Some((id, text)) => Ok((id.trim().to_string(), text.to_string())),
            None if !line.contains(char::is_whitespace) => Ok((line, String::new())),
            None => Err(PipelineError::Artifact {
                path: path.to_path_buf(),
                message: format!("line {}: expected `utterance_id<TAB>transcription`", i + 1),
            }),
        })
        .collect()
}

/// Agreement between two transcriptions of the same utterances, listed in the
/// same order. Labels and hesitations are removed before comparison.
pub fn agreement(reference: &[(String, String)], other: &[(String, String)]) -> Result<AgreementTable, PipelineError> {
    if reference.len() != other.len() {
        return Err(PipelineError::IdMismatch(format!("{} vs {} utterances", reference.len(), other.len())));
    }
    let mut rows = Vec::with_capacity(reference.len());
    let (mut total_ref, mut total_err) = (0, 0);
    for ((id_a, text_a), (id_b, text_b)) in reference.iter().zip(other) {
        if id_a != id_b {
            return Err(PipelineError::IdMismatch(format!("{id_a} vs {id_b}")));
        }
        let clean = |t: &str| {
            parse_transcription(t, Language::English)
                .map(|c| c.words_without_hesitations())
                .map_err(|e| PipelineError::InUtterance { utterance_id: id_a.clone(), source: Box::new(e.into()) })
        };
        let (a, b) = (clean(text_a)?, clean(text_b)?);
        let (n_ref, n_err, wa) = match word_accuracy(&a, &b) {
            Ok(w) => (w.n_ref, w.n_err, Some(w.wa)),
            Err(_) => (0, b.len(), None),
        };
        total_ref += n_ref;
        total_err += n_err;
        rows.push(AgreementRow { utterance_id: id_a.clone(), n_ref, n_err, wa });
    }
    Ok(AgreementTable { rows, pooled: WordAccuracy::from_counts(total_ref, total_err).ok() })
}

pub fn cmd_agreement(file_a: &Path, file_b: &Path) -> Result<AgreementTable, PipelineError> {
    agreement(&read_transcription_file(file_a)?, &read_transcription_file(file_b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn identical_is_full_agreement() {
        let a = pairs(&[("u1", "I like @hes my dog"), ("u2", "@it(ciao) hello")]);
        let t = agreement(&a, &a).unwrap();
        assert_eq!(t.pooled.unwrap().wa, 1.0);
        assert!(t.to_text().contains("100.00%"));
    }

    #[test]
    fn labels_and_hesitations_are_ignored() {
        let a = pairs(&[("u1", "I like ehm my dog @voices")]);
        let b = pairs(&[("u1", "i like my #dog.")]);
        let t = agreement(&a, &b).unwrap();
        assert_eq!((t.rows[0].n_ref, t.rows[0].n_err), (4, 0));
    }

    #[test]
    fn ids_must_line_up() {
        let a = pairs(&[("u1", "a"), ("u2", "b")]);
        assert!(matches!(agreement(&a, &pairs(&[("u1", "a")])), Err(PipelineError::IdMismatch(_))));
        assert!(matches!(agreement(&a, &pairs(&[("u1", "a"), ("u3", "b")])), Err(PipelineError::IdMismatch(_))));
    }

    #[test]
    fn empty_reference_row() {
        let t = agreement(&pairs(&[("u1", "@voices"), ("u2", "a b")]), &pairs(&[("u1", "x"), ("u2", "a c")])).unwrap();
        assert_eq!(t.rows[0].wa, None);
        let p = t.pooled.unwrap();
        assert_eq!((p.n_ref, p.n_err), (2, 2));
    }
}
