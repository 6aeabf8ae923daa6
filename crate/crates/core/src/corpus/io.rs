//! JSON Lines readers and writers for corpus and alignment files, and plain
//! text readers for sentence and word lists.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::types::UtteranceRecord;
use super::{parse_transcription, AlignmentIndex, AnnotatedUtterance, CorpusError, PhoneAlignment};

fn read_to_string(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|e| CorpusError::Io { path: path.to_path_buf(), message: e.to_string() })
}

pub(crate) fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let text = read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| CorpusError::Json {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub(crate) fn write_jsonl<'a, T: Serialize + 'a>(
    path: &Path,
    items: impl IntoIterator<Item = &'a T>,
) -> Result<(), CorpusError> {
    let mut buf = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buf, item).expect("in-memory serialization");
        buf.push(b'\n');
    }
    write_bytes(path, &buf)
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CorpusError> {
    let io_err = |e: std::io::Error| CorpusError::Io { path: path.to_path_buf(), message: e.to_string() };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(bytes).map_err(io_err)
}

/// Read a corpus file and check ids, score totals and marker balance.
pub fn read_corpus(path: &Path) -> Result<Vec<AnnotatedUtterance>, CorpusError> {
    let records: Vec<UtteranceRecord> = read_jsonl(path)?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(records.len());
    for rec in records {
        if !seen.insert(rec.utterance_id.clone()) {
            return Err(CorpusError::DuplicateId(rec.utterance_id));
        }
        let utt = AnnotatedUtterance::try_from(rec)?;
        parse_transcription(&utt.raw_text, utt.question.language).map_err(|e| CorpusError::InUtterance {
            utterance_id: utt.utterance_id.clone(),
            source: Box::new(e),
        })?;
        out.push(utt);
    }
    Ok(out)
}

pub fn write_corpus(path: &Path, corpus: &[AnnotatedUtterance]) -> Result<(), CorpusError> {
    let records: Vec<UtteranceRecord> = corpus.iter().map(UtteranceRecord::from).collect();
    write_jsonl(path, &records)
}

pub fn read_alignments(path: &Path) -> Result<AlignmentIndex, CorpusError> {
    let records: Vec<PhoneAlignment> = read_jsonl(path)?;
    let mut index = AlignmentIndex::default();
    for a in records {
        a.validate()?;
        index.insert(a)?;
    }
    Ok(index)
}

pub fn write_alignments(path: &Path, alignments: &[PhoneAlignment]) -> Result<(), CorpusError> {
    write_jsonl(path, alignments)
}

/// Nonempty lines of a UTF-8 text file, trimmed.
pub fn read_lines(path: &Path) -> Result<Vec<String>, CorpusError> {
    Ok(read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}
