use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::EvalReport;
use crate::corpus::{GroupKey, Indicator, Language};

/// Published results of the original grading system on its private 2018
/// campaign data. They cannot be reproduced from synthetic data and are
/// printed next to our numbers for orientation only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub language: Language,
    pub split: &'static str,
    pub cc: f64,
    pub wk: f64,
    pub corr: f64,
}

pub const PUBLISHED_REFERENCE: [ReferenceRow; 4] = [
    ReferenceRow { language: Language::English, split: "train", cc: 0.712, wk: 0.840, corr: 0.684 },
    ReferenceRow { language: Language::English, split: "test", cc: 0.596, wk: 0.775, corr: 0.532 },
    ReferenceRow { language: Language::German, split: "train", cc: 0.763, wk: 0.866, corr: 0.763 },
    ReferenceRow { language: Language::German, split: "test", cc: 0.667, wk: 0.822, corr: 0.613 },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    pub group: GroupKey,
    pub indicator: Indicator,
    pub split: String,
    pub report: EvalReport,
}

/// Utterance-weighted mean over all groups and indicators of one language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageAverage {
    pub language: Language,
    pub split: String,
    pub n: u64,
    pub cc: f64,
    pub wk: f64,
    pub corr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub results: Vec<GroupResult>,
    pub averages: Vec<LanguageAverage>,
    pub published_reference: Vec<ReferenceRow>,
}

impl EvaluationReport {
    /// Results are sorted by split, group and indicator; averages are
    /// computed per (language, split).
    pub fn new(mut results: Vec<GroupResult>) -> Self {
        results.sort_by(|a, b| (&a.split, a.group, a.indicator).cmp(&(&b.split, b.group, b.indicator)));
        let mut averages: Vec<LanguageAverage> = Vec::new();
        for r in &results {
            let pos = averages.iter().position(|a| a.language == r.group.language && a.split == r.split);
            let avg = match pos {
                Some(i) => &mut averages[i],
                None => {
                    averages.push(LanguageAverage {
                        language: r.group.language,
                        split: r.split.clone(),
                        n: 0,
                        cc: 0.0,
                        wk: 0.0,
                        corr: 0.0,
                    });
                    averages.last_mut().unwrap()
                }
            };
            let w = r.report.n as f64;
            avg.n += r.report.n;
            avg.cc += w * r.report.cc;
            avg.wk += w * r.report.wk;
            avg.corr += w * r.report.corr;
        }
        for a in &mut averages {
            if a.n > 0 {
                let n = a.n as f64;
                a.cc /= n;
                a.wk /= n;
                a.corr /= n;
            }
        }
        averages.sort_by(|a, b| (a.language, &a.split).cmp(&(b.language, &b.split)));
        EvaluationReport { results, averages, published_reference: PUBLISHED_REFERENCE.to_vec() }
    }

    /// Eval-split result for one model, if present.
    pub fn get(&self, split: &str, group: GroupKey, indicator: Indicator) -> Option<&EvalReport> {
        self.results
            .iter()
            .find(|r| r.split == split && r.group == group && r.indicator == indicator)
            .map(|r| &r.report)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<6} {:<12} {:<24} {:>5} {:>6} {:>6} {:>6}", "split", "group", "indicator", "n", "CC", "WK", "Corr");
        for r in &self.results {
            let _ = writeln!(
                out,
                "{:<6} {:<12} {:<24} {:>5} {:>6.3} {:>6.3} {:>6.3}{}",
                r.split,
                r.group.slug(),
                r.indicator.name(),
                r.report.n,
                r.report.cc,
                r.report.wk,
                r.report.corr,
                if r.report.notes.is_empty() { String::new() } else { format!("  ({})", r.report.notes.join("; ")) }
            );
        }
        let _ = writeln!(out, "\nAverage over groups and indicators, weighted by utterance count");
        let _ = writeln!(out, "{:<8} {:<6} {:>6} {:>6} {:>6} {:>6}", "language", "split", "n", "CC", "WK", "Corr");
        for a in &self.averages {
            let _ = writeln!(
                out,
                "{:<8} {:<6} {:>6} {:>6.3} {:>6.3} {:>6.3}",
                a.language.to_string(),
                a.split,
                a.n,
                a.cc,
                a.wk,
                a.corr
            );
        }
        let _ = writeln!(
            out,
            "\nPublished reference results of the original system on real 2018 campaign data.\n\
             That data is private, so these values are NOT reproduced here; shown for orientation only."
        );
        let _ = writeln!(out, "{:<8} {:<6} {:>6} {:>6} {:>6}", "language", "split", "CC", "WK", "Corr");
        for r in &self.published_reference {
            let _ = writeln!(out, "{:<8} {:<6} {:>6.3} {:>6.3} {:>6.3}", r.language.to_string(), r.split, r.cc, r.wk, r.corr);
        }
        out
    }
}
