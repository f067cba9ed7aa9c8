//! Agreement and classifier metrics, corpus statistics and indicator
//! deltas between drafts.

mod agreement;
pub mod annotations;
mod corpus;
mod delta;
mod metrics;

use std::collections::BTreeMap;
use std::io::Read;

use thiserror::Error;

pub use agreement::{qwk, qwk_observed, AgreementReport};
pub use annotations::{AnnotationRow, AnnotationSet, ErLabel, RowKey, ANNOTATION_COLUMNS};
pub use corpus::{corpus_stats, load_corpus_dir, CorpusStats, EssayDrafts, GradeStats, TransitionStats};
pub use delta::{delta_analysis, delta_pct, format_pct, round_sig, DeltaInput, DeltaReport, DeltaRow};
pub use metrics::{classifier_metrics, Averages, ClassMetrics, ClassifierReport, ConfusionMatrix};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no observations")]
    Empty,
    #[error("label range {min}..={max} is empty")]
    BadRange { min: i64, max: i64 },
    #[error("label {value} outside {min}..={max}")]
    OutOfRange { value: i64, min: i64, max: i64 },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("confusion matrix must be {labels}x{labels}")]
    MatrixShape { labels: usize },
    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
    /// A value outside a label vocabulary.
    #[error("line {line}: {message}")]
    Label { line: u64, message: String },
    #[error("{0}")]
    Io(String),
}

impl EvalError {
    /// Bad input files rather than bad values.
    pub fn is_format(&self) -> bool {
        matches!(self, EvalError::Format { .. } | EvalError::Io(_))
    }
}

/// `essay_id` plus integer score columns (npe, spc, ...).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScoreTable {
    pub columns: Vec<String>,
    pub rows: BTreeMap<String, Vec<i64>>,
}

impl ScoreTable {
    pub fn read<R: Read>(reader: R) -> Result<Self, EvalError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| EvalError::Format {
                line: 1,
                message: e.to_string(),
            })?
            .clone();
        let id = headers
            .iter()
            .position(|h| h.trim() == "essay_id")
            .ok_or_else(|| EvalError::Format {
                line: 1,
                message: "missing column essay_id".into(),
            })?;
        let score_cols: Vec<usize> = (0..headers.len()).filter(|&i| i != id).collect();
        let columns = score_cols.iter().map(|&i| headers[i].trim().to_string()).collect();
        let mut rows = BTreeMap::new();
        for record in rdr.records() {
            let record = record.map_err(|e| EvalError::Format {
                line: e.position().map(|p| p.line()).unwrap_or(0),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let values = score_cols
                .iter()
                .map(|&i| {
                    let raw = record.get(i).unwrap_or("").trim();
                    raw.parse::<i64>().map_err(|_| EvalError::Format {
                        line,
                        message: format!("{} is not an integer: {raw:?}", &headers[i]),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if rows.insert(record[id].trim().to_string(), values).is_some() {
                return Err(EvalError::Format {
                    line,
                    message: format!("duplicate essay_id {:?}", &record[id]),
                });
            }
        }
        Ok(Self { columns, rows })
    }

    pub fn is_score_header(header_line: &str) -> bool {
        let cols: Vec<_> = header_line.split(',').map(str::trim).collect();
        cols.contains(&"essay_id") && !cols.contains(&"action")
    }
}

/// QWK per column shared by both tables, joined on essay id. Values must
/// match on every id; missing ids are an error.
pub fn score_agreement(pred: &ScoreTable, gold: &ScoreTable) -> Result<BTreeMap<String, AgreementReport>, EvalError> {
    if pred.rows.keys().ne(gold.rows.keys()) {
        let missing = gold
            .rows
            .keys()
            .find(|k| !pred.rows.contains_key(*k))
            .or_else(|| pred.rows.keys().find(|k| !gold.rows.contains_key(*k)))
            .cloned()
            .unwrap_or_default();
        return Err(EvalError::Format {
            line: 0,
            message: format!("essay {missing:?} is not in both files"),
        });
    }
    let mut out = BTreeMap::new();
    for (gi, col) in gold.columns.iter().enumerate() {
        let Some(pi) = pred.columns.iter().position(|c| c == col) else {
            continue;
        };
        let a: Vec<i64> = pred.rows.values().map(|v| v[pi]).collect();
        let b: Vec<i64> = gold.rows.values().map(|v| v[gi]).collect();
        out.insert(col.clone(), qwk_observed(&a, &b)?);
    }
    Ok(out)
}

/// Metrics for each revision classifier stage, joined on the revision key.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RevisionEvaluation {
    pub content: Option<ClassifierReport>,
    pub evidence: Option<ClassifierReport>,
    pub success: Option<ClassifierReport>,
}

pub fn evaluate_revisions(pred: &AnnotationSet, gold: &AnnotationSet) -> Result<RevisionEvaluation, EvalError> {
    let by_key: BTreeMap<RowKey, &AnnotationRow> = pred.rows.iter().map(|r| (r.key(), r)).collect();
    let find = |g: &AnnotationRow| {
        by_key.get(&g.key()).copied().ok_or_else(|| EvalError::Format {
            line: g.line,
            message: format!("gold revision {:?} has no prediction", g.key()),
        })
    };

    fn stage<'a, F>(
        rows: impl Iterator<Item = &'a AnnotationRow>,
        find: &dyn Fn(&AnnotationRow) -> Result<&'a AnnotationRow, EvalError>,
        label: F,
        labels: &[&str],
        positive: &str,
    ) -> Result<Option<ClassifierReport>, EvalError>
    where
        F: Fn(&AnnotationRow) -> Option<&'static str>,
    {
        let (mut p, mut y, mut g) = (Vec::new(), Vec::new(), Vec::new());
        for gold in rows {
            let pred = find(gold)?;
            let (Some(gl), Some(pl)) = (label(gold), label(pred)) else {
                if label(gold).is_some() {
                    return Err(EvalError::Format {
                        line: pred.line,
                        message: "prediction is missing a label present in gold".into(),
                    });
                }
                continue;
            };
            y.push(gl);
            p.push(pl);
            g.push(gold.grade.as_str());
        }
        if y.is_empty() {
            return Ok(None);
        }
        classifier_metrics(&p, &y, labels, positive, Some(&g)).map(Some)
    }

    Ok(RevisionEvaluation {
        content: stage(
            gold.content_rows(),
            &find,
            |r| r.type_label.map(|l| l.as_str()),
            &["surface", "content"],
            "content",
        )?,
        evidence: stage(
            gold.evidence_rows(),
            &find,
            |r| r.er_label.and_then(|l| l.purpose()).map(|l| l.as_str()),
            &["evidence", "reasoning"],
            "evidence",
        )?,
        success: stage(
            gold.success_rows(),
            &find,
            |r| r.success_label.map(|l| l.as_str()),
            &["successful", "unsuccessful"],
            "successful",
        )?,
    })
}
