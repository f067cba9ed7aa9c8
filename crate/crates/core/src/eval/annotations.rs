//! Revision annotation interchange format (CSV).

use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::revision::{RevisionAction, RevisionPurpose, RevisionQuality, RevisionType};

pub const ANNOTATION_COLUMNS: [&str; 10] = [
    "essay_id",
    "grade",
    "draft_from",
    "draft_to",
    "old_index",
    "new_index",
    "action",
    "type_label",
    "er_label",
    "success_label",
];

/// Evidence/reasoning annotation; annotators may also mark a revision as
/// a claim change, which no classifier predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErLabel {
    Evidence,
    Reasoning,
    Claim,
}

impl ErLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErLabel::Evidence => "evidence",
            ErLabel::Reasoning => "reasoning",
            ErLabel::Claim => "claim",
        }
    }

    pub fn purpose(&self) -> Option<RevisionPurpose> {
        match self {
            ErLabel::Evidence => Some(RevisionPurpose::Evidence),
            ErLabel::Reasoning => Some(RevisionPurpose::Reasoning),
            ErLabel::Claim => None,
        }
    }
}

impl From<RevisionPurpose> for ErLabel {
    fn from(p: RevisionPurpose) -> Self {
        match p {
            RevisionPurpose::Evidence => ErLabel::Evidence,
            RevisionPurpose::Reasoning => ErLabel::Reasoning,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRow {
    pub essay_id: String,
    pub grade: String,
    pub draft_from: u32,
    pub draft_to: u32,
    pub old_index: Option<usize>,
    pub new_index: Option<usize>,
    pub action: RevisionAction,
    pub type_label: Option<RevisionType>,
    pub er_label: Option<ErLabel>,
    pub success_label: Option<RevisionQuality>,
    /// 1-based line in the source file, header included.
    #[serde(skip)]
    pub line: u64,
}

/// Identifies the same revision across prediction and gold files.
pub type RowKey = (String, u32, u32, Option<usize>, Option<usize>);

impl AnnotationRow {
    pub fn key(&self) -> RowKey {
        (
            self.essay_id.clone(),
            self.draft_from,
            self.draft_to,
            self.old_index,
            self.new_index,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub rows: Vec<AnnotationRow>,
}

fn field<'r>(record: &'r csv::StringRecord, idx: usize) -> &'r str {
    record.get(idx).unwrap_or("").trim()
}

fn opt<T: FromStr>(raw: &str, column: &'static str, line: u64) -> Result<Option<T>, EvalError> {
    if raw.is_empty() {
        return Ok(None);
    }
    raw.to_ascii_lowercase().parse().map(Some).map_err(|_| {
        let message = format!("invalid {column} {raw:?}");
        if column.ends_with("_label") || column == "action" {
            EvalError::Label { line, message }
        } else {
            EvalError::Format { line, message }
        }
    })
}

fn req<T: FromStr>(raw: &str, column: &'static str, line: u64) -> Result<T, EvalError> {
    opt(raw, column, line)?.ok_or_else(|| EvalError::Format {
        line,
        message: format!("missing {column}"),
    })
}

impl FromStr for ErLabel {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "evidence" => Ok(ErLabel::Evidence),
            "reasoning" => Ok(ErLabel::Reasoning),
            "claim" => Ok(ErLabel::Claim),
            _ => Err(()),
        }
    }
}

impl AnnotationSet {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, EvalError> {
        let file = std::fs::File::open(path.as_ref()).map_err(|e| EvalError::Io(e.to_string()))?;
        Self::read(file)
    }

    /// Extra columns are ignored; the ten named columns must all be present.
    pub fn read<R: Read>(reader: R) -> Result<Self, EvalError> {
        let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
        let headers = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
        let mut idx = [0usize; 10];
        for (slot, name) in idx.iter_mut().zip(ANNOTATION_COLUMNS) {
            *slot = headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| EvalError::Format {
                    line: 1,
                    message: format!("missing column {name}"),
                })?;
        }
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| csv_error(e, 0))?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let get = |i: usize| field(&record, idx[i]);
            let row = AnnotationRow {
                essay_id: get(0).to_string(),
                grade: get(1).to_string(),
                draft_from: req(get(2), "draft_from", line)?,
                draft_to: req(get(3), "draft_to", line)?,
                old_index: opt(get(4), "old_index", line)?,
                new_index: opt(get(5), "new_index", line)?,
                action: req(get(6), "action", line)?,
                type_label: opt(get(7), "type_label", line)?,
                er_label: opt(get(8), "er_label", line)?,
                success_label: opt(get(9), "success_label", line)?,
                line,
            };
            if row.essay_id.is_empty() {
                return Err(EvalError::Format {
                    line,
                    message: "missing essay_id".into(),
                });
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| EvalError::Io(e.to_string());
        w.write_record(ANNOTATION_COLUMNS).map_err(io)?;
        let num = |v: Option<usize>| v.map(|i| i.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.essay_id.clone(),
                r.grade.clone(),
                r.draft_from.to_string(),
                r.draft_to.to_string(),
                num(r.old_index),
                num(r.new_index),
                r.action.as_str().to_string(),
                r.type_label.map(|l| l.as_str().to_string()).unwrap_or_default(),
                r.er_label.map(|l| l.as_str().to_string()).unwrap_or_default(),
                r.success_label.map(|l| l.as_str().to_string()).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| EvalError::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Rows with a surface/content label.
    pub fn content_rows(&self) -> impl Iterator<Item = &AnnotationRow> {
        self.rows.iter().filter(|r| r.type_label.is_some())
    }

    /// Content rows labelled evidence or reasoning. Claim rows are left out
    /// because the classifier's label space has no claim class.
    pub fn evidence_rows(&self) -> impl Iterator<Item = &AnnotationRow> {
        self.rows
            .iter()
            .filter(|r| r.type_label != Some(RevisionType::Surface))
            .filter(|r| r.er_label.and_then(|e| e.purpose()).is_some())
    }

    /// Rows with a success label, minus anything labelled claim.
    pub fn success_rows(&self) -> impl Iterator<Item = &AnnotationRow> {
        self.rows
            .iter()
            .filter(|r| r.success_label.is_some() && r.er_label != Some(ErLabel::Claim))
    }
}

fn csv_error(e: csv::Error, fallback_line: u64) -> EvalError {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback_line);
    EvalError::Format {
        line,
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
essay_id,grade,draft_from,draft_to,old_index,new_index,action,type_label,er_label,success_label,note
s1,5,1,2,7,7,modify,surface,,,quote fix
s1,5,1,2,,4,add,content,evidence,successful,
s1,5,1,2,3,,delete,content,claim,unsuccessful,
s2,6,1,2,,9,add,content,reasoning,unsuccessful,
";

    #[test]
    fn loads_and_filters() {
        let set = AnnotationSet::read(SAMPLE.as_bytes()).unwrap();
        assert_eq!(set.rows.len(), 4);
        assert_eq!(set.rows[1].old_index, None);
        assert_eq!(set.rows[1].new_index, Some(4));
        assert_eq!(set.rows[3].line, 5);
        assert_eq!(set.content_rows().count(), 4);
        assert_eq!(set.evidence_rows().count(), 2);
        assert_eq!(set.success_rows().count(), 2);
    }

    #[test]
    fn round_trips() {
        let set = AnnotationSet::read(SAMPLE.as_bytes()).unwrap();
        let again = AnnotationSet::read(set.to_csv_string().as_bytes()).unwrap();
        assert_eq!(set.rows.len(), again.rows.len());
        for (a, b) in set.rows.iter().zip(&again.rows) {
            assert_eq!(a.key(), b.key());
            assert_eq!((a.type_label, a.er_label, a.success_label), (b.type_label, b.er_label, b.success_label));
        }
    }

    #[test]
    fn reports_line_numbers() {
        let bad = "essay_id,grade,draft_from,draft_to,old_index,new_index,action,type_label,er_label,success_label\n\
                   s1,5,1,2,1,1,modify,surface,,\n\
                   s1,5,1,2,1,1,rewrite,content,,\n";
        match AnnotationSet::read(bad.as_bytes()) {
            Err(EvalError::Label { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("action"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let missing = "essay_id,grade\ns1,5\n";
        assert!(matches!(
            AnnotationSet::read(missing.as_bytes()),
            Err(EvalError::Format { line: 1, .. })
        ));
        let vocab = "essay_id,grade,draft_from,draft_to,old_index,new_index,action,type_label,er_label,success_label\n\
                     s1,5,1,2,1,1,modify,content,opinion,\n";
        assert!(matches!(
            AnnotationSet::read(vocab.as_bytes()),
            Err(EvalError::Label { line: 2, .. })
        ));
        let index = "essay_id,grade,draft_from,draft_to,old_index,new_index,action,type_label,er_label,success_label\n\
                     s1,5,1,2,one,1,modify,content,,\n";
        assert!(matches!(
            AnnotationSet::read(index.as_bytes()),
            Err(EvalError::Format { line: 2, .. })
        ));
    }
}
