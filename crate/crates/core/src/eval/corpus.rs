//! Per-grade essay and revision statistics over a multi-draft corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::classify::{Classifier, RevisionInput};
use crate::revision::{align_with, extract_revisions, AlignConfig, RevisionAction, RevisionType, SentenceSimilarity};
use crate::text::segment;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssayDrafts {
    pub essay_id: String,
    pub grade: String,
    /// Draft texts in submission order; `drafts[0]` is draft 1.
    pub drafts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionStats {
    pub from: u32,
    pub to: u32,
    pub pairs: usize,
    pub add: f64,
    pub delete: f64,
    pub modify: f64,
    pub surface: f64,
    pub content: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeStats {
    pub grade: String,
    /// Number of drafts, counted individually.
    pub essays: usize,
    pub mean_words: f64,
    /// One slot per corpus transition; `None` when this grade has no pair.
    pub transitions: Vec<Option<TransitionStats>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub transitions: Vec<(u32, u32)>,
    /// Grades in natural order, then an `Overall` row. Empty for an empty
    /// corpus.
    pub rows: Vec<GradeStats>,
}

#[derive(Default)]
struct Tally {
    essays: usize,
    words: usize,
    pairs: Vec<[usize; 6]>,
}

fn grade_key(g: &str) -> (Option<i64>, String) {
    let digits: String = g.chars().filter(|c| c.is_ascii_digit()).collect();
    (digits.parse().ok(), g.to_string())
}

pub fn corpus_stats(
    essays: &[EssayDrafts],
    content: &dyn Classifier<RevisionType>,
    sim: &dyn SentenceSimilarity,
    config: &AlignConfig,
) -> CorpusStats {
    let max_drafts = essays.iter().map(|e| e.drafts.len()).max().unwrap_or(0);
    let transitions: Vec<(u32, u32)> = (1..max_drafts as u32).map(|i| (i, i + 1)).collect();
    let k = transitions.len();
    let mut by_grade: BTreeMap<(Option<i64>, String), Tally> = BTreeMap::new();
    let mut overall = Tally::default();
    let no_keywords = BTreeSet::new();

    for essay in essays {
        let docs: Vec<_> = essay.drafts.iter().map(|d| segment(d)).collect();
        let tally = by_grade.entry(grade_key(&essay.grade)).or_default();
        tally.pairs.resize(k, [0; 6]);
        overall.pairs.resize(k, [0; 6]);
        for doc in &docs {
            tally.essays += 1;
            overall.essays += 1;
            tally.words += doc.word_count();
            overall.words += doc.word_count();
        }
        for (t, w) in docs.windows(2).enumerate() {
            let revisions = extract_revisions(&align_with(&w[0], &w[1], sim, config));
            let mut counts = [1usize, 0, 0, 0, 0, 0];
            for rev in &revisions {
                let slot = match rev.action {
                    RevisionAction::Add => 1,
                    RevisionAction::Delete => 2,
                    RevisionAction::Modify => 3,
                };
                counts[slot] += 1;
                let input = RevisionInput {
                    revision: rev,
                    old_doc: &w[0],
                    new_doc: &w[1],
                    context: None,
                    old_keywords: &no_keywords,
                };
                let label = content.classify(&input).map(|p| p.label).unwrap_or(RevisionType::Content);
                counts[if label == RevisionType::Surface { 4 } else { 5 }] += 1;
            }
            for target in [&mut tally.pairs[t], &mut overall.pairs[t]] {
                for (acc, c) in target.iter_mut().zip(counts) {
                    *acc += c;
                }
            }
        }
    }

    let finish = |grade: String, t: &Tally| GradeStats {
        grade,
        essays: t.essays,
        mean_words: if t.essays == 0 {
            0.0
        } else {
            t.words as f64 / t.essays as f64
        },
        transitions: transitions
            .iter()
            .enumerate()
            .map(|(i, &(from, to))| {
                let c = t.pairs.get(i).copied().unwrap_or([0; 6]);
                let n = c[0];
                (n > 0).then(|| {
                    let mean = |x: usize| x as f64 / n as f64;
                    TransitionStats {
                        from,
                        to,
                        pairs: n,
                        add: mean(c[1]),
                        delete: mean(c[2]),
                        modify: mean(c[3]),
                        surface: mean(c[4]),
                        content: mean(c[5]),
                    }
                })
            })
            .collect(),
    };

    let mut rows: Vec<GradeStats> = by_grade.iter().map(|((_, g), t)| finish(g.clone(), t)).collect();
    if !rows.is_empty() {
        rows.push(finish("Overall".into(), &overall));
    }
    CorpusStats { transitions, rows }
}

/// Reads `<dir>/<grade>/<essay_id>.<draft>.txt`.
pub fn load_corpus_dir(dir: impl AsRef<Path>) -> Result<Vec<EssayDrafts>, EvalError> {
    let io = |e: std::io::Error| EvalError::Io(e.to_string());
    let mut essays: BTreeMap<(String, String), BTreeMap<u32, String>> = BTreeMap::new();
    let mut grades: Vec<_> = std::fs::read_dir(dir.as_ref())
        .map_err(io)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io)?;
    grades.sort_by_key(|e| e.file_name());
    for grade_entry in grades {
        if !grade_entry.file_type().map_err(io)?.is_dir() {
            continue;
        }
        let grade = grade_entry.file_name().to_string_lossy().into_owned();
        for file in std::fs::read_dir(grade_entry.path()).map_err(io)? {
            let path = file.map_err(io)?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("txt") {
                continue;
            }
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            let parsed = stem
                .rsplit_once('.')
                .and_then(|(id, n)| n.parse::<u32>().ok().map(|n| (id.to_string(), n)));
            let Some((id, n)) = parsed else {
                return Err(EvalError::Format {
                    line: 0,
                    message: format!("{} is not named <essay_id>.<draft>.txt", path.display()),
                });
            };
            let text = std::fs::read_to_string(&path).map_err(io)?;
            essays.entry((grade.clone(), id)).or_default().insert(n, text);
        }
    }
    let mut out = Vec::new();
    for ((grade, essay_id), drafts) in essays {
        let numbers: Vec<u32> = drafts.keys().copied().collect();
        if numbers.iter().enumerate().any(|(i, &n)| n != i as u32 + 1) {
            return Err(EvalError::Format {
                line: 0,
                message: format!("essay {essay_id} drafts are not numbered 1..n: {numbers:?}"),
            });
        }
        out.push(EssayDrafts {
            essay_id,
            grade,
            drafts: drafts.into_values().collect(),
        });
    }
    Ok(out)
}

fn cell(t: &Option<TransitionStats>, f: fn(&TransitionStats) -> f64) -> String {
    t.as_ref().map(|t| format!("{:.1}", f(t))).unwrap_or_else(|| "-".into())
}

impl CorpusStats {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>5} {:>6}  {:<15} {:<15} {:<15} {:<15} {:<15}",
            "grade", "N", "WC", "add", "delete", "modify", "surface", "content"
        );
        type Col = fn(&TransitionStats) -> f64;
        let cols: [Col; 5] = [|t| t.add, |t| t.delete, |t| t.modify, |t| t.surface, |t| t.content];
        for row in &self.rows {
            let _ = write!(out, "{:<10} {:>5} {:>6.0} ", row.grade, row.essays, row.mean_words);
            for f in cols {
                let joined = if row.transitions.is_empty() {
                    "-".to_string()
                } else {
                    row.transitions.iter().map(|t| cell(t, f)).collect::<Vec<_>>().join(" / ")
                };
                let _ = write!(out, " {joined:<15}");
            }
            out.truncate(out.trim_end().len());
            out.push('\n');
        }
        out
    }

    /// Long form: one line per grade and transition. Revision columns are
    /// blank for a grade without pairs in that transition.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = [
            "grade", "essays", "mean_words", "from", "to", "pairs", "add", "delete", "modify", "surface", "content",
        ];
        w.write_record(header).expect("in-memory write");
        for row in &self.rows {
            let base = [row.grade.clone(), row.essays.to_string(), format!("{:.2}", row.mean_words)];
            if self.transitions.is_empty() {
                let mut rec = base.to_vec();
                rec.extend(std::iter::repeat_n(String::new(), 8));
                w.write_record(rec).expect("in-memory write");
            }
            for (&(from, to), t) in self.transitions.iter().zip(&row.transitions) {
                let mut rec = base.to_vec();
                rec.push(from.to_string());
                rec.push(to.to_string());
                match t {
                    Some(t) => {
                        rec.push(t.pairs.to_string());
                        for v in [t.add, t.delete, t.modify, t.surface, t.content] {
                            rec.push(format!("{v:.2}"));
                        }
                    }
                    None => rec.extend(std::iter::repeat_n(String::new(), 6)),
                }
                w.write_record(rec).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}
