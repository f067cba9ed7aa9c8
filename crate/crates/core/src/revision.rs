//! Sentence alignment between consecutive drafts and revision extraction.
//!
//! Alignment is a monotone 1-1 dynamic program: each old sentence is either
//! matched to exactly one new sentence or deleted, each new sentence is
//! either matched or added, and matched pairs never cross.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{normalize_word, Document};

/// Sentence-level similarity in `[0, 1]`; must be symmetric.
pub trait SentenceSimilarity: Send + Sync {
    fn similarity(&self, a: &str, b: &str) -> f64;
}

/// Dice overlap of normalized content-token multisets.
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenOverlap;

impl SentenceSimilarity for TokenOverlap {
    fn similarity(&self, a: &str, b: &str) -> f64 {
        default_similarity(a, b)
    }
}

fn content_bag(text: &str) -> HashMap<String, usize> {
    let mut bag = HashMap::new();
    for w in text.split_whitespace().map(normalize_word).filter(|w| !w.is_empty()) {
        *bag.entry(w).or_insert(0) += 1;
    }
    bag
}

/// `2 |A ∩ B| / (|A| + |B|)` over normalized content-token multisets.
/// Two sentences without content tokens score 1.0 when their text is
/// identical and 0.0 otherwise.
pub fn default_similarity(a: &str, b: &str) -> f64 {
    let (bag_a, bag_b) = (content_bag(a), content_bag(b));
    let len_a: usize = bag_a.values().sum();
    let len_b: usize = bag_b.values().sum();
    if len_a + len_b == 0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    let shared: usize = bag_a
        .iter()
        .map(|(w, &n)| n.min(bag_b.get(w).copied().unwrap_or(0)))
        .sum();
    (2 * shared) as f64 / (len_a + len_b) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignConfig {
    /// Cost charged for each unmatched sentence.
    pub gap_penalty: f64,
    /// Minimum similarity for two sentences to be matched at all.
    pub match_floor: f64,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            gap_penalty: 0.25,
            match_floor: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub old_index: Option<usize>,
    pub new_index: Option<usize>,
    pub old_text: Option<String>,
    pub new_text: Option<String>,
    pub similarity: f64,
}

impl AlignedPair {
    pub fn is_match(&self) -> bool {
        self.old_index.is_some() && self.new_index.is_some()
    }

    pub fn is_identical(&self) -> bool {
        self.is_match() && self.old_text == self.new_text
    }
}

#[derive(Clone, Copy)]
enum Step {
    Match,
    Delete,
    Add,
}

/// Align two segmented drafts with the default configuration.
pub fn align(old: &Document, new: &Document, sim: &dyn SentenceSimilarity) -> Vec<AlignedPair> {
    align_with(old, new, sim, &AlignConfig::default())
}

pub fn align_with(
    old: &Document,
    new: &Document,
    sim: &dyn SentenceSimilarity,
    config: &AlignConfig,
) -> Vec<AlignedPair> {
    align_sentences(&old.sentence_texts(), &new.sentence_texts(), sim, config)
}

/// Maximize the sum of matched similarities minus `gap_penalty` per
/// unmatched sentence. Pairs below `match_floor` may not be matched.
/// Among optimal alignments the one taking matches earliest wins.
pub fn align_sentences(
    old: &[&str],
    new: &[&str],
    sim: &dyn SentenceSimilarity,
    config: &AlignConfig,
) -> Vec<AlignedPair> {
    let (n, m) = (old.len(), new.len());
    let g = config.gap_penalty;
    let pair_sim: Vec<Vec<f64>> = old
        .iter()
        .map(|a| new.iter().map(|b| sim.similarity(a, b).clamp(0.0, 1.0)).collect())
        .collect();

    // best[i][j]: optimal score aligning old[i..] with new[j..]
    let mut best = vec![vec![0.0f64; m + 1]; n + 1];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                continue;
            }
            let mut v = f64::NEG_INFINITY;
            if i < n && j < m && pair_sim[i][j] >= config.match_floor {
                v = v.max(pair_sim[i][j] + best[i + 1][j + 1]);
            }
            if i < n {
                v = v.max(best[i + 1][j] - g);
            }
            if j < m {
                v = v.max(best[i][j + 1] - g);
            }
            best[i][j] = v;
        }
    }

    const EPS: f64 = 1e-12;
    let mut out = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let target = best[i][j];
        let step = if i < n
            && j < m
            && pair_sim[i][j] >= config.match_floor
            && (pair_sim[i][j] + best[i + 1][j + 1] - target).abs() <= EPS
        {
            Step::Match
        } else if i < n && (best[i + 1][j] - g - target).abs() <= EPS {
            Step::Delete
        } else {
            Step::Add
        };
        match step {
            Step::Match => {
                out.push(AlignedPair {
                    old_index: Some(i),
                    new_index: Some(j),
                    old_text: Some(old[i].to_string()),
                    new_text: Some(new[j].to_string()),
                    similarity: pair_sim[i][j],
                });
                i += 1;
                j += 1;
            }
            Step::Delete => {
                out.push(AlignedPair {
                    old_index: Some(i),
                    new_index: None,
                    old_text: Some(old[i].to_string()),
                    new_text: None,
                    similarity: 0.0,
                });
                i += 1;
            }
            Step::Add => {
                out.push(AlignedPair {
                    old_index: None,
                    new_index: Some(j),
                    old_text: None,
                    new_text: Some(new[j].to_string()),
                    similarity: 0.0,
                });
                j += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RevisionAction {
    Add,
    Delete,
    Modify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RevisionType {
    Surface,
    Content,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RevisionPurpose {
    Evidence,
    Reasoning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RevisionQuality {
    Successful,
    Unsuccessful,
}

macro_rules! str_enum {
    ($ty:ident { $($variant:ident => $s:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self { $($ty::$variant => $s),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = ParseLabelError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($s => Ok($ty::$variant),)+
                    other => Err(ParseLabelError {
                        kind: stringify!($ty),
                        value: other.to_string(),
                    }),
                }
            }
        }
    };
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("invalid {kind} label {value:?}")]
pub struct ParseLabelError {
    pub kind: &'static str,
    pub value: String,
}

str_enum!(RevisionAction { Add => "add", Delete => "delete", Modify => "modify" });
str_enum!(RevisionType { Surface => "surface", Content => "content" });
str_enum!(RevisionPurpose { Evidence => "evidence", Reasoning => "reasoning" });
str_enum!(RevisionQuality { Successful => "successful", Unsuccessful => "unsuccessful" });

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionPair {
    pub aligned: AlignedPair,
    pub action: RevisionAction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_label: Option<RevisionType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub er_label: Option<RevisionPurpose>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub success_label: Option<RevisionQuality>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argument_context: Option<String>,
}

impl RevisionPair {
    pub fn new(aligned: AlignedPair, action: RevisionAction) -> Self {
        Self {
            aligned,
            action,
            type_label: None,
            er_label: None,
            success_label: None,
            argument_context: None,
        }
    }

    pub fn add(new_index: usize, text: &str) -> Self {
        Self::new(
            AlignedPair {
                old_index: None,
                new_index: Some(new_index),
                old_text: None,
                new_text: Some(text.to_string()),
                similarity: 0.0,
            },
            RevisionAction::Add,
        )
    }

    pub fn delete(old_index: usize, text: &str) -> Self {
        Self::new(
            AlignedPair {
                old_index: Some(old_index),
                new_index: None,
                old_text: Some(text.to_string()),
                new_text: None,
                similarity: 0.0,
            },
            RevisionAction::Delete,
        )
    }

    pub fn modify(old_index: usize, new_index: usize, old: &str, new: &str) -> Self {
        Self::new(
            AlignedPair {
                old_index: Some(old_index),
                new_index: Some(new_index),
                old_text: Some(old.to_string()),
                new_text: Some(new.to_string()),
                similarity: default_similarity(old, new),
            },
            RevisionAction::Modify,
        )
    }

    /// The text a classifier looks at: the new side, or the old side for
    /// deletions.
    pub fn focus_text(&self) -> &str {
        match self.action {
            RevisionAction::Delete => self.aligned.old_text.as_deref().unwrap_or_default(),
            _ => self.aligned.new_text.as_deref().unwrap_or_default(),
        }
    }

    pub fn is_content(&self) -> bool {
        self.type_label == Some(RevisionType::Content)
    }
}

/// Drop identical matches and label the rest. Output follows alignment
/// order, so additions appear in new-draft order with deletions interleaved
/// where they were aligned.
pub fn extract_revisions(pairs: &[AlignedPair]) -> Vec<RevisionPair> {
    pairs
        .iter()
        .filter(|p| !p.is_identical())
        .map(|p| {
            let action = match (p.old_index, p.new_index) {
                (Some(_), Some(_)) => RevisionAction::Modify,
                (Some(_), None) => RevisionAction::Delete,
                (None, Some(_)) => RevisionAction::Add,
                (None, None) => unreachable!("aligned pair with neither side"),
            };
            RevisionPair::new(p.clone(), action)
        })
        .collect()
}

// ---- review format -------------------------------------------------------

#[derive(Debug, Error)]
pub enum ReviewFormatError {
    #[error("line {line}: expected 6 tab-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: bad {field} value {value:?}")]
    Field {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("line {line}: missing header")]
    Header { line: usize },
}

pub const REVIEW_HEADER: &str = "old_index\tnew_index\taction\tsimilarity\told_text\tnew_text";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

fn action_name(p: &AlignedPair) -> &'static str {
    match (p.old_index, p.new_index) {
        (Some(_), Some(_)) if p.is_identical() => "keep",
        (Some(_), Some(_)) => "modify",
        (Some(_), None) => "delete",
        _ => "add",
    }
}

/// One tab-separated line per aligned pair, behind a header line.
pub fn write_review(pairs: &[AlignedPair]) -> String {
    let mut out = String::new();
    out.push_str(REVIEW_HEADER);
    out.push('\n');
    for p in pairs {
        let idx = |i: Option<usize>| i.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.4}\t{}\t{}\n",
            idx(p.old_index),
            idx(p.new_index),
            action_name(p),
            p.similarity,
            escape(p.old_text.as_deref().unwrap_or_default()),
            escape(p.new_text.as_deref().unwrap_or_default()),
        ));
    }
    out
}

pub fn parse_review(text: &str) -> Result<Vec<AlignedPair>, ReviewFormatError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == REVIEW_HEADER => {}
        _ => return Err(ReviewFormatError::Header { line: 1 }),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(ReviewFormatError::FieldCount {
                line: lineno,
                found: fields.len(),
            });
        }
        let index = |field: &'static str, v: &str| -> Result<Option<usize>, ReviewFormatError> {
            if v.is_empty() {
                return Ok(None);
            }
            v.parse().map(Some).map_err(|_| ReviewFormatError::Field {
                line: lineno,
                field,
                value: v.to_string(),
            })
        };
        let old_index = index("old_index", fields[0])?;
        let new_index = index("new_index", fields[1])?;
        if !matches!(fields[2], "keep" | "modify" | "add" | "delete") {
            return Err(ReviewFormatError::Field {
                line: lineno,
                field: "action",
                value: fields[2].to_string(),
            });
        }
        let similarity = fields[3].parse().map_err(|_| ReviewFormatError::Field {
            line: lineno,
            field: "similarity",
            value: fields[3].to_string(),
        })?;
        out.push(AlignedPair {
            old_index,
            new_index,
            old_text: old_index.map(|_| unescape(fields[4])),
            new_text: new_index.map(|_| unescape(fields[5])),
            similarity,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::segment;
    use proptest::prelude::*;

    struct Table(Vec<((&'static str, &'static str), f64)>);

    impl SentenceSimilarity for Table {
        fn similarity(&self, a: &str, b: &str) -> f64 {
            if a == b {
                return 1.0;
            }
            self.0
                .iter()
                .find(|((x, y), _)| (*x == a && *y == b) || (*x == b && *y == a))
                .map_or(0.0, |(_, s)| *s)
        }
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(default_similarity("The cat sat.", "the cat sat"), 1.0);
        assert_eq!(default_similarity("a b", "c d"), 0.0);
        assert!((default_similarity("the hospital had no doctor", "the hospital had a doctor") - 0.8).abs() < 1e-12);
    }

    #[test]
    fn identical_drafts() {
        let d = segment("One. Two. Three.");
        let pairs = align(&d, &d, &TokenOverlap);
        assert_eq!(pairs.len(), 3);
        assert!(pairs.iter().all(|p| p.is_identical() && p.similarity == 1.0));
        assert!(extract_revisions(&pairs).is_empty());
    }

    #[test]
    fn appended_sentence_is_an_addition() {
        let old = segment("One cat. Two dogs.");
        let new = segment("One cat. Two dogs. Three birds.");
        let revs = extract_revisions(&align(&old, &new, &TokenOverlap));
        assert_eq!(revs.len(), 1);
        assert_eq!(revs[0].action, RevisionAction::Add);
        assert_eq!(revs[0].aligned.new_index, Some(2));
    }

    #[test]
    fn three_by_four_instance() {
        let sim = Table(vec![(("B", "B'"), 0.8)]);
        let pairs = align_sentences(&["A", "B", "C"], &["A", "B'", "C", "D"], &sim, &AlignConfig::default());
        let shape: Vec<_> = pairs.iter().map(|p| (p.old_index, p.new_index)).collect();
        assert_eq!(
            shape,
            vec![(Some(0), Some(0)), (Some(1), Some(1)), (Some(2), Some(2)), (None, Some(3))]
        );
        let revs = extract_revisions(&pairs);
        let actions: Vec<_> = revs.iter().map(|r| r.action).collect();
        assert_eq!(actions, vec![RevisionAction::Modify, RevisionAction::Add]);
        assert_eq!(revs[0].aligned.new_text.as_deref(), Some("B'"));
    }

    #[test]
    fn below_floor_becomes_delete_and_add() {
        let sim = Table(vec![(("B", "X"), 0.3)]);
        let pairs = align_sentences(&["A", "B"], &["A", "X"], &sim, &AlignConfig::default());
        let actions: Vec<_> = extract_revisions(&pairs).iter().map(|r| r.action).collect();
        assert_eq!(actions, vec![RevisionAction::Delete, RevisionAction::Add]);
    }

    #[test]
    fn empty_sides() {
        let d = segment("One. Two.");
        let e = segment("");
        assert!(align(&e, &d, &TokenOverlap).iter().all(|p| p.old_index.is_none()));
        assert!(align(&d, &e, &TokenOverlap).iter().all(|p| p.new_index.is_none()));
        assert!(align(&e, &e, &TokenOverlap).is_empty());
    }

    #[test]
    fn tie_prefers_earliest_match() {
        // "A" can match either copy; the earliest one wins.
        let pairs = align_sentences(&["A"], &["A", "A"], &TokenOverlap, &AlignConfig::default());
        assert_eq!(pairs[0].new_index, Some(0));
        assert_eq!(pairs[1].old_index, None);
    }

    #[test]
    fn label_parsing() {
        assert_eq!("Content".parse::<RevisionType>().unwrap(), RevisionType::Content);
        assert!("claim".parse::<RevisionPurpose>().is_err());
    }

    #[test]
    fn review_format_handles_special_characters() {
        let old = segment("Tab\there.\nSecond one.");
        let new = segment("Tab\there.\nSecond one changed.");
        let pairs = align(&old, &new, &TokenOverlap);
        let text = write_review(&pairs);
        assert!(text.lines().nth(1).unwrap().contains("keep"));
        assert_eq!(parse_review(&text).unwrap().len(), pairs.len());
        assert!(matches!(parse_review("nope"), Err(ReviewFormatError::Header { .. })));
    }

    proptest! {
        #[test]
        fn review_round_trip(texts in proptest::collection::vec("[a-z \\t\\\\]{0,12}", 0..6)) {
            let pairs: Vec<AlignedPair> = texts
                .iter()
                .enumerate()
                .map(|(i, t)| AlignedPair {
                    old_index: Some(i),
                    new_index: if i % 2 == 0 { Some(i) } else { None },
                    old_text: Some(t.clone()),
                    new_text: if i % 2 == 0 { Some(format!("{t}!")) } else { None },
                    similarity: 0.5,
                })
                .collect();
            prop_assert_eq!(parse_review(&write_review(&pairs)).unwrap(), pairs);
        }
    }
}
