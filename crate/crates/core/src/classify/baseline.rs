//! Deterministic rule-based classifiers. They need no model weights or
//! network and are the fallback for every adapter.

use std::collections::BTreeMap;

use super::{Classifier, ClassifierError, ContextExtractor, Prediction, RevisionInput};
use crate::revision::{RevisionAction, RevisionPair, RevisionPurpose, RevisionQuality, RevisionType};
use crate::scoring::Scorer;
use crate::text::{normalize_word, Document};

fn content_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(normalize_word)
        .filter(|w| !w.is_empty())
        .collect()
}

/// True when `old` and `new` differ only in punctuation, case, whitespace,
/// word order, or single-character spelling fixes.
pub fn is_surface_edit(old: &str, new: &str) -> bool {
    let (a, b) = (content_words(old), content_words(new));
    fn bag(ws: &[String]) -> BTreeMap<&str, usize> {
        let mut m = BTreeMap::new();
        for w in ws {
            *m.entry(w.as_str()).or_default() += 1;
        }
        m
    }
    if bag(&a) == bag(&b) {
        return true;
    }
    a.len() == b.len()
        && a.iter().zip(&b).all(|(x, y)| {
            x == y || (x.chars().count() >= 3 && y.chars().count() >= 3 && strsim::levenshtein(x, y) <= 1)
        })
}

fn certain<L>(label: L) -> Result<Prediction<L>, ClassifierError> {
    Ok(Prediction {
        label,
        confidence: 1.0,
    })
}

/// Additions and deletions are content; modifications are surface when
/// [`is_surface_edit`] holds.
#[derive(Debug, Clone, Copy, Default)]
pub struct BaselineContent;

impl Classifier<RevisionType> for BaselineContent {
    fn name(&self) -> &str {
        "baseline-content"
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn classify(&self, input: &RevisionInput<'_>) -> Result<Prediction<RevisionType>, ClassifierError> {
        let rev = input.revision;
        let label = match rev.action {
            RevisionAction::Add | RevisionAction::Delete => RevisionType::Content,
            RevisionAction::Modify => {
                let old = rev.aligned.old_text.as_deref().unwrap_or_default();
                let new = rev.aligned.new_text.as_deref().unwrap_or_default();
                if is_surface_edit(old, new) {
                    RevisionType::Surface
                } else {
                    RevisionType::Content
                }
            }
        };
        certain(label)
    }
}

/// Evidence when the revised sentence (old side for deletions) mentions
/// any topic or specificity keyword.
#[derive(Debug, Clone)]
pub struct BaselineEvidence {
    scorer: Scorer,
}

impl BaselineEvidence {
    pub fn new(scorer: Scorer) -> Self {
        Self { scorer }
    }
}

impl Classifier<RevisionPurpose> for BaselineEvidence {
    fn name(&self) -> &str {
        "baseline-evidence"
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn classify(&self, input: &RevisionInput<'_>) -> Result<Prediction<RevisionPurpose>, ClassifierError> {
        let hits = self.scorer.text_hits(input.revision.focus_text());
        certain(if hits.any() {
            RevisionPurpose::Evidence
        } else {
            RevisionPurpose::Reasoning
        })
    }
}

/// Additions are successful when they bring in a keyword the old draft did
/// not use; deletions are successful when they remove text with no keyword
/// at all. Everything else is unsuccessful.
#[derive(Debug, Clone)]
pub struct BaselineSuccess {
    scorer: Scorer,
}

impl BaselineSuccess {
    pub fn new(scorer: Scorer) -> Self {
        Self { scorer }
    }
}

impl Classifier<RevisionQuality> for BaselineSuccess {
    fn name(&self) -> &str {
        "baseline-success"
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn classify(&self, input: &RevisionInput<'_>) -> Result<Prediction<RevisionQuality>, ClassifierError> {
        let rev = input.revision;
        let hits = self.scorer.text_hits(rev.focus_text());
        let successful = match rev.action {
            RevisionAction::Add => hits.keywords.iter().any(|k| !input.old_keywords.contains(k)),
            RevisionAction::Delete => !hits.any(),
            RevisionAction::Modify => false,
        };
        certain(if successful {
            RevisionQuality::Successful
        } else {
            RevisionQuality::Unsuccessful
        })
    }
}

/// The sentences immediately before and after the revision site, joined by
/// a space. `essay` is the new draft, or the old draft for deletions.
#[derive(Debug, Clone, Copy, Default)]
pub struct BaselineContext;

impl BaselineContext {
    pub fn site(rev: &RevisionPair) -> Option<usize> {
        match rev.action {
            RevisionAction::Delete => rev.aligned.old_index,
            _ => rev.aligned.new_index,
        }
    }
}

impl ContextExtractor for BaselineContext {
    fn name(&self) -> &str {
        "baseline-context"
    }

    fn extract(&self, essay: &Document, rev: &RevisionPair) -> Result<String, ClassifierError> {
        let Some(i) = Self::site(rev) else {
            return Ok(String::new());
        };
        let n = essay.sentences.len();
        let mut parts = Vec::with_capacity(2);
        if i > 0 && i - 1 < n {
            parts.push(essay.sentences[i - 1].text.as_str());
        }
        if i + 1 < n {
            parts.push(essay.sentences[i + 1].text.as_str());
        }
        Ok(parts.join(" "))
    }
}
