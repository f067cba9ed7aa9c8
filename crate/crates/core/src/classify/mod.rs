//! Three-stage revision classification: surface/content, then
//! evidence/reasoning and successful/unsuccessful for content revisions.
//!
//! Each stage is a [`Classifier`] behind a uniform contract. A stage may
//! run an adapter (remote chat model, learned model) with a rule-based
//! baseline behind it; adapter failures fall back to the baseline and are
//! recorded in the revision's provenance.

pub mod baseline;
pub mod chat;
pub mod registry;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::revision::{RevisionAction, RevisionPair, RevisionPurpose, RevisionQuality, RevisionType};
use crate::scoring::Scorer;
use crate::text::Document;

pub use baseline::{BaselineContent, BaselineContext, BaselineEvidence, BaselineSuccess};

/// Closed label vocabulary of one stage.
pub trait Label: Copy + Eq + std::fmt::Debug + Send + Sync + 'static {
    const SPACE: &'static [Self];
    fn name(&self) -> &'static str;
}

impl Label for RevisionType {
    const SPACE: &'static [Self] = RevisionType::ALL;
    fn name(&self) -> &'static str {
        self.as_str()
    }
}

impl Label for RevisionPurpose {
    const SPACE: &'static [Self] = RevisionPurpose::ALL;
    fn name(&self) -> &'static str {
        self.as_str()
    }
}

impl Label for RevisionQuality {
    const SPACE: &'static [Self] = RevisionQuality::ALL;
    fn name(&self) -> &'static str {
        self.as_str()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifierError {
    #[error("remote endpoint failed: {0}")]
    Transport(String),
    #[error("remote endpoint timed out")]
    Timeout,
    #[error("unparseable model response {0:?}")]
    Malformed(String),
    #[error("classifier not configured: {0}")]
    Unavailable(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<L> {
    pub label: L,
    pub confidence: f64,
}

/// What a classifier sees for one revision.
pub struct RevisionInput<'a> {
    pub revision: &'a RevisionPair,
    pub old_doc: &'a Document,
    pub new_doc: &'a Document,
    /// Argument context, present for the success stage.
    pub context: Option<&'a str>,
    /// Lexicon keywords already mentioned in the old draft.
    pub old_keywords: &'a BTreeSet<String>,
}

pub trait Classifier<L: Label>: Send + Sync {
    fn name(&self) -> &str;
    fn label_space(&self) -> &'static [L] {
        L::SPACE
    }
    fn deterministic(&self) -> bool;
    fn classify(&self, input: &RevisionInput<'_>) -> Result<Prediction<L>, ClassifierError>;
}

/// Produces the argument context fed to the success stage.
pub trait ContextExtractor: Send + Sync {
    fn name(&self) -> &str;
    fn extract(&self, essay: &Document, revision: &RevisionPair) -> Result<String, ClassifierError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Content,
    Evidence,
    Context,
    Success,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageProvenance {
    pub stage: Stage,
    /// Name of the classifier that produced the label.
    pub classifier: String,
    pub confidence: f64,
    /// Set when the configured adapter failed and the baseline answered.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedRevision {
    #[serde(flatten)]
    pub pair: RevisionPair,
    #[serde(default)]
    pub provenance: Vec<StageProvenance>,
}

impl ClassifiedRevision {
    pub fn unlabeled(pair: RevisionPair) -> Self {
        Self {
            pair,
            provenance: Vec::new(),
        }
    }

    pub fn used_fallback(&self) -> bool {
        self.provenance.iter().any(|p| p.fallback_from.is_some())
    }
}

struct StageSlot<L: Label> {
    primary: Arc<dyn Classifier<L>>,
    fallback: Arc<dyn Classifier<L>>,
}

impl<L: Label> StageSlot<L> {
    fn run(&self, stage: Stage, input: &RevisionInput<'_>) -> (L, StageProvenance) {
        let attempt = self.primary.classify(input);
        let (pred, fallback_reason) = match attempt {
            Ok(p) if self.primary.label_space().contains(&p.label) => (p, None),
            Ok(p) => (self.baseline(input), Some(format!("label {:?} outside label space", p.label))),
            Err(e) => (self.baseline(input), Some(e.to_string())),
        };
        let fell_back = fallback_reason.is_some();
        let prov = StageProvenance {
            stage,
            classifier: if fell_back {
                self.fallback.name().to_string()
            } else {
                self.primary.name().to_string()
            },
            confidence: pred.confidence,
            fallback_from: fell_back.then(|| self.primary.name().to_string()),
            fallback_reason,
        };
        (pred.label, prov)
    }

    fn baseline(&self, input: &RevisionInput<'_>) -> Prediction<L> {
        self.fallback
            .classify(input)
            .expect("baseline classifiers are total")
    }
}

/// The configured classifier stack for one article.
pub struct RevisionPipeline {
    scorer: Scorer,
    content: StageSlot<RevisionType>,
    evidence: StageSlot<RevisionPurpose>,
    success: StageSlot<RevisionQuality>,
    context: Arc<dyn ContextExtractor>,
    context_fallback: Arc<dyn ContextExtractor>,
}

impl RevisionPipeline {
    /// All stages run the rule-based baselines.
    pub fn baseline(scorer: Scorer) -> Self {
        let content: Arc<dyn Classifier<RevisionType>> = Arc::new(BaselineContent);
        let evidence: Arc<dyn Classifier<RevisionPurpose>> = Arc::new(BaselineEvidence::new(scorer.clone()));
        let success: Arc<dyn Classifier<RevisionQuality>> = Arc::new(BaselineSuccess::new(scorer.clone()));
        let context: Arc<dyn ContextExtractor> = Arc::new(BaselineContext);
        Self {
            scorer,
            content: StageSlot {
                primary: content.clone(),
                fallback: content,
            },
            evidence: StageSlot {
                primary: evidence.clone(),
                fallback: evidence,
            },
            success: StageSlot {
                primary: success.clone(),
                fallback: success,
            },
            context: context.clone(),
            context_fallback: context,
        }
    }

    pub fn with_content(mut self, c: Arc<dyn Classifier<RevisionType>>) -> Self {
        self.content.primary = c;
        self
    }

    pub fn with_evidence(mut self, c: Arc<dyn Classifier<RevisionPurpose>>) -> Self {
        self.evidence.primary = c;
        self
    }

    pub fn with_success(mut self, c: Arc<dyn Classifier<RevisionQuality>>) -> Self {
        self.success.primary = c;
        self
    }

    pub fn with_context(mut self, c: Arc<dyn ContextExtractor>) -> Self {
        self.context = c;
        self
    }

    pub fn scorer(&self) -> &Scorer {
        &self.scorer
    }

    /// Names of the primary classifier per stage.
    pub fn describe(&self) -> [(Stage, String); 4] {
        [
            (Stage::Content, self.content.primary.name().to_string()),
            (Stage::Evidence, self.evidence.primary.name().to_string()),
            (Stage::Context, self.context.name().to_string()),
            (Stage::Success, self.success.primary.name().to_string()),
        ]
    }

    fn context_for(&self, essay: &Document, rev: &RevisionPair) -> (String, StageProvenance) {
        let (text, reason) = match self.context.extract(essay, rev) {
            Ok(t) => (t, None),
            Err(e) => (
                self.context_fallback
                    .extract(essay, rev)
                    .expect("baseline context is total"),
                Some(e.to_string()),
            ),
        };
        let fell_back = reason.is_some();
        let prov = StageProvenance {
            stage: Stage::Context,
            classifier: if fell_back {
                self.context_fallback.name().to_string()
            } else {
                self.context.name().to_string()
            },
            confidence: 1.0,
            fallback_from: fell_back.then(|| self.context.name().to_string()),
            fallback_reason: reason,
        };
        (text, prov)
    }

    /// Run the stages in order. Surface revisions stop after the first
    /// stage. Output order matches input order.
    pub fn classify_all(&self, revisions: &[RevisionPair], old_doc: &Document, new_doc: &Document) -> Vec<ClassifiedRevision> {
        let old_keywords = self.scorer.document_keywords(old_doc);
        revisions
            .iter()
            .map(|rev| self.classify_one(rev, old_doc, new_doc, &old_keywords))
            .collect()
    }

    fn classify_one(
        &self,
        rev: &RevisionPair,
        old_doc: &Document,
        new_doc: &Document,
        old_keywords: &BTreeSet<String>,
    ) -> ClassifiedRevision {
        let mut pair = rev.clone();
        pair.type_label = None;
        pair.er_label = None;
        pair.success_label = None;
        pair.argument_context = None;
        let mut provenance = Vec::with_capacity(4);

        let input = RevisionInput {
            revision: &pair,
            old_doc,
            new_doc,
            context: None,
            old_keywords,
        };
        let (ty, prov) = self.content.run(Stage::Content, &input);
        provenance.push(prov);
        if ty == RevisionType::Surface {
            pair.type_label = Some(ty);
            return ClassifiedRevision { pair, provenance };
        }

        let (er, prov) = self.evidence.run(Stage::Evidence, &input);
        provenance.push(prov);

        let essay = if pair.action == RevisionAction::Delete { old_doc } else { new_doc };
        let (context, prov) = self.context_for(essay, &pair);
        provenance.push(prov);

        let input = RevisionInput {
            revision: &pair,
            old_doc,
            new_doc,
            context: Some(&context),
            old_keywords,
        };
        let (success, prov) = self.success.run(Stage::Success, &input);
        provenance.push(prov);

        pair.type_label = Some(ty);
        pair.er_label = Some(er);
        pair.success_label = Some(success);
        pair.argument_context = Some(context);
        ClassifiedRevision { pair, provenance }
    }
}
