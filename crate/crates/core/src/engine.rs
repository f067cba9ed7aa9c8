//! One-article facade: score a draft, or compare two drafts, and pick the
//! feedback message.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classify::{ClassifiedRevision, RevisionPipeline};
use crate::feedback::{self, EfLevel, FeedbackDecision, FeedbackError, FeedbackLevel, MessageTable, Thresholds};
use crate::lexicon::Article;
use crate::revision::{align_with, extract_revisions, AlignConfig, AlignedPair, SentenceSimilarity, TokenOverlap};
use crate::scoring::{EvidenceScore, Scorer};
use crate::text::segment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DraftReport {
    pub score: EvidenceScore,
    pub feedback: FeedbackDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionReport {
    pub old_score: EvidenceScore,
    pub new_score: EvidenceScore,
    pub alignment: Vec<AlignedPair>,
    pub revisions: Vec<ClassifiedRevision>,
    /// EF level the new draft would receive on its own; the next revision
    /// round branches on it.
    pub implied_ef: EfLevel,
    pub feedback: FeedbackDecision,
}

pub struct Engine {
    scorer: Scorer,
    pipeline: RevisionPipeline,
    messages: Arc<MessageTable>,
    thresholds: Thresholds,
    similarity: Arc<dyn SentenceSimilarity>,
    align: AlignConfig,
}

impl Engine {
    /// Baseline classifiers, bundled messages, thresholds from the article.
    pub fn new(scorer: Scorer) -> Self {
        let thresholds = scorer.article().thresholds;
        Self {
            pipeline: RevisionPipeline::baseline(scorer.clone()),
            scorer,
            messages: Arc::new(MessageTable::default()),
            thresholds,
            similarity: Arc::new(TokenOverlap),
            align: AlignConfig::default(),
        }
    }

    pub fn with_pipeline(mut self, pipeline: RevisionPipeline) -> Self {
        self.pipeline = pipeline;
        self
    }

    pub fn with_messages(mut self, messages: Arc<MessageTable>) -> Self {
        self.messages = messages;
        self
    }

    pub fn with_thresholds(mut self, thresholds: Thresholds) -> Self {
        self.thresholds = thresholds;
        self
    }

    pub fn with_similarity(mut self, sim: Arc<dyn SentenceSimilarity>) -> Self {
        self.similarity = sim;
        self
    }

    pub fn with_align_config(mut self, config: AlignConfig) -> Self {
        self.align = config;
        self
    }

    pub fn scorer(&self) -> &Scorer {
        &self.scorer
    }

    pub fn article(&self) -> &Article {
        self.scorer.article()
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    pub fn messages(&self) -> &MessageTable {
        &self.messages
    }

    pub fn pipeline(&self) -> &RevisionPipeline {
        &self.pipeline
    }

    pub fn score_draft(&self, text: &str) -> Result<DraftReport, FeedbackError> {
        let score = self.scorer.score_text(text)?;
        let feedback = feedback::select_ef(&score, &self.article().topics, &self.thresholds, &self.messages)?;
        Ok(DraftReport { score, feedback })
    }

    pub fn implied_ef(&self, score: &EvidenceScore) -> EfLevel {
        feedback::decide_ef(score.npe, score.spc, &self.thresholds).0
    }

    pub fn revise(&self, old: &str, new: &str, prev_ef: EfLevel) -> Result<RevisionReport, FeedbackError> {
        let (old_doc, new_doc) = (segment(old), segment(new));
        let old_score = self.scorer.score(&old_doc)?;
        let new_score = self.scorer.score(&new_doc)?;
        let alignment = align_with(&old_doc, &new_doc, self.similarity.as_ref(), &self.align);
        let pairs = extract_revisions(&alignment);
        let revisions = self.pipeline.classify_all(&pairs, &old_doc, &new_doc);
        let feedback = feedback::select_rf(
            FeedbackLevel::Ef(prev_ef),
            &old_score,
            &new_score,
            &revisions,
            &self.scorer,
            &self.thresholds,
            &self.messages,
        )?;
        let implied_ef = self.implied_ef(&new_score);
        Ok(RevisionReport {
            old_score,
            new_score,
            alignment,
            revisions,
            implied_ef,
            feedback,
        })
    }
}
