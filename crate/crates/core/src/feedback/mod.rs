//! Feedback selection: the evidence-use tree (EF1..EF3) for a single draft
//! and the revision tree (RF1..RF10) for a pair of drafts.

mod guards;
mod messages;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::ClassifiedRevision;
use crate::lexicon::TopicLexicon;
use crate::revision::{RevisionAction, RevisionPurpose, RevisionQuality};
use crate::scoring::{missing_topics, EvidenceScore, Scorer, ScoringError};

pub use guards::{replay, Guard, ReplayError, TraceEntry};
pub use messages::{render, Bullet, LevelMessages, MessageError, MessageTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            alpha: 2,
            beta: 4,
            gamma: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EfLevel {
    #[serde(rename = "EF1")]
    Ef1,
    #[serde(rename = "EF2")]
    Ef2,
    #[serde(rename = "EF3")]
    Ef3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RfLevel {
    #[serde(rename = "RF1")]
    Rf1,
    #[serde(rename = "RF2")]
    Rf2,
    #[serde(rename = "RF3")]
    Rf3,
    #[serde(rename = "RF4")]
    Rf4,
    #[serde(rename = "RF5")]
    Rf5,
    #[serde(rename = "RF6")]
    Rf6,
    #[serde(rename = "RF7")]
    Rf7,
    #[serde(rename = "RF8")]
    Rf8,
    #[serde(rename = "RF9")]
    Rf9,
    #[serde(rename = "RF10")]
    Rf10,
}

impl EfLevel {
    pub const ALL: [EfLevel; 3] = [EfLevel::Ef1, EfLevel::Ef2, EfLevel::Ef3];

    pub fn as_str(&self) -> &'static str {
        match self {
            EfLevel::Ef1 => "EF1",
            EfLevel::Ef2 => "EF2",
            EfLevel::Ef3 => "EF3",
        }
    }
}

impl RfLevel {
    pub const ALL: [RfLevel; 10] = [
        RfLevel::Rf1,
        RfLevel::Rf2,
        RfLevel::Rf3,
        RfLevel::Rf4,
        RfLevel::Rf5,
        RfLevel::Rf6,
        RfLevel::Rf7,
        RfLevel::Rf8,
        RfLevel::Rf9,
        RfLevel::Rf10,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RfLevel::Rf1 => "RF1",
            RfLevel::Rf2 => "RF2",
            RfLevel::Rf3 => "RF3",
            RfLevel::Rf4 => "RF4",
            RfLevel::Rf5 => "RF5",
            RfLevel::Rf6 => "RF6",
            RfLevel::Rf7 => "RF7",
            RfLevel::Rf8 => "RF8",
            RfLevel::Rf9 => "RF9",
            RfLevel::Rf10 => "RF10",
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unknown feedback level {0:?}")]
pub struct UnknownLevel(pub String);

impl FromStr for EfLevel {
    type Err = UnknownLevel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EfLevel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownLevel(s.to_string()))
    }
}

impl FromStr for RfLevel {
    type Err = UnknownLevel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RfLevel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownLevel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FeedbackLevel {
    Ef(EfLevel),
    Rf(RfLevel),
}

impl FeedbackLevel {
    pub fn all() -> impl Iterator<Item = FeedbackLevel> {
        EfLevel::ALL
            .into_iter()
            .map(FeedbackLevel::Ef)
            .chain(RfLevel::ALL.into_iter().map(FeedbackLevel::Rf))
    }

    pub fn kind(&self) -> FeedbackKind {
        match self {
            FeedbackLevel::Ef(_) => FeedbackKind::Ef,
            FeedbackLevel::Rf(_) => FeedbackKind::Rf,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FeedbackLevel::Ef(l) => l.as_str(),
            FeedbackLevel::Rf(l) => l.as_str(),
        }
    }
}

impl fmt::Display for FeedbackLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for EfLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for RfLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeedbackLevel {
    type Err = UnknownLevel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<EfLevel>()
            .map(FeedbackLevel::Ef)
            .or_else(|_| s.parse::<RfLevel>().map(FeedbackLevel::Rf))
    }
}

impl TryFrom<String> for FeedbackLevel {
    type Error = UnknownLevel;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<FeedbackLevel> for String {
    fn from(value: FeedbackLevel) -> Self {
        value.as_str().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeedbackKind {
    #[serde(rename = "EF")]
    Ef,
    #[serde(rename = "RF")]
    Rf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackDecision {
    pub kind: FeedbackKind,
    pub level: FeedbackLevel,
    pub messages: Vec<String>,
    pub trace: Vec<TraceEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub highlight_topics: Vec<String>,
}

#[derive(Debug, Error)]
pub enum FeedbackError {
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error("previous feedback must be an evidence-use level, got {0}")]
    NotAnEfLevel(String),
}

/// Pure EF tree: `npe <= alpha` gives EF1, else `spc <= beta` gives EF2,
/// else EF3.
pub fn decide_ef(npe: u32, spc: u32, th: &Thresholds) -> (EfLevel, Vec<TraceEntry>) {
    let (level, trace) = guards::first_match([
        Guard::NpeAtMostAlpha { npe, alpha: th.alpha },
        Guard::SpcAtMostBeta { spc, beta: th.beta },
        Guard::EfOtherwise,
    ]);
    match level {
        FeedbackLevel::Ef(l) => (l, trace),
        FeedbackLevel::Rf(_) => unreachable!("EF guards only yield EF levels"),
    }
}

pub fn select_ef(
    score: &EvidenceScore,
    lexicon: &TopicLexicon,
    th: &Thresholds,
    messages: &MessageTable,
) -> Result<FeedbackDecision, FeedbackError> {
    let (level, trace) = decide_ef(score.npe, score.spc, th);
    let mut highlight_topics = Vec::new();
    if level == EfLevel::Ef1 && score.npe as usize <= lexicon.len() / 2 {
        highlight_topics = missing_topics(score, lexicon)?;
    }
    let level = FeedbackLevel::Ef(level);
    Ok(FeedbackDecision {
        kind: FeedbackKind::Ef,
        level,
        messages: messages.render(level, !highlight_topics.is_empty()),
        trace,
        highlight_topics,
    })
}

/// Everything the revision tree looks at, reduced to counts and flags.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevisionFacts {
    pub revisions: u32,
    pub deletions: u32,
    pub content_revisions: u32,
    pub old_npe: u32,
    pub new_npe: u32,
    pub old_spc: u32,
    pub new_spc: u32,
    /// Some added-side sentence mentions a topic the old draft already hit.
    pub added_uses_old_topic: bool,
    /// Some added-side sentence mentions any topic keyword.
    pub added_has_topic_word: bool,
    /// Some added-side sentence mentions any specificity keyword.
    pub added_has_spc_word: bool,
    pub reasoning_revisions: u32,
    pub successful_reasoning: u32,
}

impl RevisionFacts {
    pub fn spc_delta(&self) -> i64 {
        i64::from(self.new_spc) - i64::from(self.old_spc)
    }

    pub fn gather(
        old: &EvidenceScore,
        new: &EvidenceScore,
        revisions: &[ClassifiedRevision],
        scorer: &Scorer,
    ) -> Self {
        let count = |f: &dyn Fn(&ClassifiedRevision) -> bool| revisions.iter().filter(|r| f(r)).count() as u32;
        let old_topics: BTreeSet<&str> = old.topic_hits.keys().map(String::as_str).collect();
        let mut facts = RevisionFacts {
            revisions: revisions.len() as u32,
            deletions: count(&|r| r.pair.action == RevisionAction::Delete),
            content_revisions: count(&|r| r.pair.is_content()),
            old_npe: old.npe,
            new_npe: new.npe,
            old_spc: old.spc,
            new_spc: new.spc,
            reasoning_revisions: count(&|r| r.pair.er_label == Some(RevisionPurpose::Reasoning)),
            successful_reasoning: count(&|r| {
                r.pair.er_label == Some(RevisionPurpose::Reasoning)
                    && r.pair.success_label == Some(RevisionQuality::Successful)
            }),
            ..Default::default()
        };
        for sentence in added_side_sentences(revisions) {
            let hits = scorer.text_hits(sentence);
            facts.added_has_topic_word |= !hits.topics.is_empty();
            facts.added_has_spc_word |= !hits.categories.is_empty();
            facts.added_uses_old_topic |= hits.topics.iter().any(|t| old_topics.contains(t.as_str()));
        }
        facts
    }
}

/// Pure RF tree over pre-computed facts. Guards are tried in a fixed order
/// and the first that holds decides.
pub fn decide_rf(prev_ef: EfLevel, facts: &RevisionFacts, th: &Thresholds) -> (RfLevel, Vec<TraceEntry>) {
    let f = facts;
    let gamma = th.gamma;
    let spc_delta = f.spc_delta();
    let mut guards = vec![
        Guard::NoAttempt {
            revisions: f.revisions,
            deletions: f.deletions,
        },
        Guard::NoContentRevision {
            content_revisions: f.content_revisions,
        },
    ];
    match prev_ef {
        EfLevel::Ef1 => guards.extend([
            Guard::RepeatsUsedTopic {
                old_npe: f.old_npe,
                new_npe: f.new_npe,
                added_uses_old_topic: f.added_uses_old_topic,
            },
            Guard::NoTopicWords {
                old_npe: f.old_npe,
                new_npe: f.new_npe,
                added_has_topic_word: f.added_has_topic_word,
            },
            Guard::NpeUpSpcFlat {
                old_npe: f.old_npe,
                new_npe: f.new_npe,
                spc_delta,
                gamma,
            },
            Guard::Ef1Otherwise,
        ]),
        EfLevel::Ef2 => guards.extend([
            Guard::SpcFlatNoSpcWords {
                spc_delta,
                gamma,
                added_has_spc_word: f.added_has_spc_word,
            },
            Guard::SpcFlatWithSpcWords {
                spc_delta,
                gamma,
                added_has_spc_word: f.added_has_spc_word,
            },
            Guard::Ef2Otherwise,
        ]),
        EfLevel::Ef3 => guards.extend([
            Guard::NoReasoningRevision {
                reasoning_revisions: f.reasoning_revisions,
            },
            Guard::SuccessfulReasoning {
                successful_reasoning: f.successful_reasoning,
            },
            Guard::Ef3Otherwise,
        ]),
    }
    match guards::first_match(guards) {
        (FeedbackLevel::Rf(level), trace) => (level, trace),
        (FeedbackLevel::Ef(_), _) => unreachable!("RF guards only yield RF levels"),
    }
}

pub fn select_rf(
    prev_ef: FeedbackLevel,
    old: &EvidenceScore,
    new: &EvidenceScore,
    revisions: &[ClassifiedRevision],
    scorer: &Scorer,
    th: &Thresholds,
    messages: &MessageTable,
) -> Result<FeedbackDecision, FeedbackError> {
    let FeedbackLevel::Ef(prev_ef) = prev_ef else {
        return Err(FeedbackError::NotAnEfLevel(prev_ef.to_string()));
    };
    let facts = RevisionFacts::gather(old, new, revisions, scorer);
    let (level, trace) = decide_rf(prev_ef, &facts, th);
    let level = FeedbackLevel::Rf(level);
    Ok(FeedbackDecision {
        kind: FeedbackKind::Rf,
        level,
        messages: messages.render(level, false),
        trace,
        highlight_topics: Vec::new(),
    })
}

/// New-side text of every addition and every content modification.
pub fn added_side_sentences(revisions: &[ClassifiedRevision]) -> Vec<&str> {
    revisions
        .iter()
        .filter(|r| match r.pair.action {
            RevisionAction::Add => true,
            RevisionAction::Modify => r.pair.is_content(),
            RevisionAction::Delete => false,
        })
        .filter_map(|r| r.pair.aligned.new_text.as_deref())
        .collect()
}
