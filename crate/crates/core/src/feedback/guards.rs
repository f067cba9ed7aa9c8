//! Guard predicates of both decision trees. Each guard carries the operand
//! values it was evaluated on, so a recorded trace can be replayed and
//! checked without access to the original drafts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EfLevel, FeedbackLevel, RfLevel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "guard", rename_all = "snake_case")]
pub enum Guard {
    // evidence-use tree
    NpeAtMostAlpha { npe: u32, alpha: u32 },
    SpcAtMostBeta { spc: u32, beta: u32 },
    EfOtherwise,

    // revision tree, shared root
    NoAttempt { revisions: u32, deletions: u32 },
    NoContentRevision { content_revisions: u32 },

    // previous feedback EF1
    RepeatsUsedTopic { old_npe: u32, new_npe: u32, added_uses_old_topic: bool },
    NoTopicWords { old_npe: u32, new_npe: u32, added_has_topic_word: bool },
    NpeUpSpcFlat { old_npe: u32, new_npe: u32, spc_delta: i64, gamma: u32 },
    Ef1Otherwise,

    // previous feedback EF2
    SpcFlatNoSpcWords { spc_delta: i64, gamma: u32, added_has_spc_word: bool },
    SpcFlatWithSpcWords { spc_delta: i64, gamma: u32, added_has_spc_word: bool },
    Ef2Otherwise,

    // previous feedback EF3
    NoReasoningRevision { reasoning_revisions: u32 },
    SuccessfulReasoning { successful_reasoning: u32 },
    Ef3Otherwise,
}

impl Guard {
    pub fn holds(&self) -> bool {
        match *self {
            Guard::NpeAtMostAlpha { npe, alpha } => npe <= alpha,
            Guard::SpcAtMostBeta { spc, beta } => spc <= beta,
            Guard::NoAttempt { revisions, deletions } => revisions == 0 || deletions == revisions,
            Guard::NoContentRevision { content_revisions } => content_revisions == 0,
            Guard::RepeatsUsedTopic { old_npe, new_npe, added_uses_old_topic } => {
                new_npe == old_npe && added_uses_old_topic
            }
            Guard::NoTopicWords { old_npe, new_npe, added_has_topic_word } => {
                new_npe <= old_npe && !added_has_topic_word
            }
            Guard::NpeUpSpcFlat { old_npe, new_npe, spc_delta, gamma } => {
                new_npe > old_npe && spc_delta <= i64::from(gamma)
            }
            Guard::SpcFlatNoSpcWords { spc_delta, gamma, added_has_spc_word } => {
                spc_delta <= i64::from(gamma) && !added_has_spc_word
            }
            Guard::SpcFlatWithSpcWords { spc_delta, gamma, added_has_spc_word } => {
                spc_delta <= i64::from(gamma) && added_has_spc_word
            }
            Guard::NoReasoningRevision { reasoning_revisions } => reasoning_revisions == 0,
            Guard::SuccessfulReasoning { successful_reasoning } => successful_reasoning > 0,
            Guard::EfOtherwise | Guard::Ef1Otherwise | Guard::Ef2Otherwise | Guard::Ef3Otherwise => true,
        }
    }

    /// Level selected when this guard is the first to hold.
    pub fn level(&self) -> FeedbackLevel {
        use FeedbackLevel::{Ef, Rf};
        match self {
            Guard::NpeAtMostAlpha { .. } => Ef(EfLevel::Ef1),
            Guard::SpcAtMostBeta { .. } => Ef(EfLevel::Ef2),
            Guard::EfOtherwise => Ef(EfLevel::Ef3),
            Guard::NoAttempt { .. } => Rf(RfLevel::Rf1),
            Guard::NoContentRevision { .. } => Rf(RfLevel::Rf2),
            Guard::RepeatsUsedTopic { .. } => Rf(RfLevel::Rf3),
            Guard::NoTopicWords { .. } => Rf(RfLevel::Rf4),
            Guard::NpeUpSpcFlat { .. } => Rf(RfLevel::Rf5),
            Guard::Ef1Otherwise => Rf(RfLevel::Rf6),
            Guard::SpcFlatNoSpcWords { .. } => Rf(RfLevel::Rf4),
            Guard::SpcFlatWithSpcWords { .. } => Rf(RfLevel::Rf5),
            Guard::Ef2Otherwise => Rf(RfLevel::Rf7),
            Guard::NoReasoningRevision { .. } => Rf(RfLevel::Rf8),
            Guard::SuccessfulReasoning { .. } => Rf(RfLevel::Rf10),
            Guard::Ef3Otherwise => Rf(RfLevel::Rf9),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    #[serde(flatten)]
    pub guard: Guard,
    pub holds: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("trace is empty")]
    Empty,
    #[error("entry {0} records holds={1} but its operands say otherwise")]
    Inconsistent(usize, bool),
    #[error("entry {0} holds but evaluation continued past it")]
    NotFirst(usize),
    #[error("last entry does not hold")]
    NoDecision,
}

/// Evaluate guards in order until one holds, recording each evaluation.
pub(crate) fn first_match(guards: impl IntoIterator<Item = Guard>) -> (FeedbackLevel, Vec<TraceEntry>) {
    let mut trace = Vec::new();
    for guard in guards {
        let holds = guard.holds();
        trace.push(TraceEntry { guard, holds });
        if holds {
            return (guard.level(), trace);
        }
    }
    unreachable!("every guard sequence ends with an unconditional guard")
}

/// Re-derive the level from a recorded trace, checking every entry against
/// its operands.
pub fn replay(trace: &[TraceEntry]) -> Result<FeedbackLevel, ReplayError> {
    let last = trace.len().checked_sub(1).ok_or(ReplayError::Empty)?;
    for (i, entry) in trace.iter().enumerate() {
        if entry.guard.holds() != entry.holds {
            return Err(ReplayError::Inconsistent(i, entry.holds));
        }
        if entry.holds && i != last {
            return Err(ReplayError::NotFirst(i));
        }
    }
    if !trace[last].holds {
        return Err(ReplayError::NoDecision);
    }
    Ok(trace[last].guard.level())
}
