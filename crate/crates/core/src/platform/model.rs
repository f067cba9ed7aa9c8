use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::ClassifiedRevision;
use crate::feedback::{EfLevel, FeedbackDecision};
use crate::scoring::EvidenceScore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Student,
    Teacher,
    Admin,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Student => "student",
            Role::Teacher => "teacher",
            Role::Admin => "admin",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "student" => Ok(Role::Student),
            "teacher" => Ok(Role::Teacher),
            "admin" => Ok(Role::Admin),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct User {
    pub id: i64,
    pub username: String,
    pub role: Role,
    pub display_name: String,
    /// Set for students only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classroom_id: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewUser {
    pub username: String,
    pub password: String,
    pub role: Role,
    pub display_name: String,
    #[serde(default)]
    pub classroom_id: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classroom {
    pub id: i64,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub teacher_id: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewClassroom {
    pub name: String,
    #[serde(default)]
    pub teacher_id: Option<i64>,
    #[serde(default)]
    pub grade: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub id: i64,
    pub classroom_id: i64,
    pub article_id: String,
    pub prompt_text: String,
    pub max_drafts: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewAssignment {
    pub classroom_id: i64,
    pub article_id: String,
    pub prompt_text: String,
    #[serde(default = "default_max_drafts")]
    pub max_drafts: u32,
}

fn default_max_drafts() -> u32 {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubmissionStatus {
    Processing,
    Complete,
    Failed,
}

impl SubmissionStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SubmissionStatus::Processing => "processing",
            SubmissionStatus::Complete => "complete",
            SubmissionStatus::Failed => "failed",
        }
    }
}

impl FromStr for SubmissionStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "processing" => Ok(SubmissionStatus::Processing),
            "complete" => Ok(SubmissionStatus::Complete),
            "failed" => Ok(SubmissionStatus::Failed),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmissionRecord {
    pub id: i64,
    pub student_id: i64,
    pub assignment_id: i64,
    pub draft_number: u32,
    pub text: String,
    /// Unix seconds.
    pub submitted_at: u64,
    pub status: SubmissionStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence_score: Option<EvidenceScore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<FeedbackDecision>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub revisions: Vec<ClassifiedRevision>,
    /// EF implied by this draft's own score; the next draft's revision
    /// feedback branches on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ef_level: Option<EfLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Pipeline output written in one step when a submission completes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub evidence_score: EvidenceScore,
    pub feedback: FeedbackDecision,
    pub revisions: Vec<ClassifiedRevision>,
    pub ef_level: EfLevel,
}
