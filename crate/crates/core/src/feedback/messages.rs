//! Feedback message tables. Levels and guard structure live in code; the
//! wording lives in JSON so it can be edited without a rebuild.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::FeedbackLevel;

const DEFAULT_TABLE: &str = include_str!("messages.json");

#[derive(Debug, Error)]
pub enum MessageError {
    #[error("io error reading message table: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed message table: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown feedback level {0:?}")]
    UnknownLevel(String),
    #[error("message table has no entry for {0}")]
    MissingLevel(FeedbackLevel),
    #[error("level {0} listed twice in message table")]
    Duplicate(FeedbackLevel),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bullet {
    pub text: String,
    /// Shown only when article passages were highlighted for the student.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub requires_highlight: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelMessages {
    pub level: String,
    pub name: String,
    pub bullets: Vec<Bullet>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableFile {
    schema_version: u32,
    levels: Vec<LevelMessages>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageTable {
    levels: BTreeMap<FeedbackLevel, LevelMessages>,
}

impl Default for MessageTable {
    fn default() -> Self {
        Self::from_json(DEFAULT_TABLE).expect("bundled message table is valid")
    }
}

impl MessageTable {
    pub fn from_json(json: &str) -> Result<Self, MessageError> {
        let file: TableFile = serde_json::from_str(json)?;
        let mut levels = BTreeMap::new();
        for entry in file.levels {
            let level: FeedbackLevel = entry
                .level
                .parse()
                .map_err(|_| MessageError::UnknownLevel(entry.level.clone()))?;
            if levels.insert(level, entry).is_some() {
                return Err(MessageError::Duplicate(level));
            }
        }
        for level in FeedbackLevel::all() {
            if !levels.contains_key(&level) {
                return Err(MessageError::MissingLevel(level));
            }
        }
        Ok(Self { levels })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MessageError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn entry(&self, level: FeedbackLevel) -> &LevelMessages {
        // constructor guarantees every level is present
        &self.levels[&level]
    }

    /// Bullet texts for `level`. Highlight-dependent bullets are included
    /// only when `highlighted` is set.
    pub fn render(&self, level: FeedbackLevel, highlighted: bool) -> Vec<String> {
        self.entry(level)
            .bullets
            .iter()
            .filter(|b| highlighted || !b.requires_highlight)
            .map(|b| b.text.clone())
            .collect()
    }
}

/// Render by level name, e.g. `"RF10"`.
pub fn render(level: &str, table: &MessageTable, highlighted: bool) -> Result<Vec<String>, MessageError> {
    let level: FeedbackLevel = level
        .parse()
        .map_err(|_| MessageError::UnknownLevel(level.to_string()))?;
    Ok(table.render(level, highlighted))
}
