//! Article configuration: topic and specificity keyword lists plus the
//! per-article scoring parameters and feedback thresholds.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::normalize_word;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("io error reading lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed lexicon json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported lexicon schema_version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("duplicate {kind} name {name:?}")]
    DuplicateName { kind: &'static str, name: String },
    #[error("{kind} {name:?} has no keywords")]
    EmptyKeywords { kind: &'static str, name: String },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("highlight span for unknown topic {0:?}")]
    UnknownHighlightTopic(String),
    #[error("highlight span {start}..{end} is outside the article text")]
    HighlightOutOfRange { start: usize, end: usize },
}

/// A named keyword group (an evidence topic or a specificity category).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordGroup {
    pub name: String,
    pub keywords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicLexicon {
    pub article_id: String,
    pub topics: Vec<KeywordGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecificityLexicon {
    pub article_id: String,
    pub categories: Vec<KeywordGroup>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringParams {
    pub window_size: usize,
    pub stride: usize,
    pub similarity_threshold: f64,
}

impl Default for ScoringParams {
    fn default() -> Self {
        Self {
            window_size: 8,
            stride: 1,
            similarity_threshold: 0.9,
        }
    }
}

impl ScoringParams {
    pub fn validate(&self) -> Result<(), LexiconError> {
        if self.window_size == 0 {
            return Err(LexiconError::Parameter("window_size must be >= 1".into()));
        }
        if self.stride == 0 {
            return Err(LexiconError::Parameter("stride must be >= 1".into()));
        }
        if !(self.similarity_threshold > 0.0 && self.similarity_threshold <= 1.0) {
            return Err(LexiconError::Parameter(format!(
                "similarity_threshold must be in (0, 1], got {}",
                self.similarity_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightSpan {
    pub topic: String,
    pub start: usize,
    pub end: usize,
}

/// On-disk layout of an article lexicon file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LexiconFile {
    pub schema_version: u32,
    pub article_id: String,
    #[serde(default = "default_window")]
    pub window_size: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_threshold")]
    pub similarity_threshold: f64,
    #[serde(default = "default_alpha")]
    pub alpha: u32,
    #[serde(default = "default_beta")]
    pub beta: u32,
    #[serde(default = "default_gamma")]
    pub gamma: u32,
    pub topics: Vec<KeywordGroup>,
    pub categories: Vec<KeywordGroup>,
    #[serde(default)]
    pub article_text: String,
    #[serde(default)]
    pub topic_highlight_spans: Vec<HighlightSpan>,
}

fn default_window() -> usize {
    8
}
fn default_stride() -> usize {
    1
}
fn default_threshold() -> f64 {
    0.9
}
fn default_alpha() -> u32 {
    2
}
fn default_beta() -> u32 {
    4
}
fn default_gamma() -> u32 {
    2
}

/// A validated article: lexicons, scoring parameters, thresholds and the
/// article text with its topic highlight spans.
#[derive(Debug, Clone)]
pub struct Article {
    pub article_id: String,
    pub params: ScoringParams,
    pub thresholds: crate::feedback::Thresholds,
    pub topics: TopicLexicon,
    pub specificity: SpecificityLexicon,
    pub article_text: String,
    pub highlight_spans: Vec<HighlightSpan>,
}

impl Article {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(json: &str) -> Result<Self, LexiconError> {
        let file: LexiconFile = serde_json::from_str(json)?;
        Self::from_file(file)
    }

    pub fn from_file(file: LexiconFile) -> Result<Self, LexiconError> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(LexiconError::Schema(file.schema_version));
        }
        let params = ScoringParams {
            window_size: file.window_size,
            stride: file.stride,
            similarity_threshold: file.similarity_threshold,
        };
        params.validate()?;
        let topics = normalize_groups("topic", file.topics)?;
        let categories = normalize_groups("category", file.categories)?;

        let topic_names: HashSet<&str> = topics.iter().map(|t| t.name.as_str()).collect();
        for span in &file.topic_highlight_spans {
            if !topic_names.contains(span.topic.as_str()) {
                return Err(LexiconError::UnknownHighlightTopic(span.topic.clone()));
            }
            let in_range = span.start <= span.end
                && span.end <= file.article_text.len()
                && file.article_text.is_char_boundary(span.start)
                && file.article_text.is_char_boundary(span.end);
            if !in_range {
                return Err(LexiconError::HighlightOutOfRange {
                    start: span.start,
                    end: span.end,
                });
            }
        }

        Ok(Self {
            params,
            thresholds: crate::feedback::Thresholds {
                alpha: file.alpha,
                beta: file.beta,
                gamma: file.gamma,
            },
            topics: TopicLexicon {
                article_id: file.article_id.clone(),
                topics,
            },
            specificity: SpecificityLexicon {
                article_id: file.article_id.clone(),
                categories,
            },
            article_id: file.article_id,
            article_text: file.article_text,
            highlight_spans: file.topic_highlight_spans,
        })
    }

    /// Every keyword of every topic and category, deduplicated.
    pub fn all_keywords(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.topics
            .topics
            .iter()
            .chain(&self.specificity.categories)
            .flat_map(|g| g.keywords.iter())
            .filter(|k| seen.insert(k.as_str()))
            .map(String::as_str)
            .collect()
    }

    pub fn highlights_for<'a>(&'a self, topics: &'a [String]) -> impl Iterator<Item = &'a HighlightSpan> {
        self.highlight_spans
            .iter()
            .filter(move |s| topics.iter().any(|t| t == &s.topic))
    }
}

/// Phrases are split into single tokens, each token normalized; duplicates
/// within a group are dropped keeping first occurrence.
fn normalize_groups(kind: &'static str, groups: Vec<KeywordGroup>) -> Result<Vec<KeywordGroup>, LexiconError> {
    let mut names = HashSet::new();
    let mut out = Vec::with_capacity(groups.len());
    for group in groups {
        if !names.insert(group.name.clone()) {
            return Err(LexiconError::DuplicateName {
                kind,
                name: group.name,
            });
        }
        let mut seen = HashSet::new();
        let keywords: Vec<String> = group
            .keywords
            .iter()
            .flat_map(|phrase| phrase.split_whitespace())
            .map(normalize_word)
            .filter(|k| !k.is_empty() && seen.insert(k.clone()))
            .collect();
        if keywords.is_empty() {
            return Err(LexiconError::EmptyKeywords {
                kind,
                name: group.name,
            });
        }
        out.push(KeywordGroup {
            name: group.name,
            keywords,
        });
    }
    Ok(out)
}

impl TopicLexicon {
    pub fn new(article_id: impl Into<String>, topics: Vec<KeywordGroup>) -> Result<Self, LexiconError> {
        Ok(Self {
            article_id: article_id.into(),
            topics: normalize_groups("topic", topics)?,
        })
    }

    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }
}

impl SpecificityLexicon {
    pub fn new(article_id: impl Into<String>, categories: Vec<KeywordGroup>) -> Result<Self, LexiconError> {
        Ok(Self {
            article_id: article_id.into(),
            categories: normalize_groups("category", categories)?,
        })
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }
}

/// Shorthand for building keyword groups in tests and fixtures.
pub fn group(name: &str, keywords: &[&str]) -> KeywordGroup {
    KeywordGroup {
        name: name.to_string(),
        keywords: keywords.iter().map(|k| k.to_string()).collect(),
    }
}
