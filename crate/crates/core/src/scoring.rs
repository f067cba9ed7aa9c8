//! Evidence-use indicators: number of pieces of evidence (NPE, topic breadth)
//! and specificity (SPC, per-category count of distinct specific keywords).
//!
//! A window "mentions" a keyword when one of its tokens equals the keyword
//! or, when both have vectors, their cosine similarity reaches the threshold.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::EmbeddingTable;
use crate::lexicon::{Article, KeywordGroup, ScoringParams, SpecificityLexicon, TopicLexicon};
use crate::text::{segment, Document, Span, TextError, Window};

#[derive(Debug, Error, PartialEq)]
pub enum ScoringError {
    #[error("score was computed for article {score:?}, lexicon is for {lexicon:?}")]
    ArticleMismatch { score: String, lexicon: String },
    #[error(transparent)]
    Window(#[from] TextError),
}

/// Window spans per topic name; only topics with at least one hit appear.
pub type TopicHits = BTreeMap<String, BTreeSet<Span>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceScore {
    pub article_id: String,
    pub npe: u32,
    pub topic_hits: TopicHits,
    pub spc_vector: Vec<u32>,
    pub spc: u32,
    pub word_count: u32,
    /// Holistic 1..=4 score, filled only by a registered plugin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holistic_score: Option<u8>,
}

/// Holistic essay score hook. Implementations must return values in 1..=4.
pub trait EssayScorePlugin: Send + Sync {
    fn name(&self) -> &str;
    fn score(&self, doc: &Document) -> Option<u8>;
}

/// Exact match, or cosine similarity at or above `threshold` when both
/// words have vectors.
pub fn token_matches(word: &str, keyword: &str, table: &EmbeddingTable, threshold: f64) -> bool {
    if word == keyword {
        return true;
    }
    table
        .similarity(word, keyword)
        .is_some_and(|sim| sim >= threshold)
}

pub fn match_window(window: &Window<'_>, keywords: &[String], table: &EmbeddingTable, threshold: f64) -> bool {
    window.tokens.iter().any(|t| {
        keywords
            .iter()
            .any(|k| token_matches(&t.normalized, k, table, threshold))
    })
}

/// Keyword ids matched by each distinct content token of a document.
/// Ids index into the flattened keyword list of `groups`.
struct TokenMatches<'g> {
    flat: Vec<(usize, &'g str)>,
    by_token: HashMap<String, Vec<usize>>,
}

impl<'g> TokenMatches<'g> {
    fn build(doc: &Document, groups: &'g [KeywordGroup], table: &EmbeddingTable, threshold: f64) -> Self {
        let flat: Vec<(usize, &str)> = groups
            .iter()
            .enumerate()
            .flat_map(|(g, group)| group.keywords.iter().map(move |k| (g, k.as_str())))
            .collect();
        let mut by_token: HashMap<String, Vec<usize>> = HashMap::new();
        for token in doc.tokens.iter().filter(|t| t.is_content()) {
            if by_token.contains_key(&token.normalized) {
                continue;
            }
            let ids = flat
                .iter()
                .enumerate()
                .filter(|(_, (_, k))| token_matches(&token.normalized, k, table, threshold))
                .map(|(id, _)| id)
                .collect();
            by_token.insert(token.normalized.clone(), ids);
        }
        Self { flat, by_token }
    }

    fn window_keywords(&self, window: &Window<'_>) -> BTreeSet<usize> {
        window
            .tokens
            .iter()
            .filter_map(|t| self.by_token.get(&t.normalized))
            .flatten()
            .copied()
            .collect()
    }

    fn group_of(&self, id: usize) -> usize {
        self.flat[id].0
    }
}

pub fn compute_npe(
    doc: &Document,
    lexicon: &TopicLexicon,
    table: &EmbeddingTable,
    params: &ScoringParams,
) -> Result<(u32, TopicHits), ScoringError> {
    let windows = doc.windows(params.window_size, params.stride)?;
    let matches = TokenMatches::build(doc, &lexicon.topics, table, params.similarity_threshold);
    let mut hits = TopicHits::new();
    for window in &windows {
        let span = window.span();
        for id in matches.window_keywords(window) {
            let topic = &lexicon.topics[matches.group_of(id)].name;
            hits.entry(topic.clone()).or_default().insert(span);
        }
    }
    Ok((hits.len() as u32, hits))
}

pub fn compute_spc(
    doc: &Document,
    lexicon: &SpecificityLexicon,
    table: &EmbeddingTable,
    params: &ScoringParams,
) -> Result<(Vec<u32>, u32), ScoringError> {
    let windows = doc.windows(params.window_size, params.stride)?;
    let matches = TokenMatches::build(doc, &lexicon.categories, table, params.similarity_threshold);
    let mut distinct: BTreeSet<usize> = BTreeSet::new();
    for window in &windows {
        distinct.extend(matches.window_keywords(window));
    }
    let mut vector = vec![0u32; lexicon.categories.len()];
    for id in distinct {
        vector[matches.group_of(id)] += 1;
    }
    let total = vector.iter().sum();
    Ok((vector, total))
}

pub fn score_document(
    doc: &Document,
    topics: &TopicLexicon,
    specificity: &SpecificityLexicon,
    table: &EmbeddingTable,
    params: &ScoringParams,
) -> Result<EvidenceScore, ScoringError> {
    let (npe, topic_hits) = compute_npe(doc, topics, table, params)?;
    let (spc_vector, spc) = compute_spc(doc, specificity, table, params)?;
    Ok(EvidenceScore {
        article_id: topics.article_id.clone(),
        npe,
        topic_hits,
        spc_vector,
        spc,
        word_count: doc.word_count() as u32,
        holistic_score: None,
    })
}

/// Topics with no hits, in lexicon order.
pub fn missing_topics(score: &EvidenceScore, lexicon: &TopicLexicon) -> Result<Vec<String>, ScoringError> {
    if score.article_id != lexicon.article_id {
        return Err(ScoringError::ArticleMismatch {
            score: score.article_id.clone(),
            lexicon: lexicon.article_id.clone(),
        });
    }
    Ok(lexicon
        .topics
        .iter()
        .filter(|t| score.topic_hits.get(&t.name).is_none_or(BTreeSet::is_empty))
        .map(|t| t.name.clone())
        .collect())
}

/// Lexicon groups mentioned by a single sentence (or any short text).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TextHits {
    pub topics: BTreeSet<String>,
    pub categories: BTreeSet<String>,
    /// Normalized keywords (topic and category) matched by the text.
    pub keywords: BTreeSet<String>,
}

impl TextHits {
    pub fn any(&self) -> bool {
        !self.keywords.is_empty()
    }
}

/// Scoring bound to one article and embedding table.
#[derive(Clone)]
pub struct Scorer {
    article: Arc<Article>,
    table: Arc<EmbeddingTable>,
    params: ScoringParams,
    plugin: Option<Arc<dyn EssayScorePlugin>>,
}

impl std::fmt::Debug for Scorer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scorer")
            .field("article", &self.article.article_id)
            .field("params", &self.params)
            .field("plugin", &self.plugin.as_ref().map(|p| p.name().to_string()))
            .finish()
    }
}

impl Scorer {
    pub fn new(article: Arc<Article>, table: Arc<EmbeddingTable>) -> Self {
        let params = article.params;
        Self {
            article,
            table,
            params,
            plugin: None,
        }
    }

    pub fn with_params(mut self, params: ScoringParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_plugin(mut self, plugin: Arc<dyn EssayScorePlugin>) -> Self {
        self.plugin = Some(plugin);
        self
    }

    pub fn article(&self) -> &Article {
        &self.article
    }

    pub fn article_arc(&self) -> &Arc<Article> {
        &self.article
    }

    pub fn table(&self) -> &EmbeddingTable {
        &self.table
    }

    pub fn params(&self) -> &ScoringParams {
        &self.params
    }

    pub fn score(&self, doc: &Document) -> Result<EvidenceScore, ScoringError> {
        let mut score = score_document(
            doc,
            &self.article.topics,
            &self.article.specificity,
            &self.table,
            &self.params,
        )?;
        if let Some(plugin) = &self.plugin {
            score.holistic_score = plugin.score(doc).filter(|s| (1..=4).contains(s));
        }
        Ok(score)
    }

    pub fn score_text(&self, text: &str) -> Result<EvidenceScore, ScoringError> {
        self.score(&segment(text))
    }

    pub fn text_hits(&self, text: &str) -> TextHits {
        let doc = segment(text);
        let mut hits = TextHits::default();
        let threshold = self.params.similarity_threshold;
        for token in doc.tokens.iter().filter(|t| t.is_content()) {
            for (groups, names) in [
                (&self.article.topics.topics, &mut hits.topics),
                (&self.article.specificity.categories, &mut hits.categories),
            ] {
                for group in groups {
                    for kw in &group.keywords {
                        if token_matches(&token.normalized, kw, &self.table, threshold) {
                            names.insert(group.name.clone());
                            hits.keywords.insert(kw.clone());
                        }
                    }
                }
            }
        }
        hits
    }

    /// Keywords (topic and category) mentioned anywhere in the document.
    pub fn document_keywords(&self, doc: &Document) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for s in &doc.sentences {
            out.extend(self.text_hits(&s.text).keywords);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::group;

    fn unit(deg: f64) -> Vec<f32> {
        let r = deg.to_radians();
        vec![r.cos() as f32, r.sin() as f32]
    }

    fn mvp_topics() -> TopicLexicon {
        TopicLexicon::new(
            "mvp",
            vec![
                group("Hospital", &["hospital"]),
                group("Malaria", &["malaria"]),
                group("Farming", &["farm"]),
                group("School", &["school"]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn exact_match_window() {
        let doc = segment("the hospital had no medicine");
        let w = doc.windows(8, 1).unwrap();
        assert!(match_window(&w[0], &["hospital".into()], &EmbeddingTable::empty(), 0.9));
    }

    #[test]
    fn soft_match_follows_threshold() {
        let doc = segment("clinics were full");
        let w = doc.windows(8, 1).unwrap();
        let kw = vec!["hospital".to_string()];
        // cos(18.19 deg) ~= 0.95, cos(36.87 deg) = 0.80
        let close = EmbeddingTable::from_entries(
            2,
            [("hospital".into(), unit(0.0)), ("clinics".into(), unit(0.95f64.acos().to_degrees()))],
        )
        .unwrap();
        let far = EmbeddingTable::from_entries(
            2,
            [("hospital".into(), unit(0.0)), ("clinics".into(), unit(0.80f64.acos().to_degrees()))],
        )
        .unwrap();
        assert!(match_window(&w[0], &kw, &close, 0.9));
        assert!(!match_window(&w[0], &kw, &far, 0.9));
    }

    #[test]
    fn npe_counts_topics() {
        let doc = segment("the hospital had no doctor and malaria kills kids");
        let (npe, hits) = compute_npe(&doc, &mvp_topics(), &EmbeddingTable::empty(), &ScoringParams::default()).unwrap();
        assert_eq!(npe, 2);
        assert_eq!(hits.keys().cloned().collect::<Vec<_>>(), vec!["Hospital", "Malaria"]);
        let score = EvidenceScore {
            article_id: "mvp".into(),
            npe,
            topic_hits: hits,
            spc_vector: vec![],
            spc: 0,
            word_count: 0,
            holistic_score: None,
        };
        assert_eq!(missing_topics(&score, &mvp_topics()).unwrap(), vec!["Farming", "School"]);
    }

    #[test]
    fn npe_bounded_by_topic_count() {
        let doc = segment("hospital malaria farm school hospital again");
        let (npe, _) = compute_npe(&doc, &mvp_topics(), &EmbeddingTable::empty(), &ScoringParams::default()).unwrap();
        assert_eq!(npe, 4);
    }

    #[test]
    fn empty_document_scores_zero() {
        let spec = SpecificityLexicon::new("mvp", vec![group("A", &["a"]), group("B", &["b"])]).unwrap();
        let score = score_document(&segment(""), &mvp_topics(), &spec, &EmbeddingTable::empty(), &ScoringParams::default()).unwrap();
        assert_eq!(score.npe, 0);
        assert!(score.topic_hits.is_empty());
        assert_eq!(score.spc_vector, vec![0, 0]);
        assert_eq!(score.spc, 0);
        assert_eq!(score.word_count, 0);
        assert_eq!(missing_topics(&score, &mvp_topics()).unwrap().len(), 4);
    }

    #[test]
    fn spc_counts_distinct_keywords() {
        let spec = SpecificityLexicon::new(
            "mvp",
            vec![group("A", &["nets", "five"]), group("B", &["seeds"]), group("C", &["lunch"])],
        )
        .unwrap();
        let doc = segment("Bed nets cost five dollars. Seeds grew.");
        let (v, s) = compute_spc(&doc, &spec, &EmbeddingTable::empty(), &ScoringParams::default()).unwrap();
        assert_eq!((v, s), (vec![2, 1, 0], 3));

        let repeated = segment("nets nets nets nets nets");
        let (v, s) = compute_spc(&repeated, &spec, &EmbeddingTable::empty(), &ScoringParams::default()).unwrap();
        assert_eq!((v, s), (vec![1, 0, 0], 1));
    }

    #[test]
    fn one_window_credits_two_topics() {
        let doc = segment("hospital malaria");
        let (npe, hits) = compute_npe(&doc, &mvp_topics(), &EmbeddingTable::empty(), &ScoringParams::default()).unwrap();
        assert_eq!(npe, 2);
        assert_eq!(hits["Hospital"], hits["Malaria"]);
    }

    #[test]
    fn missing_topics_rejects_other_article() {
        let score = EvidenceScore {
            article_id: "space".into(),
            npe: 0,
            topic_hits: TopicHits::new(),
            spc_vector: vec![],
            spc: 0,
            word_count: 0,
            holistic_score: None,
        };
        assert!(matches!(
            missing_topics(&score, &mvp_topics()),
            Err(ScoringError::ArticleMismatch { .. })
        ));
    }
}
