mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use draftwise::embedding::EmbeddingTable;
use draftwise::lexicon::Article;
use draftwise::scoring::{token_matches, Scorer};
use draftwise::text::segment;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{oracle_tokens, toy_case};

#[test]
fn tokenizer_agrees_with_whitespace_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let case = toy_case(&mut rng, false);
        let doc = segment(&case.text);
        let ours: Vec<String> = doc.content_tokens().iter().map(|t| t.normalized.clone()).collect();
        assert_eq!(ours, oracle_tokens(&case.text));
    }
}

#[test]
fn matches_brute_force_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..300 {
        let case = toy_case(&mut rng, false);
        let score = case.scorer().score_text(&case.text).unwrap();
        let oracle = case.oracle();
        assert_eq!(score.npe, oracle.npe, "case {i}: {}", case.text);
        assert_eq!(score.topic_hits.keys().cloned().collect::<BTreeSet<_>>(), oracle.topics, "case {i}");
        assert_eq!(score.spc_vector, oracle.spc_vector, "case {i}");
        assert_eq!(score.spc, oracle.spc_vector.iter().sum::<u32>());
    }
}

#[test]
fn exact_threshold_is_keyword_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..300 {
        let case = toy_case(&mut rng, true);
        let score = case.scorer().score_text(&case.text).unwrap();
        let grep = case.grep();
        assert_eq!(score.npe, grep.npe, "case {i}");
        assert_eq!(score.spc_vector, grep.spc_vector, "case {i}");
    }
}

#[test]
fn similarity_threshold_on_known_angles() {
    // unit vectors at cos 0.95 and cos 0.80 from "hospital"
    let angle = |c: f64| vec![c as f32, (1.0 - c * c).sqrt() as f32];
    let table = EmbeddingTable::from_entries(
        2,
        [
            ("hospital".to_string(), vec![1.0, 0.0]),
            ("clinics".to_string(), angle(0.95)),
            ("ward".to_string(), angle(0.80)),
        ],
    )
    .unwrap();
    assert!(token_matches("clinics", "hospital", &table, 0.9));
    assert!(!token_matches("ward", "hospital", &table, 0.9));
    assert!(token_matches("ward", "hospital", &table, 0.8 - 1e-6));
}

#[test]
fn bundled_lexicon_scores_with_vectors() {
    let article = Article::load(common::fixture("lexicons/mvp.json")).unwrap();
    let table = EmbeddingTable::load(common::fixture("embeddings/toy50.txt")).unwrap();
    let scorer = Scorer::new(Arc::new(article), Arc::new(table));
    // "clinics" is a near-synonym of "hospital" in the toy vectors
    let s = scorer.score_text("The clinics were full every day.").unwrap();
    assert_eq!(s.topic_hits.keys().collect::<Vec<_>>(), ["Hospital"]);
    let exact = scorer
        .clone()
        .with_params(draftwise::lexicon::ScoringParams {
            similarity_threshold: 1.0,
            ..*scorer.params()
        })
        .score_text("The clinics were full every day.")
        .unwrap();
    assert_eq!(exact.npe, 0);
    let empty = scorer.score_text("").unwrap();
    assert_eq!((empty.npe, empty.spc, empty.word_count), (0, 0, 0));
}
