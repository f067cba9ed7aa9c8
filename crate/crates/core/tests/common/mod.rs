#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use draftwise::lexicon::KeywordGroup;
use draftwise::platform::{self, BootstrapAdmin, PlatformConfig, SteppingClock};

pub fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(rel: &str) -> PathBuf {
    manifest().join("fixtures").join(rel)
}

/// Compares `actual` with a golden file, or rewrites it when
/// `DRAFTWISE_UPDATE_GOLDEN` is set.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = fixture("golden").join(name);
    if std::env::var_os("DRAFTWISE_UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        let line = expected
            .lines()
            .zip(actual.lines())
            .position(|(a, b)| a != b)
            .map(|i| i + 1)
            .unwrap_or_else(|| expected.lines().count().min(actual.lines().count()) + 1);
        Err(format!("{name} differs from golden output at line {line}"))
    }
}

// ---------------------------------------------------------------------------
// brute-force scoring oracle

/// Whitespace tokens, lower-cased, with non-alphanumeric edges trimmed.
pub fn oracle_tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Start and end of every window over `n` tokens.
pub fn oracle_windows(n: usize, size: usize, stride: usize) -> Vec<(usize, usize)> {
    if n == 0 {
        return vec![];
    }
    if n <= size {
        return vec![(0, n)];
    }
    let mut starts = BTreeSet::new();
    let mut s = 0;
    while s + size <= n {
        starts.insert(s);
        s += stride;
    }
    starts.insert(n - size);
    starts.into_iter().map(|s| (s, s + size)).collect()
}

pub fn oracle_cosine(a: &[f32], b: &[f32]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum();
    let na = a.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    (na > 0.0 && nb > 0.0).then(|| dot / (na * nb))
}

pub struct OracleScore {
    pub npe: u32,
    pub topics: BTreeSet<String>,
    pub spc_vector: Vec<u32>,
}

pub fn oracle_score(
    text: &str,
    topics: &[KeywordGroup],
    categories: &[KeywordGroup],
    vectors: &HashMap<String, Vec<f32>>,
    size: usize,
    stride: usize,
    threshold: f64,
) -> OracleScore {
    let tokens = oracle_tokens(text);
    let windows = oracle_windows(tokens.len(), size, stride);
    let matches = |w: &str, k: &str| {
        w == k
            || match (vectors.get(w), vectors.get(k)) {
                (Some(a), Some(b)) => oracle_cosine(a, b).is_some_and(|c| c >= threshold),
                _ => false,
            }
    };
    let mut hit_topics = BTreeSet::new();
    for t in topics {
        let hit = windows
            .iter()
            .any(|&(s, e)| tokens[s..e].iter().any(|w| t.keywords.iter().any(|k| matches(w, k))));
        if hit {
            hit_topics.insert(t.name.clone());
        }
    }
    let spc_vector = categories
        .iter()
        .map(|c| {
            c.keywords
                .iter()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .filter(|k| windows.iter().any(|&(s, e)| tokens[s..e].iter().any(|w| matches(w, k))))
                .count() as u32
        })
        .collect();
    OracleScore {
        npe: hit_topics.len() as u32,
        topics: hit_topics,
        spc_vector,
    }
}

// ---------------------------------------------------------------------------
// independent metric formulas

pub fn oracle_qwk(a: &[i64], b: &[i64], min: i64, max: i64) -> Option<f64> {
    let k = (max - min + 1) as usize;
    let n = a.len() as f64;
    let mut observed = vec![vec![0.0; k]; k];
    for (x, y) in a.iter().zip(b) {
        observed[(x - min) as usize][(y - min) as usize] += 1.0;
    }
    let row: Vec<f64> = (0..k).map(|i| observed[i].iter().sum()).collect();
    let col: Vec<f64> = (0..k).map(|j| (0..k).map(|i| observed[i][j]).sum()).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..k {
        for j in 0..k {
            let w = ((i as f64 - j as f64) / (k as f64 - 1.0)).powi(2);
            num += w * observed[i][j] / n;
            den += w * row[i] * col[j] / (n * n);
        }
    }
    (den > 0.0).then(|| 1.0 - num / den)
}

pub struct OracleClass {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn oracle_class(pred: &[&str], gold: &[&str], label: &str) -> OracleClass {
    let tp = pred.iter().zip(gold).filter(|(p, g)| **p == label && **g == label).count() as f64;
    let pp = pred.iter().filter(|p| **p == label).count() as f64;
    let gp = gold.iter().filter(|g| **g == label).count() as f64;
    let precision = if pp == 0.0 { 0.0 } else { tp / pp };
    let recall = if gp == 0.0 { 0.0 } else { tp / gp };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    OracleClass { precision, recall, f1 }
}

// ---------------------------------------------------------------------------
// k-edit alignment fuzz

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Edit {
    Add,
    Delete,
    Modify,
}

pub struct EditCase {
    pub old: Vec<String>,
    pub new: Vec<String>,
    /// `(edit, old_index, new_index)` for every applied edit.
    pub expected: BTreeSet<(Edit, Option<usize>, Option<usize>)>,
}

/// Sentences of eight words drawn from disjoint vocabularies, so unrelated
/// sentences share no token. A modification swaps one word.
pub fn edit_case(rng: &mut impl rand::Rng, k: usize) -> EditCase {
    let mut fresh = 0usize;
    let sentence = |fresh: &mut usize| {
        let words: Vec<String> = (0..8)
            .map(|_| {
                *fresh += 1;
                format!("w{fresh}")
            })
            .collect();
        format!("{}.", words.join(" "))
    };
    let n = rng.gen_range(k.max(3)..=12);
    let old: Vec<String> = (0..n).map(|_| sentence(&mut fresh)).collect();

    // per old sentence: keep / delete / modify; inserts keyed by gap 0..=n
    let mut ops = vec![None; n];
    let mut inserts = vec![0usize; n + 1];
    for _ in 0..k {
        loop {
            match rng.gen_range(0..3) {
                0 => {
                    inserts[rng.gen_range(0..=n)] += 1;
                    break;
                }
                choice => {
                    let i = rng.gen_range(0..n);
                    if ops[i].is_none() {
                        ops[i] = Some(if choice == 1 { Edit::Delete } else { Edit::Modify });
                        break;
                    }
                }
            }
        }
    }
    let mut new = Vec::new();
    let mut expected = BTreeSet::new();
    for gap in 0..=n {
        for _ in 0..inserts[gap] {
            expected.insert((Edit::Add, None, Some(new.len())));
            new.push(sentence(&mut fresh));
        }
        if gap == n {
            break;
        }
        match ops[gap] {
            None => new.push(old[gap].clone()),
            Some(Edit::Delete) => {
                expected.insert((Edit::Delete, Some(gap), None));
            }
            Some(Edit::Modify) => {
                fresh += 1;
                let mut words: Vec<&str> = old[gap].trim_end_matches('.').split(' ').collect();
                let pos = rng.gen_range(0..words.len());
                let replacement = format!("w{fresh}");
                words[pos] = &replacement;
                expected.insert((Edit::Modify, Some(gap), Some(new.len())));
                new.push(format!("{}.", words.join(" ")));
            }
            Some(Edit::Add) => unreachable!(),
        }
    }
    EditCase { old, new, expected }
}

// ---------------------------------------------------------------------------
// REST harness

pub struct Api {
    pub router: Router,
}

impl Api {
    pub fn demo() -> Self {
        let config = PlatformConfig {
            store_path: ":memory:".into(),
            lexicon_dir: fixture("lexicons"),
            embeddings: Some(fixture("embeddings/toy50.txt")),
            token_secret: "demo-secret-0123456789abcdef".into(),
            workers: 2,
            submit_wait_ms: 20_000,
            bootstrap_admin: Some(BootstrapAdmin {
                username: "admin".into(),
                password: "admin-password".into(),
                display_name: "Administrator".into(),
            }),
            ..PlatformConfig::default()
        };
        let state = platform::build(&config, Arc::new(SteppingClock::new(1_700_000_000))).expect("build app");
        Self {
            router: platform::router(state),
        }
    }

    pub async fn call(&self, method: Method, uri: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        let req = match body {
            Some(b) => req
                .header("content-type", "application/json")
                .body(Body::from(b.to_string()))
                .unwrap(),
            None => req.body(Body::empty()).unwrap(),
        };
        let res = self.router.clone().oneshot(req).await.unwrap();
        let status = res.status();
        let bytes = res.into_body().collect().await.unwrap().to_bytes();
        let value = if bytes.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
        };
        (status, value)
    }

    pub async fn get(&self, uri: &str, token: &str) -> (StatusCode, Value) {
        self.call(Method::GET, uri, Some(token), None).await
    }

    pub async fn post(&self, uri: &str, token: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::POST, uri, Some(token), Some(body)).await
    }

    pub async fn login(&self, username: &str, password: &str) -> String {
        let (status, body) = self
            .call(
                Method::POST,
                "/auth/login",
                None,
                Some(json!({ "username": username, "password": password })),
            )
            .await;
        assert_eq!(status, StatusCode::OK, "{body}");
        body["token"].as_str().unwrap().to_string()
    }
}

pub struct Demo {
    pub api: Api,
    pub admin: String,
    pub teacher: String,
    pub classroom_id: i64,
    pub assignment_id: i64,
    /// username -> (user id, token)
    pub students: BTreeMap<String, (i64, String)>,
}

pub async fn demo_setup() -> Demo {
    let api = Api::demo();
    let admin = api.login("admin", "admin-password").await;
    let (s, teacher) = api
        .post(
            "/users",
            &admin,
            json!({ "username": "teacher", "password": "teacher-pw", "role": "teacher", "display_name": "Ms. Rivera" }),
        )
        .await;
    assert_eq!(s, StatusCode::CREATED, "{teacher}");
    let (s, classroom) = api
        .post(
            "/classrooms",
            &admin,
            json!({ "name": "Room 5", "teacher_id": teacher["id"], "grade": "grade5" }),
        )
        .await;
    assert_eq!(s, StatusCode::CREATED, "{classroom}");
    let classroom_id = classroom["id"].as_i64().unwrap();
    let mut students = BTreeMap::new();
    for name in ["ana", "ben"] {
        let (s, user) = api
            .post(
                "/users",
                &admin,
                json!({
                    "username": name,
                    "password": format!("{name}-pw"),
                    "role": "student",
                    "display_name": name.to_uppercase(),
                    "classroom_id": classroom_id,
                }),
            )
            .await;
        assert_eq!(s, StatusCode::CREATED, "{user}");
        let token = api.login(name, &format!("{name}-pw")).await;
        students.insert(name.to_string(), (user["id"].as_i64().unwrap(), token));
    }
    let teacher_token = api.login("teacher", "teacher-pw").await;
    let (s, assignment) = api
        .post(
            "/assignments",
            &teacher_token,
            json!({ "classroom_id": classroom_id, "article_id": "mvp", "prompt_text": "Did the author convince you?", "max_drafts": 3 }),
        )
        .await;
    assert_eq!(s, StatusCode::CREATED, "{assignment}");
    Demo {
        api,
        admin,
        teacher: teacher_token,
        classroom_id,
        assignment_id: assignment["id"].as_i64().unwrap(),
        students,
    }
}

pub fn demo_draft(student: &str, n: u32) -> String {
    std::fs::read_to_string(fixture(&format!("demo/grade5/{student}.{n}.txt"))).unwrap()
}

/// Every demo draft submitted over REST. Returns the feedback levels per
/// student and a byte-stable transcript.
pub async fn demo_workflow() -> (BTreeMap<String, Vec<String>>, String) {
    let demo = demo_setup().await;
    let api = &demo.api;
    let mut levels = BTreeMap::new();
    let mut transcript = String::new();
    for (name, (_, token)) in &demo.students {
        for n in 1..=3 {
            let uri = format!("/assignments/{}/drafts", demo.assignment_id);
            let (s, record) = api.post(&uri, token, json!({ "text": demo_draft(name, n) })).await;
            assert_eq!(s, StatusCode::CREATED, "{record}");
            let (s, view) = api.get(&format!("/assignments/{}/feedback", demo.assignment_id), token).await;
            assert_eq!(s, StatusCode::OK, "{view}");
            let level = view["feedback"]["level"].as_str().unwrap().to_string();
            transcript.push_str(&format!(
                "== {name} draft {n}: {level} (npe {}, spc {})\n",
                view["evidence_score"]["npe"], view["evidence_score"]["spc"]
            ));
            let mut view = view;
            view.as_object_mut().unwrap().remove("article_text");
            transcript.push_str(&serde_json::to_string_pretty(&view).unwrap());
            transcript.push('\n');
            levels.entry(name.clone()).or_insert_with(Vec::new).push(level);
        }
    }
    let (s, rows) = api
        .get(&format!("/classrooms/{}/submissions", demo.classroom_id), &demo.teacher)
        .await;
    assert_eq!(s, StatusCode::OK, "{rows}");
    transcript.push_str("== teacher submissions\n");
    transcript.push_str(&serde_json::to_string_pretty(&rows).unwrap());
    transcript.push('\n');
    let (s, export) = api.get(&format!("/export/{}", demo.assignment_id), &demo.teacher).await;
    assert_eq!(s, StatusCode::OK, "{export}");
    transcript.push_str("== export\n");
    transcript.push_str(&serde_json::to_string_pretty(&export).unwrap());
    transcript.push('\n');
    (levels, transcript)
}

// ---------------------------------------------------------------------------
// randomized toy scoring cases

pub struct ToyCase {
    pub text: String,
    pub topics: Vec<KeywordGroup>,
    pub categories: Vec<KeywordGroup>,
    pub vectors: HashMap<String, Vec<f32>>,
    pub window: usize,
    pub stride: usize,
    pub threshold: f64,
}

fn toy_groups(rng: &mut impl rand::Rng, prefix: &str, vocab: &[String]) -> Vec<KeywordGroup> {
    (0..rng.gen_range(1..=5))
        .map(|g| KeywordGroup {
            name: format!("{prefix}{g}"),
            keywords: (0..rng.gen_range(1..=4))
                .map(|_| vocab[rng.gen_range(0..vocab.len())].clone())
                .collect(),
        })
        .collect()
}

/// Up to 200 tokens over a 40-word vocabulary, with random 3-d vectors for
/// about half the words. Some words are perturbed copies of others so that
/// near-threshold similarities occur.
pub fn toy_case(rng: &mut impl rand::Rng, orthogonal: bool) -> ToyCase {
    let vocab: Vec<String> = (0..40).map(|i| format!("tok{i}")).collect();
    let topics = toy_groups(rng, "topic", &vocab);
    let categories = toy_groups(rng, "cat", &vocab);
    let mut vectors: HashMap<String, Vec<f32>> = HashMap::new();
    if orthogonal {
        let dim = vocab.len();
        for (i, w) in vocab.iter().enumerate() {
            let mut v = vec![0.0f32; dim];
            v[i] = 1.0;
            vectors.insert(w.clone(), v);
        }
    } else {
        let mut last: Option<Vec<f32>> = None;
        for w in &vocab {
            if rng.gen_bool(0.5) {
                continue;
            }
            let v: Vec<f32> = match (&last, rng.gen_bool(0.4)) {
                (Some(base), true) => base.iter().map(|x| x + rng.gen_range(-0.3f32..0.3)).collect(),
                _ => (0..3).map(|_| rng.gen_range(-1.0f32..1.0)).collect(),
            };
            last = Some(v.clone());
            vectors.insert(w.clone(), v);
        }
    }
    let window = rng.gen_range(1..=12);
    let mut stride = rng.gen_range(1..=4);
    if orthogonal {
        stride = stride.min(window);
    }
    let len = rng.gen_range(0..=200);
    let mut text = String::new();
    for i in 0..len {
        if i > 0 {
            text.push(' ');
        }
        text.push_str(&vocab[rng.gen_range(0..vocab.len())]);
        match rng.gen_range(0..12) {
            0 => text.push('.'),
            1 => text.push(','),
            _ => {}
        }
    }
    ToyCase {
        text,
        topics,
        categories,
        vectors,
        window,
        stride,
        threshold: if orthogonal { 1.0 } else { rng.gen_range(0.5..1.0) },
    }
}

impl ToyCase {
    pub fn scorer(&self) -> draftwise::scoring::Scorer {
        use draftwise::embedding::EmbeddingTable;
        use draftwise::lexicon::{Article, LexiconFile, SCHEMA_VERSION};
        let article = Article::from_file(LexiconFile {
            schema_version: SCHEMA_VERSION,
            article_id: "toy".into(),
            window_size: self.window,
            stride: self.stride,
            similarity_threshold: self.threshold,
            alpha: 2,
            beta: 4,
            gamma: 2,
            topics: self.topics.clone(),
            categories: self.categories.clone(),
            article_text: String::new(),
            topic_highlight_spans: vec![],
        })
        .expect("toy lexicon");
        let dim = self.vectors.values().next().map_or(1, Vec::len);
        let table = EmbeddingTable::from_entries(dim, self.vectors.clone()).expect("toy vectors");
        draftwise::scoring::Scorer::new(Arc::new(article), Arc::new(table))
    }

    pub fn oracle(&self) -> OracleScore {
        oracle_score(
            &self.text,
            &self.topics,
            &self.categories,
            &self.vectors,
            self.window,
            self.stride,
            self.threshold,
        )
    }

    /// Exact keyword search over all tokens; equal to the oracle when every
    /// token lies in some window.
    pub fn grep(&self) -> OracleScore {
        let tokens: BTreeSet<String> = oracle_tokens(&self.text).into_iter().collect();
        let topics: BTreeSet<String> = self
            .topics
            .iter()
            .filter(|t| t.keywords.iter().any(|k| tokens.contains(k)))
            .map(|t| t.name.clone())
            .collect();
        let spc_vector = self
            .categories
            .iter()
            .map(|c| {
                c.keywords.iter().collect::<BTreeSet<_>>().into_iter().filter(|k| tokens.contains(*k)).count() as u32
            })
            .collect();
        OracleScore {
            npe: topics.len() as u32,
            topics,
            spc_vector,
        }
    }
}
