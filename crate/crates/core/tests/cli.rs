mod common;

use std::collections::HashMap;
use std::path::Path;

use draftwise::lexicon::Article;
use serde_json::Value;

use common::{check_golden, oracle_score};

const LEX: &str = "fixtures/lexicons/mvp.json";
const EMB: &str = "fixtures/embeddings/toy50.txt";

fn run(args: &[&str]) -> (i32, String, String) {
    // relative fixture paths keep golden output independent of checkout location
    std::env::set_current_dir(common::manifest()).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = draftwise::cli::run(std::iter::once("draftwise").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn with_lexicon<'a>(rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["--lexicon", LEX, "--embeddings", EMB];
    v.extend_from_slice(rest);
    v
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(&with_lexicon(args));
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn golden(name: &str, actual: &str) {
    if let Err(e) = check_golden(name, actual) {
        panic!("{e}");
    }
}

const DRAFTS: [&str; 6] = [
    "fixtures/demo/grade5/ana.1.txt",
    "fixtures/demo/grade5/ana.2.txt",
    "fixtures/demo/grade5/ana.3.txt",
    "fixtures/demo/grade5/ben.1.txt",
    "fixtures/demo/grade5/ben.2.txt",
    "fixtures/demo/grade5/ben.3.txt",
];

fn score_args(extra: &[&'static str]) -> Vec<&'static str> {
    let mut v = extra.to_vec();
    v.push("score");
    v.extend(DRAFTS);
    v
}

#[test]
fn score_outputs_match_golden() {
    golden("cli_score.txt", &ok(&score_args(&[])));
    let (code, csv, err) = run(&with_lexicon(&[&score_args(&[])[..], &["--csv"]].concat()));
    assert_eq!(code, 0, "{err}");
    assert!(err.starts_with("parameters: window_size=8 (file)"), "{err}");
    golden("cli_score.csv", &csv);
    golden("cli_score.json", &ok(&score_args(&["--json"])));
}

#[test]
fn revise_outputs_match_golden() {
    for (student, from, to) in [("ana", 1, 2), ("ana", 2, 3), ("ben", 1, 2), ("ben", 2, 3)] {
        let old = format!("fixtures/demo/grade5/{student}.{from}.txt");
        let new = format!("fixtures/demo/grade5/{student}.{to}.txt");
        golden(&format!("cli_revise_{student}_{from}_{to}.txt"), &ok(&["revise", &old, &new]));
    }
    let json = ok(&["--json", "revise", "fixtures/demo/grade5/ana.2.txt", "fixtures/demo/grade5/ana.3.txt"]);
    golden("cli_revise_ana_2_3.json", &json);
}

#[test]
fn stats_outputs_match_golden() {
    golden("cli_stats.txt", &ok(&["stats", "fixtures/demo"]));
    golden("cli_stats.csv", &ok(&["stats", "fixtures/demo", "--csv"]));
}

#[test]
fn empty_file_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let out = ok(&["--json", "score", empty.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let r = &v["results"][0];
    assert_eq!(r["score"]["npe"], 0);
    assert_eq!(r["score"]["spc"], 0);
    assert_eq!(r["feedback"]["level"], "EF1");
}

#[test]
fn exact_threshold_matches_keyword_grep() {
    let article = Article::load(common::fixture("lexicons/mvp.json")).unwrap();
    let out = ok(&score_args(&["--json", "--threshold", "1.0"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["parameters"]["similarity_threshold"]["source"], "flag");
    for (path, r) in DRAFTS.iter().zip(v["results"].as_array().unwrap()) {
        let text = std::fs::read_to_string(common::manifest().join(path)).unwrap();
        let grep = oracle_score(
            &text,
            &article.topics.topics,
            &article.specificity.categories,
            &HashMap::new(),
            8,
            1,
            1.0,
        );
        assert_eq!(r["score"]["npe"], grep.npe, "{path}");
        assert_eq!(r["score"]["spc_vector"], serde_json::json!(grep.spc_vector), "{path}");
    }
}

#[test]
fn parameter_sources_are_reported() {
    let out = ok(&["--window", "5", "score", DRAFTS[0]]);
    assert!(out.starts_with("parameters: window_size=5 (flag) stride=1 (file)"), "{out}");

    let dir = tempfile::tempdir().unwrap();
    let mut lex: Value = serde_json::from_str(&std::fs::read_to_string(common::fixture("lexicons/mvp.json")).unwrap()).unwrap();
    let obj = lex.as_object_mut().unwrap();
    obj.remove("window_size");
    obj.remove("stride");
    let path = dir.path().join("lex.json");
    std::fs::write(&path, serde_json::to_string(&lex).unwrap()).unwrap();
    let (code, out, err) = run(&["--lexicon", path.to_str().unwrap(), "--embeddings", EMB, "score", DRAFTS[0]]);
    assert_eq!(code, 0, "{err}");
    assert!(
        out.starts_with("parameters: window_size=8 (default) stride=1 (default) similarity_threshold=0.9 (file)"),
        "{out}"
    );
}

#[test]
fn revise_edge_cases() {
    let out = ok(&["revise", DRAFTS[0], DRAFTS[0]]);
    assert!(out.contains("feedback: RF1"), "{out}");

    let dir = tempfile::tempdir().unwrap();
    let old = std::fs::read_to_string(common::manifest().join(DRAFTS[0])).unwrap();
    let new = dir.path().join("new.txt");
    std::fs::write(&new, format!("{} The nurses worked all night.", old.trim_end())).unwrap();
    let out = ok(&["--json", "revise", DRAFTS[0], new.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let revisions = v["report"]["revisions"].as_array().unwrap();
    assert_eq!(revisions.len(), 1, "{out}");
    assert_eq!(revisions[0]["action"], "add");

    let (code, _, err) = run(&with_lexicon(&["revise", "--prev-ef", "EF7", DRAFTS[0], DRAFTS[1]]));
    assert_eq!(code, 1, "{err}");
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const ANNOTATIONS: &str = "essay_id,grade,draft_from,draft_to,old_index,new_index,action,type_label,er_label,success_label\n\
s1,5,1,2,0,0,modify,surface,,\n\
s1,5,1,2,,3,add,content,evidence,successful\n\
s2,6,1,2,2,,delete,content,reasoning,unsuccessful\n\
s2,6,1,2,,4,add,content,evidence,unsuccessful\n";

#[test]
fn eval_identical_files_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let scores = write(dir.path(), "s.csv", "essay_id,npe,spc\na,1,4\nb,3,9\nc,2,2\n");
    let (code, out, err) = run(&["eval", &scores, &scores]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("npe: qwk 1.0000"), "{out}");
    assert!(out.contains("spc: qwk 1.0000"), "{out}");

    let ann = write(dir.path(), "a.csv", ANNOTATIONS);
    let (code, out, err) = run(&["--json", "eval", &ann, &ann]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    for stage in ["content", "evidence", "success"] {
        assert_eq!(v["revisions"][stage]["positive"]["f1"], 1.0, "{stage}");
        assert_eq!(v["revisions"][stage]["macro_avg"]["f1"], 1.0, "{stage}");
    }
}

#[test]
fn eval_confusion_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.csv", "gold,surface,content\nsurface,268,50\ncontent,37,1170\n");
    let (code, out, err) = run(&["--json", "eval", "--confusion", &m, "--positive", "content"]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    let p = &v["confusion"]["positive"];
    for (key, want) in [("precision", 0.96), ("recall", 0.97), ("f1", 0.96)] {
        let got = p[key].as_f64().unwrap();
        assert!((got - want).abs() <= 0.005, "{key} {got}");
    }
}

#[test]
fn eval_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.csv", ANNOTATIONS);
    let broken = write(
        dir.path(),
        "broken.csv",
        &ANNOTATIONS.replace("s2,6,1,2,2,,delete", "s2,6,one,2,2,,delete"),
    );
    let (code, _, err) = run(&["eval", &broken, &good]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("line 4"), "{err}");

    let label = write(dir.path(), "label.csv", &ANNOTATIONS.replace("evidence,successful", "opinion,successful"));
    let (code, _, err) = run(&["eval", &label, &good]);
    assert_eq!(code, 1, "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn eval_delta() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(
        dir.path(),
        "d.csv",
        "old_ef,old_npe,new_npe,old_spc,new_spc\nEF1,1.0,2.5,2,3\nEF1,1.18,2.48,2,5\n",
    );
    let (code, out, err) = run(&["eval", "--delta", &d]);
    assert_eq!(code, 0, "{err}");
    let row = out.lines().find(|l| l.starts_with("EF1")).unwrap();
    assert!(row.contains("1.09") && row.contains("2.49") && row.contains("+128%"), "{row}");
}

#[test]
fn json_on_every_command() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.csv", "gold,a,b\na,3,1\nb,0,4\n");
    let runs: Vec<Vec<&str>> = vec![
        vec!["--json", "score", DRAFTS[0]],
        vec!["--json", "revise", DRAFTS[0], DRAFTS[1]],
        vec!["--json", "stats", "fixtures/demo"],
        vec!["--json", "eval", "--confusion", &m],
    ];
    for args in runs {
        let (code, out, err) = run(&with_lexicon(&args));
        assert_eq!(code, 0, "{args:?}: {err}");
        serde_json::from_str::<Value>(&out).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
    let (code, _, _) = run(&with_lexicon(&["--json", "score", "--csv", DRAFTS[0]]));
    assert_eq!(code, 2);
}
