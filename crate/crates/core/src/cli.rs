//! `draftwise` command line: batch scoring, draft comparison, evaluation
//! reports, corpus statistics and the REST service.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::registry::{ClassifierRegistry, ClassifierSettings};
use crate::classify::{BaselineContent, ClassifiedRevision};
use crate::embedding::EmbeddingTable;
use crate::engine::{DraftReport, Engine, RevisionReport};
use crate::eval::{
    self, delta_analysis, evaluate_revisions, load_corpus_dir, score_agreement, AnnotationSet, ClassifierReport,
    ConfusionMatrix, DeltaInput, EvalError, ScoreTable,
};
use crate::feedback::{EfLevel, FeedbackDecision, TraceEntry};
use crate::lexicon::{Article, ScoringParams};
use crate::platform::PlatformConfig;
use crate::revision::{AlignConfig, TokenOverlap};
use crate::scoring::Scorer;

#[derive(Debug, Parser)]
#[command(name = "draftwise", version, about = "Evidence-use scoring and revision feedback for essay drafts")]
pub struct Cli {
    /// Article lexicon file (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    /// Word vectors, one `word v1 v2 ...` line each.
    #[arg(long, global = true, value_name = "FILE")]
    pub embeddings: Option<PathBuf>,
    /// Platform config (TOML); supplies classifiers and embeddings.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub json: bool,
    /// Keyword similarity threshold.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    /// Window size in content tokens.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    #[arg(long, global = true)]
    pub stride: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score essay files and pick evidence-use feedback.
    Score {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        csv: bool,
    },
    /// Compare two drafts and pick revision feedback.
    Revise {
        old: PathBuf,
        new: PathBuf,
        /// Feedback shown on the old draft; defaults to the level implied
        /// by its own score.
        #[arg(long, value_name = "EF")]
        prev_ef: Option<String>,
    },
    /// Agreement and classifier metrics.
    Eval(EvalArgs),
    /// Draft and revision statistics for a corpus directory.
    Stats {
        dir: PathBuf,
        #[arg(long)]
        csv: bool,
    },
    /// Run the REST service (requires --config).
    Serve,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predictions: a score CSV or a revision annotation CSV.
    pub pred: Option<PathBuf>,
    /// Gold file in the same format as the predictions.
    pub gold: Option<PathBuf>,
    /// Confusion matrix CSV: `gold,<label>...` header, one row per gold label.
    #[arg(long, value_name = "FILE")]
    pub confusion: Option<PathBuf>,
    #[arg(long, value_name = "LABEL", requires = "confusion")]
    pub positive: Option<String>,
    /// Draft pairs CSV: `old_ef,old_npe,new_npe,old_spc,new_spc`.
    #[arg(long, value_name = "FILE")]
    pub delta: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn domain(message: impl ToString) -> Self {
        Self {
            code: 1,
            message: message.to_string(),
        }
    }

    fn input(message: impl ToString) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        if e.is_format() {
            Self::input(e)
        } else {
            Self::domain(e)
        }
    }
}

type CliResult = Result<(), CliError>;

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    if let Command::Serve = cli.command {
        return serve(cli);
    }
    let text = match &cli.command {
        Command::Score { files, csv } => cmd_score(cli, files, *csv, err)?,
        Command::Revise { old, new, prev_ef } => cmd_revise(cli, old, new, prev_ef.as_deref())?,
        Command::Eval(args) => cmd_eval(cli, args)?,
        Command::Stats { dir, csv } => cmd_stats(cli, dir, *csv)?,
        Command::Serve => unreachable!(),
    };
    out.write_all(text.as_bytes()).map_err(CliError::input)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Flag,
    File,
    Default,
}

impl Source {
    fn as_str(&self) -> &'static str {
        match self {
            Source::Flag => "flag",
            Source::File => "file",
            Source::Default => "default",
        }
    }
}

/// Effective scoring parameters and where each one came from.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedParams {
    pub window_size: (usize, Source),
    pub stride: (usize, Source),
    pub similarity_threshold: (f64, Source),
}

impl ResolvedParams {
    fn params(&self) -> ScoringParams {
        ScoringParams {
            window_size: self.window_size.0,
            stride: self.stride.0,
            similarity_threshold: self.similarity_threshold.0,
        }
    }

    fn header(&self) -> String {
        format!(
            "parameters: window_size={} ({}) stride={} ({}) similarity_threshold={} ({})\n",
            self.window_size.0,
            self.window_size.1.as_str(),
            self.stride.0,
            self.stride.1.as_str(),
            self.similarity_threshold.0,
            self.similarity_threshold.1.as_str(),
        )
    }

    fn to_json(&self) -> Value {
        let entry = |v: Value, s: Source| json!({ "value": v, "source": s });
        json!({
            "window_size": entry(json!(self.window_size.0), self.window_size.1),
            "stride": entry(json!(self.stride.0), self.stride.1),
            "similarity_threshold": entry(json!(self.similarity_threshold.0), self.similarity_threshold.1),
        })
    }
}

fn pick<T: Copy>(flag: Option<T>, in_file: bool, file_value: T) -> (T, Source) {
    match flag {
        Some(v) => (v, Source::Flag),
        None if in_file => (file_value, Source::File),
        None => (file_value, Source::Default),
    }
}

struct Setup {
    engine: Engine,
    resolved: ResolvedParams,
}

fn load_config(cli: &Cli) -> Result<Option<PlatformConfig>, CliError> {
    cli.config
        .as_ref()
        .map(|p| PlatformConfig::load(p).map_err(CliError::input))
        .transpose()
}

fn setup(cli: &Cli) -> Result<Setup, CliError> {
    let path = cli
        .lexicon
        .as_ref()
        .ok_or_else(|| CliError::input("--lexicon is required"))?;
    let raw = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let article = Article::from_json(&raw).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let keys: Value = serde_json::from_str(&raw).map_err(CliError::input)?;
    let has = |k: &str| keys.get(k).is_some();
    let resolved = ResolvedParams {
        window_size: pick(cli.window, has("window_size"), article.params.window_size),
        stride: pick(cli.stride, has("stride"), article.params.stride),
        similarity_threshold: pick(cli.threshold, has("similarity_threshold"), article.params.similarity_threshold),
    };
    let params = resolved.params();
    params.validate().map_err(CliError::input)?;

    let config = load_config(cli)?;
    let embeddings = cli
        .embeddings
        .clone()
        .or_else(|| config.as_ref().and_then(|c| c.embeddings.clone()));
    let table = match embeddings {
        Some(p) => EmbeddingTable::load(&p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?,
        None => EmbeddingTable::empty(),
    };
    let settings = config.map(|c| c.classifiers).unwrap_or_else(ClassifierSettings::default);
    let scorer = Scorer::new(Arc::new(article), Arc::new(table)).with_params(params);
    let pipeline = ClassifierRegistry::default()
        .build(&settings, &scorer)
        .map_err(CliError::input)?;
    Ok(Setup {
        engine: Engine::new(scorer).with_pipeline(pipeline),
        resolved,
    })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// `npe_at_most_alpha(alpha=2, npe=1) = true`
pub fn render_trace_entry(entry: &TraceEntry) -> String {
    let Value::Object(map) = serde_json::to_value(entry.guard).expect("guard serializes") else {
        unreachable!("guards serialize as objects")
    };
    let name = map.get("guard").and_then(Value::as_str).unwrap_or("?");
    let args: Vec<String> = map
        .iter()
        .filter(|(k, _)| *k != "guard")
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    if args.is_empty() {
        format!("{name} = {}", entry.holds)
    } else {
        format!("{name}({}) = {}", args.join(", "), entry.holds)
    }
}

fn write_feedback(s: &mut String, fb: &FeedbackDecision) {
    let _ = writeln!(s, "  feedback: {}", fb.level);
    for t in &fb.trace {
        let _ = writeln!(s, "    {}", render_trace_entry(t));
    }
    if !fb.highlight_topics.is_empty() {
        let _ = writeln!(s, "  highlight: {}", fb.highlight_topics.join(", "));
    }
    for m in &fb.messages {
        let _ = writeln!(s, "  - {m}");
    }
}

fn topic_list(report: &crate::scoring::EvidenceScore) -> String {
    if report.topic_hits.is_empty() {
        "-".into()
    } else {
        report.topic_hits.keys().cloned().collect::<Vec<_>>().join(", ")
    }
}

fn score_files(engine: &Engine, files: &[PathBuf]) -> Vec<Result<DraftReport, CliError>> {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(files.len().max(1));
    let chunk = files.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = files
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|p| {
                            let text = read_text(p)?;
                            engine.score_draft(&text).map_err(CliError::domain)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("scoring thread panicked"))
            .collect()
    })
}

fn cmd_score(cli: &Cli, files: &[PathBuf], csv: bool, err: &mut dyn Write) -> Result<String, CliError> {
    if csv && cli.json {
        return Err(CliError::input("--csv and --json are mutually exclusive"));
    }
    let Setup { engine, resolved } = setup(cli)?;
    let mut files = files.to_vec();
    files.sort();
    let reports = score_files(&engine, &files)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    if cli.json {
        let results: Vec<Value> = files
            .iter()
            .zip(&reports)
            .map(|(f, r)| json!({ "file": f.display().to_string(), "score": r.score, "feedback": r.feedback }))
            .collect();
        return Ok(to_json(&json!({ "parameters": resolved.to_json(), "results": results })));
    }
    if csv {
        let _ = err.write_all(resolved.header().as_bytes());
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::input(e);
        w.write_record(["file", "article_id", "npe", "spc", "word_count", "ef", "topics", "spc_vector"])
            .map_err(io)?;
        for (f, r) in files.iter().zip(&reports) {
            let s = &r.score;
            let topics: Vec<&str> = s.topic_hits.keys().map(String::as_str).collect();
            let vector: Vec<String> = s.spc_vector.iter().map(u32::to_string).collect();
            w.write_record([
                f.display().to_string(),
                s.article_id.clone(),
                s.npe.to_string(),
                s.spc.to_string(),
                s.word_count.to_string(),
                r.feedback.level.to_string(),
                topics.join(";"),
                vector.join(";"),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
        return Ok(String::from_utf8(bytes).expect("csv output is utf-8"));
    }
    let mut s = resolved.header();
    for (f, r) in files.iter().zip(&reports) {
        let sc = &r.score;
        let _ = writeln!(s, "{}", f.display());
        let _ = writeln!(s, "  npe {}  spc {}  words {}", sc.npe, sc.spc, sc.word_count);
        let _ = writeln!(s, "  topics: {}", topic_list(sc));
        let vector: Vec<String> = sc.spc_vector.iter().map(u32::to_string).collect();
        let _ = writeln!(s, "  spc_vector: [{}]", vector.join(", "));
        write_feedback(&mut s, &r.feedback);
    }
    Ok(s)
}

fn index(i: Option<usize>) -> String {
    i.map(|i| i.to_string()).unwrap_or_else(|| "-".into())
}

fn labels(rev: &ClassifiedRevision) -> String {
    let p = &rev.pair;
    let parts: Vec<&str> = [
        p.type_label.map(|l| l.as_str()),
        p.er_label.map(|l| l.as_str()),
        p.success_label.map(|l| l.as_str()),
    ]
    .into_iter()
    .flatten()
    .collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join("/")
    }
}

fn cmd_revise(cli: &Cli, old: &Path, new: &Path, prev_ef: Option<&str>) -> Result<String, CliError> {
    let Setup { engine, resolved } = setup(cli)?;
    let (old_text, new_text) = (read_text(old)?, read_text(new)?);
    let prev = match prev_ef {
        Some(raw) => raw.parse::<EfLevel>().map_err(|_| {
            CliError::domain(format!("--prev-ef must be EF1, EF2 or EF3, got {raw:?}"))
        })?,
        None => {
            let score = engine.scorer().score_text(&old_text).map_err(CliError::domain)?;
            engine.implied_ef(&score)
        }
    };
    let report: RevisionReport = engine.revise(&old_text, &new_text, prev).map_err(CliError::domain)?;
    if cli.json {
        return Ok(to_json(&json!({
            "parameters": resolved.to_json(),
            "prev_ef": prev,
            "report": report,
        })));
    }
    let mut s = resolved.header();
    let (o, n) = (&report.old_score, &report.new_score);
    let _ = writeln!(s, "old {}: npe {} spc {}", old.display(), o.npe, o.spc);
    let _ = writeln!(s, "new {}: npe {} spc {}", new.display(), n.npe, n.spc);
    let _ = writeln!(s, "previous feedback: {prev}");
    let _ = writeln!(s, "revisions: {}", report.revisions.len());
    for r in &report.revisions {
        let a = &r.pair.aligned;
        let _ = writeln!(
            s,
            "  {:<6} {:>3} -> {:<3} {}",
            r.pair.action.as_str(),
            index(a.old_index),
            index(a.new_index),
            labels(r)
        );
        if let Some(t) = &a.old_text {
            let _ = writeln!(s, "         - {t}");
        }
        if let Some(t) = &a.new_text {
            let _ = writeln!(s, "         + {t}");
        }
    }
    write_feedback(&mut s, &report.feedback);
    let _ = writeln!(s, "new draft evidence level: {}", report.implied_ef);
    Ok(s)
}

fn header_line(path: &Path) -> Result<String, CliError> {
    let text = read_text(path)?;
    Ok(text.lines().next().unwrap_or("").to_string())
}

fn eval_format(path: &Path, e: EvalError) -> CliError {
    let mut ce = CliError::from(e);
    ce.message = format!("{}: {}", path.display(), ce.message);
    ce
}

fn open(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Confusion CSV: header `gold,<l1>,<l2>...`, then one row per gold label
/// in header order.
pub fn read_confusion(text: &str) -> Result<ConfusionMatrix, EvalError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let mut records = rdr.records();
    let fmt = |line: u64, message: String| EvalError::Format { line, message };
    let header = records
        .next()
        .ok_or_else(|| fmt(1, "empty confusion file".into()))?
        .map_err(|e| fmt(1, e.to_string()))?;
    let labels: Vec<String> = header.iter().skip(1).map(|l| l.trim().to_string()).collect();
    if labels.is_empty() {
        return Err(fmt(1, "header needs at least one label".into()));
    }
    let mut counts = Vec::new();
    for (i, rec) in records.enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| fmt(line, e.to_string()))?;
        let gold = rec.get(0).unwrap_or("").trim();
        if labels.get(i).map(String::as_str) != Some(gold) {
            return Err(fmt(line, format!("expected row for {:?}, found {gold:?}", labels.get(i))));
        }
        let row = rec
            .iter()
            .skip(1)
            .map(|c| c.trim().parse::<u64>().map_err(|_| fmt(line, format!("count {c:?} is not an integer"))))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != labels.len() {
            return Err(fmt(line, format!("expected {} counts, found {}", labels.len(), row.len())));
        }
        counts.push(row);
    }
    if counts.len() != labels.len() {
        return Err(fmt(counts.len() as u64 + 2, format!("expected {} rows", labels.len())));
    }
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    ConfusionMatrix::new(&refs, counts)
}

pub fn read_delta_pairs(text: &str) -> Result<Vec<DeltaInput>, EvalError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let cols = ["old_ef", "old_npe", "new_npe", "old_spc", "new_spc"];
    let headers = rdr.headers().map_err(|e| EvalError::Format { line: 1, message: e.to_string() })?.clone();
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(cols) {
        *slot = headers.iter().position(|h| h.trim() == name).ok_or_else(|| EvalError::Format {
            line: 1,
            message: format!("missing column {name}"),
        })?;
    }
    let mut pairs = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| EvalError::Format {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let get = |i: usize| rec.get(idx[i]).unwrap_or("").trim();
        let old_ef = get(0).parse::<EfLevel>().map_err(|_| EvalError::Label {
            line,
            message: format!("invalid old_ef {:?}", get(0)),
        })?;
        let num = |i: usize| {
            get(i).parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| EvalError::Format {
                line,
                message: format!("{} is not a number: {:?}", cols[i], get(i)),
            })
        };
        pairs.push(DeltaInput {
            old_ef,
            old_npe: num(1)?,
            new_npe: num(2)?,
            old_spc: num(3)?,
            new_spc: num(4)?,
        });
    }
    Ok(pairs)
}

fn f4(x: f64) -> String {
    format!("{x:.4}")
}

fn write_classifier(s: &mut String, name: &str, r: &ClassifierReport) {
    let _ = writeln!(s, "{name}: n {}  accuracy {}", r.n, f4(r.accuracy));
    let p = &r.positive;
    let _ = writeln!(
        s,
        "  positive {:<12} precision {}  recall {}  f1 {}",
        p.label,
        f4(p.precision),
        f4(p.recall),
        f4(p.f1)
    );
    let m = &r.macro_avg;
    let _ = writeln!(
        s,
        "  macro                 precision {}  recall {}  f1 {}",
        f4(m.precision),
        f4(m.recall),
        f4(m.f1)
    );
    for c in &r.per_class {
        let _ = writeln!(
            s,
            "  class    {:<12} precision {}  recall {}  f1 {}  support {}",
            c.label,
            f4(c.precision),
            f4(c.recall),
            f4(c.f1),
            c.support
        );
    }
    let _ = writeln!(s, "  confusion (rows gold): {}", r.confusion.labels.join(" "));
    for (label, row) in r.confusion.labels.iter().zip(&r.confusion.counts) {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "    {label:<12} {}", cells.join(" "));
    }
    for (grade, g) in &r.by_grade {
        let _ = writeln!(
            s,
            "  grade {grade}: n {}  positive f1 {}  macro f1 {}",
            g.n,
            f4(g.positive.f1),
            f4(g.macro_avg.f1)
        );
    }
}

fn cmd_eval(cli: &Cli, args: &EvalArgs) -> Result<String, CliError> {
    let mut json_out = BTreeMap::new();
    let mut s = String::new();
    match (&args.pred, &args.gold) {
        (Some(pred), Some(gold)) => {
            if ScoreTable::is_score_header(&header_line(gold)?) {
                let p = ScoreTable::read(open(pred)?).map_err(|e| eval_format(pred, e))?;
                let g = ScoreTable::read(open(gold)?).map_err(|e| eval_format(gold, e))?;
                let reports = score_agreement(&p, &g)?;
                for (col, r) in &reports {
                    let _ = writeln!(
                        s,
                        "{col}: qwk {}  n {}  range {}..{}{}",
                        f4(r.qwk),
                        r.n,
                        r.label_range.0,
                        r.label_range.1,
                        if r.degenerate { "  (degenerate)" } else { "" }
                    );
                }
                json_out.insert("agreement", serde_json::to_value(&reports).expect("serializes"));
            } else {
                let p = AnnotationSet::load(pred).map_err(|e| eval_format(pred, e))?;
                let g = AnnotationSet::load(gold).map_err(|e| eval_format(gold, e))?;
                let r = evaluate_revisions(&p, &g)?;
                for (name, rep) in [("content", &r.content), ("evidence", &r.evidence), ("success", &r.success)] {
                    match rep {
                        Some(rep) => write_classifier(&mut s, name, rep),
                        None => {
                            let _ = writeln!(s, "{name}: no labelled rows");
                        }
                    }
                }
                json_out.insert("revisions", serde_json::to_value(&r).expect("serializes"));
            }
        }
        (None, None) => {}
        _ => return Err(CliError::input("eval needs both PRED and GOLD")),
    }
    if let Some(path) = &args.confusion {
        let m = read_confusion(&read_text(path)?).map_err(|e| eval_format(path, e))?;
        let positive = match &args.positive {
            Some(p) => p.clone(),
            None => m.labels.last().cloned().unwrap_or_default(),
        };
        let r = ClassifierReport::from_confusion(m, &positive)?;
        write_classifier(&mut s, "confusion", &r);
        json_out.insert("confusion", serde_json::to_value(&r).expect("serializes"));
    }
    if let Some(path) = &args.delta {
        let pairs = read_delta_pairs(&read_text(path)?).map_err(|e| eval_format(path, e))?;
        let report = delta_analysis(&pairs);
        s.push_str(&report.to_text());
        json_out.insert("delta", serde_json::to_value(&report).expect("serializes"));
    }
    if json_out.is_empty() {
        return Err(CliError::input("nothing to evaluate: give PRED GOLD, --confusion or --delta"));
    }
    Ok(if cli.json { to_json(&json_out) } else { s })
}

fn cmd_stats(cli: &Cli, dir: &Path, csv: bool) -> Result<String, CliError> {
    if csv && cli.json {
        return Err(CliError::input("--csv and --json are mutually exclusive"));
    }
    let essays = load_corpus_dir(dir)?;
    let stats = eval::corpus_stats(&essays, &BaselineContent, &TokenOverlap, &AlignConfig::default());
    Ok(if cli.json {
        to_json(&stats)
    } else if csv {
        stats.to_csv()
    } else {
        stats.to_text()
    })
}

fn serve(cli: &Cli) -> CliResult {
    let config = load_config(cli)?.ok_or_else(|| CliError::input("serve needs --config"))?;
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .try_init();
    let rt = tokio::runtime::Runtime::new().map_err(CliError::domain)?;
    rt.block_on(crate::platform::serve(config)).map_err(|e| CliError::domain(format!("{e:#}")))
}
