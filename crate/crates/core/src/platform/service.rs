//! Draft workflow, identity and authorization on top of a [`Store`].

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{mpsc, Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::oneshot;

use super::auth::{hash_password, verify_password, TokenError, TokenSigner};
use super::model::{
    Assignment, Classroom, NewAssignment, NewClassroom, NewUser, Outcome, Role, SubmissionRecord, SubmissionStatus,
    User,
};
use super::store::{NewUserRecord, Store, StoreError, SubmissionFilter};
use crate::classify::registry::{ClassifierRegistry, ClassifierSettings, RegistryError};
use crate::embedding::{EmbeddingError, EmbeddingTable};
use crate::engine::Engine;
use crate::eval::{AnnotationRow, AnnotationSet, ErLabel};
use crate::feedback::{EfLevel, FeedbackDecision, FeedbackKind};
use crate::lexicon::{Article, HighlightSpan, LexiconError};
use crate::scoring::{EvidenceScore, Scorer};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ServiceError {
    #[error("authentication required")]
    Unauthenticated,
    #[error("invalid username or password")]
    BadCredentials,
    #[error("{0}")]
    Forbidden(String),
    #[error("{0} not found")]
    NotFound(String),
    #[error("{0}")]
    Invalid(String),
    #[error("Your essay is empty. Write your essay before submitting.")]
    EmptyText,
    #[error("You have already submitted all {0} drafts for this assignment.")]
    DraftLimit(u32),
    #[error("Your previous draft is still being processed. Try again in a moment.")]
    DraftProcessing,
    #[error("{0}")]
    Conflict(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Unauthenticated => "unauthenticated",
            ServiceError::BadCredentials => "bad_credentials",
            ServiceError::Forbidden(_) => "forbidden",
            ServiceError::NotFound(_) => "not_found",
            ServiceError::Invalid(_) => "invalid_request",
            ServiceError::EmptyText => "empty_text",
            ServiceError::DraftLimit(_) => "draft_limit",
            ServiceError::DraftProcessing => "draft_processing",
            ServiceError::Conflict(_) => "conflict",
            ServiceError::Internal(_) => "internal",
        }
    }
}

impl From<StoreError> for ServiceError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(what) => ServiceError::NotFound(what.into()),
            StoreError::Conflict(msg) => ServiceError::Conflict(msg),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

impl From<TokenError> for ServiceError {
    fn from(_: TokenError) -> Self {
        ServiceError::Unauthenticated
    }
}

fn forbidden() -> ServiceError {
    ServiceError::Forbidden("you do not have access to this resource".into())
}

pub trait Clock: Send + Sync {
    /// Unix seconds.
    fn now(&self) -> u64;
}

#[derive(Debug, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    }
}

/// Starts at a fixed instant and advances one second per reading.
#[derive(Debug)]
pub struct SteppingClock(AtomicU64);

impl SteppingClock {
    pub fn new(start: u64) -> Self {
        Self(AtomicU64::new(start))
    }
}

impl Clock for SteppingClock {
    fn now(&self) -> u64 {
        self.0.fetch_add(1, Ordering::SeqCst)
    }
}

#[derive(Debug, Error)]
pub enum EngineLoadError {
    #[error("{path}: {source}")]
    Lexicon { path: String, source: LexiconError },
    #[error("embeddings: {0}")]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("reading {0}: {1}")]
    Io(String, std::io::Error),
    #[error("two lexicons declare article {0:?}")]
    DuplicateArticle(String),
}

/// One engine per `*.json` lexicon in `dir`, keyed by article id.
pub fn load_engines(
    dir: &Path,
    embeddings: Option<&Path>,
    registry: &ClassifierRegistry,
    settings: &ClassifierSettings,
) -> Result<BTreeMap<String, Arc<Engine>>, EngineLoadError> {
    let table = Arc::new(match embeddings {
        Some(p) => EmbeddingTable::load(p)?,
        None => EmbeddingTable::empty(),
    });
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| EngineLoadError::Io(dir.display().to_string(), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|x| x.to_str()) == Some("json"))
        .collect();
    paths.sort();
    let mut engines = BTreeMap::new();
    for path in paths {
        let article = Article::load(&path).map_err(|source| EngineLoadError::Lexicon {
            path: path.display().to_string(),
            source,
        })?;
        let id = article.article_id.clone();
        let scorer = Scorer::new(Arc::new(article), table.clone());
        let pipeline = registry.build(settings, &scorer)?;
        let engine = Engine::new(scorer).with_pipeline(pipeline);
        if engines.insert(id.clone(), Arc::new(engine)).is_some() {
            return Err(EngineLoadError::DuplicateArticle(id));
        }
    }
    Ok(engines)
}

type Job = Box<dyn FnOnce() + Send>;

/// Fixed number of threads draining a job queue.
struct WorkerPool {
    tx: Mutex<mpsc::Sender<Job>>,
}

impl WorkerPool {
    fn new(workers: usize) -> Self {
        let (tx, rx) = mpsc::channel::<Job>();
        let rx = Arc::new(Mutex::new(rx));
        for i in 0..workers.max(1) {
            let rx = rx.clone();
            std::thread::Builder::new()
                .name(format!("draftwise-worker-{i}"))
                .spawn(move || loop {
                    let job = rx.lock().unwrap_or_else(|p| p.into_inner()).recv();
                    match job {
                        Ok(job) => job(),
                        Err(_) => break,
                    }
                })
                .expect("spawning worker thread");
        }
        Self { tx: Mutex::new(tx) }
    }

    fn submit(&self, job: Job) {
        let _ = self.tx.lock().unwrap_or_else(|p| p.into_inner()).send(job);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoginResponse {
    pub token: String,
    pub expires_at: u64,
    pub user: User,
}

/// What a student sees after submitting: the last complete draft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackView {
    pub assignment_id: i64,
    pub student_id: i64,
    pub draft_number: u32,
    pub max_drafts: u32,
    pub text: String,
    pub submitted_at: u64,
    pub evidence_score: EvidenceScore,
    pub feedback: FeedbackDecision,
    /// Article passages for missing topics; only with EF feedback.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub highlights: Vec<HighlightSpan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub article_text: Option<String>,
    /// Draft number still in the pipeline, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub processing_draft: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmissionRow {
    pub submission_id: i64,
    pub assignment_id: i64,
    pub student_id: i64,
    pub student_name: String,
    pub draft_number: u32,
    pub status: SubmissionStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback_kind: Option<FeedbackKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback_level: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ef_level: Option<EfLevel>,
    pub submitted_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportDraft {
    pub essay_id: String,
    pub grade: String,
    pub draft_number: u32,
    pub npe: u32,
    pub spc: u32,
    pub word_count: u32,
    pub ef_level: EfLevel,
    pub feedback_level: String,
    pub text: String,
}

/// De-identified drafts plus machine revision labels in the annotation
/// interchange format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportArchive {
    pub assignment_id: i64,
    pub article_id: String,
    pub drafts: Vec<ExportDraft>,
    pub annotations_csv: String,
}

pub struct Submitted {
    pub record: SubmissionRecord,
    /// Resolves with the final record once the pipeline finishes.
    pub done: oneshot::Receiver<SubmissionRecord>,
}

struct Inner {
    store: Arc<dyn Store>,
    engines: BTreeMap<String, Arc<Engine>>,
    signer: TokenSigner,
    clock: Arc<dyn Clock>,
    locks: Mutex<HashMap<(i64, i64), Arc<Mutex<()>>>>,
    pool: WorkerPool,
}

#[derive(Clone)]
pub struct Service {
    inner: Arc<Inner>,
}

impl Service {
    pub fn new(
        store: Arc<dyn Store>,
        engines: BTreeMap<String, Arc<Engine>>,
        signer: TokenSigner,
        clock: Arc<dyn Clock>,
        workers: usize,
    ) -> Self {
        Self {
            inner: Arc::new(Inner {
                store,
                engines,
                signer,
                clock,
                locks: Mutex::new(HashMap::new()),
                pool: WorkerPool::new(workers),
            }),
        }
    }

    pub fn store(&self) -> &Arc<dyn Store> {
        &self.inner.store
    }

    pub fn articles(&self) -> impl Iterator<Item = &str> {
        self.inner.engines.keys().map(String::as_str)
    }

    pub fn now(&self) -> u64 {
        self.inner.clock.now()
    }

    /// Creates the first admin when the store has no users at all.
    pub fn bootstrap_admin(&self, username: &str, password: &str, display_name: &str) -> Result<Option<User>, ServiceError> {
        if self.inner.store.user_count()? > 0 {
            return Ok(None);
        }
        let user = self.inner.store.create_user(&NewUserRecord {
            username: username.into(),
            password_hash: hash_password(password),
            role: Role::Admin,
            display_name: display_name.into(),
            classroom_id: None,
        })?;
        Ok(Some(user))
    }

    pub fn login(&self, username: &str, password: &str) -> Result<LoginResponse, ServiceError> {
        let Some((user, hash)) = self.inner.store.credentials(username)? else {
            return Err(ServiceError::BadCredentials);
        };
        if !verify_password(password, &hash) {
            return Err(ServiceError::BadCredentials);
        }
        let (token, claims) = self.inner.signer.issue(user.id, self.now());
        Ok(LoginResponse {
            token,
            expires_at: claims.expires_at,
            user,
        })
    }

    pub fn authenticate(&self, token: &str) -> Result<User, ServiceError> {
        let claims = self.inner.signer.verify(token, self.now())?;
        self.inner.store.user(claims.user_id)?.ok_or(ServiceError::Unauthenticated)
    }

    fn require_admin(actor: &User) -> Result<(), ServiceError> {
        if actor.role == Role::Admin {
            Ok(())
        } else {
            Err(forbidden())
        }
    }

    fn classroom(&self, id: i64) -> Result<Classroom, ServiceError> {
        self.inner
            .store
            .classroom(id)?
            .ok_or_else(|| ServiceError::NotFound("classroom".into()))
    }

    fn assignment(&self, id: i64) -> Result<Assignment, ServiceError> {
        self.inner
            .store
            .assignment(id)?
            .ok_or_else(|| ServiceError::NotFound("assignment".into()))
    }

    fn teaches(&self, actor: &User, classroom_id: i64) -> Result<bool, ServiceError> {
        Ok(match actor.role {
            Role::Admin => true,
            Role::Teacher => self.classroom(classroom_id)?.teacher_id == Some(actor.id),
            Role::Student => false,
        })
    }

    fn can_see_assignment(&self, actor: &User, a: &Assignment) -> Result<bool, ServiceError> {
        Ok(match actor.role {
            Role::Student => actor.classroom_id == Some(a.classroom_id),
            _ => self.teaches(actor, a.classroom_id)?,
        })
    }

    /// Whose drafts `actor` is asking about. Students may only name themselves.
    fn subject(&self, actor: &User, a: &Assignment, student_id: Option<i64>) -> Result<i64, ServiceError> {
        match actor.role {
            Role::Student => {
                if student_id.is_some_and(|s| s != actor.id) || actor.classroom_id != Some(a.classroom_id) {
                    return Err(forbidden());
                }
                Ok(actor.id)
            }
            _ => {
                if !self.teaches(actor, a.classroom_id)? {
                    return Err(forbidden());
                }
                let sid = student_id.ok_or_else(|| ServiceError::Invalid("student_id is required".into()))?;
                let student = self.inner.store.user(sid)?.ok_or_else(|| ServiceError::NotFound("student".into()))?;
                if student.classroom_id != Some(a.classroom_id) {
                    return Err(ServiceError::NotFound("student".into()));
                }
                Ok(sid)
            }
        }
    }

    // ---- administration ----

    pub fn create_user(&self, actor: &User, new: &NewUser) -> Result<User, ServiceError> {
        Self::require_admin(actor)?;
        if new.username.trim().is_empty() || new.password.is_empty() {
            return Err(ServiceError::Invalid("username and password are required".into()));
        }
        match (new.role, new.classroom_id) {
            (Role::Student, None) => return Err(ServiceError::Invalid("students need a classroom_id".into())),
            (Role::Student, Some(c)) => {
                self.classroom(c)?;
            }
            (_, Some(_)) => return Err(ServiceError::Invalid("only students belong to a classroom".into())),
            _ => {}
        }
        Ok(self.inner.store.create_user(&NewUserRecord {
            username: new.username.trim().to_string(),
            password_hash: hash_password(&new.password),
            role: new.role,
            display_name: new.display_name.clone(),
            classroom_id: new.classroom_id,
        })?)
    }

    pub fn delete_user(&self, actor: &User, id: i64) -> Result<(), ServiceError> {
        Self::require_admin(actor)?;
        if actor.id == id {
            return Err(ServiceError::Invalid("admins cannot delete themselves".into()));
        }
        Ok(self.inner.store.delete_user(id)?)
    }

    pub fn list_users(&self, actor: &User) -> Result<Vec<User>, ServiceError> {
        Self::require_admin(actor)?;
        Ok(self.inner.store.list_users()?)
    }

    pub fn create_classroom(&self, actor: &User, new: &NewClassroom) -> Result<Classroom, ServiceError> {
        Self::require_admin(actor)?;
        if let Some(t) = new.teacher_id {
            let teacher = self.inner.store.user(t)?.ok_or_else(|| ServiceError::NotFound("teacher".into()))?;
            if teacher.role != Role::Teacher {
                return Err(ServiceError::Invalid(format!("user {t} is not a teacher")));
            }
        }
        Ok(self.inner.store.create_classroom(new)?)
    }

    pub fn list_classrooms(&self, actor: &User) -> Result<Vec<Classroom>, ServiceError> {
        let all = self.inner.store.classrooms()?;
        Ok(match actor.role {
            Role::Admin => all,
            Role::Teacher => all.into_iter().filter(|c| c.teacher_id == Some(actor.id)).collect(),
            Role::Student => all.into_iter().filter(|c| actor.classroom_id == Some(c.id)).collect(),
        })
    }

    pub fn roster(&self, actor: &User, classroom_id: i64) -> Result<Vec<User>, ServiceError> {
        if !self.teaches(actor, classroom_id)? {
            return Err(forbidden());
        }
        Ok(self.inner.store.classroom_students(classroom_id)?)
    }

    pub fn list_assignments(&self, actor: &User) -> Result<Vec<Assignment>, ServiceError> {
        let mut out = Vec::new();
        for a in self.inner.store.assignments()? {
            if self.can_see_assignment(actor, &a)? {
                out.push(a);
            }
        }
        Ok(out)
    }

    pub fn create_assignment(&self, actor: &User, new: &NewAssignment) -> Result<Assignment, ServiceError> {
        self.classroom(new.classroom_id)?;
        if !self.teaches(actor, new.classroom_id)? {
            return Err(forbidden());
        }
        if !self.inner.engines.contains_key(&new.article_id) {
            let known: Vec<_> = self.articles().collect();
            return Err(ServiceError::Invalid(format!(
                "unknown article {:?}; available: {}",
                new.article_id,
                known.join(", ")
            )));
        }
        if new.max_drafts == 0 {
            return Err(ServiceError::Invalid("max_drafts must be at least 1".into()));
        }
        Ok(self.inner.store.create_assignment(new)?)
    }

    // ---- drafts ----

    fn lock_for(&self, key: (i64, i64)) -> Arc<Mutex<()>> {
        self.inner
            .locks
            .lock()
            .unwrap_or_else(|p| p.into_inner())
            .entry(key)
            .or_default()
            .clone()
    }

    pub fn submit_draft(&self, actor: &User, assignment_id: i64, text: &str) -> Result<Submitted, ServiceError> {
        if actor.role != Role::Student {
            return Err(ServiceError::Forbidden("only students submit drafts".into()));
        }
        let a = self.assignment(assignment_id)?;
        if actor.classroom_id != Some(a.classroom_id) {
            return Err(forbidden());
        }
        if text.trim().is_empty() {
            return Err(ServiceError::EmptyText);
        }

        let lock = self.lock_for((actor.id, a.id));
        let record = {
            let _guard = lock.lock().unwrap_or_else(|p| p.into_inner());
            let drafts = self.inner.store.drafts(actor.id, a.id)?;
            let now = self.now();
            match drafts.last() {
                Some(last) if last.status == SubmissionStatus::Processing => return Err(ServiceError::DraftProcessing),
                Some(last) if last.status == SubmissionStatus::Failed => {
                    self.inner.store.retry_submission(last.id, text, now)?
                }
                last => {
                    let next = last.map_or(1, |l| l.draft_number + 1);
                    if next > a.max_drafts {
                        return Err(ServiceError::DraftLimit(a.max_drafts));
                    }
                    self.inner.store.insert_submission(actor.id, a.id, next, text, now)?
                }
            }
        };

        let (tx, rx) = oneshot::channel();
        self.enqueue(record.id, Some(tx));
        Ok(Submitted { record, done: rx })
    }

    fn enqueue(&self, id: i64, notify: Option<oneshot::Sender<SubmissionRecord>>) {
        let svc = self.clone();
        self.inner.pool.submit(Box::new(move || {
            let record = svc.process(id);
            if let (Some(tx), Some(record)) = (notify, record) {
                let _ = tx.send(record);
            }
        }));
    }

    /// Runs the pipeline for one processing record and stores the result,
    /// or marks it failed. Returns the final record.
    fn process(&self, id: i64) -> Option<SubmissionRecord> {
        let store = &self.inner.store;
        let result = catch_unwind(AssertUnwindSafe(|| self.outcome_for(id)))
            .unwrap_or_else(|_| Err(ServiceError::Internal("feedback pipeline panicked".into())));
        match result.and_then(|outcome| Ok(store.complete_submission(id, &outcome)?)) {
            Ok(rec) => Some(rec),
            Err(e) => {
                tracing::warn!(submission = id, error = %e, "draft processing failed");
                let _ = store.fail_submission(id, &e.to_string());
                store.submission(id).ok().flatten()
            }
        }
    }

    fn outcome_for(&self, id: i64) -> Result<Outcome, ServiceError> {
        let store = &self.inner.store;
        let rec = store.submission(id)?.ok_or_else(|| ServiceError::NotFound("submission".into()))?;
        let a = self.assignment(rec.assignment_id)?;
        let engine = self
            .inner
            .engines
            .get(&a.article_id)
            .ok_or_else(|| ServiceError::Internal(format!("no engine for article {}", a.article_id)))?;
        let internal = |e: crate::feedback::FeedbackError| ServiceError::Internal(e.to_string());

        if rec.draft_number == 1 {
            let report = engine.score_draft(&rec.text).map_err(internal)?;
            let ef_level = engine.implied_ef(&report.score);
            return Ok(Outcome {
                evidence_score: report.score,
                feedback: report.feedback,
                revisions: Vec::new(),
                ef_level,
            });
        }
        let prev = store
            .drafts(rec.student_id, rec.assignment_id)?
            .into_iter()
            .find(|d| d.draft_number == rec.draft_number - 1)
            .ok_or_else(|| ServiceError::Internal("previous draft is missing".into()))?;
        let prev_ef = match (prev.status, prev.ef_level) {
            (SubmissionStatus::Complete, Some(ef)) => ef,
            _ => return Err(ServiceError::Internal("previous draft is not complete".into())),
        };
        let report = engine.revise(&prev.text, &rec.text, prev_ef).map_err(internal)?;
        Ok(Outcome {
            evidence_score: report.new_score,
            feedback: report.feedback,
            revisions: report.revisions,
            ef_level: report.implied_ef,
        })
    }

    /// Re-queue every record left in `processing`, e.g. after a crash.
    /// Returns how many were resumed.
    pub fn recover(&self) -> Result<usize, ServiceError> {
        let pending = self.inner.store.processing_submissions()?;
        let n = pending.len();
        for rec in pending {
            self.enqueue(rec.id, None);
        }
        Ok(n)
    }

    /// Like [`recover`](Self::recover) but on the calling thread.
    pub fn recover_blocking(&self) -> Result<Vec<SubmissionRecord>, ServiceError> {
        let pending = self.inner.store.processing_submissions()?;
        Ok(pending.into_iter().filter_map(|rec| self.process(rec.id)).collect())
    }

    pub fn drafts(&self, actor: &User, assignment_id: i64, student_id: Option<i64>) -> Result<Vec<SubmissionRecord>, ServiceError> {
        let a = self.assignment(assignment_id)?;
        let sid = self.subject(actor, &a, student_id)?;
        Ok(self.inner.store.drafts(sid, a.id)?)
    }

    pub fn feedback(&self, actor: &User, assignment_id: i64, student_id: Option<i64>) -> Result<FeedbackView, ServiceError> {
        let a = self.assignment(assignment_id)?;
        let sid = self.subject(actor, &a, student_id)?;
        let drafts = self.inner.store.drafts(sid, a.id)?;
        let processing_draft = drafts
            .iter()
            .find(|d| d.status == SubmissionStatus::Processing)
            .map(|d| d.draft_number);
        let Some(last) = drafts.into_iter().rev().find(|d| d.status == SubmissionStatus::Complete) else {
            return Err(ServiceError::NotFound("feedback".into()));
        };
        let (Some(evidence_score), Some(feedback)) = (last.evidence_score, last.feedback) else {
            return Err(ServiceError::Internal("complete record without feedback".into()));
        };
        let mut highlights = Vec::new();
        let mut article_text = None;
        if feedback.kind == FeedbackKind::Ef && !feedback.highlight_topics.is_empty() {
            if let Some(engine) = self.inner.engines.get(&a.article_id) {
                let article = engine.article();
                highlights = article.highlights_for(&feedback.highlight_topics).cloned().collect();
                article_text = Some(article.article_text.clone());
            }
        }
        Ok(FeedbackView {
            assignment_id: a.id,
            student_id: sid,
            draft_number: last.draft_number,
            max_drafts: a.max_drafts,
            text: last.text,
            submitted_at: last.submitted_at,
            evidence_score,
            feedback,
            highlights,
            article_text,
            processing_draft,
        })
    }

    pub fn list_submissions(
        &self,
        actor: &User,
        classroom_id: i64,
        filter: SubmissionFilter,
    ) -> Result<Vec<SubmissionRow>, ServiceError> {
        self.classroom(classroom_id)?;
        if !self.teaches(actor, classroom_id)? {
            return Err(forbidden());
        }
        let names: HashMap<i64, String> = self
            .inner
            .store
            .classroom_students(classroom_id)?
            .into_iter()
            .map(|u| (u.id, u.display_name))
            .collect();
        Ok(self
            .inner
            .store
            .classroom_submissions(classroom_id, filter)?
            .into_iter()
            .map(|r| SubmissionRow {
                submission_id: r.id,
                assignment_id: r.assignment_id,
                student_id: r.student_id,
                student_name: names.get(&r.student_id).cloned().unwrap_or_default(),
                draft_number: r.draft_number,
                status: r.status,
                feedback_kind: r.feedback.as_ref().map(|f| f.kind),
                feedback_level: r.feedback.as_ref().map(|f| f.level.to_string()),
                ef_level: r.ef_level,
                submitted_at: r.submitted_at,
            })
            .collect())
    }

    pub fn export(&self, actor: &User, assignment_id: i64) -> Result<ExportArchive, ServiceError> {
        let a = self.assignment(assignment_id)?;
        if actor.role == Role::Student || !self.teaches(actor, a.classroom_id)? {
            return Err(forbidden());
        }
        let grade = self.classroom(a.classroom_id)?.grade.unwrap_or_default();
        let scope = format!("assignment-{}", a.id);
        let mut drafts = Vec::new();
        let mut rows = Vec::new();
        for r in self.inner.store.assignment_submissions(a.id)? {
            let (Some(score), Some(fb), Some(ef), SubmissionStatus::Complete) =
                (&r.evidence_score, &r.feedback, r.ef_level, r.status)
            else {
                continue;
            };
            let essay_id = self.inner.signer.pseudonym(&scope, r.student_id);
            for rev in &r.revisions {
                rows.push(AnnotationRow {
                    essay_id: essay_id.clone(),
                    grade: grade.clone(),
                    draft_from: r.draft_number - 1,
                    draft_to: r.draft_number,
                    old_index: rev.pair.aligned.old_index,
                    new_index: rev.pair.aligned.new_index,
                    action: rev.pair.action,
                    type_label: rev.pair.type_label,
                    er_label: rev.pair.er_label.map(ErLabel::from),
                    success_label: rev.pair.success_label,
                    line: 0,
                });
            }
            drafts.push(ExportDraft {
                essay_id,
                grade: grade.clone(),
                draft_number: r.draft_number,
                npe: score.npe,
                spc: score.spc,
                word_count: score.word_count,
                ef_level: ef,
                feedback_level: fb.level.to_string(),
                text: r.text.clone(),
            });
        }
        drafts.sort_by(|x, y| (&x.essay_id, x.draft_number).cmp(&(&y.essay_id, y.draft_number)));
        rows.sort_by(|x, y| {
            (&x.essay_id, x.draft_to, x.old_index, x.new_index).cmp(&(&y.essay_id, y.draft_to, y.old_index, y.new_index))
        });
        Ok(ExportArchive {
            assignment_id: a.id,
            article_id: a.article_id,
            drafts,
            annotations_csv: AnnotationSet { rows }.to_csv_string(),
        })
    }
}
