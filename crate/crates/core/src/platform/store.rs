//! Persistence contract and the embedded SQLite implementation.

use std::path::Path;
use std::sync::Mutex;

use rusqlite::{params, Connection, OptionalExtension, Row};
use thiserror::Error;

use super::model::{
    Assignment, Classroom, NewAssignment, NewClassroom, Outcome, Role, SubmissionRecord, SubmissionStatus, User,
};

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{0} not found")]
    NotFound(&'static str),
    #[error("{0}")]
    Conflict(String),
    #[error("stored data is corrupt: {0}")]
    Corrupt(String),
    #[error("store schema version {found} is newer than supported {supported}")]
    SchemaTooNew { found: i64, supported: i64 },
    #[error(transparent)]
    Sqlite(#[from] rusqlite::Error),
}

/// Filter for classroom submission listings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SubmissionFilter {
    pub assignment_id: Option<i64>,
    pub draft_number: Option<u32>,
}

/// Storage operations used by the service. Implementations must make
/// `complete_submission` atomic: either every outcome field is written
/// together with the status change, or nothing is.
pub trait Store: Send + Sync {
    fn create_user(&self, user: &NewUserRecord) -> Result<User, StoreError>;
    fn user(&self, id: i64) -> Result<Option<User>, StoreError>;
    /// The user and their password hash.
    fn credentials(&self, username: &str) -> Result<Option<(User, String)>, StoreError>;
    fn delete_user(&self, id: i64) -> Result<(), StoreError>;
    fn list_users(&self) -> Result<Vec<User>, StoreError>;
    fn user_count(&self) -> Result<u64, StoreError>;

    fn create_classroom(&self, room: &NewClassroom) -> Result<Classroom, StoreError>;
    fn classroom(&self, id: i64) -> Result<Option<Classroom>, StoreError>;
    fn classrooms(&self) -> Result<Vec<Classroom>, StoreError>;
    fn classroom_students(&self, id: i64) -> Result<Vec<User>, StoreError>;

    fn create_assignment(&self, a: &NewAssignment) -> Result<Assignment, StoreError>;
    fn assignment(&self, id: i64) -> Result<Option<Assignment>, StoreError>;
    fn assignments(&self) -> Result<Vec<Assignment>, StoreError>;

    /// Drafts of one student for one assignment, by draft number.
    fn drafts(&self, student_id: i64, assignment_id: i64) -> Result<Vec<SubmissionRecord>, StoreError>;
    fn submission(&self, id: i64) -> Result<Option<SubmissionRecord>, StoreError>;
    /// New `processing` record. Fails with `Conflict` if the draft number is taken.
    fn insert_submission(
        &self,
        student_id: i64,
        assignment_id: i64,
        draft_number: u32,
        text: &str,
        submitted_at: u64,
    ) -> Result<SubmissionRecord, StoreError>;
    /// Put a `failed` record back to `processing` with new text.
    fn retry_submission(&self, id: i64, text: &str, submitted_at: u64) -> Result<SubmissionRecord, StoreError>;
    fn complete_submission(&self, id: i64, outcome: &Outcome) -> Result<SubmissionRecord, StoreError>;
    fn fail_submission(&self, id: i64, reason: &str) -> Result<(), StoreError>;
    fn processing_submissions(&self) -> Result<Vec<SubmissionRecord>, StoreError>;
    fn classroom_submissions(&self, classroom_id: i64, filter: SubmissionFilter)
        -> Result<Vec<SubmissionRecord>, StoreError>;
    fn assignment_submissions(&self, assignment_id: i64) -> Result<Vec<SubmissionRecord>, StoreError>;
}

/// A user row as stored: the password is already hashed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewUserRecord {
    pub username: String,
    pub password_hash: String,
    pub role: Role,
    pub display_name: String,
    pub classroom_id: Option<i64>,
}

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS classrooms (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL,
    teacher_id INTEGER REFERENCES users(id) ON DELETE SET NULL,
    grade TEXT
);
CREATE TABLE IF NOT EXISTS users (
    id INTEGER PRIMARY KEY,
    username TEXT NOT NULL UNIQUE,
    password_hash TEXT NOT NULL,
    role TEXT NOT NULL CHECK (role IN ('student', 'teacher', 'admin')),
    display_name TEXT NOT NULL,
    classroom_id INTEGER REFERENCES classrooms(id) ON DELETE SET NULL
);
CREATE TABLE IF NOT EXISTS assignments (
    id INTEGER PRIMARY KEY,
    classroom_id INTEGER NOT NULL REFERENCES classrooms(id) ON DELETE CASCADE,
    article_id TEXT NOT NULL,
    prompt_text TEXT NOT NULL,
    max_drafts INTEGER NOT NULL CHECK (max_drafts >= 1)
);
CREATE TABLE IF NOT EXISTS submissions (
    id INTEGER PRIMARY KEY,
    student_id INTEGER NOT NULL REFERENCES users(id) ON DELETE CASCADE,
    assignment_id INTEGER NOT NULL REFERENCES assignments(id) ON DELETE CASCADE,
    draft_number INTEGER NOT NULL,
    text TEXT NOT NULL,
    submitted_at INTEGER NOT NULL,
    status TEXT NOT NULL CHECK (status IN ('processing', 'complete', 'failed')),
    evidence_score TEXT,
    feedback TEXT,
    revisions TEXT,
    ef_level TEXT,
    error TEXT,
    UNIQUE (student_id, assignment_id, draft_number)
);
CREATE INDEX IF NOT EXISTS submissions_by_assignment ON submissions(assignment_id, student_id, draft_number);
";

const SUBMISSION_COLUMNS: &str = "id, student_id, assignment_id, draft_number, text, submitted_at, status, \
     evidence_score, feedback, revisions, ef_level, error";

pub struct SqliteStore {
    conn: Mutex<Connection>,
}

impl SqliteStore {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let conn = if path.as_os_str() == ":memory:" {
            Connection::open_in_memory()?
        } else {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| StoreError::Corrupt(e.to_string()))?;
            }
            Connection::open(path)?
        };
        Self::init(conn)
    }

    pub fn in_memory() -> Result<Self, StoreError> {
        Self::init(Connection::open_in_memory()?)
    }

    fn init(conn: Connection) -> Result<Self, StoreError> {
        conn.pragma_update(None, "foreign_keys", true)?;
        conn.pragma_update(None, "journal_mode", "wal")?;
        let version: i64 = conn.pragma_query_value(None, "user_version", |r| r.get(0))?;
        if version > SCHEMA_VERSION {
            return Err(StoreError::SchemaTooNew {
                found: version,
                supported: SCHEMA_VERSION,
            });
        }
        conn.execute_batch(SCHEMA)?;
        conn.pragma_update(None, "user_version", SCHEMA_VERSION)?;
        Ok(Self { conn: Mutex::new(conn) })
    }

    fn with<T>(&self, f: impl FnOnce(&Connection) -> Result<T, StoreError>) -> Result<T, StoreError> {
        let conn = self.conn.lock().unwrap_or_else(|p| p.into_inner());
        f(&conn)
    }

    fn submissions_where(
        conn: &Connection,
        clause: &str,
        args: &[&dyn rusqlite::ToSql],
    ) -> Result<Vec<SubmissionRecord>, StoreError> {
        let sql = format!("SELECT {SUBMISSION_COLUMNS} FROM submissions WHERE {clause}");
        let mut stmt = conn.prepare(&sql)?;
        let rows = stmt.query_map(args, raw_submission)?;
        rows.map(|r| r?.decode()).collect()
    }
}

fn user_row(r: &Row<'_>) -> rusqlite::Result<User> {
    let role: String = r.get(2)?;
    Ok(User {
        id: r.get(0)?,
        username: r.get(1)?,
        role: role
            .parse()
            .map_err(|e: String| rusqlite::Error::FromSqlConversionFailure(2, rusqlite::types::Type::Text, e.into()))?,
        display_name: r.get(3)?,
        classroom_id: r.get(4)?,
    })
}

fn classroom_row(r: &Row<'_>) -> rusqlite::Result<Classroom> {
    Ok(Classroom {
        id: r.get(0)?,
        name: r.get(1)?,
        teacher_id: r.get(2)?,
        grade: r.get(3)?,
    })
}

fn assignment_row(r: &Row<'_>) -> rusqlite::Result<Assignment> {
    Ok(Assignment {
        id: r.get(0)?,
        classroom_id: r.get(1)?,
        article_id: r.get(2)?,
        prompt_text: r.get(3)?,
        max_drafts: r.get(4)?,
    })
}

struct RawSubmission {
    id: i64,
    student_id: i64,
    assignment_id: i64,
    draft_number: u32,
    text: String,
    submitted_at: i64,
    status: String,
    evidence_score: Option<String>,
    feedback: Option<String>,
    revisions: Option<String>,
    ef_level: Option<String>,
    error: Option<String>,
}

fn raw_submission(r: &Row<'_>) -> rusqlite::Result<RawSubmission> {
    Ok(RawSubmission {
        id: r.get(0)?,
        student_id: r.get(1)?,
        assignment_id: r.get(2)?,
        draft_number: r.get(3)?,
        text: r.get(4)?,
        submitted_at: r.get(5)?,
        status: r.get(6)?,
        evidence_score: r.get(7)?,
        feedback: r.get(8)?,
        revisions: r.get(9)?,
        ef_level: r.get(10)?,
        error: r.get(11)?,
    })
}

fn decode_json<T: serde::de::DeserializeOwned>(raw: Option<String>, what: &str) -> Result<Option<T>, StoreError> {
    raw.map(|s| serde_json::from_str(&s).map_err(|e| StoreError::Corrupt(format!("{what}: {e}"))))
        .transpose()
}

impl RawSubmission {
    fn decode(self) -> Result<SubmissionRecord, StoreError> {
        Ok(SubmissionRecord {
            id: self.id,
            student_id: self.student_id,
            assignment_id: self.assignment_id,
            draft_number: self.draft_number,
            text: self.text,
            submitted_at: self.submitted_at as u64,
            status: self.status.parse().map_err(StoreError::Corrupt)?,
            evidence_score: decode_json(self.evidence_score, "evidence_score")?,
            feedback: decode_json(self.feedback, "feedback")?,
            revisions: decode_json(self.revisions, "revisions")?.unwrap_or_default(),
            ef_level: self
                .ef_level
                .map(|s| s.parse().map_err(|e: crate::feedback::UnknownLevel| StoreError::Corrupt(e.to_string())))
                .transpose()?,
            error: self.error,
        })
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("domain types serialize")
}

fn is_unique_violation(e: &rusqlite::Error) -> bool {
    matches!(
        e,
        rusqlite::Error::SqliteFailure(err, _) if err.code == rusqlite::ErrorCode::ConstraintViolation
    )
}

impl Store for SqliteStore {
    fn create_user(&self, u: &NewUserRecord) -> Result<User, StoreError> {
        self.with(|c| {
            let res = c.execute(
                "INSERT INTO users (username, password_hash, role, display_name, classroom_id) VALUES (?1, ?2, ?3, ?4, ?5)",
                params![u.username, u.password_hash, u.role.as_str(), u.display_name, u.classroom_id],
            );
            match res {
                Ok(_) => Ok(User {
                    id: c.last_insert_rowid(),
                    username: u.username.clone(),
                    role: u.role,
                    display_name: u.display_name.clone(),
                    classroom_id: u.classroom_id,
                }),
                Err(e) if is_unique_violation(&e) => {
                    Err(StoreError::Conflict(format!("username {:?} is taken or classroom is missing", u.username)))
                }
                Err(e) => Err(e.into()),
            }
        })
    }

    fn user(&self, id: i64) -> Result<Option<User>, StoreError> {
        self.with(|c| {
            Ok(c.query_row(
                "SELECT id, username, role, display_name, classroom_id FROM users WHERE id = ?1",
                [id],
                user_row,
            )
            .optional()?)
        })
    }

    fn credentials(&self, username: &str) -> Result<Option<(User, String)>, StoreError> {
        self.with(|c| {
            Ok(c.query_row(
                "SELECT id, username, role, display_name, classroom_id, password_hash FROM users WHERE username = ?1",
                [username],
                |r| Ok((user_row(r)?, r.get(5)?)),
            )
            .optional()?)
        })
    }

    fn delete_user(&self, id: i64) -> Result<(), StoreError> {
        self.with(|c| match c.execute("DELETE FROM users WHERE id = ?1", [id])? {
            0 => Err(StoreError::NotFound("user")),
            _ => Ok(()),
        })
    }

    fn list_users(&self) -> Result<Vec<User>, StoreError> {
        self.with(|c| {
            let mut stmt = c.prepare("SELECT id, username, role, display_name, classroom_id FROM users ORDER BY id")?;
            let rows = stmt.query_map([], user_row)?;
            Ok(rows.collect::<Result<_, _>>()?)
        })
    }

    fn user_count(&self) -> Result<u64, StoreError> {
        self.with(|c| Ok(c.query_row("SELECT COUNT(*) FROM users", [], |r| r.get::<_, i64>(0))? as u64))
    }

    fn create_classroom(&self, room: &NewClassroom) -> Result<Classroom, StoreError> {
        self.with(|c| {
            c.execute(
                "INSERT INTO classrooms (name, teacher_id, grade) VALUES (?1, ?2, ?3)",
                params![room.name, room.teacher_id, room.grade],
            )
            .map_err(|e| {
                if is_unique_violation(&e) {
                    StoreError::NotFound("teacher")
                } else {
                    e.into()
                }
            })?;
            Ok(Classroom {
                id: c.last_insert_rowid(),
                name: room.name.clone(),
                teacher_id: room.teacher_id,
                grade: room.grade.clone(),
            })
        })
    }

    fn classroom(&self, id: i64) -> Result<Option<Classroom>, StoreError> {
        self.with(|c| {
            Ok(c.query_row(
                "SELECT id, name, teacher_id, grade FROM classrooms WHERE id = ?1",
                [id],
                classroom_row,
            )
            .optional()?)
        })
    }

    fn classrooms(&self) -> Result<Vec<Classroom>, StoreError> {
        self.with(|c| {
            let mut stmt = c.prepare("SELECT id, name, teacher_id, grade FROM classrooms ORDER BY id")?;
            let rows = stmt.query_map([], classroom_row)?;
            Ok(rows.collect::<Result<_, _>>()?)
        })
    }

    fn classroom_students(&self, id: i64) -> Result<Vec<User>, StoreError> {
        self.with(|c| {
            let mut stmt = c.prepare(
                "SELECT id, username, role, display_name, classroom_id FROM users \
                 WHERE classroom_id = ?1 AND role = 'student' ORDER BY id",
            )?;
            let rows = stmt.query_map([id], user_row)?;
            Ok(rows.collect::<Result<_, _>>()?)
        })
    }

    fn create_assignment(&self, a: &NewAssignment) -> Result<Assignment, StoreError> {
        self.with(|c| {
            c.execute(
                "INSERT INTO assignments (classroom_id, article_id, prompt_text, max_drafts) VALUES (?1, ?2, ?3, ?4)",
                params![a.classroom_id, a.article_id, a.prompt_text, a.max_drafts],
            )
            .map_err(|e| {
                if is_unique_violation(&e) {
                    StoreError::NotFound("classroom")
                } else {
                    e.into()
                }
            })?;
            Ok(Assignment {
                id: c.last_insert_rowid(),
                classroom_id: a.classroom_id,
                article_id: a.article_id.clone(),
                prompt_text: a.prompt_text.clone(),
                max_drafts: a.max_drafts,
            })
        })
    }

    fn assignment(&self, id: i64) -> Result<Option<Assignment>, StoreError> {
        self.with(|c| {
            Ok(c.query_row(
                "SELECT id, classroom_id, article_id, prompt_text, max_drafts FROM assignments WHERE id = ?1",
                [id],
                assignment_row,
            )
            .optional()?)
        })
    }

    fn assignments(&self) -> Result<Vec<Assignment>, StoreError> {
        self.with(|c| {
            let mut stmt =
                c.prepare("SELECT id, classroom_id, article_id, prompt_text, max_drafts FROM assignments ORDER BY id")?;
            let rows = stmt.query_map([], assignment_row)?;
            Ok(rows.collect::<Result<_, _>>()?)
        })
    }

    fn drafts(&self, student_id: i64, assignment_id: i64) -> Result<Vec<SubmissionRecord>, StoreError> {
        self.with(|c| {
            Self::submissions_where(
                c,
                "student_id = ?1 AND assignment_id = ?2 ORDER BY draft_number",
                &[&student_id, &assignment_id],
            )
        })
    }

    fn submission(&self, id: i64) -> Result<Option<SubmissionRecord>, StoreError> {
        self.with(|c| Ok(Self::submissions_where(c, "id = ?1", &[&id])?.pop()))
    }

    fn insert_submission(
        &self,
        student_id: i64,
        assignment_id: i64,
        draft_number: u32,
        text: &str,
        submitted_at: u64,
    ) -> Result<SubmissionRecord, StoreError> {
        self.with(|c| {
            c.execute(
                "INSERT INTO submissions (student_id, assignment_id, draft_number, text, submitted_at, status) \
                 VALUES (?1, ?2, ?3, ?4, ?5, 'processing')",
                params![student_id, assignment_id, draft_number, text, submitted_at as i64],
            )
            .map_err(|e| {
                if is_unique_violation(&e) {
                    StoreError::Conflict(format!("draft {draft_number} already exists"))
                } else {
                    e.into()
                }
            })?;
            Ok(SubmissionRecord {
                id: c.last_insert_rowid(),
                student_id,
                assignment_id,
                draft_number,
                text: text.to_string(),
                submitted_at,
                status: SubmissionStatus::Processing,
                evidence_score: None,
                feedback: None,
                revisions: Vec::new(),
                ef_level: None,
                error: None,
            })
        })
    }

    fn retry_submission(&self, id: i64, text: &str, submitted_at: u64) -> Result<SubmissionRecord, StoreError> {
        self.with(|c| {
            let n = c.execute(
                "UPDATE submissions SET text = ?2, submitted_at = ?3, status = 'processing', error = NULL \
                 WHERE id = ?1 AND status = 'failed'",
                params![id, text, submitted_at as i64],
            )?;
            if n == 0 {
                return Err(StoreError::Conflict("only failed drafts can be resubmitted".into()));
            }
            Self::submissions_where(c, "id = ?1", &[&id])?
                .pop()
                .ok_or(StoreError::NotFound("submission"))
        })
    }

    fn complete_submission(&self, id: i64, o: &Outcome) -> Result<SubmissionRecord, StoreError> {
        self.with(|c| {
            let n = c.execute(
                "UPDATE submissions SET status = 'complete', evidence_score = ?2, feedback = ?3, revisions = ?4, \
                 ef_level = ?5, error = NULL WHERE id = ?1 AND status = 'processing'",
                params![
                    id,
                    json(&o.evidence_score),
                    json(&o.feedback),
                    json(&o.revisions),
                    o.ef_level.as_str()
                ],
            )?;
            if n == 0 {
                return Err(StoreError::Conflict(format!("submission {id} is not processing")));
            }
            Self::submissions_where(c, "id = ?1", &[&id])?
                .pop()
                .ok_or(StoreError::NotFound("submission"))
        })
    }

    fn fail_submission(&self, id: i64, reason: &str) -> Result<(), StoreError> {
        self.with(|c| {
            c.execute(
                "UPDATE submissions SET status = 'failed', error = ?2 WHERE id = ?1 AND status = 'processing'",
                params![id, reason],
            )?;
            Ok(())
        })
    }

    fn processing_submissions(&self) -> Result<Vec<SubmissionRecord>, StoreError> {
        self.with(|c| Self::submissions_where(c, "status = 'processing' ORDER BY id", &[]))
    }

    fn classroom_submissions(
        &self,
        classroom_id: i64,
        filter: SubmissionFilter,
    ) -> Result<Vec<SubmissionRecord>, StoreError> {
        self.with(|c| {
            Self::submissions_where(
                c,
                "assignment_id IN (SELECT id FROM assignments WHERE classroom_id = ?1) \
                 AND (?2 IS NULL OR assignment_id = ?2) AND (?3 IS NULL OR draft_number = ?3) \
                 ORDER BY assignment_id, student_id, draft_number",
                &[&classroom_id, &filter.assignment_id, &filter.draft_number],
            )
        })
    }

    fn assignment_submissions(&self, assignment_id: i64) -> Result<Vec<SubmissionRecord>, StoreError> {
        self.with(|c| {
            Self::submissions_where(
                c,
                "assignment_id = ?1 ORDER BY student_id, draft_number",
                &[&assignment_id],
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedback::{EfLevel, FeedbackDecision, FeedbackKind, FeedbackLevel};
    use crate::scoring::EvidenceScore;

    fn seed(store: &SqliteStore) -> (User, Assignment) {
        let room = store
            .create_classroom(&NewClassroom {
                name: "5A".into(),
                teacher_id: None,
                grade: Some("5".into()),
            })
            .unwrap();
        let student = store
            .create_user(&NewUserRecord {
                username: "ana".into(),
                password_hash: "x".into(),
                role: Role::Student,
                display_name: "Ana".into(),
                classroom_id: Some(room.id),
            })
            .unwrap();
        let a = store
            .create_assignment(&NewAssignment {
                classroom_id: room.id,
                article_id: "mvp".into(),
                prompt_text: "Did the author convince you?".into(),
                max_drafts: 3,
            })
            .unwrap();
        (student, a)
    }

    fn outcome() -> Outcome {
        Outcome {
            evidence_score: EvidenceScore {
                article_id: "mvp".into(),
                npe: 1,
                topic_hits: Default::default(),
                spc_vector: vec![0],
                spc: 0,
                word_count: 3,
                holistic_score: None,
            },
            feedback: FeedbackDecision {
                kind: FeedbackKind::Ef,
                level: FeedbackLevel::Ef(EfLevel::Ef1),
                messages: vec!["m".into()],
                trace: vec![],
                highlight_topics: vec![],
            },
            revisions: vec![],
            ef_level: EfLevel::Ef1,
        }
    }

    #[test]
    fn submission_lifecycle() {
        let store = SqliteStore::in_memory().unwrap();
        let (s, a) = seed(&store);
        let rec = store.insert_submission(s.id, a.id, 1, "Draft one.", 10).unwrap();
        assert_eq!(rec.status, SubmissionStatus::Processing);
        assert!(matches!(
            store.insert_submission(s.id, a.id, 1, "again", 11),
            Err(StoreError::Conflict(_))
        ));
        assert_eq!(store.processing_submissions().unwrap().len(), 1);
        let done = store.complete_submission(rec.id, &outcome()).unwrap();
        assert_eq!(done.status, SubmissionStatus::Complete);
        assert_eq!(done.evidence_score.unwrap().npe, 1);
        assert_eq!(done.ef_level, Some(EfLevel::Ef1));
        // Completed records are immutable.
        assert!(store.complete_submission(rec.id, &outcome()).is_err());
        store.fail_submission(rec.id, "late").unwrap();
        assert_eq!(store.submission(rec.id).unwrap().unwrap().status, SubmissionStatus::Complete);
        assert!(store.retry_submission(rec.id, "x", 12).is_err());
    }

    #[test]
    fn failed_drafts_can_be_retried() {
        let store = SqliteStore::in_memory().unwrap();
        let (s, a) = seed(&store);
        let rec = store.insert_submission(s.id, a.id, 1, "Draft one.", 10).unwrap();
        store.fail_submission(rec.id, "boom").unwrap();
        let failed = store.submission(rec.id).unwrap().unwrap();
        assert_eq!((failed.status, failed.error.as_deref()), (SubmissionStatus::Failed, Some("boom")));
        let again = store.retry_submission(rec.id, "Draft one, fixed.", 20).unwrap();
        assert_eq!(again.status, SubmissionStatus::Processing);
        assert_eq!(again.text, "Draft one, fixed.");
        assert_eq!(again.error, None);
    }

    #[test]
    fn filters_and_cascade() {
        let store = SqliteStore::in_memory().unwrap();
        let (s, a) = seed(&store);
        store.insert_submission(s.id, a.id, 1, "one", 1).unwrap();
        store.insert_submission(s.id, a.id, 2, "two", 2).unwrap();
        let all = store.classroom_submissions(a.classroom_id, SubmissionFilter::default()).unwrap();
        assert_eq!(all.len(), 2);
        let d2 = store
            .classroom_submissions(
                a.classroom_id,
                SubmissionFilter {
                    draft_number: Some(2),
                    ..Default::default()
                },
            )
            .unwrap();
        assert_eq!(d2.len(), 1);
        assert!(store.classroom_submissions(999, SubmissionFilter::default()).unwrap().is_empty());
        store.delete_user(s.id).unwrap();
        assert!(store.assignment_submissions(a.id).unwrap().is_empty());
        assert!(matches!(store.delete_user(s.id), Err(StoreError::NotFound(_))));
    }

    #[test]
    fn reopens_file_store() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/store.sqlite3");
        {
            let store = SqliteStore::open(&path).unwrap();
            seed(&store);
        }
        let store = SqliteStore::open(&path).unwrap();
        assert_eq!(store.user_count().unwrap(), 1);
        assert_eq!(store.credentials("ana").unwrap().unwrap().1, "x");
    }
}
