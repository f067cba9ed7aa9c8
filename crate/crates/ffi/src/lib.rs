//! C ABI over the draftwise engine.
//!
//! Every fallible function returns a [`DwStatus`]. On failure a message is
//! kept per thread and can be read with [`dw_last_error`]. Strings returned
//! through `out_json` are owned by the caller and must be released with
//! [`dw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use draftwise::embedding::EmbeddingTable;
use draftwise::engine::Engine;
use draftwise::eval::qwk;
use draftwise::feedback::{decide_ef, EfLevel, Thresholds};
use draftwise::lexicon::Article;
use draftwise::scoring::Scorer;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DwStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    Io = 4,
    Panic = 5,
}

/// Opaque scoring handle: one article lexicon plus word vectors.
pub struct DwScorer {
    engine: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let msg = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(DwStatus, String);

fn guarded(f: impl FnOnce() -> Result<(), Fail>) -> DwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DwStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DwStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(DwStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(DwStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn invalid(e: impl ToString) -> Fail {
    Fail(DwStatus::InvalidInput, e.to_string())
}

unsafe fn write_json(out: *mut *mut c_char, value: &impl serde::Serialize) -> Result<(), Fail> {
    let s = serde_json::to_string(value).map_err(invalid)?;
    *out = CString::new(s).map_err(invalid)?.into_raw();
    Ok(())
}

fn new_scorer(article: Article, table: EmbeddingTable) -> *mut DwScorer {
    let scorer = Scorer::new(Arc::new(article), Arc::new(table));
    Box::into_raw(Box::new(DwScorer {
        engine: Engine::new(scorer),
    }))
}

/// Loads a lexicon file and, when `embeddings_path` is not null, a word
/// vector file.
///
/// # Safety
/// Path arguments must be null or NUL-terminated strings; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dw_scorer_new(
    lexicon_path: *const c_char,
    embeddings_path: *const c_char,
    out: *mut *mut DwScorer,
) -> DwStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Fail(DwStatus::NullArgument, "out is null".into()));
        }
        *out = ptr::null_mut();
        let lexicon = text(lexicon_path, "lexicon_path")?;
        let raw = std::fs::read_to_string(lexicon).map_err(|e| Fail(DwStatus::Io, format!("{lexicon}: {e}")))?;
        let article = Article::from_json(&raw).map_err(invalid)?;
        let table = if embeddings_path.is_null() {
            EmbeddingTable::empty()
        } else {
            let path = text(embeddings_path, "embeddings_path")?;
            let file = std::fs::File::open(path).map_err(|e| Fail(DwStatus::Io, format!("{path}: {e}")))?;
            EmbeddingTable::read(std::io::BufReader::new(file)).map_err(invalid)?
        };
        *out = new_scorer(article, table);
        Ok(())
    })
}

/// Builds a scorer from lexicon JSON with no word vectors.
///
/// # Safety
/// `lexicon_json` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dw_scorer_from_json(lexicon_json: *const c_char, out: *mut *mut DwScorer) -> DwStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Fail(DwStatus::NullArgument, "out is null".into()));
        }
        *out = ptr::null_mut();
        let article = Article::from_json(text(lexicon_json, "lexicon_json")?).map_err(invalid)?;
        *out = new_scorer(article, EmbeddingTable::empty());
        Ok(())
    })
}

/// # Safety
/// `scorer` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dw_scorer_free(scorer: *mut DwScorer) {
    if !scorer.is_null() {
        drop(Box::from_raw(scorer));
    }
}

unsafe fn handle<'a>(scorer: *const DwScorer) -> Result<&'a DwScorer, Fail> {
    scorer
        .as_ref()
        .ok_or_else(|| Fail(DwStatus::NullArgument, "scorer is null".into()))
}

unsafe fn check_out(out: *mut *mut c_char) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(DwStatus::NullArgument, "out_json is null".into()));
    }
    *out = ptr::null_mut();
    Ok(())
}

/// Scores one draft. `out_json` receives `{"score": ..., "feedback": ...}`.
///
/// # Safety
/// `scorer` must be a live handle, `essay` a NUL-terminated string and
/// `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dw_score(scorer: *const DwScorer, essay: *const c_char, out_json: *mut *mut c_char) -> DwStatus {
    guarded(|| {
        check_out(out_json)?;
        let s = handle(scorer)?;
        let report = s.engine.score_draft(text(essay, "essay")?).map_err(invalid)?;
        write_json(out_json, &report)
    })
}

/// Compares two drafts. `prev_ef` is 1, 2 or 3 for the feedback shown on
/// the old draft, or 0 to use the level implied by its score.
///
/// # Safety
/// As for [`dw_score`].
#[no_mangle]
pub unsafe extern "C" fn dw_revise(
    scorer: *const DwScorer,
    old_draft: *const c_char,
    new_draft: *const c_char,
    prev_ef: i32,
    out_json: *mut *mut c_char,
) -> DwStatus {
    guarded(|| {
        check_out(out_json)?;
        let s = handle(scorer)?;
        let old = text(old_draft, "old_draft")?;
        let new = text(new_draft, "new_draft")?;
        let prev = match prev_ef {
            0 => {
                let score = s.engine.scorer().score_text(old).map_err(invalid)?;
                s.engine.implied_ef(&score)
            }
            1..=3 => EfLevel::ALL[prev_ef as usize - 1],
            other => return Err(invalid(format!("prev_ef must be 0..=3, got {other}"))),
        };
        let report = s.engine.revise(old, new, prev).map_err(invalid)?;
        write_json(out_json, &report)
    })
}

/// Evidence-use level (1, 2 or 3) for the given indicator values.
///
/// # Safety
/// `out_level` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dw_select_ef(npe: u32, spc: u32, alpha: u32, beta: u32, out_level: *mut i32) -> DwStatus {
    guarded(|| {
        let out = out_level
            .as_mut()
            .ok_or_else(|| Fail(DwStatus::NullArgument, "out_level is null".into()))?;
        let th = Thresholds {
            alpha,
            beta,
            ..Thresholds::default()
        };
        let (level, _) = decide_ef(npe, spc, &th);
        *out = EfLevel::ALL.iter().position(|l| *l == level).unwrap() as i32 + 1;
        Ok(())
    })
}

/// Quadratic weighted kappa of two rating vectors over `min..=max`.
///
/// # Safety
/// `a` and `b` must each point to `n` readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dw_qwk(a: *const i64, b: *const i64, n: usize, min: i64, max: i64, out: *mut f64) -> DwStatus {
    guarded(|| {
        if a.is_null() || b.is_null() || out.is_null() {
            return Err(Fail(DwStatus::NullArgument, "a, b and out must be non-null".into()));
        }
        let (xs, ys) = (std::slice::from_raw_parts(a, n), std::slice::from_raw_parts(b, n));
        *out = qwk(xs, ys, (min, max)).map_err(invalid)?.qwk;
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn dw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_ef_levels() {
        let mut level = 0;
        unsafe {
            assert_eq!(dw_select_ef(2, 9, 2, 4, &mut level), DwStatus::Ok);
            assert_eq!(level, 1);
            assert_eq!(dw_select_ef(3, 4, 2, 4, &mut level), DwStatus::Ok);
            assert_eq!(level, 2);
            assert_eq!(dw_select_ef(3, 5, 2, 4, &mut level), DwStatus::Ok);
            assert_eq!(level, 3);
            assert_eq!(dw_select_ef(0, 0, 2, 4, ptr::null_mut()), DwStatus::NullArgument);
        }
    }

    #[test]
    fn free_accepts_null() {
        unsafe {
            dw_scorer_free(ptr::null_mut());
            dw_string_free(ptr::null_mut());
        }
    }
}
