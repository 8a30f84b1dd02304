//! C ABI for the mythos reasoner.
//!
//! Knowledge bases are opaque [`MythosKb`] handles. Every fallible function
//! returns a [`MythosStatus`] and writes its result through an out pointer.
//! On failure, [`mythos_last_error_message`] describes the error; the
//! message belongs to the calling thread and lives until its next failing
//! call. Strings returned through out pointers are owned by the caller and
//! released with [`mythos_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mythos::antipatterns::detect_antipatterns;
use mythos::ingest::{normalize_fred, parse_ntriples};
use mythos::krss::{parse_concept, parse_kb, parse_rules, serialize_kb};
use mythos::model::KnowledgeBase;
use mythos::pipeline::{check_claim_with, CheckOptions};
use mythos::tableau::{Reasoner, TableauError, DEFAULT_NODE_CAP};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MythosStatus {
    Ok = 0,
    NullArg = 1,
    Utf8 = 2,
    Parse = 3,
    ResourceLimit = 4,
    Precondition = 5,
    Io = 6,
    Internal = 7,
}

/// Opaque knowledge base with its reasoning settings.
pub struct MythosKb {
    kb: KnowledgeBase,
    node_cap: usize,
}

impl MythosKb {
    fn reasoner(&self) -> Reasoner {
        Reasoner::with_node_cap(self.node_cap)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MythosStatus, String);

impl From<TableauError> for Failure {
    fn from(e: TableauError) -> Self {
        let status = match e {
            TableauError::ResourceLimit { .. } => MythosStatus::ResourceLimit,
            TableauError::UnknownIndividual(_) => MythosStatus::Precondition,
            TableauError::Roles(_) => MythosStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MythosStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MythosStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error: panic in mythos".to_owned());
            MythosStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(MythosStatus::NullArg, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(MythosStatus::Utf8, format!("{what}: {e}")))
}

unsafe fn handle<'a>(kb: *const MythosKb, what: &str) -> Result<&'a MythosKb, Failure> {
    kb.as_ref().ok_or_else(|| null(what))
}

/// Rejects a null out pointer before any work is done.
fn out_ptr<T>(out: *mut T) -> Result<*mut T, Failure> {
    if out.is_null() {
        Err(null("out"))
    } else {
        Ok(out)
    }
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    out_ptr(out)?.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(MythosStatus::Internal, e.to_string()))?;
    put(out, c.into_raw())
}

fn parse_err(e: impl std::fmt::Display) -> Failure {
    Failure(MythosStatus::Parse, e.to_string())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mythos_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null.
#[no_mangle]
pub extern "C" fn mythos_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mythos_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses KRSS text into a new handle.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mythos_kb_parse(text: *const c_char, out: *mut *mut MythosKb) -> MythosStatus {
    guard(|| {
        out_ptr(out)?;
        let kb = parse_kb(text_arg(text)?).map_err(parse_err)?;
        put(out, Box::into_raw(Box::new(MythosKb { kb, node_cap: DEFAULT_NODE_CAP })))
    })
}

/// Reads and parses a KRSS file into a new handle.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mythos_kb_load(path: *const c_char, out: *mut *mut MythosKb) -> MythosStatus {
    guard(|| {
        out_ptr(out)?;
        let path = text(path, "path")?;
        let body = std::fs::read_to_string(path).map_err(|e| Failure(MythosStatus::Io, format!("{path}: {e}")))?;
        let kb = parse_kb(&body).map_err(|e| Failure(MythosStatus::Parse, format!("{path}: {e}")))?;
        put(out, Box::into_raw(Box::new(MythosKb { kb, node_cap: DEFAULT_NODE_CAP })))
    })
}

unsafe fn text_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    text(p, "text")
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `kb` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mythos_kb_free(kb: *mut MythosKb) {
    if !kb.is_null() {
        drop(Box::from_raw(kb));
    }
}

/// Sets the completion-graph node cap. Zero is rejected.
///
/// # Safety
/// `kb` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mythos_kb_set_node_cap(kb: *mut MythosKb, cap: usize) -> MythosStatus {
    guard(|| {
        let kb = kb.as_mut().ok_or_else(|| null("kb"))?;
        if cap == 0 {
            return Err(Failure(MythosStatus::Precondition, "node cap must be at least 1".to_owned()));
        }
        kb.node_cap = cap;
        Ok(())
    })
}

/// # Safety
/// `kb` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mythos_kb_is_consistent(kb: *const MythosKb, out: *mut bool) -> MythosStatus {
    guard(|| {
        out_ptr(out)?;
        let kb = handle(kb, "kb")?;
        put(out, kb.reasoner().is_consistent(&kb.kb)?)
    })
}

/// Satisfiability of a concept written in KRSS.
///
/// # Safety
/// `kb` must be a live handle, `concept` a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mythos_kb_is_satisfiable(
    kb: *const MythosKb,
    concept: *const c_char,
    out: *mut bool,
) -> MythosStatus {
    guard(|| {
        out_ptr(out)?;
        let kb = handle(kb, "kb")?;
        let c = parse_concept(text(concept, "concept")?).map_err(parse_err)?;
        put(out, kb.reasoner().is_satisfiable(&kb.kb, &c)?)
    })
}

/// Whether `sub` is subsumed by `sup`.
///
/// # Safety
/// `kb` must be a live handle, `sup` and `sub` nul-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mythos_kb_subsumes(
    kb: *const MythosKb,
    sup: *const c_char,
    sub: *const c_char,
    out: *mut bool,
) -> MythosStatus {
    guard(|| {
        out_ptr(out)?;
        let kb = handle(kb, "kb")?;
        let sup = parse_concept(text(sup, "sup")?).map_err(parse_err)?;
        let sub = parse_concept(text(sub, "sub")?).map_err(parse_err)?;
        put(out, kb.reasoner().subsumes(&kb.kb, &sup, &sub)?)
    })
}

/// `{"coherent": bool, "unsat_concepts": [...]}`.
///
/// # Safety
/// `kb` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mythos_kb_coherence_json(kb: *const MythosKb, out: *mut *mut c_char) -> MythosStatus {
    guard(|| {
        out_ptr(out)?;
        let kb = handle(kb, "kb")?;
        let (coherent, unsat) = kb.reasoner().is_coherent(&kb.kb)?;
        put_string(out, serde_json::json!({ "coherent": coherent, "unsat_concepts": unsat }).to_string())
    })
}

/// JSON array of anti-pattern matches.
///
/// # Safety
/// `kb` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mythos_kb_antipatterns_json(kb: *const MythosKb, out: *mut *mut c_char) -> MythosStatus {
    guard(|| {
        out_ptr(out)?;
        let kb = handle(kb, "kb")?;
        let json = serde_json::to_string(&detect_antipatterns(&kb.kb)).map_err(|e| Failure(MythosStatus::Internal, e.to_string()))?;
        put_string(out, json)
    })
}

/// The knowledge base as KRSS text.
///
/// # Safety
/// `kb` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mythos_kb_serialize(kb: *const MythosKb, out: *mut *mut c_char) -> MythosStatus {
    guard(|| {
        out_ptr(out)?;
        put_string(out, serialize_kb(&handle(kb, "kb")?.kb))
    })
}

/// Checks a myth against a fact and writes the conflict report as JSON.
/// `background` and `rules` (KRSS rule text) may be null. The node cap of
/// `myth` applies.
///
/// # Safety
/// Handles must be live, strings nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mythos_check_claim_json(
    myth: *const MythosKb,
    fact: *const MythosKb,
    background: *const MythosKb,
    rules: *const c_char,
    out: *mut *mut c_char,
) -> MythosStatus {
    guard(|| {
        out_ptr(out)?;
        let m = handle(myth, "myth")?;
        let f = handle(fact, "fact")?;
        let empty = KnowledgeBase::new();
        let bg = background.as_ref().map_or(&empty, |b| &b.kb);
        let rules = if rules.is_null() { Vec::new() } else { parse_rules(text(rules, "rules")?).map_err(parse_err)? };
        let opts = CheckOptions { node_cap: m.node_cap, ..CheckOptions::default() };
        let report = check_claim_with("claim", &m.kb, &f.kb, bg, &rules, &opts);
        let json = serde_json::to_string(&report).map_err(|e| Failure(MythosStatus::Internal, e.to_string()))?;
        put_string(out, json)
    })
}

/// Parses N-Triples from the machine reader and normalizes them into a new handle.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mythos_ingest_ntriples(text: *const c_char, out: *mut *mut MythosKb) -> MythosStatus {
    guard(|| {
        out_ptr(out)?;
        let graph = parse_ntriples(text_arg(text)?).map_err(parse_err)?;
        let kb = normalize_fred(&graph).kb;
        put(out, Box::into_raw(Box::new(MythosKb { kb, node_cap: DEFAULT_NODE_CAP })))
    })
}
