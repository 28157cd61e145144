//! C ABI for the central-configuration solver.
//!
//! The interface hands out opaque handles for parsed jobs and finished
//! results; every entry point returns a status code, and strings returned
//! to the caller must be released with [`cencon_string_free`]. The header
//! `include/cencon.h` is generated by cbindgen at build time.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cencon::classify::{classify, ClassGroup, Classification, Shape};
use cencon::job::{parse_job_str, JobSpec};
use cencon::search::{multi_run, CertifiedSolution, MultiRunOptions, MultiRunReport};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CenconStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    IndexOutOfRange = 4,
    InternalError = 5,
}

/// Opaque handle: a parsed job specification.
pub struct CenconJob {
    spec: JobSpec,
}

/// Opaque handle: a finished search plus classification.
pub struct CenconResult {
    report: MultiRunReport,
    solutions: Vec<CertifiedSolution>,
    classification: Classification,
    conclusive: bool,
}

/// Per-shape labeled class counts (mirrors the text table).
#[repr(C)]
#[derive(Clone, Copy, Default)]
pub struct CenconCounts {
    pub collinear: u64,
    pub concave: u64,
    pub convex: u64,
    pub spatial: u64,
    pub unresolved: u64,
    pub total: u64,
}

/// Summary of one equivalence class.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct CenconClassInfo {
    /// 0 collinear, 1 concave, 2 convex, 3 spatial, 4 unresolved.
    pub shape: u32,
    pub labeled_count: u64,
    pub stabilizer: u64,
    pub member_count: u64,
}

/// Parses a job config (same format the CLI reads) into a handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated C string and `out` a valid
/// pointer; on success `*out` owns the job and must be released with
/// [`cencon_job_free`].
#[no_mangle]
pub unsafe extern "C" fn cencon_job_parse(
    text: *const c_char,
    out: *mut *mut CenconJob,
) -> CenconStatus {
    if text.is_null() || out.is_null() {
        return CenconStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let Ok(text) = CStr::from_ptr(text).to_str() else {
        return CenconStatus::InvalidUtf8;
    };
    match parse_job_str(text) {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(CenconJob { spec }));
            CenconStatus::Ok
        }
        Err(_) => CenconStatus::ParseError,
    }
}

/// Releases a job handle. Accepts NULL.
///
/// # Safety
/// `job` must come from [`cencon_job_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cencon_job_free(job: *mut CenconJob) {
    if !job.is_null() {
        drop(Box::from_raw(job));
    }
}

/// Runs the search and classification for a parsed job. `max_boxes`
/// bounds the box budget (0 means unlimited).
///
/// # Safety
/// `job` must be a live handle from [`cencon_job_parse`]; on success
/// `*out` must be released with [`cencon_result_free`].
#[no_mangle]
pub unsafe extern "C" fn cencon_job_run(
    job: *const CenconJob,
    max_boxes: u64,
    out: *mut *mut CenconResult,
) -> CenconStatus {
    if job.is_null() || out.is_null() {
        return CenconStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let spec = &(*job).spec;
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        let mut opts = MultiRunOptions::default();
        opts.selection = spec.runs.clone();
        opts.min_box_width = spec.min_box_width;
        opts.x_max = spec.x_max;
        opts.max_boxes = if max_boxes == 0 { spec.max_boxes } else { max_boxes };
        opts.ordering_constraints = spec.ordering_constraints;
        let report = multi_run(&spec.masses, spec.dim, &opts);
        let group = if spec.identify_so3 { ClassGroup::SO3 } else { ClassGroup::SO2 };
        let solutions: Vec<CertifiedSolution> =
            report.all_certified().into_iter().cloned().collect();
        let classification = classify(&solutions, &spec.masses, group);
        let conclusive = report.conclusive();
        CenconResult { report, solutions, classification, conclusive }
    }));
    match outcome {
        Ok(result) => {
            *out = Box::into_raw(Box::new(result));
            CenconStatus::Ok
        }
        Err(_) => CenconStatus::InternalError,
    }
}

/// Releases a result handle. Accepts NULL.
///
/// # Safety
/// `result` must come from [`cencon_job_run`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cencon_result_free(result: *mut CenconResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// 1 when the run was conclusive (no undecided boxes), else 0.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cencon_result_conclusive(result: *const CenconResult) -> i32 {
    if result.is_null() {
        return 0;
    }
    (*result).conclusive as i32
}

/// Copies the per-shape labeled class counts into `out`.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cencon_result_counts(
    result: *const CenconResult,
    out: *mut CenconCounts,
) -> CenconStatus {
    if result.is_null() || out.is_null() {
        return CenconStatus::NullArgument;
    }
    let t = &(*result).classification.table;
    *out = CenconCounts {
        collinear: t.collinear,
        concave: t.concave,
        convex: t.convex,
        spatial: t.spatial,
        unresolved: t.unresolved,
        total: t.total,
    };
    CenconStatus::Ok
}

/// Number of (geometric) equivalence classes in the result.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cencon_result_class_count(result: *const CenconResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).classification.classes.len()
}

fn shape_code(shape: Shape) -> u32 {
    match shape {
        Shape::Collinear => 0,
        Shape::Concave => 1,
        Shape::Convex => 2,
        Shape::SpatialNonPlanar => 3,
        Shape::Unresolved => 4,
    }
}

/// Copies a class summary into `out`.
///
/// # Safety
/// Both pointers must be valid; `index` below the class count.
#[no_mangle]
pub unsafe extern "C" fn cencon_result_class_info(
    result: *const CenconResult,
    index: usize,
    out: *mut CenconClassInfo,
) -> CenconStatus {
    if result.is_null() || out.is_null() {
        return CenconStatus::NullArgument;
    }
    let classes = &(*result).classification.classes;
    let Some(c) = classes.get(index) else {
        return CenconStatus::IndexOutOfRange;
    };
    *out = CenconClassInfo {
        shape: shape_code(c.shape),
        labeled_count: c.labeled_count,
        stabilizer: c.stabilizer_size,
        member_count: c.members.len() as u64,
    };
    CenconStatus::Ok
}

/// Serializes the full result (runs, table, classes) as a JSON string
/// allocated for the caller; release with [`cencon_string_free`].
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cencon_result_json(result: *const CenconResult) -> *mut c_char {
    if result.is_null() {
        return ptr::null_mut();
    }
    let r = &*result;
    let runs: Vec<serde_json::Value> = r
        .report
        .runs
        .iter()
        .map(|run| {
            serde_json::json!({
                "run_index": run.run_index,
                "certified": run.certified.len(),
                "undecided": run.undecided.len(),
                "boxes": run.stats.boxes,
            })
        })
        .collect();
    let classes: Vec<serde_json::Value> = r
        .classification
        .classes
        .iter()
        .map(|c| {
            let rep = &r.solutions[c.representative];
            serde_json::json!({
                "shape": c.shape,
                "labeled_count": c.labeled_count,
                "free_midpoints": rep.bx.free().iter().map(|x| x.mid()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let json = serde_json::json!({
        "conclusive": r.conclusive,
        "table": r.classification.table,
        "runs": runs,
        "classes": classes,
    });
    match CString::new(json.to_string()) {
        Ok(s) => s.into_raw(),
        Err(_) => ptr::null_mut(),
    }
}

/// Releases a string returned by this library. Accepts NULL.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cencon_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn cencon_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
