//! Drives the C ABI the way a foreign caller would: through the exported
//! symbols with raw pointers and explicit frees.

use std::ffi::{CStr, CString};
use std::ptr;

use cencon_ffi::*;

#[test]
fn full_session_through_the_c_abi() {
    let cfg = CString::new("masses = 1 1 1\ndimension = 2\nruns = reduced\n").unwrap();
    let mut job: *mut CenconJob = ptr::null_mut();
    unsafe {
        assert_eq!(cencon_job_parse(cfg.as_ptr(), &mut job), CenconStatus::Ok);
        assert!(!job.is_null());

        let mut result: *mut CenconResult = ptr::null_mut();
        assert_eq!(cencon_job_run(job, 0, &mut result), CenconStatus::Ok);
        assert!(!result.is_null());
        assert_eq!(cencon_result_conclusive(result), 1);

        let mut counts = CenconCounts::default();
        assert_eq!(cencon_result_counts(result, &mut counts), CenconStatus::Ok);
        assert_eq!(counts.collinear, 3);
        assert_eq!(counts.convex, 2);
        assert_eq!(counts.total, 5);

        let nclasses = cencon_result_class_count(result);
        assert_eq!(nclasses, 2);
        let mut info = CenconClassInfo { shape: 9, labeled_count: 0, stabilizer: 0, member_count: 0 };
        assert_eq!(cencon_result_class_info(result, 0, &mut info), CenconStatus::Ok);
        assert!(info.labeled_count > 0);
        assert_eq!(
            cencon_result_class_info(result, nclasses, &mut info),
            CenconStatus::IndexOutOfRange
        );

        let json = cencon_result_json(result);
        assert!(!json.is_null());
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        assert!(text.contains("\"conclusive\":true"));
        cencon_string_free(json);

        cencon_result_free(result);
        cencon_job_free(job);
    }
}

#[test]
fn error_paths_are_status_codes() {
    unsafe {
        let mut job: *mut CenconJob = ptr::null_mut();
        assert_eq!(
            cencon_job_parse(ptr::null(), &mut job),
            CenconStatus::NullArgument
        );
        let bad = CString::new("masses = nonsense\n").unwrap();
        assert_eq!(cencon_job_parse(bad.as_ptr(), &mut job), CenconStatus::ParseError);
        assert!(job.is_null());
        // frees tolerate NULL
        cencon_job_free(ptr::null_mut());
        cencon_result_free(ptr::null_mut());
        cencon_string_free(ptr::null_mut());
        assert!(!cencon_version().is_null());
    }
}
