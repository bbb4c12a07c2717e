use std::ffi::{CStr, CString};
use std::ptr;

use driftspec_ffi::*;

fn last_error() -> String {
    let p = ds_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn square() -> *mut DsSpectrum {
    // First ten Dirichlet eigenvalues of the unit square divided by π².
    let values = [2.0, 5.0, 5.0, 8.0, 10.0, 10.0, 13.0, 13.0, 17.0, 17.0];
    let mut s = ptr::null_mut();
    let status = unsafe { ds_spectrum_new(values.as_ptr(), values.len(), DsIndexBase::Dirichlet, &mut s) };
    assert_eq!(status, DsStatus::Ok);
    s
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(ds_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn spectrum_round_trip() {
    let s = square();
    unsafe {
        assert_eq!(ds_spectrum_len(s), 10);
        let mut buf = [0.0; 10];
        let mut written = 0;
        assert_eq!(
            ds_spectrum_values(s, buf.as_mut_ptr(), buf.len(), &mut written),
            DsStatus::Ok
        );
        assert_eq!(written, 10);
        assert_eq!(buf[2], 5.0);

        let mut small = [0.0; 3];
        assert_eq!(
            ds_spectrum_values(s, small.as_mut_ptr(), 3, &mut written),
            DsStatus::BufferTooSmall
        );
        assert_eq!(written, 10);
        ds_spectrum_free(s);
    }
}

#[test]
fn check_evaluates_yang_form() {
    let s = square();
    let mut gc = ptr::null_mut();
    unsafe {
        assert_eq!(ds_constants_new(2, 0.0, 0.0, &mut gc), DsStatus::Ok);
        let id = CString::new("yang2").unwrap();
        let mut r = DsCheckResult {
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            allowance: 0.0,
            status: DsCheckStatus::Fails,
        };
        assert_eq!(ds_check(s, gc, id.as_ptr(), 3, &mut r), DsStatus::Ok);
        assert_eq!(r.status, DsCheckStatus::Holds);
        // Λ₄ = 8 against 3·(2+5+5)/3 = 12.
        assert_eq!(r.lhs, 8.0);
        assert!((r.rhs - 12.0).abs() < 1e-12);
        assert!((r.margin - (r.rhs - r.lhs)).abs() < 1e-15);

        let ab = CString::new("ab").unwrap();
        assert_eq!(ds_check(s, gc, ab.as_ptr(), -1, &mut r), DsStatus::Ok);
        assert_eq!(r.lhs, 5.0);
        ds_constants_free(gc);
        ds_spectrum_free(s);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let s = square();
    let mut gc = ptr::null_mut();
    let mut r = DsCheckResult {
        lhs: 0.0,
        rhs: 0.0,
        margin: 0.0,
        allowance: 0.0,
        status: DsCheckStatus::Holds,
    };
    unsafe {
        ds_constants_new(2, 0.0, 0.0, &mut gc);
        let bogus = CString::new("bogus").unwrap();
        assert_eq!(ds_check(s, gc, bogus.as_ptr(), 1, &mut r), DsStatus::UnknownCheck);
        assert!(last_error().contains("bogus"));

        let closed = CString::new("thm7.1a").unwrap();
        assert_eq!(ds_check(s, gc, closed.as_ptr(), 1, &mut r), DsStatus::IndexBase);

        let far = CString::new("yang1").unwrap();
        assert_eq!(ds_check(s, gc, far.as_ptr(), 40, &mut r), DsStatus::SpectrumTooShort);

        let needs_eta = CString::new("thm4.1-2").unwrap();
        assert_eq!(
            ds_check(s, gc, needs_eta.as_ptr(), 1, &mut r),
            DsStatus::MissingConstant
        );
        assert!(last_error().contains("eta"));

        assert_eq!(
            ds_check(ptr::null(), gc, far.as_ptr(), 1, &mut r),
            DsStatus::NullPointer
        );
        ds_constants_free(gc);
        ds_spectrum_free(s);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let mut s = ptr::null_mut();
    unsafe {
        let negative = [-1.0, 2.0];
        assert_eq!(
            ds_spectrum_new(negative.as_ptr(), 2, DsIndexBase::Dirichlet, &mut s),
            DsStatus::InvalidArgument
        );
        assert!(s.is_null());
        let no_zero = [1.0, 2.0];
        assert_eq!(
            ds_spectrum_new(no_zero.as_ptr(), 2, DsIndexBase::Closed, &mut s),
            DsStatus::InvalidArgument
        );
        let mut gc = ptr::null_mut();
        assert_eq!(ds_constants_new(0, 0.0, 0.0, &mut gc), DsStatus::Config);
        let bad = CString::new("n = ").unwrap();
        assert_eq!(ds_constants_from_toml(bad.as_ptr(), &mut gc), DsStatus::Parse);
        let bytes = [0xffu8, 0];
        assert_eq!(
            ds_constants_from_toml(bytes.as_ptr().cast(), &mut gc),
            DsStatus::InvalidUtf8
        );
        ds_spectrum_free(ptr::null_mut());
        ds_constants_free(ptr::null_mut());
        ds_string_free(ptr::null_mut());
    }
}

#[test]
fn constants_from_toml_feed_closed_checks() {
    let values = [0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0];
    let toml = CString::new("n = 2\nc1 = 4.0\nreilly_ratio = 4.0\n").unwrap();
    let id = CString::new("cor7.4").unwrap();
    let mut s = ptr::null_mut();
    let mut gc = ptr::null_mut();
    let mut r = DsCheckResult {
        lhs: 0.0,
        rhs: 0.0,
        margin: 0.0,
        allowance: 0.0,
        status: DsCheckStatus::Fails,
    };
    unsafe {
        assert_eq!(
            ds_spectrum_new(values.as_ptr(), values.len(), DsIndexBase::Closed, &mut s),
            DsStatus::Ok
        );
        assert_eq!(ds_constants_from_toml(toml.as_ptr(), &mut gc), DsStatus::Ok);
        assert_eq!(ds_check(s, gc, id.as_ptr(), -1, &mut r), DsStatus::Ok);
        assert_eq!((r.lhs, r.rhs, r.status), (4.0, 4.0, DsCheckStatus::Holds));
        ds_constants_free(gc);
        ds_spectrum_free(s);
    }
}

#[test]
fn bundled_scenario_returns_report() {
    let name = CString::new("focal").unwrap();
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(ds_run_bundled(name.as_ptr(), ptr::null(), &mut json), DsStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        ds_string_free(json);
        let report: driftspec::report::Report = driftspec::report::Report::from_json(&text).unwrap();
        assert_eq!(report.focal.len(), 2);

        let missing = CString::new("no_such_scenario").unwrap();
        assert_ne!(ds_run_bundled(missing.as_ptr(), ptr::null(), &mut json), DsStatus::Ok);
        assert!(json.is_null());
    }
}

#[test]
fn scenario_text_with_config() {
    let scenario = CString::new(
        r#"
name = "tiny"
[spectrum]
source = "analytic"
count = 6
family = { kind = "box", sides = [1.0, 2.0] }
[[checks]]
id = "yang2"
k = [1, 4]
"#,
    )
    .unwrap();
    let config = CString::new("[solver]\nseed = 7\n").unwrap();
    let bad_config = CString::new("[solver]\nbogus = 1\n").unwrap();
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(
            ds_run_scenario(scenario.as_ptr(), config.as_ptr(), &mut json),
            DsStatus::Ok,
            "{}",
            last_error()
        );
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        ds_string_free(json);
        assert!(text.contains("\"yang2\""));
        assert_eq!(
            ds_run_scenario(scenario.as_ptr(), bad_config.as_ptr(), &mut json),
            DsStatus::Parse
        );
    }
}

#[test]
fn errors_are_thread_local() {
    let mut gc = ptr::null_mut();
    unsafe { ds_constants_new(0, 0.0, 0.0, &mut gc) };
    let here = last_error();
    std::thread::spawn(|| assert!(ds_last_error_message().is_null()))
        .join()
        .unwrap();
    assert_eq!(last_error(), here);
}
