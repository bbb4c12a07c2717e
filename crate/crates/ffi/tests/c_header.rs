//! Compiles a C client against the generated header and links the static library.

use std::path::PathBuf;
use std::process::Command;

const CLIENT: &str = r#"
#include <stdio.h>
#include <string.h>
#include "driftspec.h"

int main(void) {
    const double values[] = {0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0};
    DsSpectrum *s = NULL;
    DsConstants *gc = NULL;
    DsCheckResult r;
    if (ds_spectrum_new(values, 9, DS_INDEX_BASE_CLOSED, &s) != DS_STATUS_OK) return 10;
    if (ds_constants_new(2, 4.0, 0.0, &gc) != DS_STATUS_OK) return 11;
    if (ds_check(s, gc, "thm7.6a", 0, &r) != DS_STATUS_OK) return 12;
    if (r.status != DS_CHECK_STATUS_HOLDS || r.lhs != 4.0) return 13;
    if (ds_check(s, gc, "nope", 0, &r) != DS_STATUS_UNKNOWN_CHECK) return 14;
    if (strstr(ds_last_error_message(), "nope") == NULL) return 15;
    char *json = NULL;
    if (ds_run_bundled("focal", NULL, &json) != DS_STATUS_OK) return 16;
    if (strstr(json, "\"focal\"") == NULL) return 17;
    ds_string_free(json);
    ds_constants_free(gc);
    ds_spectrum_free(s);
    printf("%s\n", ds_version());
    return 0;
}
"#;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// `target/<profile>` of the running test binary.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|deps| deps.parent()).unwrap().to_path_buf()
}

fn cc() -> String {
    std::env::var("CC").unwrap_or_else(|_| "cc".into())
}

#[test]
fn header_is_valid_c_and_cpp() {
    let header = crate_dir().join("include/driftspec.h");
    assert!(header.exists(), "build script writes the header");
    for (lang, std) in [("c", "-std=c99"), ("c++", "-std=c++11")] {
        let status = Command::new(cc())
            .args(["-fsyntax-only", "-Wall", "-Werror", std, "-x", lang])
            .arg(&header)
            .status()
            .expect("C compiler available");
        assert!(status.success(), "{lang} rejects the header");
    }
}

#[test]
fn c_client_links_and_runs() {
    let profile = profile_dir();
    let lib = [profile.join("deps"), profile.clone()]
        .into_iter()
        .map(|d| d.join("libdriftspec_ffi.a"))
        .find(|p| p.exists())
        .unwrap_or_else(|| panic!("no static library under {}", profile.display()));
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let src = dir.join("client.c");
    let bin = dir.join("client");
    std::fs::write(&src, CLIENT).unwrap();
    let status = Command::new(cc())
        .arg("-std=c99")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "client compiles and links");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "client exit code");
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}
