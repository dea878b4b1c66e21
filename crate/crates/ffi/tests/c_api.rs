use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use gsv_ffi::*;

fn c(text: &str) -> CString {
    CString::new(text).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(gsv_last_error_message()) }.to_str().unwrap().to_string()
}

fn preset(name: &str) -> *mut GsvSource {
    let mut handle = ptr::null_mut();
    assert_eq!(unsafe { gsv_source_preset(c(name).as_ptr(), &mut handle) }, GsvStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn classifies_the_corpus() {
    for (name, expected) in [
        ("e1", GsvCategory::NonExtractable),
        ("e2", GsvCategory::PolyError),
        ("fair-coin", GsvCategory::ExpError),
        ("sv:1/4", GsvCategory::NonExtractable),
    ] {
        let source = preset(name);
        let mut category = GsvCategory::ExpError;
        let mut report = ptr::null_mut();
        assert_eq!(unsafe { gsv_classify(source, &mut category, &mut report) }, GsvStatus::Ok);
        assert_eq!(category, expected, "{name}");
        let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_string();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(value.get("category").is_some());
        unsafe {
            gsv_string_free(report);
            gsv_source_free(source);
        }
    }
}

#[test]
fn source_from_json_and_errors() {
    let mut handle = ptr::null_mut();
    let json = c(r#"{"faces": ["h", "t"], "dice": [["1/2", "1/2"]]}"#);
    assert_eq!(unsafe { gsv_source_from_json(json.as_ptr(), &mut handle) }, GsvStatus::Ok);
    assert_eq!(unsafe { gsv_source_num_faces(handle) }, 2);
    assert_eq!(unsafe { gsv_source_num_dice(handle) }, 1);
    assert_eq!(last_error(), "");
    unsafe { gsv_source_free(handle) };

    let mut handle = ptr::null_mut();
    let bad = c(r#"{"faces": ["h", "t"], "dice": [["1/2", "1/3"]]}"#);
    assert_eq!(unsafe { gsv_source_from_json(bad.as_ptr(), &mut handle) }, GsvStatus::InvalidSource);
    assert!(handle.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { gsv_source_from_json(ptr::null(), &mut handle) }, GsvStatus::NullPointer);
    assert_eq!(unsafe { gsv_source_preset(c("nope").as_ptr(), &mut handle) }, GsvStatus::Parameter);
    unsafe { gsv_source_free(ptr::null_mut()) };
}

#[test]
fn sampling_and_extraction() {
    let source = preset("fair-coin");
    let mut faces = [0usize; 32];
    assert_eq!(unsafe { gsv_sample_constant(source, 0, 32, 9, faces.as_mut_ptr()) }, GsvStatus::Ok);
    assert!(faces.iter().all(|&f| f < 2));

    let mut fast = 0u64;
    let mut naive = 0u64;
    unsafe {
        let f = c("multibit-fast");
        let n = c("multibit-naive");
        assert_eq!(gsv_extract(source, f.as_ptr(), ptr::null(), 3, faces.as_ptr(), 32, &mut fast), GsvStatus::Ok);
        assert_eq!(gsv_extract(source, n.as_ptr(), ptr::null(), 3, faces.as_ptr(), 32, &mut naive), GsvStatus::Ok);
    }
    assert_eq!(fast, naive);
    assert!(fast < 8);

    let mut bit = 9u64;
    let ext = c("bit-exp");
    assert_eq!(unsafe { gsv_extract(source, ext.as_ptr(), ptr::null(), 1, [0usize, 0].as_ptr(), 2, &mut bit) }, GsvStatus::Ok);
    assert_eq!(bit, 1);
    let out_of_range = [5usize];
    assert_eq!(
        unsafe { gsv_extract(source, ext.as_ptr(), ptr::null(), 1, out_of_range.as_ptr(), 1, &mut bit) },
        GsvStatus::Parameter
    );
    unsafe { gsv_source_free(source) };
}

#[test]
fn extraction_statuses_follow_the_trichotomy() {
    let mut out = 0u64;
    let ext = c("bit-exp");
    let e1 = preset("e1");
    let e2 = preset("e2");
    unsafe {
        assert_eq!(gsv_extract(e1, ext.as_ptr(), ptr::null(), 1, ptr::null(), 0, &mut out), GsvStatus::NotExtractable);
        assert_eq!(gsv_extract(e2, ext.as_ptr(), ptr::null(), 1, ptr::null(), 0, &mut out), GsvStatus::NotNkPlus);
        let threshold = c("threshold");
        let eps = c("1/25");
        assert_eq!(gsv_extract(e2, threshold.as_ptr(), eps.as_ptr(), 1, [2usize, 2].as_ptr(), 2, &mut out), GsvStatus::Ok);
        assert_eq!(out, 1);
        gsv_source_free(e1);
        gsv_source_free(e2);
    }
}

#[test]
fn worst_case_bias() {
    let source = preset("two-dice");
    let coin = preset("fair-coin");
    let mut bias = -1.0;
    let mut text = ptr::null_mut();
    let ext = c("bit-exp");
    unsafe {
        assert_eq!(gsv_worst_case_bias(coin, ext.as_ptr(), ptr::null(), 1, 6, &mut bias, &mut text), GsvStatus::Ok);
        assert_eq!(CStr::from_ptr(text).to_str().unwrap(), "0");
        assert_eq!(bias, 0.0);
        gsv_string_free(text);
        assert_eq!(
            gsv_worst_case_bias(source, ext.as_ptr(), ptr::null(), 1, 3, &mut bias, ptr::null_mut()),
            GsvStatus::NotExtractable
        );
        assert_eq!(
            gsv_worst_case_bias(coin, ext.as_ptr(), ptr::null(), 1, 200, &mut bias, ptr::null_mut()),
            GsvStatus::TreeLimit
        );
        gsv_source_free(source);
        gsv_source_free(coin);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let text = std::fs::read_to_string(header.join("gsv.h")).unwrap();
    for name in [
        "gsv_source_from_json",
        "gsv_source_preset",
        "gsv_source_free",
        "gsv_classify",
        "gsv_extract",
        "gsv_worst_case_bias",
        "gsv_string_free",
        "gsv_last_error_message",
        "GSV_STATUS_TREE_LIMIT",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"gsv.h\"\nint main(void) {\n  GsvSource *s = 0;\n  GsvCategory cat;\n  \
         if (gsv_source_preset(\"e2\", &s) != GSV_STATUS_OK) return 1;\n  \
         GsvStatus st = gsv_classify(s, &cat, NULL);\n  gsv_source_free(s);\n  \
         return st == GSV_STATUS_OK && cat == GSV_CATEGORY_POLY_ERROR ? 0 : 2;\n}\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&header)
        .arg(&src)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
}

#[test]
fn c_program_links_and_runs() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libgsv_ffi.a");
    assert!(lib.is_file(), "static library not found at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "gsv.h"
int main(void) {
  GsvSource *s = NULL;
  if (gsv_source_preset("fair-coin", &s) != GSV_STATUS_OK) return 1;
  size_t faces[16];
  if (gsv_sample_constant(s, 0, 16, 3, faces) != GSV_STATUS_OK) return 2;
  uint64_t fast = 0, naive = 0;
  if (gsv_extract(s, "multibit-fast", NULL, 4, faces, 16, &fast) != GSV_STATUS_OK) return 3;
  if (gsv_extract(s, "multibit-naive", NULL, 4, faces, 16, &naive) != GSV_STATUS_OK) return 4;
  if (fast != naive) return 5;
  GsvCategory cat;
  char *report = NULL;
  if (gsv_classify(s, &cat, &report) != GSV_STATUS_OK || cat != GSV_CATEGORY_EXP_ERROR) return 6;
  if (strstr(report, "EXP_ERROR") == NULL) return 7;
  gsv_string_free(report);
  GsvSource *bad = NULL;
  if (gsv_source_from_json("{", &bad) != GSV_STATUS_PARSE) return 8;
  if (strlen(gsv_last_error_message()) == 0) return 9;
  gsv_source_free(s);
  printf("ok %llu\n", (unsigned long long)fast);
  return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("probe");
    let status = Command::new("cc")
        .arg("-I")
        .arg(&header)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "probe exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
