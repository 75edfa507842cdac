use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use clusteralg_ffi::*;

const A3: &str = r#"{"variables":["x1","x2","x3"],"exchangeable":["x1","x2","x3"],"matrix":[[0,1,0],[-1,0,-1],[0,1,0]]}"#;

const FOLDING: &str = r#"{
  "source": {"variables":["x1","x2","x3"],"exchangeable":["x1","x2","x3"],"matrix":[[0,1,0],[-1,0,-1],[0,1,0]]},
  "target": {"variables":["u1","u2"],"exchangeable":["u1","u2"],"matrix":[[0,1],[-2,0]]},
  "map": {"x1":"u1","x2":"u2","x3":"u1"}
}"#;

const WORKED: &str = r#"{
  "source": {"variables":["x1","x2","x3"],"exchangeable":["x2"],"matrix":[[0,1,0],[-1,0,-1],[0,1,0]]},
  "target": {"variables":["y1","y2"],"exchangeable":["y1"],"matrix":[[0,1],[-1,0]]},
  "map": {"x1":1,"x2":"y1","x3":"y2"}
}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    ca_string_free(p);
    s
}

unsafe fn last_error() -> String {
    CStr::from_ptr(ca_last_error()).to_str().unwrap().to_string()
}

#[test]
fn seed_round_trip_and_mutation() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(ca_seed_from_json(c(A3).as_ptr(), &mut s), CaStatus::Ok);
        assert_eq!(ca_seed_len(s), 3);
        let mut json = ptr::null_mut();
        assert_eq!(ca_seed_to_json(s, &mut json), CaStatus::Ok);
        let back: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(back, serde_json::from_str::<serde_json::Value>(A3).unwrap());

        let (mut m1, mut m2) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(ca_seed_mutate(s, c("x2").as_ptr(), &mut m1), CaStatus::Ok);
        assert_eq!(ca_seed_mutate(m1, c("x1").as_ptr(), &mut m2), CaStatus::Ok);
        let mut v = ptr::null_mut();
        assert_eq!(ca_seed_variable(m2, 0, &mut v), CaStatus::Ok);
        assert_eq!(take(v), "(1 + x2 + x1*x3)/(x1*x2)");
        assert_eq!(ca_seed_label(m2, 1, &mut v), CaStatus::Ok);
        assert_eq!(take(v), "x2'");
        assert_eq!(ca_seed_variable(m2, 9, &mut v), CaStatus::InvalidInput);
        ca_seed_free(m2);
        ca_seed_free(m1);
        ca_seed_free(s);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(ca_seed_from_json(c("{\"variables\": [").as_ptr(), &mut s), CaStatus::InvalidInput);
        assert!(last_error().contains("line 1"));
        let bad = r#"{"variables":["a","b"],"exchangeable":["a"],"matrix":[[0,1],[1,0]]}"#;
        assert_eq!(ca_seed_from_json(c(bad).as_ptr(), &mut s), CaStatus::SeedError);
        assert!(s.is_null());
        assert_eq!(ca_seed_from_json(ptr::null(), &mut s), CaStatus::NullPointer);
        assert_eq!(ca_seed_to_json(ptr::null(), &mut ptr::null_mut()), CaStatus::NullPointer);
        assert_eq!(ca_seed_len(ptr::null()), 0);
        ca_seed_free(ptr::null_mut());
        ca_string_free(ptr::null_mut());
    }
}

#[test]
fn polygon_dot() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(ca_polygon_fan_seed(6, &mut s), CaStatus::Ok);
        assert_eq!(ca_seed_len(s), 9);
        let mut d = ptr::null_mut();
        assert_eq!(ca_seed_to_dot(s, &mut d), CaStatus::Ok);
        let dot = take(d);
        assert_eq!(dot.matches("style=filled").count(), 3);
        assert_eq!(dot.matches("style=solid").count(), 6);
        ca_seed_free(s);
        assert_eq!(ca_polygon_fan_seed(2, &mut s), CaStatus::InvalidInput);
    }
}

#[test]
fn morphisms() {
    unsafe {
        let (mut fold, mut worked) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(ca_morphism_from_json(c(FOLDING).as_ptr(), &mut fold), CaStatus::Ok);
        assert_eq!(ca_morphism_from_json(c(WORKED).as_ptr(), &mut worked), CaStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(ca_morphism_verify(fold, 1, ptr::null_mut()), CaStatus::Ok);
        assert_eq!(ca_morphism_verify(fold, 3, &mut r), CaStatus::VerificationFailed);
        let report: serde_json::Value = serde_json::from_str(&take(r)).unwrap();
        assert_eq!(report["status"], "failed");
        assert!(report["witness"].is_object());
        assert_eq!(ca_morphism_verify(worked, 4, &mut r), CaStatus::Ok);
        assert_eq!(serde_json::from_str::<serde_json::Value>(&take(r)).unwrap()["status"], "verified-to-depth");
        let mut comp = ptr::null_mut();
        assert_eq!(ca_morphism_compose(fold, worked, &mut comp), CaStatus::MorphismError);
        assert!(comp.is_null());
        let mut j = ptr::null_mut();
        assert_eq!(ca_morphism_to_json(worked, &mut j), CaStatus::Ok);
        let file: serde_json::Value = serde_json::from_str(&take(j)).unwrap();
        assert_eq!(file["map"]["x1"], 1);
        let cm2 = FOLDING.replace(r#""exchangeable":["u1","u2"]"#, r#""exchangeable":["u2"]"#);
        assert_eq!(ca_morphism_from_json(c(&cm2).as_ptr(), &mut comp), CaStatus::MorphismError);
        assert!(last_error().contains("CM2"));
        ca_morphism_free(fold);
        ca_morphism_free(worked);
    }
}

/// Compiles a C program against the generated header and static library.
#[test]
fn c_program_links_against_header() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // tests run from target/<profile>/deps; the static library sits one level up
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("libclusteralg_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let out = std::env::temp_dir().join(format!("clusteralg_smoke_{}", std::process::id()));
    let status = Command::new(&cc)
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
