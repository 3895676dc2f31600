//! The generated header declares the exported API and links from C.

use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_exports() {
    let header = std::fs::read_to_string(crate_dir().join("include/effham.h")).unwrap();
    for name in [
        "effham_last_error_message",
        "effham_operator_from_dense",
        "effham_operator_from_triplets",
        "effham_operator_free",
        "effham_expm_unitary",
        "effham_npad_new",
        "effham_npad_run",
        "effham_npad_eliminate_couplings",
        "effham_evolver_new",
        "effham_evolver_update_controls",
        "effham_evolver_evolve",
        "effham_mott_boundary_npad",
        "typedef struct EffhamOperator EffhamOperator",
        "EFFHAM_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// `target/<profile>` holding the static library built alongside this test.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = artifact_dir().join("libeffham_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir().join("tests/c_smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
