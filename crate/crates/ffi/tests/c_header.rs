//! Compiles a small C program against the generated header and the static
//! library. Skipped when no C compiler is on the PATH.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "loosehc.h"

int main(void) {
    LhcHypergraph *h = NULL;
    if (lhc_hypergraph_complete(4, 3, &h) != LHC_STATUS_OK) return 1;
    uint64_t count = 0;
    if (lhc_count_loose_hamilton(h, &count) != LHC_STATUS_OK) return 2;
    lhc_hypergraph_free(h);
    double v = 0.0;
    if (lhc_g(0.9, 0.95, 10, 1, &v) != LHC_STATUS_OUTSIDE_DOMAIN) return 3;
    char msg[128];
    lhc_last_error_message(msg, sizeof msg);
    printf("%llu|%s\n", (unsigned long long)count, msg);
    return 0;
}
"#;

fn profile_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let lib = profile_dir().join("libloosehc_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = dir.path().join("main");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let (count, msg) = text.trim().split_once('|').unwrap();
    assert_eq!(count, "6");
    assert!(msg.contains("outside the closed domain"));
}
