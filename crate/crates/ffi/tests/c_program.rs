use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "frobforge.h"

int main(void) {
    FrobforgeChart *chart = NULL;
    if (frobforge_chart_build_an(3, &chart) != FROBFORGE_STATUS_OK) return 1;
    size_t residuals = 99;
    if (frobforge_chart_wdvv_residuals(chart, &residuals) != FROBFORGE_STATUS_OK || residuals != 0) return 2;
    double t[3] = {1.0, 2.0, -0.5}, ure[3], uim[3];
    if (frobforge_canonical_coordinates(chart, t, NULL, 3, ure, uim) != FROBFORGE_STATUS_OK) return 3;
    frobforge_chart_free(chart);
    char *s = NULL;
    if (frobforge_pd_stokes_json(2, &s) != FROBFORGE_STATUS_OK) return 4;
    int same = strcmp(s, "[[1,3,3],[0,1,3],[0,0,1]]") == 0;
    frobforge_string_free(s);
    if (!same) return 5;
    if (frobforge_chart_from_json("{", &chart) != FROBFORGE_STATUS_MALFORMED_JSON) return 6;
    if (frobforge_last_error() == NULL) return 7;
    puts("ok");
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let lib = target_dir().join("libfrobforge_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = std::env::temp_dir().join(format!("frobforge-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    let exe = dir.join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
    std::fs::remove_dir_all(&dir).ok();
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
