//! Compiles and runs a small C program against the static library, when a C compiler exists.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "ssm.h"

int main(void) {
    SsmGraph *g = NULL;
    if (ssm_graph_from_edge_list("3\n0 1\n1 2\n", &g) != SSM_STATUS_OK) return 1;
    uint64_t c[8];
    size_t len = 0;
    if (ssm_ind_poly(g, c, 8, &len) != SSM_STATUS_OK || len != 3) return 2;
    double re, im;
    if (ssm_eval_z(g, 1.0, 0.0, &re, &im) != SSM_STATUS_OK || re != 5.0) return 3;
    if (ssm_ratio_p(g, 7, 1.0, 0.0, &re, &im) != SSM_STATUS_INVALID_ARGUMENT) return 4;
    printf("%s|%llu %llu %llu\n", ssm_last_error_message(),
           (unsigned long long)c[0], (unsigned long long)c[1], (unsigned long long)c[2]);
    ssm_graph_free(g);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = std::env::var("CC").or_else(|_| which("cc")) else {
        eprintln!("no C compiler; skipping");
        return;
    };
    // target/<profile>/deps/<test binary> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libssm_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let bin = dir.path().join("client");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "client exited with {:?}", out.status);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("vertex 7 out of range") && stdout.trim_end().ends_with("|1 3 1"), "{stdout}");
}

fn which(name: &str) -> Result<String, ()> {
    std::env::var_os("PATH")
        .and_then(|p| std::env::split_paths(&p).map(|d| d.join(name)).find(|p| p.is_file()))
        .map(|p| p.to_string_lossy().into_owned())
        .ok_or(())
}
