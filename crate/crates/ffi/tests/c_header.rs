//! Compile and run a C program against the generated header and the
//! static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "polydiam.h"

int main(void) {
    PdField *f = NULL;
    if (pd_field_new(11, 3, NULL, &f) != PD_STATUS_OK) return 10;
    PdDiameter d;
    if (pd_diameter(f, 1, &d) != PD_STATUS_OK) return 11;
    if (!d.connected || d.diameter != 6 || d.regularity != 11) return 12;
    double b = 0.0;
    if (pd_bound_improved_linear(11, 3, &b) != PD_STATUS_OK) return 13;
    if (d.diameter > b) return 14;
    char *m = NULL;
    if (pd_field_modulus(f, &m) != PD_STATUS_OK) return 15;
    printf("%s %u %.3f\n", m, d.diameter, b);
    pd_string_free(m);
    pd_field_free(f);
    if (pd_field_new(12, 2, NULL, &f) != PD_STATUS_INVALID_ARGUMENT) return 16;
    char *err = pd_last_error_message();
    if (err == NULL || strstr(err, "prime power") == NULL) return 17;
    pd_string_free(err);
    return 0;
}
"#;

fn cc() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(String::from)
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    // CARGO_TARGET_TMPDIR is <target>/tmp; the library sits in <target>/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libpolydiam_ffi.a");
    let src = tmp.join("pd_smoke.c");
    let exe = tmp.join("pd_smoke");
    std::fs::write(&src, PROGRAM).unwrap();

    let mut cmd = Command::new(&cc);
    cmd.arg("-std=c11").arg("-Wall").arg("-Werror").arg("-I").arg(manifest.join("include")).arg(&src);
    if lib.exists() {
        cmd.arg(&lib).args(["-lpthread", "-ldl", "-lm"]).arg("-o").arg(&exe);
    } else {
        cmd.arg("-fsyntax-only");
    }
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    if lib.exists() {
        let run = Command::new(&exe).output().unwrap();
        assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
        let text = String::from_utf8(run.stdout).unwrap();
        assert!(text.ends_with(" 6 9.201\n"), "{text}");
    }
}
