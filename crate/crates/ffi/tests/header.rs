use std::path::Path;
use std::process::Command;

const HEADER: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/include/diffusion_entropy.h");

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(HEADER).expect("header generated by build.rs");
    for sym in [
        "de_model_from_toml",
        "de_model_from_file",
        "de_model_from_params",
        "de_model_free",
        "de_model_set_tolerance",
        "de_model_log_density",
        "de_model_renyi",
        "de_model_shannon",
        "de_model_song",
        "de_divergence",
        "de_spectrum_compute",
        "de_spectrum_len",
        "de_spectrum_row",
        "de_spectrum_free",
        "de_last_error_message",
        "de_status_name",
        "typedef struct DeModel DeModel",
        "DE_STATUS_DIVERGENT = 5",
    ] {
        assert!(h.contains(sym), "missing {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let dir = std::env::temp_dir().join(format!("de_ffi_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        r#"#include "diffusion_entropy.h"
int probe(void) {
    DeModel *m = NULL;
    DeMeasure r;
    if (de_model_from_toml("family = \"ou\"", &m) != DE_STATUS_OK) return 1;
    DeStatus s = de_model_renyi(m, 2.0, &r);
    de_model_free(m);
    return s == DE_STATUS_OK && r.method == DE_METHOD_CLOSED ? 0 : 1;
}
"#,
    )
    .unwrap();
    let out = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(Path::new(HEADER).parent().unwrap())
        .arg(&src)
        .output()
        .unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
