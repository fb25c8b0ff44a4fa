//! Compiles and runs the bundled C demo against the generated header and
//! the freshly built static library, when a C compiler is available.

use std::path::PathBuf;
use std::process::Command;

fn target_dir() -> PathBuf {
    // tests live in target/<profile>/deps/...
    let mut dir = std::env::current_exe().unwrap();
    dir.pop();
    dir.pop();
    dir
}

#[test]
fn c_demo_builds_and_finds_a_counterexample() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler available; skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // `cargo test` links tests against the rlib without uplifting the
    // staticlib artifact, so produce it explicitly.
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".to_string());
    let build = Command::new(cargo)
        .args(["build", "-p", "proptree-capi"])
        .current_dir(&manifest)
        .output()
        .unwrap();
    assert!(
        build.status.success(),
        "cargo build failed: {}",
        String::from_utf8_lossy(&build.stderr)
    );
    let static_lib = target_dir().join("libproptree_capi.a");
    assert!(
        static_lib.exists(),
        "static library missing at {}",
        static_lib.display()
    );
    let exe = std::env::temp_dir().join(format!("proptree-c-demo-{}", std::process::id()));

    let compile = Command::new(&cc)
        .arg(manifest.join("examples/demo.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(static_lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        compile.status.success(),
        "cc failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe).output().unwrap();
    std::fs::remove_file(&exe).ok();
    assert!(run.status.success());
    let stdout = String::from_utf8(run.stdout).unwrap();
    // x in [0,10) plus y in [-size,size]: the sum tops 12 quickly.
    assert!(stdout.contains("foundbug=1"), "demo output: {stdout}");
    assert!(stdout.contains("x = "), "demo output: {stdout}");
}
