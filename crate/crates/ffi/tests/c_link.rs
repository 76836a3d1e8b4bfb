//! Compiles and runs a real C program against the generated header and the
//! static library, proving the ABI end to end.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_program_links_and_runs() {
    let cc = match ["cc", "gcc", "clang"]
        .iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
    {
        Some(cc) => *cc,
        None => {
            eprintln!("no C compiler on PATH; skipping");
            return;
        }
    };

    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    let source = manifest.join("tests/data/smoke.c");
    // workspace target dir, where cargo puts the staticlib for this profile
    let lib = manifest
        .join("../../target")
        .join(if cfg!(debug_assertions) { "debug" } else { "release" })
        .join("libtwobridge_ffi.a");
    assert!(lib.exists(), "staticlib not built at {}", lib.display());

    let out_dir = std::env::temp_dir().join("twobridge-c-smoke");
    std::fs::create_dir_all(&out_dir).unwrap();
    let exe = out_dir.join("smoke");

    let compile = Command::new(cc)
        .arg(&source)
        .arg(&lib)
        .arg("-I")
        .arg(&include)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .expect("run C compiler");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe).output().expect("run C smoke binary");
    assert!(
        run.status.success(),
        "C program failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&run.stdout),
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
