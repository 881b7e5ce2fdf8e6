//! Compiles and runs a real C program against the generated header and the
//! built static library, proving the ABI from the consumer's side.

use std::path::PathBuf;
use std::process::Command;

const C_DEMO: &str = r#"
#include <stdio.h>
#include "pfgtd.h"

int main(void) {
    PfgtdEnv *env = NULL;
    if (pfgtd_env_create("random-walk-dependent", &env) != PFGTD_STATUS_OK) return 1;

    size_t dim = 0;
    if (pfgtd_env_dim(env, &dim) != PFGTD_STATUS_OK || dim != 3) return 2;

    PfgtdModel *model = NULL;
    if (pfgtd_model_create(env, 0, &model) != PFGTD_STATUS_OK) return 3;

    PfgtdLearner *learner = NULL;
    if (pfgtd_learner_create(env, 2, 100.0, 1.0, 1.0, false, &learner) != PFGTD_STATUS_OK)
        return 4;

    PfgtdSampler *sampler = NULL;
    if (pfgtd_sampler_create(env, 42, &sampler) != PFGTD_STATUS_OK) return 5;

    double theta[3] = {0};
    double initial = 0.0;
    if (pfgtd_model_rmspbe(model, theta, dim, &initial) != PFGTD_STATUS_OK) return 6;

    double phi[3], phi_next[3], reward, rho;
    for (int t = 0; t < 3000; t++) {
        if (pfgtd_sampler_next(sampler, env, phi, phi_next, dim, &reward, &rho)
            != PFGTD_STATUS_OK) return 7;
        if (pfgtd_learner_step(learner, phi, phi_next, dim, reward, rho)
            != PFGTD_STATUS_OK) return 8;
    }

    if (pfgtd_learner_estimate(learner, true, theta, dim) != PFGTD_STATUS_OK) return 9;
    double final_err = 0.0;
    if (pfgtd_model_rmspbe(model, theta, dim, &final_err) != PFGTD_STATUS_OK) return 10;
    printf("rmspbe %f -> %f\n", initial, final_err);
    if (!(final_err < 0.5 * initial)) return 11;

    pfgtd_sampler_destroy(sampler);
    pfgtd_learner_destroy(learner);
    pfgtd_model_destroy(model);
    pfgtd_env_destroy(env);
    return 0;
}
"#;

fn target_debug_dir() -> PathBuf {
    // tests run from target/<profile>/deps/<name>; the library artifacts sit
    // two levels up.
    let exe = std::env::current_exe().expect("test executable path");
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_learns_through_the_static_library() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler available as `{cc}`");
        return;
    }

    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    let libdir = target_debug_dir();
    let staticlib = libdir.join("libpfgtd_ffi.a");
    assert!(staticlib.exists(), "static library missing at {}", staticlib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("demo.c");
    std::fs::write(&src, C_DEMO).unwrap();
    let exe = dir.path().join("demo");

    let compile = Command::new(&cc)
        .arg("-std=c99")
        .arg("-O1")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(staticlib)
        .args(["-lm", "-lpthread", "-ldl"])
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("compiler invocation");
    assert!(
        compile.status.success(),
        "C compilation failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe).output().expect("demo execution");
    assert!(
        run.status.success(),
        "demo exited with {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("rmspbe"), "unexpected output: {stdout}");
}
