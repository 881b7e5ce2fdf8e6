//! Drives the C ABI the way a foreign binding would: through raw pointers
//! and status codes.

use std::ffi::CString;
use std::ptr;

use pfgtd_ffi::*;

fn c(name: &str) -> CString {
    CString::new(name).unwrap()
}

#[test]
fn version_is_a_nonempty_c_string() {
    let v = unsafe { std::ffi::CStr::from_ptr(pfgtd_version()) };
    assert!(!v.to_str().unwrap().is_empty());
}

#[test]
fn unknown_environment_is_reported() {
    let mut env: *mut PfgtdEnv = ptr::null_mut();
    let status = unsafe { pfgtd_env_create(c("not-an-env").as_ptr(), &mut env) };
    assert_eq!(status, PfgtdStatus::UnknownName);
    assert!(env.is_null());
}

#[test]
fn null_pointers_are_rejected_not_dereferenced() {
    let mut out = 0usize;
    assert_eq!(unsafe { pfgtd_env_dim(ptr::null(), &mut out) }, PfgtdStatus::NullPointer);
    let mut env: *mut PfgtdEnv = ptr::null_mut();
    assert_eq!(
        unsafe { pfgtd_env_create(ptr::null(), &mut env) },
        PfgtdStatus::NullPointer
    );
    unsafe { pfgtd_env_destroy(ptr::null_mut()) };
    unsafe { pfgtd_learner_destroy(ptr::null_mut()) };
}

#[test]
fn end_to_end_learning_through_the_c_abi() {
    unsafe {
        let mut env: *mut PfgtdEnv = ptr::null_mut();
        assert_eq!(
            pfgtd_env_create(c("random-walk-dependent").as_ptr(), &mut env),
            PfgtdStatus::Ok
        );
        let mut dim = 0usize;
        assert_eq!(pfgtd_env_dim(env, &mut dim), PfgtdStatus::Ok);
        assert_eq!(dim, 3);
        let mut gamma = 0.0;
        assert_eq!(pfgtd_env_gamma(env, &mut gamma), PfgtdStatus::Ok);
        assert_eq!(gamma, 1.0);

        let mut model: *mut PfgtdModel = ptr::null_mut();
        assert_eq!(pfgtd_model_create(env, 0, &mut model), PfgtdStatus::Ok);

        let mut learner: *mut PfgtdLearner = ptr::null_mut();
        assert_eq!(
            pfgtd_learner_create(env, 2, 100.0, 1.0, 1.0, false, &mut learner),
            PfgtdStatus::Ok
        );

        let mut sampler: *mut PfgtdSampler = ptr::null_mut();
        assert_eq!(pfgtd_sampler_create(env, 7, &mut sampler), PfgtdStatus::Ok);

        let mut theta = vec![0.0; dim];
        assert_eq!(
            pfgtd_learner_estimate(learner, true, theta.as_mut_ptr(), dim),
            PfgtdStatus::Ok
        );
        let mut initial = 0.0;
        assert_eq!(
            pfgtd_model_rmspbe(model, theta.as_ptr(), dim, &mut initial),
            PfgtdStatus::Ok
        );

        let mut phi = vec![0.0; dim];
        let mut phi_next = vec![0.0; dim];
        let (mut reward, mut rho) = (0.0, 0.0);
        for _ in 0..2000 {
            assert_eq!(
                pfgtd_sampler_next(
                    sampler,
                    env,
                    phi.as_mut_ptr(),
                    phi_next.as_mut_ptr(),
                    dim,
                    &mut reward,
                    &mut rho
                ),
                PfgtdStatus::Ok
            );
            assert_eq!(
                pfgtd_learner_step(learner, phi.as_ptr(), phi_next.as_ptr(), dim, reward, rho),
                PfgtdStatus::Ok
            );
        }

        assert_eq!(
            pfgtd_learner_estimate(learner, true, theta.as_mut_ptr(), dim),
            PfgtdStatus::Ok
        );
        let mut final_err = 0.0;
        assert_eq!(
            pfgtd_model_rmspbe(model, theta.as_ptr(), dim, &mut final_err),
            PfgtdStatus::Ok
        );
        assert!(final_err.is_finite());
        assert!(
            final_err < 0.5 * initial,
            "learning through the ABI should cut the error ({initial} -> {final_err})"
        );

        let mut gap = 0.0;
        let y = vec![0.0; dim];
        assert_eq!(
            pfgtd_model_duality_gap(model, theta.as_ptr(), y.as_ptr(), dim, 100.0, &mut gap),
            PfgtdStatus::Ok
        );
        assert!(gap >= 0.0);

        let mut star = vec![0.0; dim];
        assert_eq!(
            pfgtd_model_theta_star(model, star.as_mut_ptr(), dim),
            PfgtdStatus::Ok
        );
        let mut zero = 0.0;
        assert_eq!(pfgtd_model_rmspbe(model, star.as_ptr(), dim, &mut zero), PfgtdStatus::Ok);
        assert!(zero < 1e-10);

        // Dimension mismatches are reported, not UB.
        assert_eq!(
            pfgtd_model_rmspbe(model, star.as_ptr(), dim - 1, &mut zero),
            PfgtdStatus::DimensionMismatch
        );

        pfgtd_sampler_destroy(sampler);
        pfgtd_learner_destroy(learner);
        pfgtd_model_destroy(model);
        pfgtd_env_destroy(env);
    }
}

#[test]
fn baseline_learner_runs_through_the_abi() {
    unsafe {
        let mut env: *mut PfgtdEnv = ptr::null_mut();
        assert_eq!(pfgtd_env_create(c("boyan").as_ptr(), &mut env), PfgtdStatus::Ok);
        let mut learner: *mut PfgtdLearner = ptr::null_mut();
        assert_eq!(pfgtd_baseline_create(env, 1, 0.125, &mut learner), PfgtdStatus::Ok);
        assert_eq!(
            pfgtd_baseline_create(env, 9, 0.125, &mut learner),
            PfgtdStatus::InvalidArgument
        );

        let mut sampler: *mut PfgtdSampler = ptr::null_mut();
        assert_eq!(pfgtd_sampler_create(env, 3, &mut sampler), PfgtdStatus::Ok);
        let mut phi = vec![0.0; 4];
        let mut phi_next = vec![0.0; 4];
        let (mut reward, mut rho) = (0.0, 0.0);
        for _ in 0..500 {
            pfgtd_sampler_next(sampler, env, phi.as_mut_ptr(), phi_next.as_mut_ptr(), 4, &mut reward, &mut rho);
            assert_eq!(
                pfgtd_learner_step(learner, phi.as_ptr(), phi_next.as_ptr(), 4, reward, rho),
                PfgtdStatus::Ok
            );
        }
        let mut theta = vec![0.0; 4];
        assert_eq!(pfgtd_learner_estimate(learner, false, theta.as_mut_ptr(), 4), PfgtdStatus::Ok);
        assert!(theta.iter().all(|t| t.is_finite()));
        // The chain's values are negative, so learning pulls theta below zero.
        assert!(theta.iter().any(|&t| t < 0.0));

        pfgtd_sampler_destroy(sampler);
        pfgtd_learner_destroy(learner);
        pfgtd_env_destroy(env);
    }
}

#[test]
fn generated_header_exists_with_expected_symbols() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/pfgtd.h");
    let text = std::fs::read_to_string(&header).expect("cbindgen header");
    for symbol in [
        "pfgtd_env_create",
        "pfgtd_sampler_next",
        "pfgtd_model_rmspbe",
        "pfgtd_learner_step",
        "PfgtdStatus",
    ] {
        assert!(text.contains(symbol), "header is missing {symbol}");
    }
}
