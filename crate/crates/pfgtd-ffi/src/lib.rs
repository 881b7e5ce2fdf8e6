//! C ABI for the parameter-free gradient TD library.
//!
//! All objects are opaque handles created and destroyed through paired
//! functions; every fallible call returns a [`PfgtdStatus`] and writes its
//! result through out-pointers. Panics never cross the boundary — they are
//! caught and reported as `PFGTD_STATUS_PANIC`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use pfgtd::envs::{by_name, EnvOptions, Environment, MdpSpec, Sampler};
use pfgtd::gtd::{
    saddle_learner, BaselineAlgo, BaselineConfig, BaselineLearner, PfVariant, SaddleConfig,
    SaddlePointLearner, TransitionSample,
};
use pfgtd::metrics::{build_exact_model, duality_gap, ExactModel};
use pfgtd::Objective;

/// Result codes for every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfgtdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownName = 3,
    ConstructionFailed = 4,
    DimensionMismatch = 5,
    Panic = 6,
}

/// An environment handle (an exact MDP).
pub struct PfgtdEnv {
    spec: MdpSpec,
}

/// A seeded transition sampler bound to an environment.
pub struct PfgtdSampler {
    sampler: Sampler,
    sample: TransitionSample,
}

/// An exact-model handle for ground-truth metrics.
pub struct PfgtdModel {
    model: ExactModel,
}

enum LearnerKind {
    Saddle(SaddlePointLearner),
    Baseline(BaselineLearner),
}

/// A policy-evaluation learner (parameter-free or baseline).
pub struct PfgtdLearner {
    kind: LearnerKind,
    gamma: f64,
    dim: usize,
}

fn guard(f: impl FnOnce() -> PfgtdStatus) -> PfgtdStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(PfgtdStatus::Panic)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> PfgtdStatus {
    if out.is_null() {
        return PfgtdStatus::NullPointer;
    }
    unsafe { out.write(value) };
    PfgtdStatus::Ok
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn pfgtd_version() -> *const c_char {
    static VERSION: OnceLock<CString> = OnceLock::new();
    VERSION
        .get_or_init(|| CString::new(env!("CARGO_PKG_VERSION")).expect("version string"))
        .as_ptr()
}

/// Creates an environment by registry name (for example "baird" or
/// "random-walk-tabular"). The multi-scale stream is not an MDP and is not
/// exposed through this ABI.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_env_create(
    name: *const c_char,
    out: *mut *mut PfgtdEnv,
) -> PfgtdStatus {
    guard(|| {
        if name.is_null() || out.is_null() {
            return PfgtdStatus::NullPointer;
        }
        let Ok(name) = unsafe { CStr::from_ptr(name) }.to_str() else {
            return PfgtdStatus::InvalidArgument;
        };
        match by_name(name, &EnvOptions::default()) {
            Ok(Environment::Mdp(spec)) => {
                let handle = Box::new(PfgtdEnv { spec });
                unsafe { write_out(out, Box::into_raw(handle)) }
            }
            Ok(Environment::MultiScale(_)) => PfgtdStatus::InvalidArgument,
            Err(_) => PfgtdStatus::UnknownName,
        }
    })
}

/// Destroys an environment handle. A null pointer is a no-op.
///
/// # Safety
/// `env` must be a pointer previously returned by `pfgtd_env_create`.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_env_destroy(env: *mut PfgtdEnv) {
    if !env.is_null() {
        drop(unsafe { Box::from_raw(env) });
    }
}

/// Feature dimensionality of the environment.
///
/// # Safety
/// `env` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_env_dim(env: *const PfgtdEnv, out: *mut usize) -> PfgtdStatus {
    guard(|| {
        let Some(env) = (unsafe { env.as_ref() }) else {
            return PfgtdStatus::NullPointer;
        };
        unsafe { write_out(out, env.spec.dim()) }
    })
}

/// Discount factor of the environment.
///
/// # Safety
/// `env` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_env_gamma(env: *const PfgtdEnv, out: *mut f64) -> PfgtdStatus {
    guard(|| {
        let Some(env) = (unsafe { env.as_ref() }) else {
            return PfgtdStatus::NullPointer;
        };
        unsafe { write_out(out, env.spec.gamma) }
    })
}

/// Creates a seeded sampler. Identical seeds give identical streams.
///
/// # Safety
/// `env` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_sampler_create(
    env: *const PfgtdEnv,
    seed: u64,
    out: *mut *mut PfgtdSampler,
) -> PfgtdStatus {
    guard(|| {
        let Some(env) = (unsafe { env.as_ref() }) else {
            return PfgtdStatus::NullPointer;
        };
        let handle = Box::new(PfgtdSampler {
            sampler: Sampler::new(&env.spec, seed),
            sample: TransitionSample::zeros(env.spec.dim()),
        });
        unsafe { write_out(out, Box::into_raw(handle)) }
    })
}

/// Destroys a sampler handle. A null pointer is a no-op.
///
/// # Safety
/// `sampler` must be a pointer previously returned by `pfgtd_sampler_create`.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_sampler_destroy(sampler: *mut PfgtdSampler) {
    if !sampler.is_null() {
        drop(unsafe { Box::from_raw(sampler) });
    }
}

/// Draws the next transition into caller-provided buffers of length `len`
/// (the environment dimension).
///
/// # Safety
/// All pointers must be valid; `phi` and `phi_next` must reference buffers
/// of at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_sampler_next(
    sampler: *mut PfgtdSampler,
    env: *const PfgtdEnv,
    phi: *mut f64,
    phi_next: *mut f64,
    len: usize,
    reward: *mut f64,
    rho: *mut f64,
) -> PfgtdStatus {
    guard(|| {
        let (Some(sampler), Some(env)) = (unsafe { sampler.as_mut() }, unsafe { env.as_ref() })
        else {
            return PfgtdStatus::NullPointer;
        };
        if phi.is_null() || phi_next.is_null() || reward.is_null() || rho.is_null() {
            return PfgtdStatus::NullPointer;
        }
        if len != env.spec.dim() {
            return PfgtdStatus::DimensionMismatch;
        }
        sampler.sampler.next_into(&env.spec, &mut sampler.sample);
        unsafe {
            std::ptr::copy_nonoverlapping(sampler.sample.phi.as_ptr(), phi, len);
            std::ptr::copy_nonoverlapping(sampler.sample.phi_next.as_ptr(), phi_next, len);
            reward.write(sampler.sample.reward);
            rho.write(sampler.sample.rho);
        }
        PfgtdStatus::Ok
    })
}

/// Builds the exact model. `objective`: 0 = MSPBE, 1 = NEU.
///
/// # Safety
/// `env` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_model_create(
    env: *const PfgtdEnv,
    objective: i32,
    out: *mut *mut PfgtdModel,
) -> PfgtdStatus {
    guard(|| {
        let Some(env) = (unsafe { env.as_ref() }) else {
            return PfgtdStatus::NullPointer;
        };
        let objective = match objective {
            0 => Objective::Mspbe,
            1 => Objective::Neu,
            _ => return PfgtdStatus::InvalidArgument,
        };
        match build_exact_model(&env.spec, objective) {
            Ok(model) => {
                let handle = Box::new(PfgtdModel { model });
                unsafe { write_out(out, Box::into_raw(handle)) }
            }
            Err(_) => PfgtdStatus::ConstructionFailed,
        }
    })
}

/// Destroys a model handle. A null pointer is a no-op.
///
/// # Safety
/// `model` must be a pointer previously returned by `pfgtd_model_create`.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_model_destroy(model: *mut PfgtdModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Root mean-square projected Bellman error of a parameter vector.
///
/// # Safety
/// `model`, `theta` (length `len`), and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_model_rmspbe(
    model: *const PfgtdModel,
    theta: *const f64,
    len: usize,
    out: *mut f64,
) -> PfgtdStatus {
    guard(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return PfgtdStatus::NullPointer;
        };
        if theta.is_null() {
            return PfgtdStatus::NullPointer;
        }
        if len != model.model.dim() {
            return PfgtdStatus::DimensionMismatch;
        }
        let theta = unsafe { std::slice::from_raw_parts(theta, len) };
        unsafe { write_out(out, model.model.rmspbe(theta)) }
    })
}

/// Duality gap of `(theta, y)` over feasible balls of radius `radius`.
///
/// # Safety
/// `model`, `theta`, `y` (length `len`), and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_model_duality_gap(
    model: *const PfgtdModel,
    theta: *const f64,
    y: *const f64,
    len: usize,
    radius: f64,
    out: *mut f64,
) -> PfgtdStatus {
    guard(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return PfgtdStatus::NullPointer;
        };
        if theta.is_null() || y.is_null() {
            return PfgtdStatus::NullPointer;
        }
        if len != model.model.dim() || radius <= 0.0 {
            return PfgtdStatus::InvalidArgument;
        }
        let theta = unsafe { std::slice::from_raw_parts(theta, len) };
        let y = unsafe { std::slice::from_raw_parts(y, len) };
        let report = duality_gap(&model.model, theta, y, radius);
        unsafe { write_out(out, report.gap) }
    })
}

/// Copies the MSPBE minimizer into a caller buffer of length `len`.
///
/// # Safety
/// `model` and `out` (length `len`) must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_model_theta_star(
    model: *const PfgtdModel,
    out: *mut f64,
    len: usize,
) -> PfgtdStatus {
    guard(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return PfgtdStatus::NullPointer;
        };
        if out.is_null() {
            return PfgtdStatus::NullPointer;
        }
        if len != model.model.dim() {
            return PfgtdStatus::DimensionMismatch;
        }
        unsafe {
            std::ptr::copy_nonoverlapping(model.model.theta_star.as_slice().as_ptr(), out, len)
        };
        PfgtdStatus::Ok
    })
}

/// Creates a parameter-free learner. `variant`: 0 = PF, 1 = CW-PF, 2 = PF+.
/// When `warm_start` is nonzero the environment's standard initialization is
/// applied (currently only the star counterexample defines one).
///
/// # Safety
/// `env` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_learner_create(
    env: *const PfgtdEnv,
    variant: i32,
    radius: f64,
    initial_wealth: f64,
    initial_hint: f64,
    warm_start: bool,
    out: *mut *mut PfgtdLearner,
) -> PfgtdStatus {
    guard(|| {
        let Some(env) = (unsafe { env.as_ref() }) else {
            return PfgtdStatus::NullPointer;
        };
        let variant = match variant {
            0 => PfVariant::Pf,
            1 => PfVariant::CwPf,
            2 => PfVariant::PfPlus,
            _ => return PfgtdStatus::InvalidArgument,
        };
        if radius <= 0.0 || initial_wealth <= 0.0 || initial_hint <= 0.0 {
            return PfgtdStatus::InvalidArgument;
        }
        let warm = if warm_start && env.spec.name == "baird" {
            Some(pfgtd::envs::baird_initial_theta())
        } else {
            None
        };
        let mut cfg = SaddleConfig::new(variant, env.spec.dim(), env.spec.gamma)
            .with_radius(radius)
            .with_warm_start(warm);
        cfg.initial_wealth = initial_wealth;
        cfg.initial_hint = initial_hint;
        match saddle_learner(&cfg) {
            Ok(learner) => {
                let handle = Box::new(PfgtdLearner {
                    kind: LearnerKind::Saddle(learner),
                    gamma: env.spec.gamma,
                    dim: env.spec.dim(),
                });
                unsafe { write_out(out, Box::into_raw(handle)) }
            }
            Err(_) => PfgtdStatus::ConstructionFailed,
        }
    })
}

/// Creates a baseline learner. `algo`: 0 = TD, 1 = GTD2, 2 = TDC, 3 = TDRC.
///
/// # Safety
/// `env` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_baseline_create(
    env: *const PfgtdEnv,
    algo: i32,
    alpha: f64,
    out: *mut *mut PfgtdLearner,
) -> PfgtdStatus {
    guard(|| {
        let Some(env) = (unsafe { env.as_ref() }) else {
            return PfgtdStatus::NullPointer;
        };
        let algo = match algo {
            0 => BaselineAlgo::Td,
            1 => BaselineAlgo::Gtd2,
            2 => BaselineAlgo::Tdc,
            3 => BaselineAlgo::Tdrc,
            _ => return PfgtdStatus::InvalidArgument,
        };
        if alpha <= 0.0 {
            return PfgtdStatus::InvalidArgument;
        }
        let learner = BaselineLearner::new(BaselineConfig::new(algo, alpha), env.spec.dim());
        let handle = Box::new(PfgtdLearner {
            kind: LearnerKind::Baseline(learner),
            gamma: env.spec.gamma,
            dim: env.spec.dim(),
        });
        unsafe { write_out(out, Box::into_raw(handle)) }
    })
}

/// Destroys a learner handle. A null pointer is a no-op.
///
/// # Safety
/// `learner` must be a pointer previously returned by a learner constructor.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_learner_destroy(learner: *mut PfgtdLearner) {
    if !learner.is_null() {
        drop(unsafe { Box::from_raw(learner) });
    }
}

/// Feeds one transition to the learner.
///
/// # Safety
/// `learner`, `phi`, and `phi_next` (length `len`) must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_learner_step(
    learner: *mut PfgtdLearner,
    phi: *const f64,
    phi_next: *const f64,
    len: usize,
    reward: f64,
    rho: f64,
) -> PfgtdStatus {
    guard(|| {
        let Some(learner) = (unsafe { learner.as_mut() }) else {
            return PfgtdStatus::NullPointer;
        };
        if phi.is_null() || phi_next.is_null() {
            return PfgtdStatus::NullPointer;
        }
        if len != learner.dim {
            return PfgtdStatus::DimensionMismatch;
        }
        if rho.is_nan() || rho < 0.0 || !reward.is_finite() {
            return PfgtdStatus::InvalidArgument;
        }
        let sample = TransitionSample {
            phi: unsafe { std::slice::from_raw_parts(phi, len) }.to_vec(),
            phi_next: unsafe { std::slice::from_raw_parts(phi_next, len) }.to_vec(),
            reward,
            rho,
        };
        match &mut learner.kind {
            LearnerKind::Saddle(l) => l.step(&sample),
            LearnerKind::Baseline(l) => l.step(&sample, learner.gamma),
        }
        PfgtdStatus::Ok
    })
}

/// Copies the learner's value-function parameters into a caller buffer.
/// `averaged` nonzero selects the running average (the parameter-free
/// learners' canonical estimate); zero selects the current point.
///
/// # Safety
/// `learner` and `out` (length `len`) must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pfgtd_learner_estimate(
    learner: *mut PfgtdLearner,
    averaged: bool,
    out: *mut f64,
    len: usize,
) -> PfgtdStatus {
    guard(|| {
        let Some(learner) = (unsafe { learner.as_mut() }) else {
            return PfgtdStatus::NullPointer;
        };
        if out.is_null() {
            return PfgtdStatus::NullPointer;
        }
        if len != learner.dim {
            return PfgtdStatus::DimensionMismatch;
        }
        let theta: Vec<f64> = match (&mut learner.kind, averaged) {
            (LearnerKind::Saddle(l), true) => l.theta_avg().to_vec(),
            (LearnerKind::Saddle(l), false) => l.theta_current().to_vec(),
            (LearnerKind::Baseline(l), true) => l.theta_avg().to_vec(),
            (LearnerKind::Baseline(l), false) => l.theta().to_vec(),
        };
        unsafe { std::ptr::copy_nonoverlapping(theta.as_ptr(), out, len) };
        PfgtdStatus::Ok
    })
}
