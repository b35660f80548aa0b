//! C interface to `hf-aos`.
//!
//! Objects are opaque handles created by `*_new`/`*_load` functions and
//! released with the matching `*_free`. Every fallible call returns an
//! [`HfStatus`]; on failure [`hf_last_error`] describes the cause. Errors are
//! tracked per thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use hf_aos::cvrptw::ObjectiveWeights;
use hf_aos::de::DeConfig;
use hf_aos::harness::{run_trial, LoadedProblem, ProblemSpec, RunSettings};
use hf_aos::statebased::{load_model, DdqnConfig, QNetwork};
use hf_aos::stateless::{assign_credit, sample_categorical, StatelessAos};
use hf_aos::{AosMode, DecisionPolicy, Error, ModuleKind, Objective, OperatorId, PolicyMode};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    UnknownName = 3,
    Dimension = 4,
    Config = 5,
    Format = 6,
    Plan = 7,
    Io = 8,
    Panic = 9,
}

/// Module picked by the decision policy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfModule {
    Stateless = 0,
    StateBased = 1,
}

pub struct HfProblem(LoadedProblem);
pub struct HfModel(QNetwork);
pub struct HfStateless(StatelessAos);
pub struct HfPolicy(DecisionPolicy);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HfStatus {
    match e {
        Error::Name(_) => HfStatus::UnknownName,
        Error::Dimension(_) => HfStatus::Dimension,
        Error::Config(_) => HfStatus::Config,
        Error::Format(_) => HfStatus::Format,
        Error::Plan(_) => HfStatus::Plan,
        Error::Io(_) => HfStatus::Io,
    }
}

struct Fail(HfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HfStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HfStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(HfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(HfStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn mut_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn out<T>(p: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

fn objective(v: f64) -> Result<Objective, Fail> {
    Ok(Objective::new(v)?)
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn hf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn hf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Normalised improvement `clamp((prev - new) / max(|prev|, eps), 0, 1)`.
///
/// # Safety
/// `out_credit` must be null or point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn hf_credit(y_prev: f64, y_new: f64, out_credit: *mut f64) -> HfStatus {
    guard(|| {
        out(
            out_credit,
            assign_credit(objective(y_prev)?, objective(y_new)?),
            "out_credit",
        )
    })
}

/// Benchmark function by registry name. `shift_seed` is used only when
/// `shifted` is true.
///
/// # Safety
/// `name` must be a nul-terminated string; `out_problem` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_problem_function(
    name: *const c_char,
    dim: usize,
    shifted: bool,
    shift_seed: u64,
    out_problem: *mut *mut HfProblem,
) -> HfStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let spec = ProblemSpec::Function {
            function: name.to_string(),
            dim,
            shift_seed: shifted.then_some(shift_seed),
        };
        let p = LoadedProblem::load(&spec)?;
        out(
            out_problem,
            Box::into_raw(Box::new(HfProblem(p))),
            "out_problem",
        )
    })
}

/// CVRPTW instance from a Solomon-format file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out_problem` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_problem_load_instance(
    path: *const c_char,
    out_problem: *mut *mut HfProblem,
) -> HfStatus {
    guard(|| {
        let path = PathBuf::from(str_arg(path, "path")?);
        let p = LoadedProblem::load(&ProblemSpec::instance(path))?;
        out(
            out_problem,
            Box::into_raw(Box::new(HfProblem(p))),
            "out_problem",
        )
    })
}

/// # Safety
/// `problem` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hf_problem_free(problem: *mut HfProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of operators the problem's host offers.
///
/// # Safety
/// `problem` must be a live handle; `out_k` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_problem_num_operators(
    problem: *const HfProblem,
    out_k: *mut usize,
) -> HfStatus {
    guard(|| out(out_k, ref_arg(problem, "problem")?.0.k_ops(), "out_k"))
}

/// Evaluates a benchmark function at `x[0..len]`. Fails for CVRPTW problems.
///
/// # Safety
/// `x` must point to `len` readable doubles; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_problem_evaluate(
    problem: *const HfProblem,
    x: *const f64,
    len: usize,
    out_value: *mut f64,
) -> HfStatus {
    guard(|| {
        let LoadedProblem::Real { func, .. } = &ref_arg(problem, "problem")?.0 else {
            return Err(Fail(
                HfStatus::Config,
                "only benchmark functions can be evaluated directly".into(),
            ));
        };
        if x.is_null() {
            return Err(null("x"));
        }
        let v = func.evaluate(std::slice::from_raw_parts(x, len))?;
        out(out_value, v.value(), "out_value")
    })
}

/// Loads a trained state-based model.
///
/// # Safety
/// `path` must be a nul-terminated string; `out_model` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_model_load(
    path: *const c_char,
    out_model: *mut *mut HfModel,
) -> HfStatus {
    guard(|| {
        let (net, _) = load_model(str_arg(path, "path")?)?;
        out(
            out_model,
            Box::into_raw(Box::new(HfModel(net))),
            "out_model",
        )
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hf_model_free(model: *mut HfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// One seeded run of `mode` (e.g. "hf", "sl", "random", "hf-na:0.3") with
/// default DE and DDQN settings. `model` may be null for modes that do not
/// use the state-based module. `budget` counts evaluations or moves.
///
/// # Safety
/// Handles must be live; `mode` nul-terminated; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn hf_run(
    problem: *const HfProblem,
    mode: *const c_char,
    model: *const HfModel,
    budget: usize,
    seed: u64,
    out_best: *mut f64,
    out_evaluations: *mut usize,
) -> HfStatus {
    guard(|| {
        let problem = &ref_arg(problem, "problem")?.0;
        let mode: AosMode = str_arg(mode, "mode")?.parse()?;
        let model = model.as_ref().map(|m| &m.0);
        let settings = RunSettings {
            budget,
            de: DeConfig {
                budget,
                ..DeConfig::default()
            },
            weights: ObjectiveWeights::default(),
            ddqn: DdqnConfig::default(),
        };
        let r = run_trial(problem, mode, 0, seed, &settings, model, false)?.result;
        out(out_best, r.best, "out_best")?;
        out(out_evaluations, r.evals, "out_evaluations")
    })
}

/// Adaptive-pursuit bandit over `k` operators with default parameters.
///
/// # Safety
/// `out_aos` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_stateless_new(k: usize, out_aos: *mut *mut HfStateless) -> HfStatus {
    guard(|| {
        let aos = StatelessAos::with_defaults(k)?;
        out(
            out_aos,
            Box::into_raw(Box::new(HfStateless(aos))),
            "out_aos",
        )
    })
}

/// # Safety
/// `aos` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hf_stateless_free(aos: *mut HfStateless) {
    if !aos.is_null() {
        drop(Box::from_raw(aos));
    }
}

/// Records `credit` for operator `op` and updates the probabilities.
///
/// # Safety
/// `aos` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hf_stateless_record(
    aos: *mut HfStateless,
    op: usize,
    credit: f64,
) -> HfStatus {
    guard(|| {
        let aos = &mut mut_arg(aos, "aos")?.0;
        let op = OperatorId::new(op, aos.k())?;
        if !(0.0..=1.0).contains(&credit) {
            return Err(Fail(
                HfStatus::Config,
                format!("credit {credit} outside [0, 1]"),
            ));
        }
        aos.record(op, credit);
        Ok(())
    })
}

/// Copies the selection probabilities into `out_probs[0..len]`; `len` must
/// equal the operator count.
///
/// # Safety
/// `out_probs` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hf_stateless_probabilities(
    aos: *const HfStateless,
    out_probs: *mut f64,
    len: usize,
) -> HfStatus {
    guard(|| {
        let p = ref_arg(aos, "aos")?.0.probabilities();
        if len != p.len() {
            return Err(Fail(
                HfStatus::Dimension,
                format!("buffer holds {len}, need {}", p.len()),
            ));
        }
        if out_probs.is_null() {
            return Err(null("out_probs"));
        }
        std::slice::from_raw_parts_mut(out_probs, len).copy_from_slice(p);
        Ok(())
    })
}

/// Operator drawn by inverse CDF with the caller's uniform `u` in [0, 1).
///
/// # Safety
/// `aos` must be a live handle; `out_op` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_stateless_sample(
    aos: *const HfStateless,
    u: f64,
    out_op: *mut usize,
) -> HfStatus {
    guard(|| {
        if !(0.0..1.0).contains(&u) {
            return Err(Fail(HfStatus::Config, format!("u = {u} outside [0, 1)")));
        }
        let op = sample_categorical(ref_arg(aos, "aos")?.0.probabilities(), u);
        out(out_op, op.index(), "out_op")
    })
}

/// Adaptive decision policy with bounds `p_l <= p <= p_u`, starting at `p_u`.
///
/// # Safety
/// `out_policy` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hf_policy_new(
    p_u: f64,
    p_l: f64,
    out_policy: *mut *mut HfPolicy,
) -> HfStatus {
    guard(|| {
        let pol = DecisionPolicy::new(p_u, p_l, PolicyMode::Adaptive)?;
        out(
            out_policy,
            Box::into_raw(Box::new(HfPolicy(pol))),
            "out_policy",
        )
    })
}

/// # Safety
/// `policy` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hf_policy_free(policy: *mut HfPolicy) {
    if !policy.is_null() {
        drop(Box::from_raw(policy));
    }
}

/// # Safety
/// `policy` must be a live handle; `out_p` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_policy_p(policy: *const HfPolicy, out_p: *mut f64) -> HfStatus {
    guard(|| out(out_p, ref_arg(policy, "policy")?.0.p(), "out_p"))
}

/// Moves `p` halfway to `p_u` after an improving step, else halfway to `p_l`.
///
/// # Safety
/// `policy` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hf_policy_adjust(policy: *mut HfPolicy, improved: bool) -> HfStatus {
    guard(|| {
        mut_arg(policy, "policy")?.0.adjust(improved);
        Ok(())
    })
}

/// Stateless module when `u < p`, otherwise state-based.
///
/// # Safety
/// `policy` must be a live handle; `out_module` writable.
#[no_mangle]
pub unsafe extern "C" fn hf_policy_choose(
    policy: *const HfPolicy,
    u: f64,
    out_module: *mut HfModule,
) -> HfStatus {
    guard(|| {
        let m = match ref_arg(policy, "policy")?.0.choose_module(u) {
            ModuleKind::Stateless => HfModule::Stateless,
            _ => HfModule::StateBased,
        };
        out(out_module, m, "out_module")
    })
}
