use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use hf_aos_ffi::*;

fn last_error() -> String {
    let p = hf_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn sphere(dim: usize) -> *mut HfProblem {
    let name = CString::new("sphere").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { hf_problem_function(name.as_ptr(), dim, false, 0, &mut p) },
        HfStatus::Ok
    );
    p
}

#[test]
fn evaluates_and_runs_a_benchmark() {
    let p = sphere(3);
    let mut v = f64::NAN;
    let x = [1.0, 2.0, -2.0];
    assert_eq!(
        unsafe { hf_problem_evaluate(p, x.as_ptr(), 3, &mut v) },
        HfStatus::Ok
    );
    assert_eq!(v, 9.0);

    let mut k = 0;
    assert_eq!(unsafe { hf_problem_num_operators(p, &mut k) }, HfStatus::Ok);
    assert_eq!(k, 4);

    let mode = CString::new("sl").unwrap();
    let (mut best, mut evals) = (f64::NAN, 0usize);
    assert_eq!(
        unsafe {
            hf_run(
                p,
                mode.as_ptr(),
                ptr::null(),
                1000,
                3,
                &mut best,
                &mut evals,
            )
        },
        HfStatus::Ok
    );
    assert_eq!(evals, 1000);
    assert!((0.0..1e4).contains(&best));
    let (mut again, mut e2) = (f64::NAN, 0usize);
    unsafe { hf_run(p, mode.as_ptr(), ptr::null(), 1000, 3, &mut again, &mut e2) };
    assert_eq!(best, again);
    unsafe { hf_problem_free(p) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let bad = CString::new("no_such_function").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { hf_problem_function(bad.as_ptr(), 2, false, 0, &mut p) },
        HfStatus::UnknownName
    );
    assert!(p.is_null());
    assert!(last_error().contains("no_such_function"));

    let p = sphere(2);
    let mut v = 0.0;
    let x = [0.0; 3];
    assert_eq!(
        unsafe { hf_problem_evaluate(p, x.as_ptr(), 3, &mut v) },
        HfStatus::Dimension
    );
    assert_eq!(
        unsafe { hf_problem_evaluate(p, x.as_ptr(), 2, ptr::null_mut()) },
        HfStatus::NullPointer
    );

    let hf = CString::new("hf").unwrap();
    let (mut best, mut evals) = (0.0, 0);
    assert_eq!(
        unsafe { hf_run(p, hf.as_ptr(), ptr::null(), 500, 1, &mut best, &mut evals) },
        HfStatus::Config
    );
    let junk = CString::new("greedy").unwrap();
    assert_ne!(
        unsafe { hf_run(p, junk.as_ptr(), ptr::null(), 500, 1, &mut best, &mut evals) },
        HfStatus::Ok
    );

    // A successful call clears the message.
    assert_eq!(
        unsafe { hf_problem_evaluate(p, x.as_ptr(), 2, &mut v) },
        HfStatus::Ok
    );
    assert!(hf_last_error().is_null());
    unsafe { hf_problem_free(p) };

    let missing = CString::new("/nonexistent/model.json").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { hf_model_load(missing.as_ptr(), &mut m) },
        HfStatus::Io
    );
    unsafe { hf_model_free(ptr::null_mut()) };
}

#[test]
fn stateless_bandit_through_handles() {
    let mut aos = ptr::null_mut();
    assert_eq!(unsafe { hf_stateless_new(4, &mut aos) }, HfStatus::Ok);
    for _ in 0..2000 {
        assert_eq!(unsafe { hf_stateless_record(aos, 1, 0.8) }, HfStatus::Ok);
    }
    let mut probs = [0.0; 4];
    assert_eq!(
        unsafe { hf_stateless_probabilities(aos, probs.as_mut_ptr(), 4) },
        HfStatus::Ok
    );
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((probs[1] - 0.85).abs() < 1e-6);
    let mut op = 9;
    assert_eq!(
        unsafe { hf_stateless_sample(aos, 0.5, &mut op) },
        HfStatus::Ok
    );
    assert_eq!(op, 1);
    assert_eq!(
        unsafe { hf_stateless_record(aos, 4, 0.5) },
        HfStatus::Config
    );
    assert_eq!(
        unsafe { hf_stateless_probabilities(aos, probs.as_mut_ptr(), 3) },
        HfStatus::Dimension
    );
    unsafe { hf_stateless_free(aos) };
}

#[test]
fn decision_policy_through_handles() {
    let mut pol = ptr::null_mut();
    assert_eq!(unsafe { hf_policy_new(0.5, 0.1, &mut pol) }, HfStatus::Ok);
    let mut p = 0.0;
    unsafe { hf_policy_p(pol, &mut p) };
    assert_eq!(p, 0.5);
    unsafe { hf_policy_adjust(pol, false) };
    unsafe { hf_policy_p(pol, &mut p) };
    assert_eq!(p, 0.3);
    let mut m = HfModule::StateBased;
    unsafe { hf_policy_choose(pol, 0.29, &mut m) };
    assert_eq!(m, HfModule::Stateless);
    unsafe { hf_policy_choose(pol, 0.3, &mut m) };
    assert_eq!(m, HfModule::StateBased);
    unsafe { hf_policy_free(pol) };

    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { hf_policy_new(0.1, 0.5, &mut bad) },
        HfStatus::Config
    );
}

#[test]
fn credit_matches_definition() {
    let mut c = 0.0;
    assert_eq!(unsafe { hf_credit(10.0, 7.5, &mut c) }, HfStatus::Ok);
    assert_eq!(c, 0.25);
    assert_eq!(
        unsafe { hf_credit(1.0, f64::NAN, &mut c) },
        HfStatus::Config
    );
    let v = unsafe { CStr::from_ptr(hf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/hf_aos.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "hf_run",
        "hf_last_error",
        "HF_STATUS_PANIC",
        "typedef struct HfProblem HfProblem",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .output()
        else {
            eprintln!("{compiler} not found, skipping");
            continue;
        };
        assert!(
            out.status.success(),
            "{compiler}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
