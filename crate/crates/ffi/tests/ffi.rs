use std::ffi::{c_char, CStr, CString};
use std::process::Command;
use std::ptr;

use mcflow_ffi::*;

fn last_error() -> String {
    let p = mcf_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(text: &str) -> *mut McfExpr {
    let c = CString::new(text).unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { mcf_expr_parse(c.as_ptr(), &mut e) }, McfStatus::Ok);
    e
}

#[test]
fn expressions_parse_evaluate_and_differentiate() {
    let e = parse("u^2*sin(x1)");
    let mut v = 0.0;
    let x = [std::f64::consts::FRAC_PI_2];
    assert_eq!(unsafe { mcf_expr_eval(e, x.as_ptr(), 1, 3.0, &mut v) }, McfStatus::Ok);
    assert_eq!(v, 9.0);

    let mut d = ptr::null_mut();
    assert_eq!(unsafe { mcf_expr_diff(e, McfVar::U, &mut d) }, McfStatus::Ok);
    assert_eq!(unsafe { mcf_expr_eval(d, x.as_ptr(), 1, 3.0, &mut v) }, McfStatus::Ok);
    assert_eq!(v, 6.0);

    let mut needed = 0;
    let mut buf = [0 as c_char; 64];
    assert_eq!(unsafe { mcf_expr_to_string(e, buf.as_mut_ptr(), buf.len(), &mut needed) }, McfStatus::Ok);
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    assert_eq!(text.len(), needed);
    let again = parse(text);
    let mut w = 0.0;
    assert_eq!(unsafe { mcf_expr_eval(again, x.as_ptr(), 1, 3.0, &mut w) }, McfStatus::Ok);
    assert_eq!(w, 9.0);

    unsafe {
        mcf_expr_free(e);
        mcf_expr_free(d);
        mcf_expr_free(again);
        mcf_expr_free(ptr::null_mut());
    }
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new("sin(").unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { mcf_expr_parse(bad.as_ptr(), &mut e) }, McfStatus::ParseError);
    assert!(e.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { mcf_expr_parse(ptr::null(), &mut e) }, McfStatus::NullPointer);
    assert_eq!(last_error(), "text is null");

    let log = parse("log(u)");
    let mut v = 0.0;
    assert_eq!(unsafe { mcf_expr_eval(log, ptr::null(), 0, -1.0, &mut v) }, McfStatus::EvalError);
    unsafe { mcf_expr_free(log) };
}

#[test]
fn profile_chart_matches_gudermannian() {
    let phi = parse("cosh(u)");
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { mcf_profile_new(phi, -1.0, 1.0, &mut p) }, McfStatus::Ok);
    let (mut y, mut u) = (0.0, 0.0);
    assert_eq!(unsafe { mcf_profile_transform(p, 0.7, &mut y) }, McfStatus::Ok);
    let gd = 2.0 * (0.35f64).tanh().atan();
    assert!((y - gd).abs() < 1e-10, "{y} vs {gd}");
    assert_eq!(unsafe { mcf_profile_inverse(p, y, &mut u) }, McfStatus::Ok);
    assert!((u - 0.7).abs() < 1e-10);
    assert_eq!(unsafe { mcf_profile_transform(p, 3.0, &mut y) }, McfStatus::ProfileError);

    let mut r = 0.0;
    assert_eq!(unsafe { mcf_slice_ode(p, 1, 0.5, 0.5, 1e-3, &mut r) }, McfStatus::Ok);
    // r' = -sinh r integrates to tanh(r/2) = tanh(r0/2) e^{-t}
    let exact = 2.0 * ((0.25f64).tanh() * (-0.5f64).exp()).atanh();
    assert!((r - exact).abs() < 1e-10, "{r} vs {exact}");
    assert_eq!(unsafe { mcf_slice_ode(p, 3, 0.5, 0.5, 1e-3, &mut r) }, McfStatus::InvalidArgument);

    let bad = parse("u - 2");
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { mcf_profile_new(bad, -1.0, 1.0, &mut q) }, McfStatus::ProfileError);
    assert!(q.is_null());
    unsafe {
        mcf_profile_free(p);
        mcf_expr_free(phi);
        mcf_expr_free(bad);
    }
}

const SMALL: &str = r#"
kind = "product_flow"
[grid]
dim = 1
resolution = [32]
[data]
h = "-u"
g = "0"
slab = [-1.0, 1.0]
u_init = "0.3 + 0.1*sin(x1)"
"#;

#[test]
fn config_check_and_run() {
    let config = CString::new(SMALL).unwrap();
    let mut passed = -1;
    assert_eq!(unsafe { mcf_check_config(config.as_ptr(), &mut passed) }, McfStatus::Ok);
    assert_eq!(passed, 1);

    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut run = ptr::null_mut();
    assert_eq!(unsafe { mcf_run_config(config.as_ptr(), out.as_ptr(), false, &mut run) }, McfStatus::Ok);
    assert_eq!(unsafe { mcf_run_exit_code(run) }, 0);
    let n = unsafe { mcf_run_sample_count(run) };
    assert!(n > 2);
    let mut s = McfSample {
        t: 0.0,
        sup_ut: 0.0,
        sup_omega: 0.0,
        min_u: 0.0,
        max_u: 0.0,
        energy: 0.0,
        cumulative_dissipation: 0.0,
    };
    assert_eq!(unsafe { mcf_run_sample(run, n - 1, &mut s) }, McfStatus::Ok);
    assert!(s.sup_ut < 1e-8 && s.energy.is_finite());
    assert_eq!(unsafe { mcf_run_sample(run, n, &mut s) }, McfStatus::InvalidArgument);

    let mut needed = 0;
    assert_eq!(unsafe { mcf_run_final_field(run, ptr::null_mut(), 0, &mut needed) }, McfStatus::Ok);
    assert_eq!(needed, 32);
    let mut buf = vec![f64::NAN; needed];
    assert_eq!(
        unsafe { mcf_run_final_field(run, buf.as_mut_ptr(), buf.len(), ptr::null_mut()) },
        McfStatus::Ok
    );
    assert!(buf.iter().all(|v| v.abs() < 1e-6));
    assert!(dir.path().join("trace.csv").exists());
    unsafe { mcf_run_free(run) };

    let broken = CString::new(SMALL.replace("slab", "slap")).unwrap();
    assert_eq!(unsafe { mcf_check_config(broken.as_ptr(), &mut passed) }, McfStatus::ConfigError);
}

#[test]
fn header_is_current_and_compiles() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/mcflow.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["mcf_expr_parse", "mcf_run_config", "mcf_last_error", "MCF_STATUS_PANIC"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let probe = "#include \"mcflow.h\"\nint main(void) { McfExpr *e = 0; return mcf_expr_parse(\"u\", &e) == MCF_STATUS_OK ? 0 : 1; }\n";
    let dir = tempfile::tempdir().unwrap();
    for (compiler, file) in [("cc", "probe.c"), ("c++", "probe.cpp")] {
        let src = dir.path().join(file);
        std::fs::write(&src, probe).unwrap();
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
            .arg(&src)
            .status();
        match status {
            Ok(s) => assert!(s.success(), "{compiler} rejected the header"),
            Err(_) => eprintln!("{compiler} not found; skipping"),
        }
    }
}
