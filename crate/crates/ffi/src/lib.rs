//! C ABI over `mcflow`.
//!
//! Objects cross the boundary as opaque handles that the caller owns and
//! releases with the matching `*_free`. Every fallible call returns an
//! [`McfStatus`]; on failure a message is kept per thread and can be read
//! with [`mcf_last_error`] until the next failing call on that thread.
//! Outputs are written only on success. Panics are caught and reported as
//! [`McfStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use mcflow::config::RunConfig;
use mcflow::flow::slice_ode_solve;
use mcflow::runner::{self, RunOutcome};
use mcflow::symbolic::{parse, Expr, Var, WarpedProfile};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    EvalError = 4,
    ProfileError = 5,
    ConfigError = 6,
    FlowError = 7,
    IoError = 8,
    InvalidArgument = 9,
    Panic = 10,
}

/// Differentiation variable for [`mcf_expr_diff`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McfVar {
    U = 0,
    X1 = 1,
    X2 = 2,
}

/// Parsed expression in `x1`, `x2`, `u`.
pub struct McfExpr(Expr);

/// Warped profile `φ` with its chart `Φ` anchored at the domain midpoint.
pub struct McfProfile(Arc<WarpedProfile>);

/// Finished run: summary, trace and final field.
pub struct McfRun(RunOutcome);

/// One trace row. Energy columns are NaN when the run has no energy weights.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McfSample {
    pub t: f64,
    pub sup_ut: f64,
    pub sup_omega: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub energy: f64,
    pub cumulative_dissipation: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(McfStatus, String);

impl Failure {
    fn new(status: McfStatus, message: impl ToString) -> Self {
        Failure(status, message.to_string())
    }
}

impl From<mcflow::Error> for Failure {
    fn from(e: mcflow::Error) -> Self {
        use mcflow::Error as E;
        let status = match &e {
            E::Config(_) => McfStatus::ConfigError,
            E::Eval(_) => McfStatus::EvalError,
            E::Profile(_) | E::Weight(_) => McfStatus::ProfileError,
            E::Flow(_) | E::Warped(_) => McfStatus::FlowError,
            E::Io { .. } => McfStatus::IoError,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> McfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => McfStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            McfStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(McfStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(McfStatus::NullPointer, format!("{what} is null")))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(McfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::new(McfStatus::InvalidUtf8, format!("{what}: {e}")))
}

/// Message of the last failing call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mcf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mcf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `text` into a new expression handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn mcf_expr_parse(text: *const c_char, out: *mut *mut McfExpr) -> McfStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let text = string(text, "text")?;
        let e = parse(text).map_err(|e| Failure::new(McfStatus::ParseError, e))?;
        *out = Box::into_raw(Box::new(McfExpr(e)));
        Ok(())
    })
}

/// Evaluates at base point `x[0..nx]` and height `u`.
///
/// # Safety
/// `expr` must come from this library; `x` must point to `nx` doubles
/// (it may be null when `nx == 0`).
#[no_mangle]
pub unsafe extern "C" fn mcf_expr_eval(
    expr: *const McfExpr,
    x: *const f64,
    nx: usize,
    u: f64,
    out: *mut f64,
) -> McfStatus {
    guard(|| {
        let e = borrow(expr, "expr")?;
        let out = out_ptr(out, "out")?;
        let x: &[f64] = if nx == 0 {
            &[]
        } else if x.is_null() {
            return Err(Failure::new(McfStatus::NullPointer, "x is null"));
        } else {
            std::slice::from_raw_parts(x, nx)
        };
        *out = e.0.eval(x, u).map_err(|e| Failure::new(McfStatus::EvalError, e))?;
        Ok(())
    })
}

/// Symbolic derivative as a new handle.
///
/// # Safety
/// `expr` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_expr_diff(expr: *const McfExpr, var: McfVar, out: *mut *mut McfExpr) -> McfStatus {
    guard(|| {
        let e = borrow(expr, "expr")?;
        let out = out_ptr(out, "out")?;
        let v = match var {
            McfVar::U => Var::U,
            McfVar::X1 => Var::X(0),
            McfVar::X2 => Var::X(1),
        };
        *out = Box::into_raw(Box::new(McfExpr(e.0.diff(v))));
        Ok(())
    })
}

/// Writes the canonical text of `expr` into `buf` (NUL-terminated, truncated
/// to `len`) and the full length without NUL into `needed`.
///
/// # Safety
/// `buf` must hold `len` bytes or be null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn mcf_expr_to_string(
    expr: *const McfExpr,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> McfStatus {
    guard(|| {
        let e = borrow(expr, "expr")?;
        let text = e.0.to_string();
        if let Some(n) = needed.as_mut() {
            *n = text.len();
        }
        if len > 0 {
            if buf.is_null() {
                return Err(Failure::new(McfStatus::NullPointer, "buf is null"));
            }
            let k = text.len().min(len - 1);
            ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, k);
            *buf.add(k) = 0;
        }
        Ok(())
    })
}

/// # Safety
/// `expr` must come from [`mcf_expr_parse`] or [`mcf_expr_diff`], or be null.
#[no_mangle]
pub unsafe extern "C" fn mcf_expr_free(expr: *mut McfExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Builds the profile of `phi` (a function of `u` only) on `[lo, hi]`.
///
/// # Safety
/// `phi` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_profile_new(
    phi: *const McfExpr,
    lo: f64,
    hi: f64,
    out: *mut *mut McfProfile,
) -> McfStatus {
    guard(|| {
        let phi = borrow(phi, "phi")?;
        let out = out_ptr(out, "out")?;
        if !(lo < hi) {
            return Err(Failure::new(McfStatus::InvalidArgument, format!("need lo < hi, got [{lo}, {hi}]")));
        }
        let p = WarpedProfile::centered(phi.0.clone(), (lo, hi))
            .map_err(|e| Failure::new(McfStatus::ProfileError, e))?;
        *out = Box::into_raw(Box::new(McfProfile(Arc::new(p))));
        Ok(())
    })
}

/// Chart value `Φ(u)`.
///
/// # Safety
/// `profile` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_profile_transform(profile: *const McfProfile, u: f64, out: *mut f64) -> McfStatus {
    guard(|| {
        let p = borrow(profile, "profile")?;
        let out = out_ptr(out, "out")?;
        *out = p.0.transform(u).map_err(|e| Failure::new(McfStatus::ProfileError, e))?;
        Ok(())
    })
}

/// Height `Φ⁻¹(y)`.
///
/// # Safety
/// `profile` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_profile_inverse(profile: *const McfProfile, y: f64, out: *mut f64) -> McfStatus {
    guard(|| {
        let p = borrow(profile, "profile")?;
        let out = out_ptr(out, "out")?;
        *out = p.0.inverse(y).map_err(|e| Failure::new(McfStatus::ProfileError, e))?;
        Ok(())
    })
}

/// # Safety
/// `profile` must come from [`mcf_profile_new`], or be null.
#[no_mangle]
pub unsafe extern "C" fn mcf_profile_free(profile: *mut McfProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Height at `t_end` of the slice starting at `r0`, on a `dim`-torus.
///
/// # Safety
/// `profile` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_slice_ode(
    profile: *const McfProfile,
    dim: u32,
    r0: f64,
    t_end: f64,
    dt: f64,
    out: *mut f64,
) -> McfStatus {
    guard(|| {
        let p = borrow(profile, "profile")?;
        let out = out_ptr(out, "out")?;
        if !(dim == 1 || dim == 2) || !(dt > 0.0) || !(t_end >= 0.0) {
            return Err(Failure::new(
                McfStatus::InvalidArgument,
                format!("need dim in {{1, 2}}, dt > 0, t_end >= 0 (got {dim}, {dt}, {t_end})"),
            ));
        }
        let traj = slice_ode_solve(&p.0, dim as usize, r0, t_end, dt)
            .map_err(|e| Failure::new(McfStatus::ProfileError, e))?;
        *out = traj.final_height();
        Ok(())
    })
}

/// Evaluates the hypotheses of a TOML run config; `passed` receives 1 or 0.
///
/// # Safety
/// `config` must be a NUL-terminated string and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_check_config(config: *const c_char, passed: *mut i32) -> McfStatus {
    guard(|| {
        let text = string(config, "config")?;
        let passed = out_ptr(passed, "passed")?;
        let loaded = RunConfig::from_toml(text, &[]).map_err(mcflow::Error::from)?;
        *passed = runner::check(&loaded)?.passed() as i32;
        Ok(())
    })
}

/// Runs a TOML config, writing the run directory to `out_dir`. A run that
/// ends in divergence or a failed monitor still succeeds here; inspect
/// [`mcf_run_exit_code`].
///
/// # Safety
/// `config` and `out_dir` must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_run_config(
    config: *const c_char,
    out_dir: *const c_char,
    skip_check: bool,
    out: *mut *mut McfRun,
) -> McfStatus {
    guard(|| {
        let text = string(config, "config")?;
        let dir = string(out_dir, "out_dir")?;
        let out = out_ptr(out, "out")?;
        let loaded = RunConfig::from_toml(text, &[]).map_err(mcflow::Error::from)?;
        let outcome = runner::run(&loaded, Path::new(dir), skip_check)?;
        *out = Box::into_raw(Box::new(McfRun(outcome)));
        Ok(())
    })
}

/// Exit code the CLI would report for this run.
///
/// # Safety
/// `run` must come from [`mcf_run_config`].
#[no_mangle]
pub unsafe extern "C" fn mcf_run_exit_code(run: *const McfRun) -> i32 {
    run.as_ref().map_or(-1, |r| r.0.status().code())
}

/// Number of trace samples; zero when the run stopped at the hypotheses.
///
/// # Safety
/// `run` must come from [`mcf_run_config`].
#[no_mangle]
pub unsafe extern "C" fn mcf_run_sample_count(run: *const McfRun) -> usize {
    run.as_ref()
        .and_then(|r| r.0.trace.as_ref())
        .map_or(0, |t| t.samples.len())
}

/// # Safety
/// `run` must come from [`mcf_run_config`] and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mcf_run_sample(run: *const McfRun, index: usize, out: *mut McfSample) -> McfStatus {
    guard(|| {
        let r = borrow(run, "run")?;
        let out = out_ptr(out, "out")?;
        let s = r
            .0
            .trace
            .as_ref()
            .and_then(|t| t.samples.get(index))
            .ok_or_else(|| Failure::new(McfStatus::InvalidArgument, format!("no sample {index}")))?;
        *out = McfSample {
            t: s.t,
            sup_ut: s.sup_ut,
            sup_omega: s.sup_omega,
            min_u: s.min_u,
            max_u: s.max_u,
            energy: s.energy.unwrap_or(f64::NAN),
            cumulative_dissipation: s.cumulative_dissipation.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Copies the final flow variable (chart values for warped kinds) into
/// `buf`, which must hold the grid size reported through `needed`. Call with
/// `len == 0` to query the size.
///
/// # Safety
/// `run` must come from [`mcf_run_config`]; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mcf_run_final_field(
    run: *const McfRun,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> McfStatus {
    guard(|| {
        let r = borrow(run, "run")?;
        let trace =
            r.0.trace
                .as_ref()
                .ok_or_else(|| Failure::new(McfStatus::InvalidArgument, "run stopped before the flow"))?;
        let values = trace.final_field.values();
        if let Some(n) = needed.as_mut() {
            *n = values.len();
        }
        if len == 0 {
            return Ok(());
        }
        if len < values.len() {
            return Err(Failure::new(
                McfStatus::InvalidArgument,
                format!("buffer holds {len}, need {}", values.len()),
            ));
        }
        if buf.is_null() {
            return Err(Failure::new(McfStatus::NullPointer, "buf is null"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// # Safety
/// `run` must come from [`mcf_run_config`], or be null.
#[no_mangle]
pub unsafe extern "C" fn mcf_run_free(run: *mut McfRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
