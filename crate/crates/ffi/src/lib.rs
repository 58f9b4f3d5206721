//! C ABI over the `jensen_gap` library.
//!
//! Every fallible call returns a [`JgStatus`]. On failure a message is kept
//! per thread and can be read with [`jg_last_error_message`]. Strings
//! handed out by the library are released with [`jg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use jensen_gap::algebra::{HermitianElement, SpectralInterval};
use jensen_gap::bounds::{all_chains, ChainParams, InstanceSpec};
use jensen_gap::functional::StateFunctional;
use jensen_gap::harness::{run_campaign, CampaignConfig, InstanceFile};
use jensen_gap::matrix::CMatrix;
use jensen_gap::registry::ConvexFunctionSpec;
use jensen_gap::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    SpectrumOutOfWindow = 5,
    OutsideDomain = 6,
    InvalidConfig = 7,
    Internal = 8,
}

/// Opaque instance: an element, a state, a convex function and a window,
/// plus the chain parameters.
pub struct JgInstance {
    spec: InstanceSpec,
    params: ChainParams,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> JgStatus {
    match e {
        Error::Parse(_) => JgStatus::Parse,
        Error::SpectrumOutOfWindow { .. } => JgStatus::SpectrumOutOfWindow,
        Error::WindowOutsideDomain { .. } | Error::NonFiniteFunctionValue { .. } => JgStatus::OutsideDomain,
        Error::InvalidConfig(_) => JgStatus::InvalidConfig,
        Error::InvariantViolation(_) | Error::Io(_) => JgStatus::Internal,
        _ => JgStatus::InvalidInput,
    }
}

struct Failure(JgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> JgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => JgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside jensen_gap");
            JgStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(JgStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(JgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn null(what: &str) -> Failure {
    Failure(JgStatus::NullArgument, format!("{what} is null"))
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(JgStatus::Internal, "interior nul in output".into()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn load(file: &InstanceFile) -> Result<JgInstance, Error> {
    let c = HermitianElement::try_from(file.c.clone())?;
    let functional = StateFunctional::try_from(file.functional.clone())?;
    let function: ConvexFunctionSpec = file.function.parse()?;
    let window = SpectralInterval::try_from(file.window)?;
    let spec = InstanceSpec::new(c, functional, function, window)?;
    let defaults = ChainParams::defaults_for(&spec);
    let params = ChainParams {
        taylor_point: file.taylor_point.unwrap_or(defaults.taylor_point),
        mccarthy_exponent: file.mccarthy_exponent.unwrap_or(defaults.mccarthy_exponent),
    };
    Ok(JgInstance { spec, params })
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn jg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn jg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds an instance from the JSON instance format used by `replay`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jg_instance_from_json(json: *const c_char, out: *mut *mut JgInstance) -> JgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(json, "json")?;
        let inst = load(&InstanceFile::from_json(text)?)?;
        *out = Box::into_raw(Box::new(inst));
        Ok(())
    })
}

/// Builds an instance under the normalized trace from row-major real and
/// imaginary parts of a `dim x dim` matrix. `im` may be null for a real
/// matrix.
///
/// # Safety
/// `re` (and `im` when not null) must point to `dim * dim` doubles,
/// `function` must be a nul-terminated selector and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jg_instance_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    function: *const c_char,
    m: f64,
    big_m: f64,
    out: *mut *mut JgInstance,
) -> JgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if re.is_null() {
            return Err(null("re"));
        }
        if dim == 0 {
            return Err(Error::EmptyInput.into());
        }
        let n = dim
            .checked_mul(dim)
            .ok_or_else(|| Failure(JgStatus::InvalidInput, "dimension overflows".into()))?;
        let re = std::slice::from_raw_parts(re, n);
        let im = if im.is_null() { None } else { Some(std::slice::from_raw_parts(im, n)) };
        let a = CMatrix::from_fn(dim, |i, j| Complex64::new(re[i * dim + j], im.map_or(0.0, |v| v[i * dim + j])));
        let c = HermitianElement::new(a)?;
        let function: ConvexFunctionSpec = read_str(function, "function")?.parse()?;
        let window = SpectralInterval::new(m, big_m)?;
        let spec = InstanceSpec::new(c, StateFunctional::NormalizedTrace, function, window)?;
        let params = ChainParams::defaults_for(&spec);
        *out = Box::into_raw(Box::new(JgInstance { spec, params }));
        Ok(())
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jg_instance_free(inst: *mut JgInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Dimension of the instance's matrix, or 0 for null.
///
/// # Safety
/// `inst` must be null or a live instance.
#[no_mangle]
pub unsafe extern "C" fn jg_instance_dim(inst: *const JgInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.spec.c().dim())
}

/// Overrides the Taylor point used by the tangent chains.
///
/// # Safety
/// `inst` must be a live instance.
#[no_mangle]
pub unsafe extern "C" fn jg_instance_set_taylor_point(inst: *mut JgInstance, t: f64) -> JgStatus {
    guard(|| {
        let inst = inst.as_mut().ok_or_else(|| null("inst"))?;
        if !inst.spec.window().contains(t) {
            let w = inst.spec.window();
            return Err(Error::TOutOfWindow { t, m: w.m(), big_m: w.M() }.into());
        }
        inst.params.taylor_point = t;
        Ok(())
    })
}

/// Writes `psi(f(c)) - f(psi(c))`.
///
/// # Safety
/// `inst` must be a live instance and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jg_instance_jensen_gap(inst: *const JgInstance, out: *mut f64) -> JgStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = inst.spec.jensen_gap()?;
        Ok(())
    })
}

/// Evaluates every chain. `chains_json` receives a JSON array to be freed
/// with [`jg_string_free`]; `violated` (may be null) receives the number
/// of violated chains.
///
/// # Safety
/// `inst` must be a live instance and `chains_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jg_instance_evaluate(
    inst: *const JgInstance,
    chains_json: *mut *mut c_char,
    violated: *mut usize,
) -> JgStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        if chains_json.is_null() {
            return Err(null("chains_json"));
        }
        let chains = all_chains(&inst.spec, &inst.params);
        if !violated.is_null() {
            *violated = chains.iter().filter(|c| c.status.is_violated()).count();
        }
        give_string(serde_json::to_string(&chains).map_err(Error::from)?, chains_json)
    })
}

/// Runs a campaign from a JSON configuration. `report_json` receives the
/// report, `violations` (may be null) the violation count.
///
/// # Safety
/// `config_json` must be a nul-terminated string and `report_json` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn jg_run_campaign(
    config_json: *const c_char,
    report_json: *mut *mut c_char,
    violations: *mut u64,
) -> JgStatus {
    guard(|| {
        if report_json.is_null() {
            return Err(null("report_json"));
        }
        let cfg: CampaignConfig = serde_json::from_str(read_str(config_json, "config_json")?).map_err(Error::from)?;
        let report = run_campaign(&cfg)?;
        if !violations.is_null() {
            *violations = report.violation_count();
        }
        give_string(report.to_json()?, report_json)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
