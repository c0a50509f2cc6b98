//! C ABI over `ssm-core`.
//!
//! Every function returns an [`SsmStatus`]; results go through out-pointers. On failure the
//! message is kept per thread and read with [`ssm_last_error_message`]. Graphs are opaque
//! handles created by [`ssm_graph_from_edge_list`] and released with [`ssm_graph_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use ssm_core::cluster::{ClusterEngine, SeriesMethod};
use ssm_core::exact::Oracle;
use ssm_core::graph::parse_graph;
use ssm_core::interpolation::{approx_cond_prob, ApproxOptions};
use ssm_core::io::parse_hardcore_boundary;
use ssm_core::{Error, Graph};

/// Status codes. `SSM_STATUS_OK` is zero; everything else has a message.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    TooLarge = 5,
    NearZeroDenominator = 6,
    ZeroRegionViolation = 7,
    DepthExceeded = 8,
    Hypothesis = 9,
    BufferTooSmall = 10,
    Overflow = 11,
    Panic = 12,
}

/// Opaque graph handle.
pub struct SsmGraph {
    graph: Graph,
}

/// Result of [`ssm_approx_cond_prob`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SsmApprox {
    pub value: f64,
    pub error_bound: f64,
    pub m: f64,
    pub radius: f64,
    pub depth: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SsmStatus {
    match e {
        Error::Parse { .. } => SsmStatus::Parse,
        Error::VertexOutOfRange { .. } | Error::InvalidBoundary(_) | Error::Contract(_) => {
            SsmStatus::InvalidArgument
        }
        Error::TooLarge { .. } => SsmStatus::TooLarge,
        Error::NearZeroDenominator { .. } => SsmStatus::NearZeroDenominator,
        Error::ZeroRegionViolation { .. } => SsmStatus::ZeroRegionViolation,
        Error::DepthExceeded { .. } => SsmStatus::DepthExceeded,
        Error::Hypothesis(_) => SsmStatus::Hypothesis,
        Error::Overflow(_) => SsmStatus::Overflow,
    }
}

struct Fail(SsmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SsmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SsmStatus::Ok
        }
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SsmStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(SsmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SsmStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn graph<'a>(g: *const SsmGraph) -> Result<&'a Graph, Fail> {
    g.as_ref().map(|h| &h.graph).ok_or_else(|| null("graph"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or an empty string. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ssm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ssm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses the edge-list format (vertex count, then one `u v` pair per line).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out_graph` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssm_graph_from_edge_list(text: *const c_char, out_graph: *mut *mut SsmGraph) -> SsmStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        let g = parse_graph(unsafe { self::text(text, "text")? })?;
        *slot = Box::into_raw(Box::new(SsmGraph { graph: g }));
        Ok(())
    })
}

/// Releases a handle. Null is accepted and ignored.
///
/// # Safety
/// `g` must come from [`ssm_graph_from_edge_list`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ssm_graph_free(g: *mut SsmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out_n` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssm_graph_vertex_count(g: *const SsmGraph, out_n: *mut usize) -> SsmStatus {
    guard(|| {
        *out(out_n, "out_n")? = unsafe { graph(g)? }.n();
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle and `out_m` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ssm_graph_edge_count(g: *const SsmGraph, out_m: *mut usize) -> SsmStatus {
    guard(|| {
        *out(out_m, "out_m")? = unsafe { graph(g)? }.edge_count();
        Ok(())
    })
}

/// Coefficients of the independence polynomial, constant term first. `out_len` always gets
/// the full length; if it exceeds `capacity`, nothing is written and `BufferTooSmall` is returned.
///
/// # Safety
/// `coeffs` must have room for `capacity` values (it may be null when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn ssm_ind_poly(
    g: *const SsmGraph,
    coeffs: *mut u64,
    capacity: usize,
    out_len: *mut usize,
) -> SsmStatus {
    guard(|| {
        let len = out(out_len, "out_len")?;
        let p = Oracle::default().ind_poly(unsafe { graph(g)? })?;
        *len = p.coefficients.len();
        if p.coefficients.len() > capacity {
            return Err(Fail(
                SsmStatus::BufferTooSmall,
                format!("need {} coefficients, buffer holds {capacity}", p.coefficients.len()),
            ));
        }
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        std::ptr::copy_nonoverlapping(p.coefficients.as_ptr(), coeffs, p.coefficients.len());
        Ok(())
    })
}

/// `Z_G(lambda)` at the complex activity `re + i im`.
///
/// # Safety
/// `g` must be a live handle and the out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn ssm_eval_z(
    g: *const SsmGraph,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SsmStatus {
    guard(|| {
        let (or, oi) = (out(out_re, "out_re")?, out(out_im, "out_im")?);
        let z = Oracle::default().eval_z(unsafe { graph(g)? }, Complex64::new(re, im))?;
        (*or, *oi) = (z.re, z.im);
        Ok(())
    })
}

/// `P_{G,v}(lambda) = lambda Z_{G - N[v]} / Z_G`.
///
/// # Safety
/// `g` must be a live handle and the out-pointers valid.
#[no_mangle]
pub unsafe extern "C" fn ssm_ratio_p(
    g: *const SsmGraph,
    v: usize,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SsmStatus {
    guard(|| {
        let (or, oi) = (out(out_re, "out_re")?, out(out_im, "out_im")?);
        let p = Oracle::default().ratio_p(unsafe { graph(g)? }, v, Complex64::new(re, im))?;
        (*or, *oi) = (p.re, p.im);
        Ok(())
    })
}

/// Taylor coefficients `0..=order` of `P_{G,v}`. `method` is 0 for the cluster expansion and
/// 1 for polynomial division. Both arrays need room for `order + 1` values.
///
/// # Safety
/// `g` must be a live handle; `out_re` and `out_im` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn ssm_ratio_series(
    g: *const SsmGraph,
    v: usize,
    order: usize,
    method: u32,
    out_re: *mut f64,
    out_im: *mut f64,
    capacity: usize,
) -> SsmStatus {
    guard(|| {
        let method = match method {
            0 => SeriesMethod::Cluster,
            1 => SeriesMethod::Division,
            other => return Err(Fail(SsmStatus::InvalidArgument, format!("unknown series method {other}"))),
        };
        if capacity < order + 1 {
            return Err(Fail(
                SsmStatus::BufferTooSmall,
                format!("need {} coefficients, buffer holds {capacity}", order + 1),
            ));
        }
        if out_re.is_null() || out_im.is_null() {
            return Err(null("coefficient buffer"));
        }
        let s = ClusterEngine::default().ratio_series(unsafe { graph(g)? }, v, order, method)?;
        for k in 0..=order {
            *out_re.add(k) = s.coeff(k).re;
            *out_im.add(k) = s.coeff(k).im;
        }
        Ok(())
    })
}

/// Exact `Pr[v in I | sigma]`. `boundary` uses the "vertex value" line format; null means
/// no boundary.
///
/// # Safety
/// `g` must be a live handle, `boundary` null or NUL-terminated, `out_p` valid.
#[no_mangle]
pub unsafe extern "C" fn ssm_cond_prob(
    g: *const SsmGraph,
    v: usize,
    boundary: *const c_char,
    lambda: f64,
    out_p: *mut f64,
) -> SsmStatus {
    guard(|| {
        let slot = out(out_p, "out_p")?;
        let sigma = match boundary.is_null() {
            true => Default::default(),
            false => parse_hardcore_boundary(unsafe { text(boundary, "boundary")? })?,
        };
        *slot = Oracle::default().cond_prob_hardcore(unsafe { graph(g)? }, v, &sigma, lambda)?;
        Ok(())
    })
}

/// Interpolated `Pr[v in I | sigma]` to within `eps_target`, through a strip of width
/// `eps_region` around `[0, lambda]`.
///
/// # Safety
/// `g` must be a live handle, `boundary` null or NUL-terminated, `out_result` valid.
#[no_mangle]
pub unsafe extern "C" fn ssm_approx_cond_prob(
    g: *const SsmGraph,
    v: usize,
    boundary: *const c_char,
    lambda: f64,
    eps_target: f64,
    eps_region: f64,
    out_result: *mut SsmApprox,
) -> SsmStatus {
    guard(|| {
        let slot = out(out_result, "out_result")?;
        let sigma = match boundary.is_null() {
            true => Default::default(),
            false => parse_hardcore_boundary(unsafe { text(boundary, "boundary")? })?,
        };
        let r = approx_cond_prob(
            &Oracle::default(),
            unsafe { graph(g)? },
            v,
            &sigma,
            lambda,
            eps_target,
            eps_region,
            &ApproxOptions::default(),
        )?;
        *slot = SsmApprox {
            value: r.value,
            error_bound: r.error_bound,
            m: r.m,
            radius: r.radius,
            depth: r.depth,
        };
        Ok(())
    })
}
