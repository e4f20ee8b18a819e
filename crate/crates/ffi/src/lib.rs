//! C ABI for `barron_gauge`.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`BgStatus`] and writes its result
//!   through an out-pointer, which is left untouched on failure.
//! * Domains and networks are opaque handles created by `bg_*_new` style
//!   functions and released with the matching `bg_*_free`. Freeing NULL is
//!   a no-op.
//! * After a non-OK status, [`bg_last_error`] returns a description of the
//!   failure on the calling thread.
//! * Panics never cross the boundary; they surface as `BG_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use barron_gauge::norms::SpectralEstimator;
use barron_gauge::{ActivationPower, Atom, DomainSpec, Error, NetworkDocument, TwoLayerNetwork};

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BgStatus {
    Ok = 0,
    InvalidArgument = 1,
    DimensionMismatch = 2,
    NotConverged = 3,
    NullPointer = 4,
    Parse = 5,
    Io = 6,
    Panic = 7,
}

/// Compact symmetric domain Ω.
pub struct BgDomain(DomainSpec);

/// Two-layer network `(1/m) Σ a_j max(w_j·x + b_j, 0)^s`.
pub struct BgNetwork(TwoLayerNetwork);

/// Weighted spectral moment of one neuron profile.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BgMomentEstimate {
    pub value: f64,
    pub truncation_xi: f64,
    pub tail_bound: f64,
    pub quad_err: f64,
    pub converged: bool,
}

/// Spectral Barron upper bound of a network.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BgSpectralBound {
    pub value: f64,
    pub err: f64,
    pub converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(BgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidInput(_) => BgStatus::InvalidArgument,
            Error::DimensionMismatch { .. } => BgStatus::DimensionMismatch,
            Error::NotConverged(_) => BgStatus::NotConverged,
            Error::Io(_) => BgStatus::Io,
            Error::Json(_) => BgStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: &str) -> Failure {
    Failure(BgStatus::InvalidArgument, msg.to_string())
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> BgStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (BgStatus::Ok, String::new()),
        Ok(Err(Failure(s, m))) => (s, m),
        Err(p) => {
            let what = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            (BgStatus::Panic, format!("internal panic: {what}"))
        }
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
    status
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(BgStatus::NullPointer, format!("{name} is NULL")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(BgStatus::NullPointer, format!("{name} is NULL")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure(BgStatus::NullPointer, format!("{name} is NULL")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn power(s: u32) -> Result<ActivationPower, Failure> {
    Ok(ActivationPower(s).require_positive()?)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
/// Passing `len = 0` queries the length only.
///
/// # Safety
/// `buf` must point to `len` writable bytes when `len > 0`.
#[no_mangle]
pub unsafe extern "C" fn bg_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if len > 0 && !buf.is_null() {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn new_domain(spec: DomainSpec, dom: *mut *mut BgDomain) -> BgStatus {
    guard(|| {
        let slot = unsafe { out(dom, "out")? };
        spec.validate()?;
        *slot = Box::into_raw(Box::new(BgDomain(spec)));
        Ok(())
    })
}

/// Box `∏ [-h_i, h_i]`.
///
/// # Safety
/// `halfwidths` must point to `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_domain_box(halfwidths: *const f64, dim: usize, out: *mut *mut BgDomain) -> BgStatus {
    match slice(halfwidths, dim, "halfwidths") {
        Ok(h) => new_domain(DomainSpec::Box { halfwidths: h.to_vec() }, out),
        Err(f) => guard(|| Err(f)),
    }
}

/// Euclidean ball of radius `radius` in dimension `dim`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_domain_ball(radius: f64, dim: usize, out: *mut *mut BgDomain) -> BgStatus {
    new_domain(DomainSpec::ball(radius, dim), out)
}

/// Convex hull of `n` vertices stored row-major (`n × dim`). The vertex
/// set must be closed under negation.
///
/// # Safety
/// `vertices` must point to `n * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_domain_polytope(
    vertices: *const f64,
    n: usize,
    dim: usize,
    out: *mut *mut BgDomain,
) -> BgStatus {
    let Some(total) = n.checked_mul(dim) else {
        return guard(|| Err(invalid("n * dim overflows")));
    };
    match slice(vertices, total, "vertices") {
        Ok(v) => {
            let rows = if dim == 0 { Vec::new() } else { v.chunks(dim).map(<[f64]>::to_vec).collect() };
            new_domain(DomainSpec::SymmetricPolytope { vertices: rows }, out)
        }
        Err(f) => guard(|| Err(f)),
    }
}

/// # Safety
/// `dom` must be NULL or a handle from a `bg_domain_*` constructor that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn bg_domain_free(dom: *mut BgDomain) {
    if !dom.is_null() {
        drop(Box::from_raw(dom));
    }
}

/// Dimension of the domain, 0 for NULL.
///
/// # Safety
/// `dom` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_domain_dim(dom: *const BgDomain) -> usize {
    dom.as_ref().map_or(0, |d| d.0.dim())
}

/// `‖v‖_Ω = sup_{x∈Ω} |v·x|`.
///
/// # Safety
/// `dom` must be a live handle, `v` must point to `len` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_support_norm(dom: *const BgDomain, v: *const f64, len: usize, out: *mut f64) -> BgStatus {
    guard(|| {
        let d = deref(dom, "domain")?;
        let v = slice(v, len, "v")?;
        let slot = self::out(out, "out")?;
        *slot = d.0.support_norm(v)?;
        Ok(())
    })
}

/// Network with `m` atoms in dimension `dim`: outer weights `a[m]`, inner
/// weights `w[m * dim]` row-major, biases `b[m]`.
///
/// # Safety
/// The arrays must have the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_network_new(
    s: u32,
    dim: usize,
    m: usize,
    a: *const f64,
    w: *const f64,
    b: *const f64,
    out: *mut *mut BgNetwork,
) -> BgStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        if dim == 0 {
            return Err(invalid("dim must be >= 1"));
        }
        let total = m.checked_mul(dim).ok_or_else(|| invalid("m * dim overflows"))?;
        let (a, w, b) = (slice(a, m, "a")?, slice(w, total, "w")?, slice(b, m, "b")?);
        let atoms = (0..m)
            .map(|j| Atom::new(a[j], w[j * dim..(j + 1) * dim].to_vec(), b[j]))
            .collect();
        let net = TwoLayerNetwork::new(ActivationPower(s), atoms)?;
        *slot = Box::into_raw(Box::new(BgNetwork(net)));
        Ok(())
    })
}

/// Parses a network document
/// `{"s": .., "domain": {..}, "atoms": [[a, [w..], b], ..]}` into a network
/// and its domain. Both handles are owned by the caller.
///
/// # Safety
/// `json` must be a NUL-terminated string; both out-pointers must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bg_network_from_json(
    json: *const c_char,
    net: *mut *mut BgNetwork,
    dom: *mut *mut BgDomain,
) -> BgStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure(BgStatus::NullPointer, "json is NULL".into()));
        }
        let (net_slot, dom_slot) = (out(net, "net")?, out(dom, "domain")?);
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Failure(BgStatus::Parse, "json is not valid UTF-8".into()))?;
        let (n, d) = NetworkDocument::from_json_str(text)?;
        *net_slot = Box::into_raw(Box::new(BgNetwork(n)));
        *dom_slot = Box::into_raw(Box::new(BgDomain(d)));
        Ok(())
    })
}

/// # Safety
/// `net` must be NULL or a live network handle.
#[no_mangle]
pub unsafe extern "C" fn bg_network_free(net: *mut BgNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Evaluates the network at `x`.
///
/// # Safety
/// `net` must be a live handle, `x` must point to `len` doubles and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_network_eval(net: *const BgNetwork, x: *const f64, len: usize, out: *mut f64) -> BgStatus {
    guard(|| {
        let n = &deref(net, "network")?.0;
        let x = slice(x, len, "x")?;
        let slot = self::out(out, "out")?;
        if len != n.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: n.input_dim(),
                got: len,
            }
            .into());
        }
        *slot = n.eval(x);
        Ok(())
    })
}

/// Path cost `(1/m) Σ |a_j| (‖w_j‖_Ω + |b_j|)^s`, an upper bound on the
/// Barron norm.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_barron_cost_upper(net: *const BgNetwork, dom: *const BgDomain, out: *mut f64) -> BgStatus {
    guard(|| {
        let (n, d) = (deref(net, "network")?, deref(dom, "domain")?);
        let slot = self::out(out, "out")?;
        *slot = barron_gauge::barron_cost_upper(&n.0, &d.0)?;
        Ok(())
    })
}

/// Upper bound on the spectral Barron norm of order `s - delta`,
/// `0 < delta < 1`, computed to relative tolerance `tol`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_spectral_upper(
    net: *const BgNetwork,
    dom: *const BgDomain,
    delta: f64,
    tol: f64,
    out: *mut BgSpectralBound,
) -> BgStatus {
    guard(|| {
        let (n, d) = (deref(net, "network")?, deref(dom, "domain")?);
        let slot = self::out(out, "out")?;
        let r = SpectralEstimator::new(tol)?.spectral_upper(&n.0, &d.0, delta)?;
        *slot = BgSpectralBound {
            value: r.value,
            err: r.err,
            converged: r.converged,
        };
        Ok(())
    })
}

/// The cutoff χ: 1 on `[-1, 1]`, 0 outside `(-2, 2)`, smooth in between.
#[no_mangle]
pub extern "C" fn bg_chi_eval(z: f64) -> f64 {
    barron_gauge::chi_eval(z)
}

/// `(1 - cos ξ) / (π ξ²)`, the transform of the triangular hat.
#[no_mangle]
pub extern "C" fn bg_ft_triangular(xi: f64) -> f64 {
    barron_gauge::ft_triangular(xi)
}

/// `ĥ(ξ) = (1/2π) ∫ χ(z) max(z+b, 0)^s e^{-iξz} dz`, written as real and
/// imaginary parts.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_ft_profile(s: u32, b: f64, xi: f64, rel_tol: f64, re: *mut f64, im: *mut f64) -> BgStatus {
    guard(|| {
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let v = barron_gauge::ft_profile(ActivationPower(s), b, xi, rel_tol)?;
        if !v.converged {
            return Err(Failure(
                BgStatus::NotConverged,
                format!("transform at xi={xi} missed rel_tol {rel_tol:e}"),
            ));
        }
        *re = v.value.re;
        *im = v.value.im;
        Ok(())
    })
}

/// `∫ (1+|v|)^order |ĥ(v)| dv` for the profile with power `s ≥ 1` and
/// bias `b`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_moment_integral(s: u32, b: f64, order: f64, tol: f64, out: *mut BgMomentEstimate) -> BgStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        let m = barron_gauge::moment_integral(power(s)?, b, order, tol)?;
        *slot = BgMomentEstimate {
            value: m.value,
            truncation_xi: m.truncation_xi,
            tail_bound: m.tail_bound,
            quad_err: m.quad_err,
            converged: m.converged,
        };
        Ok(())
    })
}

/// `S(R) = ∫_{|ξ|≤R} (1+|ξ|) t̂(ξ) dξ` for `R ≥ 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_truncated_triangular_moment(r: f64, out: *mut f64) -> BgStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = barron_gauge::truncated_triangular_moment(r)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status_codes() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, BgStatus::Panic);
        let mut buf = [0 as c_char; 64];
        unsafe { bg_last_error(buf.as_mut_ptr(), buf.len()) };
        let msg = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
        assert!(msg.contains("boom"));
    }

    #[test]
    fn errors_map_to_codes() {
        let f: Failure = Error::NotConverged("x".into()).into();
        assert_eq!(f.0, BgStatus::NotConverged);
        let f: Failure = Error::DimensionMismatch { expected: 2, got: 3 }.into();
        assert_eq!(f.0, BgStatus::DimensionMismatch);
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(bg_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
