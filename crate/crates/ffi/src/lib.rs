//! C ABI over the verification workbench.
//!
//! Every function returns an [`HvwStatus`]. On failure the message is
//! available from [`hvw_last_error`] on the calling thread. Handles are opaque
//! and must be released with the matching `_free` function.
//!
//! Complex numbers cross the boundary as interleaved `(re, im)` doubles; an
//! orbit point is 24 doubles, `x₁…x₆` then `y₁…y₆`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hvw_core::calculus::Polynomial;
use hvw_core::quadric::{HyperellipticConfig, OrbitPoint, QuadricSystem};
use hvw_core::semiflat::{build_triple, closedness_residuals, quaternion_residual, Prepotential};
use hvw_core::workbench::{self, RunConfig, VerificationReport};
use hvw_core::Error;
use num_complex::Complex64;

/// Number of doubles in an orbit point.
pub const HVW_POINT_LEN: usize = 24;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HvwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque genus-2 quadric system.
pub struct HvwQuadric(QuadricSystem);

/// Opaque verification report.
pub struct HvwReport {
    report: VerificationReport,
    json: CString,
    table: CString,
    names: Vec<CString>,
}

/// Borrowed view of one check record; `name` lives as long as the report.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HvwRecord {
    pub name: *const c_char,
    pub residual: f64,
    pub passed: bool,
    pub count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HvwStatus {
    match e {
        Error::Usage(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::InvalidParameters(_)
        | Error::DimensionMismatch { .. }
        | Error::NotAntisymmetric(_) => HvwStatus::InvalidArgument,
        _ => HvwStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), HvwStatus>) -> HvwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HvwStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            HvwStatus::Panic
        }
    }
}

fn fail(s: HvwStatus, msg: &str) -> HvwStatus {
    set_error(msg);
    s
}

fn check<T>(r: hvw_core::Result<T>) -> Result<T, HvwStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), HvwStatus> {
    if p.is_null() {
        Err(fail(HvwStatus::NullPointer, &format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn complexes<const N: usize>(v: &[f64]) -> [Complex64; N] {
    std::array::from_fn(|i| Complex64::new(v[2 * i], v[2 * i + 1]))
}

fn write_complexes(out: &mut [f64], v: &[Complex64]) {
    for (k, c) in v.iter().enumerate() {
        out[2 * k] = c.re;
        out[2 * k + 1] = c.im;
    }
}

unsafe fn orbit_point(point: *const f64) -> Result<OrbitPoint, HvwStatus> {
    non_null(point, "point")?;
    let v = std::slice::from_raw_parts(point, HVW_POINT_LEN);
    if v.iter().any(|x| !x.is_finite()) {
        return Err(fail(HvwStatus::InvalidArgument, "point has non-finite entries"));
    }
    Ok(OrbitPoint::new(complexes(&v[..12]), complexes(&v[12..])))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn hvw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a system from six distinct branch points `mu` (12 doubles).
///
/// # Safety
/// `mu` must point to 12 readable doubles and `out` to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn hvw_quadric_new(mu: *const f64, out: *mut *mut HvwQuadric) -> HvwStatus {
    guard(|| {
        non_null(mu, "mu")?;
        non_null(out, "out")?;
        let v = std::slice::from_raw_parts(mu, 12);
        let cfg = check(HyperellipticConfig::new(complexes(v)))?;
        *out = Box::into_raw(Box::new(HvwQuadric(QuadricSystem::new(cfg))));
        Ok(())
    })
}

/// # Safety
/// `q` must be null or a handle from [`hvw_quadric_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hvw_quadric_free(q: *mut HvwQuadric) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Seeded admissible point written to `point_out` (24 doubles).
///
/// # Safety
/// `q` must be a live handle and `point_out` must have room for 24 doubles.
#[no_mangle]
pub unsafe extern "C" fn hvw_quadric_sample(q: *const HvwQuadric, seed: u64, point_out: *mut f64) -> HvwStatus {
    guard(|| {
        non_null(q, "quadric")?;
        non_null(point_out, "point_out")?;
        let pt = check((*q).0.sample_admissible(seed))?;
        write_complexes(std::slice::from_raw_parts_mut(point_out, HVW_POINT_LEN), &pt.coords());
        Ok(())
    })
}

/// The six Hamiltonians at `point`, written as 12 doubles.
///
/// # Safety
/// `point` must hold 24 doubles and `out` must have room for 12.
#[no_mangle]
pub unsafe extern "C" fn hvw_quadric_hamiltonians(q: *const HvwQuadric, point: *const f64, out: *mut f64) -> HvwStatus {
    guard(|| {
        non_null(q, "quadric")?;
        non_null(out, "out")?;
        let pt = orbit_point(point)?;
        let f = hvw_core::quadric::hamiltonians((*q).0.config(), &pt);
        write_complexes(std::slice::from_raw_parts_mut(out, 12), &f);
        Ok(())
    })
}

/// Largest reduced bracket `|{f_i, f_j}|` at an admissible `point`.
///
/// # Safety
/// `point` must hold 24 doubles and `max_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hvw_quadric_commutation(q: *const HvwQuadric, point: *const f64, max_out: *mut f64) -> HvwStatus {
    guard(|| {
        non_null(q, "quadric")?;
        non_null(max_out, "max_out")?;
        let pt = orbit_point(point)?;
        let m = check((*q).0.commutation_matrix(&pt))?;
        *max_out = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Ok(())
    })
}

/// Common roots of the critical-locus polynomials. Writes up to `capacity`
/// roots (2 doubles each) and the total count to `count_out`; returns
/// `BufferTooSmall` when the count exceeds `capacity`.
///
/// # Safety
/// `point` must hold 24 doubles, `roots_out` must have room for
/// `2 * capacity` doubles (may be null when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn hvw_quadric_critical_locus(
    q: *const HvwQuadric,
    point: *const f64,
    tol: f64,
    roots_out: *mut f64,
    capacity: usize,
    count_out: *mut usize,
) -> HvwStatus {
    guard(|| {
        non_null(q, "quadric")?;
        non_null(count_out, "count_out")?;
        if !(tol.is_finite() && tol > 0.0) {
            return Err(fail(HvwStatus::InvalidArgument, "tol must be positive and finite"));
        }
        let pt = orbit_point(point)?;
        let roots = check((*q).0.critical_locus(&pt, tol))?;
        *count_out = roots.len();
        if roots.len() > capacity {
            return Err(fail(HvwStatus::BufferTooSmall, &format!("{} roots, capacity {capacity}", roots.len())));
        }
        if !roots.is_empty() {
            non_null(roots_out, "roots_out")?;
            write_complexes(std::slice::from_raw_parts_mut(roots_out, 2 * roots.len()), &roots);
        }
        Ok(())
    })
}

/// Residuals of the semiflat triple for the quadratic prepotential
/// `½ xᵀ H x` with the standard pairing: `out[0]` the quaternion relations,
/// `out[1]` the largest `|dω_k|`. `hessian` is `2m × 2m` row-major, `x` has `2m` entries.
///
/// # Safety
/// `hessian` must hold `4m²` doubles, `x` `2m` doubles and `out` room for 2.
#[no_mangle]
pub unsafe extern "C" fn hvw_semiflat_quadratic_residuals(m: usize, hessian: *const f64, x: *const f64, out: *mut f64) -> HvwStatus {
    guard(|| {
        non_null(hessian, "hessian")?;
        non_null(x, "x")?;
        non_null(out, "out")?;
        if m == 0 || m > 8 {
            return Err(fail(HvwStatus::InvalidArgument, "m must be in 1..=8"));
        }
        let n = 2 * m;
        let h = std::slice::from_raw_parts(hessian, n * n);
        let mut f = Polynomial::zero(n);
        for j in 0..n {
            for k in 0..n {
                let mut e = vec![0; n];
                e[j] += 1;
                e[k] += 1;
                f = &f + &Polynomial::monomial(n, e, 0.5 * h[j * n + k]);
            }
        }
        let result = (|| {
            let prep = Prepotential::new(f.into_field(), Prepotential::standard_pairing(m))?;
            let p = std::slice::from_raw_parts(x, n);
            let q = quaternion_residual(&build_triple(&prep, p)?)?;
            let c = closedness_residuals(&prep, p)?;
            Ok::<_, Error>([q, c.iter().copied().fold(0.0, f64::max)])
        })();
        let r = check(result)?;
        std::slice::from_raw_parts_mut(out, 2).copy_from_slice(&r);
        Ok(())
    })
}

/// Runs the suites described by `config_json` (null for the defaults).
/// Check failures are reported through the handle, not the status.
///
/// # Safety
/// `config_json` must be null or a nul-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hvw_verify_run(config_json: *const c_char, out: *mut *mut HvwReport) -> HvwStatus {
    guard(|| {
        non_null(out, "out")?;
        let cfg = if config_json.is_null() {
            RunConfig::default()
        } else {
            let text = CStr::from_ptr(config_json)
                .to_str()
                .map_err(|_| fail(HvwStatus::InvalidArgument, "configuration is not UTF-8"))?;
            check(RunConfig::from_json(text))?
        };
        let report = check(workbench::run(&cfg))?;
        let cstr = |s: String| CString::new(s).map_err(|_| fail(HvwStatus::Numerical, "report contains a nul byte"));
        let json = cstr(report.to_json())?;
        let table = cstr(report.residual_table())?;
        let names = report.records.iter().map(|r| cstr(r.name.clone())).collect::<Result<_, _>>()?;
        *out = Box::into_raw(Box::new(HvwReport { report, json, table, names }));
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a handle from [`hvw_verify_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hvw_report_free(r: *mut HvwReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Whether every record passed; false for a null handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hvw_report_passed(r: *const HvwReport) -> bool {
    !r.is_null() && (*r).report.passed
}

/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hvw_report_record_count(r: *const HvwReport) -> usize {
    if r.is_null() {
        0
    } else {
        (*r).report.records.len()
    }
}

/// # Safety
/// `r` must be a live report handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hvw_report_record(r: *const HvwReport, index: usize, out: *mut HvwRecord) -> HvwStatus {
    guard(|| {
        non_null(r, "report")?;
        non_null(out, "out")?;
        let rep = &*r;
        let Some(rec) = rep.report.records.get(index) else {
            return Err(fail(HvwStatus::InvalidArgument, &format!("record index {index} out of range")));
        };
        *out = HvwRecord { name: rep.names[index].as_ptr(), residual: rec.residual, passed: rec.passed, count: rec.stats.count };
        Ok(())
    })
}

/// Full JSON report, owned by the handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hvw_report_json(r: *const HvwReport) -> *const c_char {
    if r.is_null() {
        ptr::null()
    } else {
        (*r).json.as_ptr()
    }
}

/// CSV residual table, owned by the handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn hvw_report_residual_table(r: *const HvwReport) -> *const c_char {
    if r.is_null() {
        ptr::null()
    } else {
        (*r).table.as_ptr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(hvw_last_error()) }.to_string_lossy().into_owned()
    }

    fn quadric() -> *mut HvwQuadric {
        let mu = [-2.0, 0.0, -1.0, 0.3, 0.0, 0.0, 1.0, -0.2, 2.0, 0.5, 3.0, 0.0];
        let mut q = ptr::null_mut();
        assert_eq!(unsafe { hvw_quadric_new(mu.as_ptr(), &mut q) }, HvwStatus::Ok);
        q
    }

    #[test]
    fn quadric_round_trip() {
        let q = quadric();
        let mut pt = [0.0; HVW_POINT_LEN];
        let mut f = [0.0; 12];
        let mut comm = f64::NAN;
        unsafe {
            assert_eq!(hvw_quadric_sample(q, 3, pt.as_mut_ptr()), HvwStatus::Ok);
            assert_eq!(hvw_quadric_hamiltonians(q, pt.as_ptr(), f.as_mut_ptr()), HvwStatus::Ok);
            assert_eq!(hvw_quadric_commutation(q, pt.as_ptr(), &mut comm), HvwStatus::Ok);
        }
        let sum_re: f64 = f.iter().step_by(2).sum();
        let sum_im: f64 = f.iter().skip(1).step_by(2).sum();
        assert!(sum_re.hypot(sum_im) <= 1e-10);
        assert!(comm <= 1e-8);
        let mut count = usize::MAX;
        let status = unsafe { hvw_quadric_critical_locus(q, pt.as_ptr(), 1e-6, ptr::null_mut(), 0, &mut count) };
        assert_eq!((status, count), (HvwStatus::Ok, 0));
        unsafe { hvw_quadric_free(q) };
    }

    #[test]
    fn critical_point_reports_roots() {
        let q = quadric();
        let mut pt = [0.0; HVW_POINT_LEN];
        unsafe { hvw_quadric_sample(q, 4, pt.as_mut_ptr()) };
        for k in 0..6 {
            pt[12 + 2 * k] = 0.5 * pt[2 * k];
            pt[12 + 2 * k + 1] = 0.5 * pt[2 * k + 1];
        }
        let mut count = 0;
        let status = unsafe { hvw_quadric_critical_locus(q, pt.as_ptr(), 1e-6, ptr::null_mut(), 0, &mut count) };
        assert_eq!(status, HvwStatus::BufferTooSmall);
        assert!(count >= 1);
        let mut roots = vec![0.0; 2 * count];
        let status = unsafe { hvw_quadric_critical_locus(q, pt.as_ptr(), 1e-6, roots.as_mut_ptr(), count, &mut count) };
        assert_eq!(status, HvwStatus::Ok);
        unsafe { hvw_quadric_free(q) };
    }

    #[test]
    fn invalid_inputs() {
        let mu = [0.0; 12];
        let mut q = ptr::null_mut();
        assert_eq!(unsafe { hvw_quadric_new(mu.as_ptr(), &mut q) }, HvwStatus::InvalidArgument);
        assert!(q.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(unsafe { hvw_quadric_new(ptr::null(), &mut q) }, HvwStatus::NullPointer);
        let q = quadric();
        assert!(last_error().is_empty());
        let pt = [f64::NAN; HVW_POINT_LEN];
        let mut f = [0.0; 12];
        assert_eq!(unsafe { hvw_quadric_hamiltonians(q, pt.as_ptr(), f.as_mut_ptr()) }, HvwStatus::InvalidArgument);
        unsafe { hvw_quadric_free(q) };
        unsafe { hvw_quadric_free(ptr::null_mut()) };
    }

    #[test]
    fn semiflat_residuals() {
        let h = [2.0, 0.1, 0.0, 0.0, 0.1, 1.0, 0.0, 0.0, 0.0, 0.0, 1.5, 0.0, 0.0, 0.0, 0.0, 1.0];
        let x = [0.1, 0.2, 0.3, 0.4];
        let mut out = [f64::NAN; 2];
        assert_eq!(unsafe { hvw_semiflat_quadratic_residuals(2, h.as_ptr(), x.as_ptr(), out.as_mut_ptr()) }, HvwStatus::Ok);
        assert!(out[1] <= 1e-12, "{out:?}");
        assert!(out[0].is_finite());
        let flat = [1.0, 0.0, 0.0, 1.0];
        assert_eq!(unsafe { hvw_semiflat_quadratic_residuals(1, flat.as_ptr(), x.as_ptr(), out.as_mut_ptr()) }, HvwStatus::Ok);
        assert!(out[0] <= 1e-12);
        assert_eq!(unsafe { hvw_semiflat_quadratic_residuals(0, flat.as_ptr(), x.as_ptr(), out.as_mut_ptr()) }, HvwStatus::InvalidArgument);
    }

    #[test]
    fn verify_report() {
        let cfg = CString::new(r#"{"suites": ["calculus"], "samples": 3}"#).unwrap();
        let mut r = ptr::null_mut();
        assert_eq!(unsafe { hvw_verify_run(cfg.as_ptr(), &mut r) }, HvwStatus::Ok);
        assert!(unsafe { hvw_report_passed(r) });
        let n = unsafe { hvw_report_record_count(r) };
        assert_eq!(n, 5);
        let mut rec = HvwRecord { name: ptr::null(), residual: 0.0, passed: false, count: 0 };
        assert_eq!(unsafe { hvw_report_record(r, 0, &mut rec) }, HvwStatus::Ok);
        assert_eq!(unsafe { CStr::from_ptr(rec.name) }.to_str().unwrap(), "calculus/jacobi");
        assert!(rec.passed && rec.count == 3);
        assert_eq!(unsafe { hvw_report_record(r, n, &mut rec) }, HvwStatus::InvalidArgument);
        let table = unsafe { CStr::from_ptr(hvw_report_residual_table(r)) }.to_str().unwrap();
        assert_eq!(table.lines().count(), n + 1);
        let json = unsafe { CStr::from_ptr(hvw_report_json(r)) }.to_str().unwrap();
        assert!(json.contains("\"seed\""));
        unsafe { hvw_report_free(r) };

        let bad = CString::new(r#"{"suites": ["nope"]}"#).unwrap();
        let mut r = ptr::null_mut();
        assert_eq!(unsafe { hvw_verify_run(bad.as_ptr(), &mut r) }, HvwStatus::InvalidArgument);
        assert!(last_error().contains("nope"), "{}", last_error());
    }
}
