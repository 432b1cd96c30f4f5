//! C interface: opaque handles for the kernel, phantom and direction grid,
//! status codes for every fallible call, and a thread-local last-error
//! message.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use radon_edge::edge_theory::predicted_response;
use radon_edge::reconstruct::reconstruct_point;
use radon_edge::{Ball, DataProvider, Error, JumpParams, Kernel, Phantom, SphereGrid, Vec3};

/// Status returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReStatus {
    Ok = 0,
    NullPointer = 1,
    Input = 2,
    Geometry = 3,
    Numeric = 4,
    Range = 5,
    Chart = 6,
    Config = 7,
    Format = 8,
    Io = 9,
    Panic = 10,
}

pub struct ReKernel(Kernel);
pub struct RePhantom(Phantom);
pub struct ReGrid(SphereGrid);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> ReStatus {
    match e {
        Error::Input(_) => ReStatus::Input,
        Error::Geometry(_) => ReStatus::Geometry,
        Error::Numeric(_) => ReStatus::Numeric,
        Error::Range { .. } => ReStatus::Range,
        Error::Chart(_) => ReStatus::Chart,
        Error::Config { .. } => ReStatus::Config,
        Error::Format(_) => ReStatus::Format,
        Error::Io(_) => ReStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), ReStatus>) -> ReStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ReStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            ReStatus::Panic
        }
    }
}

fn fail(e: Error) -> ReStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null() -> ReStatus {
    set_error("null pointer argument".into());
    ReStatus::NullPointer
}

unsafe fn vec3(p: *const f64) -> Result<Vec3, ReStatus> {
    if p.is_null() {
        return Err(null());
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok(Vec3::new(s[0], s[1], s[2]))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, ReStatus> {
    p.as_ref().ok_or_else(null)
}

unsafe fn store<T>(out: *mut T, v: T) -> Result<(), ReStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

/// Copies the calling thread's last error message, NUL terminated and
/// truncated to `len` bytes. Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn re_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds the interpolation kernel. Release with `re_kernel_free`.
#[no_mangle]
pub extern "C" fn re_kernel_new() -> *mut ReKernel {
    Box::into_raw(Box::new(ReKernel(radon_edge::build_kernel())))
}

/// # Safety
/// `k` must be null or come from `re_kernel_new`, and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn re_kernel_free(k: *mut ReKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// `m`-th derivative of the kernel at `t`, `m <= 3`.
///
/// # Safety
/// `k` must be a live kernel handle and `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn re_kernel_eval(k: *const ReKernel, t: f64, m: u32, out: *mut f64) -> ReStatus {
    guard(|| {
        let k = handle(k)?;
        let v = k.0.eval(t, m as usize).map_err(fail)?;
        store(out, v)
    })
}

/// `int_h^inf phi`.
///
/// # Safety
/// `k` must be a live kernel handle and `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn re_kernel_tail_integral(k: *const ReKernel, h: f64, out: *mut f64) -> ReStatus {
    guard(|| store(out, handle(k)?.0.tail_integral(h)))
}

/// Predicted edge value `f0 - f_delta * int_h^inf phi`.
///
/// # Safety
/// `k` must be a live kernel handle and `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn re_predicted_response(
    k: *const ReKernel,
    f0: f64,
    f_delta: f64,
    h: f64,
    out: *mut f64,
) -> ReStatus {
    guard(|| {
        let jump = JumpParams {
            f0,
            f_delta,
            theta0: Vec3::x(),
        };
        store(out, predicted_response(&handle(k)?.0, &jump, h))
    })
}

/// Phantom from `n_balls` records `cx, cy, cz, radius, density`.
///
/// # Safety
/// `balls` must point to `5 * n_balls` doubles; `out` to a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn re_phantom_new(balls: *const f64, n_balls: usize, out: *mut *mut RePhantom) -> ReStatus {
    guard(|| {
        if balls.is_null() || out.is_null() {
            return Err(null());
        }
        let raw = std::slice::from_raw_parts(balls, 5 * n_balls);
        let list = raw
            .chunks_exact(5)
            .map(|b| Ball::new(Vec3::new(b[0], b[1], b[2]), b[3], b[4]))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        let ph = Phantom::new(list).map_err(fail)?;
        store(out, Box::into_raw(Box::new(RePhantom(ph))))
    })
}

/// # Safety
/// `p` must be null or come from `re_phantom_new`, and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn re_phantom_free(p: *mut RePhantom) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Plane integral over `{x : alpha . x = p}`; `alpha` is a unit 3-vector.
///
/// # Safety
/// `ph` must be a live phantom, `alpha` point to 3 doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn re_phantom_radon(ph: *const RePhantom, alpha: *const f64, p: f64, out: *mut f64) -> ReStatus {
    guard(|| {
        let ph = handle(ph)?;
        let a = vec3(alpha)?;
        store(out, ph.0.radon(&a, p).map_err(fail)?)
    })
}

/// Direction grid and affine sampling. Release with `re_grid_free`.
///
/// # Safety
/// `out` must point to a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn re_grid_new(
    n_theta: usize,
    n_gamma: usize,
    eps: f64,
    rho: f64,
    p_min: f64,
    p_max: f64,
    out: *mut *mut ReGrid,
) -> ReStatus {
    guard(|| {
        let g = SphereGrid::new(n_theta, n_gamma, eps, rho, p_min, p_max).map_err(fail)?;
        store(out, Box::into_raw(Box::new(ReGrid(g))))
    })
}

/// # Safety
/// `g` must be null or come from `re_grid_new`, and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn re_grid_free(g: *mut ReGrid) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of grid directions, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn re_grid_n_directions(g: *const ReGrid) -> usize {
    g.as_ref().map_or(0, |g| g.0.n_directions())
}

/// Reconstruction at `x` from the phantom's exact data on the grid.
///
/// # Safety
/// All handles must be live, `x` must point to 3 doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn re_reconstruct_point(
    ph: *const RePhantom,
    k: *const ReKernel,
    g: *const ReGrid,
    x: *const f64,
    out: *mut f64,
) -> ReStatus {
    guard(|| {
        let (ph, k, g) = (handle(ph)?, handle(k)?, handle(g)?);
        let x = vec3(x)?;
        let v = reconstruct_point(&DataProvider::Analytic(&ph.0), &k.0, &g.0, &x).map_err(fail)?;
        store(out, v)
    })
}
