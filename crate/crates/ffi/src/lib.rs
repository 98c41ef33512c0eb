//! C ABI over `spinor_fermi`.
//!
//! Every fallible function returns an [`SfStatus`]; on failure a message is
//! available from [`sf_last_error_message`] on the calling thread. Handles are
//! created by `sf_*_new_*` functions and released with the matching `*_free`.
//! Complex arrays use [`SfComplex`]; 4×4 matrices are row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::{Matrix4, Vector2, Vector4};
use spinor_fermi::backgrounds::{Background, CanonicalWorldline, Minkowski, RindlerChart, SchwarzschildLike};
use spinor_fermi::cli::suites::thomas_precession;
use spinor_fermi::dirac_algebra::{change_basis_coords, gamma_lambda, Basis, EndW};
use spinor_fermi::fermi::{transport, Components, Gauge, TransportState};
use spinor_fermi::free_states::{dirac_frame, rest_dirac_basis, MassShellMomentum};
use spinor_fermi::{Error, C64};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Off the mass shell, outside a chart, or a non-timelike tangent.
    Domain = 3,
    Numerical = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

pub const SF_BASIS_WEYL: u32 = 0;
pub const SF_BASIS_DIRAC: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SfComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for SfComplex {
    fn from(z: C64) -> Self {
        SfComplex { re: z.re, im: z.im }
    }
}

impl From<SfComplex> for C64 {
    fn from(z: SfComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Opaque spacetime background.
pub struct SfBackground {
    inner: Box<dyn Background>,
}

/// Opaque worldline, parameterized by proper time.
pub struct SfWorldline {
    inner: CanonicalWorldline,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> SfStatus {
    match err {
        Error::NonTimelike { .. }
        | Error::InsideHorizon { .. }
        | Error::OffShell(_)
        | Error::PastPointing
        | Error::ZeroMass => SfStatus::Domain,
        Error::DegenerateTetrad(_) | Error::GridTooSmall(_) | Error::InvalidHConnection(_) => SfStatus::Numerical,
        _ => SfStatus::InvalidArgument,
    }
}

struct Fail(SfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SfStatus::NullPointer, format!("`{what}` is null"))
}

fn bad(msg: impl Into<String>) -> Fail {
    Fail(SfStatus::InvalidArgument, msg.into())
}

/// Runs `f`, records any error and converts panics into `Internal`.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> SfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SfStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            SfStatus::Internal
        }
    }
}

unsafe fn read<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write<'a, T>(p: *mut T, n: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn basis_of(tag: u32) -> Result<Basis, Fail> {
    match tag {
        SF_BASIS_WEYL => Ok(Basis::Weyl),
        SF_BASIS_DIRAC => Ok(Basis::Dirac),
        _ => Err(bad(format!("unknown basis tag {tag}"))),
    }
}

fn put_matrix(m: &Matrix4<C64>, out: &mut [SfComplex]) {
    for r in 0..4 {
        for c in 0..4 {
            out[4 * r + c] = m[(r, c)].into();
        }
    }
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Flat spacetime in inertial coordinates.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sf_background_new_minkowski(out: *mut *mut SfBackground) -> SfStatus {
    guard(|| emit(out, SfBackground { inner: Box::new(Minkowski) }))
}

/// Schwarzschild exterior in isotropic Cartesian coordinates.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sf_background_new_schwarzschild(mass: f64, out: *mut *mut SfBackground) -> SfStatus {
    guard(|| {
        let bg = SchwarzschildLike::new(mass)?;
        emit(out, SfBackground { inner: Box::new(bg) })
    })
}

/// Flat spacetime in the Rindler chart with lapse `1 + a·x`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sf_background_new_rindler(acceleration: f64, out: *mut *mut SfBackground) -> SfStatus {
    guard(|| {
        if !acceleration.is_finite() {
            return Err(bad("acceleration must be finite"));
        }
        emit(out, SfBackground { inner: Box::new(RindlerChart { acceleration }) })
    })
}

/// # Safety
/// `bg` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_background_free(bg: *mut SfBackground) {
    if !bg.is_null() {
        drop(Box::from_raw(bg));
    }
}

/// Observer at rest at the chart point `position[3]`.
///
/// # Safety
/// `bg` must be a live handle, `position` must point to 3 doubles and `out`
/// to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sf_worldline_new_static(
    bg: *const SfBackground,
    position: *const f64,
    out: *mut *mut SfWorldline,
) -> SfStatus {
    guard(|| {
        let bg = handle(bg, "bg")?;
        let p = read(position, 3, "position")?;
        if !p.iter().all(|x| x.is_finite()) {
            return Err(bad("position must be finite"));
        }
        let wl = CanonicalWorldline::static_in(bg.inner.as_ref(), [p[0], p[1], p[2]])?;
        emit(out, SfWorldline { inner: wl })
    })
}

/// Uniform circular orbit of chart radius `radius` and angular velocity
/// `omega` in the plane at height `z`.
///
/// # Safety
/// `bg` must be a live handle and `out` writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sf_worldline_new_circular(
    bg: *const SfBackground,
    radius: f64,
    omega: f64,
    z: f64,
    out: *mut *mut SfWorldline,
) -> SfStatus {
    guard(|| {
        let bg = handle(bg, "bg")?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(bad("radius must be positive"));
        }
        let wl = CanonicalWorldline::circular_in(bg.inner.as_ref(), radius, omega, z)?;
        emit(out, SfWorldline { inner: wl })
    })
}

/// Uniformly accelerated observer in inertial coordinates of flat spacetime.
///
/// # Safety
/// `out` must be writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sf_worldline_new_rindler(acceleration: f64, out: *mut *mut SfWorldline) -> SfStatus {
    guard(|| {
        let wl = CanonicalWorldline::rindler(acceleration)?;
        emit(out, SfWorldline { inner: wl })
    })
}

/// Proper time of one revolution; `InvalidArgument` for non-periodic worldlines.
///
/// # Safety
/// `wl` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_worldline_proper_period(wl: *const SfWorldline, out: *mut f64) -> SfStatus {
    guard(|| {
        let wl = handle(wl, "wl")?;
        let period = wl.inner.proper_period().ok_or_else(|| bad("worldline is not periodic"))?;
        write(out, 1, "out")?[0] = period;
        Ok(())
    })
}

/// # Safety
/// `wl` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_worldline_free(wl: *mut SfWorldline) {
    if !wl.is_null() {
        drop(Box::from_raw(wl));
    }
}

fn run(
    bg: &SfBackground,
    wl: &SfWorldline,
    start: Components,
    s0: f64,
    s1: f64,
    h: f64,
    alpha: f64,
) -> Result<Components, Fail> {
    if !(s0.is_finite() && s1.is_finite()) {
        return Err(bad("s range must be finite"));
    }
    let init = TransportState { s: s0, components: start };
    let states = transport(&wl.inner, bg.inner.as_ref(), &init, s1, h, &Gauge::Constant(alpha))?;
    Ok(states.last().map_or(start, |s| s.components))
}

/// Fermi-transports the frame components `x[4]` from `s0` to `s1` with RK4
/// steps of at most `h`, writing the result to `out[4]`.
///
/// # Safety
/// Handles must be live; `x` and `out` must each point to 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_transport_vector(
    bg: *const SfBackground,
    wl: *const SfWorldline,
    x: *const f64,
    s0: f64,
    s1: f64,
    h: f64,
    out: *mut f64,
) -> SfStatus {
    guard(|| {
        let (bg, wl) = (handle(bg, "bg")?, handle(wl, "wl")?);
        let x = read(x, 4, "x")?;
        let out = write(out, 4, "out")?;
        if let Components::Vector(v) = run(bg, wl, Components::Vector(Vector4::from_column_slice(x)), s0, s1, h, 0.0)? {
            out.copy_from_slice(v.as_slice());
        }
        Ok(())
    })
}

/// Two-spinor Fermi transport with constant gauge `alpha`; `u` and `out`
/// hold 2 components.
///
/// # Safety
/// Handles must be live; `u` and `out` must each point to 2 `SfComplex`.
#[no_mangle]
pub unsafe extern "C" fn sf_transport_two_spinor(
    bg: *const SfBackground,
    wl: *const SfWorldline,
    u: *const SfComplex,
    s0: f64,
    s1: f64,
    h: f64,
    alpha: f64,
    out: *mut SfComplex,
) -> SfStatus {
    guard(|| {
        let (bg, wl) = (handle(bg, "bg")?, handle(wl, "wl")?);
        let u = read(u, 2, "u")?;
        let out = write(out, 2, "out")?;
        let start = Components::TwoSpinor(Vector2::new(u[0].into(), u[1].into()));
        if let Components::TwoSpinor(v) = run(bg, wl, start, s0, s1, h, alpha)? {
            out[0] = v[0].into();
            out[1] = v[1].into();
        }
        Ok(())
    })
}

/// Dirac-spinor Fermi transport with constant gauge `alpha`. `psi` and `out`
/// hold 4 components in the basis `basis` (`SF_BASIS_WEYL` or `SF_BASIS_DIRAC`).
///
/// # Safety
/// Handles must be live; `psi` and `out` must each point to 4 `SfComplex`.
#[no_mangle]
pub unsafe extern "C" fn sf_transport_four_spinor(
    bg: *const SfBackground,
    wl: *const SfWorldline,
    psi: *const SfComplex,
    basis: u32,
    s0: f64,
    s1: f64,
    h: f64,
    alpha: f64,
    out: *mut SfComplex,
) -> SfStatus {
    guard(|| {
        let (bg, wl) = (handle(bg, "bg")?, handle(wl, "wl")?);
        let basis = basis_of(basis)?;
        let psi = read(psi, 4, "psi")?;
        let out = write(out, 4, "out")?;
        let given = Vector4::from_iterator(psi.iter().map(|&z| C64::from(z)));
        let weyl = change_basis_coords(&given, basis, Basis::Weyl);
        if let Components::FourSpinor(v) = run(bg, wl, Components::FourSpinor(weyl), s0, s1, h, alpha)? {
            for (o, z) in out.iter_mut().zip(change_basis_coords(&v, Basis::Weyl, basis).iter()) {
                *o = (*z).into();
            }
        }
        Ok(())
    })
}

/// The Dirac matrix `γ_λ` (`lambda` in 0..=3) as a row-major 4×4 array.
///
/// # Safety
/// `out` must point to 16 `SfComplex`.
#[no_mangle]
pub unsafe extern "C" fn sf_gamma_matrix(lambda: u32, basis: u32, out: *mut SfComplex) -> SfStatus {
    guard(|| {
        if lambda > 3 {
            return Err(bad(format!("gamma index {lambda} out of range 0..=3")));
        }
        let basis = basis_of(basis)?;
        let out = write(out, 16, "out")?;
        let g: EndW = gamma_lambda(lambda as usize).to_basis(basis);
        put_matrix(&g.matrix, out);
        Ok(())
    })
}

/// Dirac frame `(u_1, u_2, v_1, v_2)` adapted to the on-shell covector `p[4]`
/// of mass `mass`, obtained by boosting the rest frame of the observer
/// `tau[4]`. Columns of the row-major `out[16]` are the frame spinors.
///
/// # Safety
/// `p` and `tau` must point to 4 doubles and `out` to 16 `SfComplex`.
#[no_mangle]
pub unsafe extern "C" fn sf_dirac_frame(
    p: *const f64,
    mass: f64,
    tau: *const f64,
    basis: u32,
    out: *mut SfComplex,
) -> SfStatus {
    guard(|| {
        let basis = basis_of(basis)?;
        let p = MassShellMomentum::new(Vector4::from_column_slice(read(p, 4, "p")?), mass)?;
        let tau = Vector4::from_column_slice(read(tau, 4, "tau")?);
        let out = write(out, 16, "out")?;
        let (frame, _) = dirac_frame(&p, &tau, &rest_dirac_basis())?;
        let m = match basis {
            Basis::Weyl => frame.0,
            Basis::Dirac => Matrix4::from_columns(
                &[0, 1, 2, 3].map(|c| change_basis_coords(&frame.0.column(c).into_owned(), Basis::Weyl, Basis::Dirac)),
            ),
        };
        put_matrix(&m, out);
        Ok(())
    })
}

/// Thomas rotation angle over one circular orbit in flat spacetime, measured
/// by transport with `steps` RK4 steps, and its closed form `2π(1 − γ)`.
///
/// # Safety
/// `measured` and `expected` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sf_thomas_precession(
    radius: f64,
    omega: f64,
    steps: u32,
    measured: *mut f64,
    expected: *mut f64,
) -> SfStatus {
    guard(|| {
        let measured = write(measured, 1, "measured")?;
        let expected = write(expected, 1, "expected")?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(bad("radius must be positive"));
        }
        let p = thomas_precession(radius, omega, steps as usize)?;
        measured[0] = p.measured;
        expected[0] = p.expected;
        Ok(())
    })
}
