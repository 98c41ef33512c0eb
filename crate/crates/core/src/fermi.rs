//! Fermi transport of vectors, 2-spinors and Dirac spinors along a timelike
//! worldline.
//!
//! Along the curve with unit tangent `τ` and `A = ∇_τ τ`, the Fermi bivector
//! is `Φ = 2A∧τ` and the Fermi connection on `H` is `Γ̃ + Φ♭`. On 2-spinors
//! it becomes `Λ + φ + iα` with `φ` the half-trace of `Φ♭`, and on Dirac
//! spinors `Λ + ¼γ̂(Φ) + iα`. Transport solves `dX/ds = M(s)X`, the
//! condition `∇X = 0` for `∇ = ∂ − M`.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

use crate::backgrounds::{Background, Worldline};
use crate::connection::{contract_spinor, four_spinor_connection, SpinorCoeffs};
use crate::dirac_algebra::{hat_gamma, Bivector, EndW};
use crate::ode::rk4_linear;
use crate::spinor_algebra::{boost_matrix, c, eta, half_trace, minkowski_dot};
use crate::{Error, Result, C64};

/// Below this norm of `∇_τ τ` the curve is treated as a geodesic.
pub const ACCELERATION_FLOOR: f64 = 1e-14;

/// Allowed deviation of `g(ẋ, ẋ)` from 1.
pub const PROPER_TIME_TOLERANCE: f64 = 1e-6;

/// Everything the Fermi connections need at one point of the worldline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiData {
    pub s: f64,
    /// Chart velocity `ẋ^a`.
    pub velocity: Vector4<f64>,
    /// Frame tangent `τ^λ = Θ_a^λ ẋ^a`.
    pub tau: Vector4<f64>,
    /// `∇_τ τ` in the frame.
    pub nabla_tau: Vector4<f64>,
    pub phi: Bivector,
    /// `Φ♭` as an element of `End H`.
    pub phi_flat: Matrix4<f64>,
    /// Traceless half-trace of `Φ♭`.
    pub phi_half: Matrix2<C64>,
    /// `Γ̃_τ = ẋ^a Γ̃_a`.
    pub gamma_tau: Matrix4<f64>,
    /// `Λ_τ = ẋ^a Λ_a`.
    pub lambda_tau: Matrix2<C64>,
    /// `Y_τ = ẋ^a Y_a`.
    pub y_tau: f64,
    /// Tetrad at the point, rows `a`, columns `λ`.
    pub theta: Matrix4<f64>,
    /// `Λ_a` at the point.
    pub lambda: SpinorCoeffs,
}

/// `Φ = 2A∧τ` as the antisymmetric tensor `A⊗τ − τ⊗A`.
pub fn fermi_bivector(tau: &Vector4<f64>, accel: &Vector4<f64>) -> Bivector {
    if accel.norm() < ACCELERATION_FLOOR {
        return Bivector::zero();
    }
    Bivector(accel * tau.transpose() - tau * accel.transpose())
}

pub fn fermi_data(wl: &dyn Worldline, bg: &dyn Background, s: f64) -> Result<FermiData> {
    let x = wl.position(s);
    let v = wl.velocity(s);
    let acc = wl.acceleration(s);
    let theta = bg.tetrad(&x)?;
    let tau = theta.transpose() * v;
    let norm = minkowski_dot(&tau, &tau);
    if !(norm > 0.0) {
        return Err(Error::NonTimelike { s, norm });
    }
    if (norm - 1.0).abs() > PROPER_TIME_TOLERANCE {
        return Err(Error::param(
            "worldline",
            format!("not parameterized by proper time at s = {s} (g(τ,τ) = {norm})"),
        ));
    }
    let mut dtau = theta.transpose() * acc;
    for b in 0..4 {
        if v[b] != 0.0 {
            dtau += bg.tetrad_derivative(&x, b)?.transpose() * v * v[b];
        }
    }
    let gt = bg.h_connection(&x)?;
    let gamma_tau = gt.contract(&v);
    let mut accel = dtau - gamma_tau * tau;
    if accel.norm() < ACCELERATION_FLOOR {
        accel = Vector4::zeros();
    }
    let phi = fermi_bivector(&tau, &accel);
    let phi_flat = phi.flat();
    let lambda = bg.spinor_connection(&x)?;
    Ok(FermiData {
        s,
        velocity: v,
        tau,
        nabla_tau: accel,
        phi,
        phi_flat,
        phi_half: half_trace(&phi_flat),
        gamma_tau,
        lambda_tau: contract_spinor(&lambda, &v),
        y_tau: bg.em_potential(&x).dot(&v),
        theta,
        lambda,
    })
}

/// `D_τ X = ∇_τ X + g(∇_τ τ, X)τ − g(τ, X)∇_τ τ`, given `dX/ds`.
pub fn fermi_derivative(d: &FermiData, x: &Vector4<f64>, dx_ds: &Vector4<f64>) -> Vector4<f64> {
    let nabla = dx_ds - d.gamma_tau * x;
    nabla + d.tau * minkowski_dot(&d.nabla_tau, x) - d.nabla_tau * minkowski_dot(&d.tau, x)
}

/// `v⌋Φ♭ = g(v, τ)·τ⌋Φ♭` for a frame vector `v`.
pub fn congruence_extension(d: &FermiData, v: &Vector4<f64>) -> Matrix4<f64> {
    d.phi_flat * minkowski_dot(v, &d.tau)
}

/// Generator of vector Fermi transport, `Γ̃_τ + Φ♭`.
pub fn vector_generator(d: &FermiData) -> Matrix4<f64> {
    d.gamma_tau + d.phi_flat
}

/// `Λ_F' = Λ_τ + φ + iα` along the curve.
pub fn spinor_generator(d: &FermiData, alpha: f64) -> Matrix2<C64> {
    d.lambda_tau + d.phi_half + Matrix2::identity() * c(0.0, alpha)
}

/// Dirac-spinor generator `Λ_τ + ¼γ̂(Φ) + iα` in the Weyl basis.
pub fn four_spinor_generator(d: &FermiData, alpha: f64) -> Matrix4<C64> {
    let y = Vector4::new(d.y_tau, 0.0, 0.0, 0.0);
    let gt = crate::connection::HConnection([d.gamma_tau, Matrix4::zeros(), Matrix4::zeros(), Matrix4::zeros()]);
    let base = four_spinor_connection(&y, &gt)[0].matrix;
    base + hat_gamma(&d.phi).matrix * c(0.25, 0.0) + Matrix4::identity() * c(0.0, alpha)
}

/// Per-direction spinor Fermi coefficients `Λ_a + g(Θ_a, τ)(φ + iα)`,
/// extended off the tangent by [`congruence_extension`].
pub fn spinor_fermi_coefficients(d: &FermiData, alpha: f64) -> SpinorCoeffs {
    let extra = d.phi_half + Matrix2::identity() * c(0.0, alpha);
    std::array::from_fn(|a| {
        let w = minkowski_dot(&d.theta.row(a).transpose(), &d.tau);
        d.lambda[a] + extra * c(w, 0.0)
    })
}

/// Per-direction Dirac-spinor Fermi coefficients
/// `Λ^W_a + g(Θ_a, τ)(¼γ̂(Φ) + iα)` (Weyl basis, `G = 0`).
pub fn four_spinor_fermi_coefficients(
    d: &FermiData,
    bg: &dyn Background,
    x: &crate::Point,
    alpha: f64,
) -> Result<[EndW; 4]> {
    let base = four_spinor_connection(&bg.em_potential(x), &bg.h_connection(x)?);
    let extra = hat_gamma(&d.phi).matrix * c(0.25, 0.0) + Matrix4::identity() * c(0.0, alpha);
    Ok(std::array::from_fn(|a| {
        let w = minkowski_dot(&d.theta.row(a).transpose(), &d.tau);
        EndW::weyl(base[a].matrix + extra * c(w, 0.0))
    }))
}

/// The gauge function `α(s)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Gauge {
    Constant(f64),
    /// Piecewise-linear table of `(s, α)` with increasing `s`.
    Table(Vec<(f64, f64)>),
}

impl Default for Gauge {
    fn default() -> Self {
        Gauge::Constant(0.0)
    }
}

impl Gauge {
    pub fn validate(&self) -> Result<()> {
        match self {
            Gauge::Constant(a) if !a.is_finite() => Err(Error::param("alpha", "must be finite")),
            Gauge::Table(t) => {
                if t.is_empty() {
                    return Err(Error::param("alpha", "table is empty"));
                }
                if t.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::param("alpha", "table s values must increase"));
                }
                if t.iter().any(|(s, a)| !s.is_finite() || !a.is_finite()) {
                    return Err(Error::param("alpha", "table entries must be finite"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `α(s)`; tables are held constant beyond their ends.
    pub fn at(&self, s: f64) -> f64 {
        match self {
            Gauge::Constant(a) => *a,
            Gauge::Table(t) => {
                let Some(first) = t.first() else { return 0.0 };
                if s <= first.0 {
                    return first.1;
                }
                for w in t.windows(2) {
                    if s <= w[1].0 {
                        let f = (s - w[0].0) / (w[1].0 - w[0].0);
                        return w[0].1 + f * (w[1].1 - w[0].1);
                    }
                }
                t[t.len() - 1].1
            }
        }
    }
}

/// What is being transported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportKind {
    Vector,
    TwoSpinor,
    FourSpinor,
}

/// Components of a transported section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Components {
    Vector(Vector4<f64>),
    TwoSpinor(Vector2<C64>),
    FourSpinor(Vector4<C64>),
}

impl Components {
    pub fn kind(&self) -> TransportKind {
        match self {
            Components::Vector(_) => TransportKind::Vector,
            Components::TwoSpinor(_) => TransportKind::TwoSpinor,
            Components::FourSpinor(_) => TransportKind::FourSpinor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportState {
    pub s: f64,
    pub components: Components,
}

/// Fermi-transports `initial` from `initial.s` to `s_end` with RK4 steps of
/// at most `h`, returning every step.
pub fn transport(
    wl: &dyn Worldline,
    bg: &dyn Background,
    initial: &TransportState,
    s_end: f64,
    h: f64,
    gauge: &Gauge,
) -> Result<Vec<TransportState>> {
    gauge.validate()?;
    let s0 = initial.s;
    Ok(match initial.components {
        Components::Vector(x0) => rk4_linear(|s| Ok(vector_generator(&fermi_data(wl, bg, s)?)), x0, s0, s_end, h)?
            .into_iter()
            .map(|(s, x)| TransportState { s, components: Components::Vector(x) })
            .collect(),
        Components::TwoSpinor(u0) => {
            rk4_linear(|s| Ok(spinor_generator(&fermi_data(wl, bg, s)?, gauge.at(s))), u0, s0, s_end, h)?
                .into_iter()
                .map(|(s, u)| TransportState { s, components: Components::TwoSpinor(u) })
                .collect()
        }
        Components::FourSpinor(p0) => {
            rk4_linear(|s| Ok(four_spinor_generator(&fermi_data(wl, bg, s)?, gauge.at(s))), p0, s0, s_end, h)?
                .into_iter()
                .map(|(s, p)| TransportState { s, components: Components::FourSpinor(p) })
                .collect()
        }
    })
}

/// Propagates four Dirac spinors at once (the columns of `frame`).
pub fn transport_dirac_frame(
    wl: &dyn Worldline,
    bg: &dyn Background,
    frame: Matrix4<C64>,
    s0: f64,
    s_end: f64,
    h: f64,
    gauge: &Gauge,
) -> Result<Vec<(f64, Matrix4<C64>)>> {
    gauge.validate()?;
    rk4_linear(|s| Ok(four_spinor_generator(&fermi_data(wl, bg, s)?, gauge.at(s))), frame, s0, s_end, h)
}

/// Propagates an orthonormal frame of `H` (columns) by vector Fermi transport.
pub fn transport_vector_frame(
    wl: &dyn Worldline,
    bg: &dyn Background,
    frame: Matrix4<f64>,
    s0: f64,
    s_end: f64,
    h: f64,
) -> Result<Vec<(f64, Matrix4<f64>)>> {
    rk4_linear(|s| Ok(vector_generator(&fermi_data(wl, bg, s)?)), frame, s0, s_end, h)
}

/// Orthonormal frame with first column `τ`, completed by Gram–Schmidt on the
/// Pauli frame vectors.
pub fn adapted_frame(tau: &Vector4<f64>) -> Matrix4<f64> {
    let mut cols: Vec<Vector4<f64>> = vec![*tau];
    let mut k = 1;
    while cols.len() < 4 && k < 4 {
        let mut v = Vector4::zeros();
        v[k] = 1.0;
        for (j, e) in cols.iter().enumerate() {
            let sign = if j == 0 { 1.0 } else { -1.0 };
            v -= e * (sign * minkowski_dot(e, &v));
        }
        let n = -minkowski_dot(&v, &v);
        if n > 1e-12 {
            cols.push(v / n.sqrt());
        }
        k += 1;
    }
    Matrix4::from_columns(&[cols[0], cols[1], cols[2], cols[3]])
}

/// Angle in the `x¹x²` plane of the spatial vector `x` seen in the rest frame
/// of `τ` (obtained by the boost `τ ↦ τ_0`).
pub fn rest_frame_angle(tau: &Vector4<f64>, x: &Vector4<f64>) -> f64 {
    let y = boost_matrix(tau, &Vector4::x()) * x;
    y[2].atan2(y[1])
}

/// Adds multiples of 2π so consecutive angles differ by less than π.
pub fn unwrap_angles(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = 0.0;
    let tau = 2.0 * std::f64::consts::PI;
    for (i, &a) in raw.iter().enumerate() {
        if i > 0 {
            let prev = raw[i - 1];
            let d = a - prev;
            if d > std::f64::consts::PI {
                offset -= tau;
            } else if d < -std::f64::consts::PI {
                offset += tau;
            }
        }
        out.push(a + offset);
    }
    out
}

/// `|d/ds g(X,Y) − g(D X, Y) − g(X, D Y)|` at `s`, all derivatives by centred
/// differences of step `h`.
pub fn product_rule_residual(
    wl: &dyn Worldline,
    bg: &dyn Background,
    x: &dyn Fn(f64) -> Vector4<f64>,
    y: &dyn Fn(f64) -> Vector4<f64>,
    s: f64,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidStep(h));
    }
    let d = fermi_data(wl, bg, s)?;
    let dx = (x(s + h) - x(s - h)) / (2.0 * h);
    let dy = (y(s + h) - y(s - h)) / (2.0 * h);
    let g = |t: f64| minkowski_dot(&x(t), &y(t));
    let dg = (g(s + h) - g(s - h)) / (2.0 * h);
    let (xs, ys) = (x(s), y(s));
    let rhs = minkowski_dot(&fermi_derivative(&d, &xs, &dx), &ys) + minkowski_dot(&xs, &fermi_derivative(&d, &ys, &dy));
    Ok((dg - rhs).abs())
}

/// Lowered components `X♭ = η X`.
pub fn flat(x: &Vector4<f64>) -> Vector4<f64> {
    eta() * x
}
