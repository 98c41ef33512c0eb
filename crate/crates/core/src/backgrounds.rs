//! Spacetime backgrounds (tetrad plus spinor connection) and worldlines.
//!
//! All backgrounds here are torsion free with `G = 0`; their Lorentz
//! connection is the Levi-Civita one obtained from the tetrad.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};

use crate::connection::{check_tetrad, reconstruct_spinor, HConnection, InducedScalars, SpinorCoeffs, TetradField};
use crate::spinor_algebra::{eta, minkowski_dot};
use crate::{Error, Point, Result};

/// A spacetime: tetrad `Θ_a^λ`, Lorentz connection `Γ̃_a^λ_μ`, and the
/// electromagnetic and dilaton coefficients `Y_a`, `G_a`.
pub trait Background: TetradField + Send + Sync {
    fn name(&self) -> &str;

    fn h_connection(&self, x: &Point) -> Result<HConnection>;

    fn em_potential(&self, _x: &Point) -> Vector4<f64> {
        Vector4::zeros()
    }

    fn dilation(&self, _x: &Point) -> Vector4<f64> {
        Vector4::zeros()
    }

    /// `Λ_a = (G_a + iY_a)𝟙 + ½ Γ̃_a^{AȦ}_{BȦ}`.
    fn spinor_connection(&self, x: &Point) -> Result<SpinorCoeffs> {
        let s = InducedScalars { g: self.dilation(x), y: self.em_potential(x) };
        reconstruct_spinor(&s, &self.h_connection(x)?)
    }

    /// `g(v, w) = η(Θv, Θw)` for chart vectors.
    fn metric_dot(&self, x: &Point, v: &Vector4<f64>, w: &Vector4<f64>) -> Result<f64> {
        let th = self.tetrad(x)?;
        Ok(minkowski_dot(&(th.transpose() * v), &(th.transpose() * w)))
    }
}

/// Torsion-free `Γ̃` (with `G = 0`) from `Θ` and `dtheta[b] = ∂_b Θ`.
///
/// With `C^λ_ab = ∂_a Θ_b^λ − ∂_b Θ_a^λ` moved to the frame and lowered,
/// `ω_{νλρ} = ½(C_{λνρ} − C_{ρνλ} + C_{νλρ})` and `Γ̃_a^λ_μ = Θ_a^ν ω_ν^λ_μ`.
pub fn levi_civita_h_connection(theta: &Matrix4<f64>, dtheta: &[Matrix4<f64>; 4]) -> Result<HConnection> {
    let inv = check_tetrad(theta)?;
    let et = eta();
    // Chart-index anholonomy for each frame index λ.
    let mut cf = [[[0.0f64; 4]; 4]; 4];
    for l in 0..4 {
        let mut chart = Matrix4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                chart[(a, b)] = dtheta[a][(b, l)] - dtheta[b][(a, l)];
            }
        }
        // C^λ_{νρ} = Θ_ν^a Θ_ρ^b C^λ_ab with Θ_ν^a = inv[(ν, a)].
        let frame = inv * chart * inv.transpose();
        for n in 0..4 {
            for r in 0..4 {
                cf[l][n][r] = et[(l, l)] * frame[(n, r)];
            }
        }
    }
    let omega = |n: usize, l: usize, r: usize| 0.5 * (cf[l][n][r] - cf[r][n][l] + cf[n][l][r]);
    let mut w = [Matrix4::zeros(); 4];
    for n in 0..4 {
        for l in 0..4 {
            for m in 0..4 {
                w[n][(l, m)] = et[(l, l)] * omega(n, l, m);
            }
        }
    }
    Ok(HConnection(std::array::from_fn(|a| (0..4).fold(Matrix4::zeros(), |acc, n| acc + w[n] * theta[(a, n)]))))
}

/// `∂_b Θ` by second-order centred differences with step `h`.
pub fn centred_tetrad_derivatives(field: &dyn TetradField, x: &Point, h: f64) -> Result<[Matrix4<f64>; 4]> {
    if !(h > 0.0) {
        return Err(Error::InvalidStep(h));
    }
    let mut out = [Matrix4::zeros(); 4];
    for (b, o) in out.iter_mut().enumerate() {
        let mut p = *x;
        let mut q = *x;
        p[b] += h;
        q[b] -= h;
        *o = (field.tetrad(&p)? - field.tetrad(&q)?) / (2.0 * h);
    }
    Ok(out)
}

/// Levi-Civita `Γ̃` with the tetrad differentiated numerically at step `h`.
pub fn levi_civita_fd(field: &dyn TetradField, x: &Point, h: f64) -> Result<HConnection> {
    let d = centred_tetrad_derivatives(field, x, h)?;
    levi_civita_h_connection(&field.tetrad(x)?, &d)
}

fn analytic_derivatives(field: &dyn TetradField, x: &Point) -> Result<[Matrix4<f64>; 4]> {
    Ok([
        field.tetrad_derivative(x, 0)?,
        field.tetrad_derivative(x, 1)?,
        field.tetrad_derivative(x, 2)?,
        field.tetrad_derivative(x, 3)?,
    ])
}

/// Flat spacetime in inertial coordinates.
#[derive(Debug, Clone, Copy, Default)]
pub struct Minkowski;

impl TetradField for Minkowski {
    fn tetrad(&self, _: &Point) -> Result<Matrix4<f64>> {
        Ok(Matrix4::identity())
    }

    fn tetrad_derivative(&self, _: &Point, _: usize) -> Result<Matrix4<f64>> {
        Ok(Matrix4::zeros())
    }
}

impl Background for Minkowski {
    fn name(&self) -> &str {
        "minkowski"
    }

    fn h_connection(&self, _: &Point) -> Result<HConnection> {
        Ok(HConnection::zero())
    }
}

/// Flat spacetime in the static chart `Θ = diag(1 + a x¹, 1, 1, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct RindlerChart {
    pub acceleration: f64,
}

impl RindlerChart {
    fn lapse(&self, x: &Point) -> Result<f64> {
        let f = 1.0 + self.acceleration * x[1];
        if f <= 0.0 {
            return Err(Error::InsideHorizon { radius: x[1], horizon: -1.0 / self.acceleration });
        }
        Ok(f)
    }
}

impl TetradField for RindlerChart {
    fn tetrad(&self, x: &Point) -> Result<Matrix4<f64>> {
        let mut m = Matrix4::identity();
        m[(0, 0)] = self.lapse(x)?;
        Ok(m)
    }

    fn tetrad_derivative(&self, x: &Point, b: usize) -> Result<Matrix4<f64>> {
        self.lapse(x)?;
        let mut m = Matrix4::zeros();
        if b == 1 {
            m[(0, 0)] = self.acceleration;
        }
        Ok(m)
    }
}

impl Background for RindlerChart {
    fn name(&self) -> &str {
        "rindler"
    }

    fn h_connection(&self, x: &Point) -> Result<HConnection> {
        levi_civita_h_connection(&self.tetrad(x)?, &analytic_derivatives(self, x)?)
    }
}

/// Schwarzschild geometry in isotropic Cartesian coordinates with the static
/// tetrad `Θ = diag(A, B, B, B)`, `A = (1 − k)/(1 + k)`, `B = (1 + k)²`,
/// `k = M/(2ρ)`. The horizon sits at `ρ = M/2`.
#[derive(Debug, Clone, Copy)]
pub struct SchwarzschildLike {
    pub mass: f64,
}

impl SchwarzschildLike {
    pub fn new(mass: f64) -> Result<Self> {
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::param("mass", "must be finite and non-negative"));
        }
        Ok(SchwarzschildLike { mass })
    }

    pub fn horizon(&self) -> f64 {
        0.5 * self.mass
    }

    /// `(ρ, A, B, A', B')` at `x`.
    fn profile(&self, x: &Point) -> Result<(f64, f64, f64, f64, f64)> {
        let rho = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        if self.mass == 0.0 {
            return Ok((rho, 1.0, 1.0, 0.0, 0.0));
        }
        if rho <= self.horizon() {
            return Err(Error::InsideHorizon { radius: rho, horizon: self.horizon() });
        }
        let k = self.mass / (2.0 * rho);
        let a = (1.0 - k) / (1.0 + k);
        let b = (1.0 + k) * (1.0 + k);
        let da = 2.0 * k / (rho * (1.0 + k) * (1.0 + k));
        let db = -2.0 * (1.0 + k) * k / rho;
        Ok((rho, a, b, da, db))
    }

    /// Frame acceleration of the static observer at `x`, radial outward
    /// with magnitude `A'/(A·B)`.
    pub fn static_acceleration(&self, x: &Point) -> Result<Vector4<f64>> {
        let (rho, a, b, da, _) = self.profile(x)?;
        if rho == 0.0 {
            return Ok(Vector4::zeros());
        }
        let mag = da / (a * b);
        Ok(Vector4::new(0.0, mag * x[1] / rho, mag * x[2] / rho, mag * x[3] / rho))
    }
}

impl TetradField for SchwarzschildLike {
    fn tetrad(&self, x: &Point) -> Result<Matrix4<f64>> {
        let (_, a, b, _, _) = self.profile(x)?;
        Ok(Matrix4::from_diagonal(&Vector4::new(a, b, b, b)))
    }

    fn tetrad_derivative(&self, x: &Point, dir: usize) -> Result<Matrix4<f64>> {
        let (rho, _, _, da, db) = self.profile(x)?;
        if dir == 0 || self.mass == 0.0 {
            return Ok(Matrix4::zeros());
        }
        let dr = x[dir] / rho;
        Ok(Matrix4::from_diagonal(&Vector4::new(da * dr, db * dr, db * dr, db * dr)))
    }
}

impl Background for SchwarzschildLike {
    fn name(&self) -> &str {
        "schwarzschild"
    }

    fn h_connection(&self, x: &Point) -> Result<HConnection> {
        if self.mass == 0.0 {
            return Ok(HConnection::zero());
        }
        levi_civita_h_connection(&self.tetrad(x)?, &analytic_derivatives(self, x)?)
    }
}

/// A tetrad sampled on a regular chart grid, interpolated by tensor-product
/// Catmull-Rom splines. Axes with a single node are treated as constant.
///
/// The interpolant is C¹; values carry an `O(h³)` and derivatives an `O(h²)`
/// error for smooth data, which carries over to the Levi-Civita connection.
#[derive(Debug, Clone)]
pub struct SampledBackground {
    origin: Point,
    spacing: Vector4<f64>,
    counts: [usize; 4],
    samples: Vec<Matrix4<f64>>,
}

fn catmull_rom(t: f64) -> ([f64; 4], [f64; 4]) {
    let (t2, t3) = (t * t, t * t * t);
    (
        [
            0.5 * (-t3 + 2.0 * t2 - t),
            0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
            0.5 * (-3.0 * t3 + 4.0 * t2 + t),
            0.5 * (t3 - t2),
        ],
        [
            0.5 * (-3.0 * t2 + 4.0 * t - 1.0),
            0.5 * (9.0 * t2 - 10.0 * t),
            0.5 * (-9.0 * t2 + 8.0 * t + 1.0),
            0.5 * (3.0 * t2 - 2.0 * t),
        ],
    )
}

/// Per-axis node indices with value and derivative weights.
struct Stencil {
    idx: [usize; 4],
    w: [f64; 4],
    dw: [f64; 4],
    len: usize,
}

impl SampledBackground {
    /// Samples `f` at `origin + i·spacing` for `i < counts` on each axis.
    pub fn sample<F>(f: F, origin: Point, spacing: Vector4<f64>, counts: [usize; 4]) -> Result<Self>
    where
        F: Fn(&Point) -> Result<Matrix4<f64>>,
    {
        for a in 0..4 {
            if counts[a] == 0 || (counts[a] > 1 && counts[a] < 4) {
                return Err(Error::GridTooSmall(format!("axis {a} has {} nodes; need 1 or at least 4", counts[a])));
            }
            if counts[a] > 1 && !(spacing[a] > 0.0) {
                return Err(Error::InvalidStep(spacing[a]));
            }
        }
        let total: usize = counts.iter().product();
        let mut samples = Vec::with_capacity(total);
        for i0 in 0..counts[0] {
            for i1 in 0..counts[1] {
                for i2 in 0..counts[2] {
                    for i3 in 0..counts[3] {
                        let idx = [i0, i1, i2, i3];
                        let p = Point::from_fn(|a, _| origin[a] + idx[a] as f64 * spacing[a]);
                        samples.push(f(&p)?);
                    }
                }
            }
        }
        Ok(SampledBackground { origin, spacing, counts, samples })
    }

    fn node(&self, idx: [usize; 4]) -> &Matrix4<f64> {
        let c = self.counts;
        &self.samples[((idx[0] * c[1] + idx[1]) * c[2] + idx[2]) * c[3] + idx[3]]
    }

    fn stencil(&self, x: &Point, a: usize) -> Result<Stencil> {
        let n = self.counts[a];
        if n == 1 {
            return Ok(Stencil { idx: [0; 4], w: [1.0, 0.0, 0.0, 0.0], dw: [0.0; 4], len: 1 });
        }
        let u = (x[a] - self.origin[a]) / self.spacing[a];
        let top = (n - 1) as f64;
        if !(u >= -1e-9 && u <= top + 1e-9) {
            return Err(Error::param("position", format!("coordinate {a} = {} outside the sampled range", x[a])));
        }
        let u = u.clamp(0.0, top);
        let cell = (u.floor() as usize).min(n - 2);
        let t = u - cell as f64;
        let (w, dw) = catmull_rom(t);
        let clampi = |k: isize| k.clamp(0, n as isize - 1) as usize;
        let c = cell as isize;
        let idx = [clampi(c - 1), clampi(c), clampi(c + 1), clampi(c + 2)];
        let dw = dw.map(|v| v / self.spacing[a]);
        Ok(Stencil { idx, w, dw, len: 4 })
    }

    fn interpolate(&self, x: &Point, deriv: Option<usize>) -> Result<Matrix4<f64>> {
        let st: Vec<_> = (0..4).map(|a| self.stencil(x, a)).collect::<Result<_>>()?;
        let weight = |a: usize, k: usize| {
            if deriv == Some(a) {
                st[a].dw[k]
            } else {
                st[a].w[k]
            }
        };
        let mut out = Matrix4::zeros();
        for k0 in 0..st[0].len {
            for k1 in 0..st[1].len {
                for k2 in 0..st[2].len {
                    for k3 in 0..st[3].len {
                        let w = weight(0, k0) * weight(1, k1) * weight(2, k2) * weight(3, k3);
                        if w != 0.0 {
                            out += self.node([st[0].idx[k0], st[1].idx[k1], st[2].idx[k2], st[3].idx[k3]]) * w;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

impl TetradField for SampledBackground {
    fn tetrad(&self, x: &Point) -> Result<Matrix4<f64>> {
        self.interpolate(x, None)
    }

    fn tetrad_derivative(&self, x: &Point, b: usize) -> Result<Matrix4<f64>> {
        self.interpolate(x, Some(b))
    }
}

impl Background for SampledBackground {
    fn name(&self) -> &str {
        "sampled"
    }

    fn h_connection(&self, x: &Point) -> Result<HConnection> {
        levi_civita_h_connection(&self.tetrad(x)?, &analytic_derivatives(self, x)?)
    }
}

/// A timelike curve `s ↦ x(s)` in chart coordinates, parameterized by proper
/// time.
pub trait Worldline: Send + Sync {
    fn position(&self, s: f64) -> Point;
    /// `dx/ds`.
    fn velocity(&self, s: f64) -> Vector4<f64>;
    /// `d²x/ds²`.
    fn acceleration(&self, s: f64) -> Vector4<f64>;
}

/// Closed-form worldlines used as fixtures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CanonicalWorldline {
    /// At rest at spatial chart point `at`; `rate = dt/ds`.
    Static { at: [f64; 3], rate: f64 },
    /// `x = (t, R cos ωt, R sin ωt, z)` with `t = rate·s`.
    Circular { radius: f64, omega: f64, z: f64, rate: f64 },
    /// Hyperbolic motion from the origin along `x¹` with proper
    /// acceleration `a` (inertial chart).
    Rindler { a: f64 },
}

impl CanonicalWorldline {
    /// Static observer; `dt/ds` follows from the background tetrad.
    pub fn static_in(bg: &dyn Background, at: [f64; 3]) -> Result<Self> {
        let x = Point::new(0.0, at[0], at[1], at[2]);
        let g = bg.metric_dot(&x, &Vector4::x(), &Vector4::x())?;
        if !(g > 0.0) {
            return Err(Error::NonTimelike { s: 0.0, norm: g });
        }
        Ok(CanonicalWorldline::Static { at, rate: 1.0 / g.sqrt() })
    }

    /// Uniform circular orbit in the plane `z = const`. The background must
    /// be stationary and axisymmetric about the `z` axis, so that `dt/ds`
    /// is constant along the orbit; this is checked on eight points.
    pub fn circular_in(bg: &dyn Background, radius: f64, omega: f64, z: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::param("radius", "must be positive"));
        }
        if !omega.is_finite() || omega == 0.0 {
            return Err(Error::param("omega", "must be finite and nonzero"));
        }
        let norm_at = |phi: f64| -> Result<f64> {
            let x = Point::new(0.0, radius * phi.cos(), radius * phi.sin(), z);
            let u = Vector4::new(1.0, -radius * omega * phi.sin(), radius * omega * phi.cos(), 0.0);
            bg.metric_dot(&x, &u, &u)
        };
        let g0 = norm_at(0.0)?;
        if !(g0 > 0.0) {
            return Err(Error::param(
                "omega",
                format!("orbit is not timelike (g(u,u) = {g0}); need |ωR| below the local light speed"),
            ));
        }
        for k in 1..8 {
            let g = norm_at(k as f64 * PI / 4.0)?;
            if (g - g0).abs() > 1e-12 * g0.abs().max(1.0) {
                return Err(Error::param("background", "not axisymmetric about the z axis"));
            }
        }
        Ok(CanonicalWorldline::Circular { radius, omega, z, rate: 1.0 / g0.sqrt() })
    }

    pub fn rindler(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::param("acceleration", "must be positive"));
        }
        Ok(CanonicalWorldline::Rindler { a })
    }

    /// Proper time of one orbit, `2π/(ω·dt/ds)`.
    pub fn proper_period(&self) -> Option<f64> {
        match *self {
            CanonicalWorldline::Circular { omega, rate, .. } => Some(2.0 * PI / (omega.abs() * rate)),
            _ => None,
        }
    }
}

impl Worldline for CanonicalWorldline {
    fn position(&self, s: f64) -> Point {
        match *self {
            CanonicalWorldline::Static { at, rate } => Point::new(rate * s, at[0], at[1], at[2]),
            CanonicalWorldline::Circular { radius, omega, z, rate } => {
                let p = omega * rate * s;
                Point::new(rate * s, radius * p.cos(), radius * p.sin(), z)
            }
            CanonicalWorldline::Rindler { a } => Point::new((a * s).sinh() / a, ((a * s).cosh() - 1.0) / a, 0.0, 0.0),
        }
    }

    fn velocity(&self, s: f64) -> Vector4<f64> {
        match *self {
            CanonicalWorldline::Static { rate, .. } => Vector4::new(rate, 0.0, 0.0, 0.0),
            CanonicalWorldline::Circular { radius, omega, rate, .. } => {
                let w = omega * rate;
                let p = w * s;
                Vector4::new(rate, -radius * w * p.sin(), radius * w * p.cos(), 0.0)
            }
            CanonicalWorldline::Rindler { a } => Vector4::new((a * s).cosh(), (a * s).sinh(), 0.0, 0.0),
        }
    }

    fn acceleration(&self, s: f64) -> Vector4<f64> {
        match *self {
            CanonicalWorldline::Static { .. } => Vector4::zeros(),
            CanonicalWorldline::Circular { radius, omega, rate, .. } => {
                let w = omega * rate;
                let p = w * s;
                Vector4::new(0.0, -radius * w * w * p.cos(), -radius * w * w * p.sin(), 0.0)
            }
            CanonicalWorldline::Rindler { a } => Vector4::new(a * (a * s).sinh(), a * (a * s).cosh(), 0.0, 0.0),
        }
    }
}

/// A chart curve `λ ↦ (x, dx/dλ, d²x/dλ²)` with an arbitrary timelike
/// parameter.
pub type ChartCurve = dyn Fn(f64) -> (Point, Vector4<f64>, Vector4<f64>) + Send + Sync;

/// A chart curve re-expressed in proper time `s`, with `s(λ₀) = 0`.
///
/// `s(λ)` is tabulated with Romberg quadrature on each table interval
/// (converged to 1e−10 relative) and inverted by Newton iteration.
pub struct Reparameterized<'a> {
    curve: Box<ChartCurve>,
    bg: &'a dyn Background,
    lambdas: Vec<f64>,
    propers: Vec<f64>,
}

impl<'a> Reparameterized<'a> {
    pub fn new(
        curve: Box<ChartCurve>,
        bg: &'a dyn Background,
        lambda0: f64,
        lambda1: f64,
        intervals: usize,
    ) -> Result<Self> {
        if !(lambda1 > lambda0) || intervals == 0 {
            return Err(Error::param("lambda", "need lambda1 > lambda0 and at least one interval"));
        }
        let speed = |l: f64| -> Result<f64> {
            let (x, v, _) = curve(l);
            let g = bg.metric_dot(&x, &v, &v)?;
            if !(g > 0.0) {
                return Err(Error::NonTimelike { s: l, norm: g });
            }
            Ok(g.sqrt())
        };
        let dl = (lambda1 - lambda0) / intervals as f64;
        let mut lambdas = vec![lambda0];
        let mut propers = vec![0.0];
        for k in 0..intervals {
            let a = lambda0 + k as f64 * dl;
            let piece = romberg(&speed, a, a + dl, 1e-10)?;
            lambdas.push(a + dl);
            propers.push(propers[k] + piece);
        }
        Ok(Reparameterized { curve, bg, lambdas, propers })
    }

    /// Total proper time covered.
    pub fn proper_length(&self) -> f64 {
        *self.propers.last().unwrap_or(&0.0)
    }

    fn speed_and_rate(&self, l: f64) -> (Point, Vector4<f64>, Vector4<f64>, f64, f64) {
        let (x, v, acc) = (self.curve)(l);
        let th = self.bg.tetrad(&x).unwrap_or_else(|_| Matrix4::identity());
        let fv = th.transpose() * v;
        let mut dfv = th.transpose() * acc;
        for b in 0..4 {
            if let Ok(d) = self.bg.tetrad_derivative(&x, b) {
                dfv += d.transpose() * v * v[b];
            }
        }
        let sigma = minkowski_dot(&fv, &fv).max(0.0).sqrt();
        let dsigma = minkowski_dot(&fv, &dfv) / sigma;
        (x, v, acc, sigma, dsigma)
    }

    /// `λ(s)` by Newton iteration from the tabulated bracket.
    pub fn lambda_of(&self, s: f64) -> f64 {
        let k = match self.propers.binary_search_by(|p| p.total_cmp(&s)) {
            Ok(i) => return self.lambdas[i],
            Err(i) => i.clamp(1, self.propers.len() - 1) - 1,
        };
        let (s0, s1) = (self.propers[k], self.propers[k + 1]);
        let (l0, l1) = (self.lambdas[k], self.lambdas[k + 1]);
        let mut l = l0 + (l1 - l0) * (s - s0) / (s1 - s0);
        for _ in 0..50 {
            let speed = |t: f64| -> Result<f64> {
                let (x, v, _) = (self.curve)(t);
                Ok(self.bg.metric_dot(&x, &v, &v)?.max(0.0).sqrt())
            };
            let partial = romberg(&speed, l0, l, 1e-12).unwrap_or(0.0);
            let f = s0 + partial - s;
            let (_, _, _, sigma, _) = self.speed_and_rate(l);
            let step = f / sigma;
            l -= step;
            if step.abs() <= 1e-14 * (1.0 + l.abs()) {
                break;
            }
        }
        l
    }
}

impl Worldline for Reparameterized<'_> {
    fn position(&self, s: f64) -> Point {
        (self.curve)(self.lambda_of(s)).0
    }

    fn velocity(&self, s: f64) -> Vector4<f64> {
        let (_, v, _, sigma, _) = self.speed_and_rate(self.lambda_of(s));
        v / sigma
    }

    fn acceleration(&self, s: f64) -> Vector4<f64> {
        let (_, v, acc, sigma, dsigma) = self.speed_and_rate(self.lambda_of(s));
        (acc - v * (dsigma / sigma)) / (sigma * sigma)
    }
}

/// Romberg quadrature refined until successive diagonal entries agree to
/// `rel` relative accuracy.
pub fn romberg<F>(f: &F, a: f64, b: f64, rel: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut h = b - a;
    let mut trap = 0.5 * h * (f(a)? + f(b)?);
    rows.push(vec![trap]);
    for k in 1..20 {
        let n = 1usize << (k - 1);
        h *= 0.5;
        let mut mid = 0.0;
        for i in 0..n {
            mid += f(a + (2 * i + 1) as f64 * h)?;
        }
        trap = 0.5 * trap + h * mid;
        let mut row = vec![trap];
        let mut p4 = 1.0;
        for j in 1..=k {
            p4 *= 4.0;
            let prev = &rows[k - 1][j - 1];
            row.push(row[j - 1] + (row[j - 1] - prev) / (p4 - 1.0));
        }
        let best = row[k];
        let last = rows[k - 1][k - 1];
        rows.push(row);
        if k >= 3 && (best - last).abs() <= rel * best.abs().max(1e-300) {
            return Ok(best);
        }
    }
    Ok(*rows.last().and_then(|r| r.last()).unwrap_or(&trap))
}
