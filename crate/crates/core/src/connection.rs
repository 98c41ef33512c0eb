//! Spinor connections and the objects they induce.
//!
//! A 2-spinor connection in a chart is a quadruple `Λ_a` of complex 2×2
//! matrices, with covariant derivative `∇_a s = ∂_a s − Λ_a s`. It induces the
//! real scalars `G_a`, `Y_a` and a Lorentz connection `Γ̃_a` on `H`, written
//! here as mixed matrices `Γ̃_a^λ_μ` in the Pauli frame.

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::dirac_algebra::{hat_gamma, Bivector, EndW};
use crate::spinor_algebra::{c, eta, half_trace, induced_end_h};
use crate::{Error, Point, Result, C64};

/// `Λ_a^A_B` for `a = 0..3`.
pub type SpinorCoeffs = [Matrix2<C64>; 4];

/// Tolerance for the antisymmetry and trace conditions on `Γ̃`.
pub const H_CONNECTION_TOLERANCE: f64 = 1e-9;

/// The induced dilaton and electromagnetic coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InducedScalars {
    pub g: Vector4<f64>,
    pub y: Vector4<f64>,
}

/// Real Lorentz connection coefficients `Γ̃_a^λ_μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HConnection(pub [Matrix4<f64>; 4]);

impl Default for HConnection {
    fn default() -> Self {
        Self::zero()
    }
}

impl HConnection {
    pub fn zero() -> Self {
        HConnection([Matrix4::zeros(); 4])
    }

    /// `Γ̃_a^{λμ} = Γ̃_a^λ_ν η^{νμ}`.
    pub fn raised(&self, a: usize) -> Matrix4<f64> {
        self.0[a] * eta()
    }

    /// `Σ_a v^a Γ̃_a`.
    pub fn contract(&self, v: &Vector4<f64>) -> Matrix4<f64> {
        (0..4).fold(Matrix4::zeros(), |acc, a| acc + self.0[a] * v[a])
    }

    /// Largest violation of `Γ̃^{λμ} = −Γ̃^{μλ}`.
    pub fn antisymmetry_defect(&self) -> f64 {
        (0..4)
            .map(|a| {
                let r = self.raised(a);
                (r + r.transpose()).amax()
            })
            .fold(0.0, f64::max)
    }

    pub fn trace_defect(&self) -> f64 {
        self.0.iter().map(|m| m.trace().abs()).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let scale = 1.0 + self.0.iter().map(|m| m.amax()).fold(0.0, f64::max);
        let anti = self.antisymmetry_defect();
        if anti > H_CONNECTION_TOLERANCE * scale {
            return Err(Error::InvalidHConnection(format!("lowered coefficients not antisymmetric (defect {anti:e})")));
        }
        if !self.0.iter().all(|m| m.iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidHConnection("non-finite coefficient".into()));
        }
        Ok(())
    }
}

/// `Σ_a v^a Λ_a`.
pub fn contract_spinor(l: &SpinorCoeffs, v: &Vector4<f64>) -> Matrix2<C64> {
    (0..4).fold(Matrix2::zeros(), |acc, a| acc + l[a] * c(v[a], 0.0))
}

/// `G_a = ½ Re Tr Λ_a`, `Y_a = ½ Im Tr Λ_a`.
pub fn induced_scalars(l: &SpinorCoeffs) -> InducedScalars {
    let mut s = InducedScalars::default();
    for a in 0..4 {
        let t = l[a].trace();
        s.g[a] = 0.5 * t.re;
        s.y[a] = 0.5 * t.im;
    }
    s
}

/// `Γ̃_a = Λ_a ⊗ δ + δ ⊗ Λ̄_a − 2G_a δ⊗δ` read in the Pauli frame.
pub fn induced_h_connection(l: &SpinorCoeffs) -> HConnection {
    let s = induced_scalars(l);
    HConnection(std::array::from_fn(|a| induced_end_h(&l[a]) - Matrix4::identity() * (2.0 * s.g[a])))
}

/// `Λ_a = (G_a + iY_a)𝟙 + ½ Γ̃_a^{AȦ}_{BȦ}`.
pub fn reconstruct_spinor(s: &InducedScalars, gt: &HConnection) -> Result<SpinorCoeffs> {
    gt.validate()?;
    Ok(std::array::from_fn(|a| Matrix2::identity() * c(s.g[a], s.y[a]) + half_trace(&gt.0[a])))
}

/// Dirac-spinor connection `iY_a 𝟙 + ¼ Γ̃_a^{λμ} γ_λ γ_μ` (Weyl basis, `G = 0`).
pub fn four_spinor_connection(y: &Vector4<f64>, gt: &HConnection) -> [EndW; 4] {
    std::array::from_fn(|a| {
        let mut m = hat_gamma(&Bivector(gt.raised(a))).scale(c(0.25, 0.0));
        m.matrix += Matrix4::identity() * c(0.0, y[a]);
        m
    })
}

/// `Γ_a^λ_μ = Γ̃_a^λ_μ + 2G_a δ^λ_μ` in the frame of `Θ`.
pub fn spacetime_connection(theta: &Matrix4<f64>, gt: &HConnection, g: &Vector4<f64>) -> Result<[Matrix4<f64>; 4]> {
    check_tetrad(theta)?;
    Ok(std::array::from_fn(|a| gt.0[a] + Matrix4::identity() * (2.0 * g[a])))
}

/// Minimum `|det Θ|` accepted as non-degenerate.
pub const TETRAD_TOLERANCE: f64 = 1e-12;

pub(crate) fn check_tetrad(theta: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let d = theta.determinant();
    if !(d.abs() > TETRAD_TOLERANCE) {
        return Err(Error::DegenerateTetrad(d));
    }
    theta.try_inverse().ok_or(Error::DegenerateTetrad(d))
}

/// A tetrad field `x ↦ Θ_a^λ` (row `a`, column `λ`).
pub trait TetradField {
    fn tetrad(&self, x: &Point) -> Result<Matrix4<f64>>;

    /// `∂_b Θ_a^λ`; the default is a 4th-order centred difference.
    fn tetrad_derivative(&self, x: &Point, b: usize) -> Result<Matrix4<f64>> {
        let h = 1e-3;
        let at = |k: f64| {
            let mut p = *x;
            p[b] += k * h;
            self.tetrad(&p)
        };
        Ok((at(-2.0)? - at(2.0)? + (at(1.0)? - at(-1.0)?) * 8.0) / (12.0 * h))
    }
}

/// `T^c_ab` stored as `t[c][(a, b)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torsion(pub [Matrix4<f64>; 4]);

impl Torsion {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|m| m.amax()).fold(0.0, f64::max)
    }
}

/// Solves `Θ_c^λ T^c_ab = ∂_[a Θ_b]^λ + Θ_[a^μ Γ̃_b]^λ_μ + 2Θ_[a^λ G_b]` given
/// the tetrad derivatives `dtheta[b] = ∂_b Θ`.
pub fn torsion_from_derivatives(
    theta: &Matrix4<f64>,
    dtheta: &[Matrix4<f64>; 4],
    gt: &HConnection,
    g: &Vector4<f64>,
) -> Result<Torsion> {
    let inv_t = check_tetrad(theta)?.transpose();
    let mut out = [Matrix4::zeros(); 4];
    for a in 0..4 {
        for b in (a + 1)..4 {
            let mut v = Vector4::zeros();
            for l in 0..4 {
                let mut val = 0.5 * (dtheta[a][(b, l)] - dtheta[b][(a, l)]);
                for mu in 0..4 {
                    val += 0.5 * (theta[(a, mu)] * gt.0[b][(l, mu)] - theta[(b, mu)] * gt.0[a][(l, mu)]);
                }
                val += theta[(a, l)] * g[b] - theta[(b, l)] * g[a];
                v[l] = val;
            }
            let t = inv_t * v;
            for cidx in 0..4 {
                out[cidx][(a, b)] = t[cidx];
                out[cidx][(b, a)] = -t[cidx];
            }
        }
    }
    Ok(Torsion(out))
}

/// Torsion of `(Θ, Γ̃, G)` at `x`, differentiating `Θ` through the field.
pub fn torsion(field: &dyn TetradField, gt: &HConnection, g: &Vector4<f64>, x: &Point) -> Result<Torsion> {
    let theta = field.tetrad(x)?;
    let d = [
        field.tetrad_derivative(x, 0)?,
        field.tetrad_derivative(x, 1)?,
        field.tetrad_derivative(x, 2)?,
        field.tetrad_derivative(x, 3)?,
    ];
    torsion_from_derivatives(&theta, &d, gt, g)
}

/// Samples of a spinor connection on a square grid in the chart plane
/// spanned by directions `a` and `b`.
#[derive(Debug, Clone)]
pub struct PlaneGrid {
    pub a: usize,
    pub b: usize,
    pub h: f64,
    pub n: usize,
    samples: Vec<SpinorCoeffs>,
}

/// Smallest grid edge accepted by the curvature check.
pub const MIN_GRID: usize = 5;

impl PlaneGrid {
    /// Samples `field` on an `n × n` grid centred at `center`.
    pub fn sample<F>(field: F, center: &Point, a: usize, b: usize, h: f64, n: usize) -> Result<Self>
    where
        F: Fn(&Point) -> SpinorCoeffs,
    {
        if a == b || a > 3 || b > 3 {
            return Err(Error::param("plane", "directions must be distinct and below 4"));
        }
        if n < MIN_GRID {
            return Err(Error::GridTooSmall(format!("{n} points per edge, need at least {MIN_GRID}")));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidStep(h));
        }
        let half = (n as f64 - 1.0) / 2.0;
        let mut samples = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut p = *center;
                p[a] += (i as f64 - half) * h;
                p[b] += (j as f64 - half) * h;
                samples.push(field(&p));
            }
        }
        Ok(PlaneGrid { a, b, h, n, samples })
    }

    pub fn at(&self, i: usize, j: usize) -> &SpinorCoeffs {
        &self.samples[i * self.n + j]
    }

    fn node(&self, i: isize, j: isize) -> &SpinorCoeffs {
        self.at(i as usize, j as usize)
    }

    fn center(&self) -> (usize, usize) {
        (self.n / 2, self.n / 2)
    }
}

/// Derivative of a grid quantity along one grid axis. Second order uses a
/// centred stencil or a one-sided one at the edges; fourth order needs two
/// neighbours on each side.
fn grid_derivative<T, F>(grid: &PlaneGrid, i: usize, j: usize, axis: usize, fourth: bool, f: F) -> Result<T>
where
    F: Fn(&SpinorCoeffs) -> T,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = grid.n as isize;
    let (i, j) = (i as isize, j as isize);
    let pos = if axis == 0 { i } else { j };
    let get = |k: isize| {
        let (ii, jj) = if axis == 0 { (i + k, j) } else { (i, j + k) };
        f(grid.node(ii, jj))
    };
    let h = grid.h;
    if fourth {
        if pos < 2 || pos > n - 3 {
            return Err(Error::GridTooSmall("fourth-order stencil needs two neighbours".into()));
        }
        return Ok((get(-2) - get(2) + (get(1) - get(-1)) * 8.0) * (1.0 / (12.0 * h)));
    }
    Ok(if pos == 0 {
        (get(0) * -3.0 + get(1) * 4.0 - get(2)) * (1.0 / (2.0 * h))
    } else if pos == n - 1 {
        (get(0) * 3.0 - get(-1) * 4.0 + get(-2)) * (1.0 / (2.0 * h))
    } else {
        (get(1) - get(-1)) * (1.0 / (2.0 * h))
    })
}

/// `R_ab = −(∂_a Λ_b − ∂_b Λ_a) + [Λ_a, Λ_b]` from given derivatives.
pub fn spinor_curvature(
    l_a: &Matrix2<C64>,
    l_b: &Matrix2<C64>,
    da_lb: &Matrix2<C64>,
    db_la: &Matrix2<C64>,
) -> Matrix2<C64> {
    -(da_lb - db_la) + (l_a * l_b - l_b * l_a)
}

/// `R̃_ab = −(∂_a Γ̃_b − ∂_b Γ̃_a) + [Γ̃_a, Γ̃_b]`.
pub fn h_curvature(g_a: &Matrix4<f64>, g_b: &Matrix4<f64>, da_gb: &Matrix4<f64>, db_ga: &Matrix4<f64>) -> Matrix4<f64> {
    -(da_gb - db_ga) + (g_a * g_b - g_b * g_a)
}

/// Residual of `R_ab = −2(dG + i dY)_ab 𝟙 + ½ R̃_ab^{AȦ}_{BȦ}` at node
/// `(i, j)` with `(dF)_ab = ½(∂_a F_b − ∂_b F_a)`.
///
/// The left side differentiates `Λ` at second order; the right side
/// differentiates `(G, Y, Γ̃)` at fourth order where the stencil fits, so the
/// residual measures the second-order truncation error of the left side.
pub fn curvature_relation_residual(grid: &PlaneGrid, i: usize, j: usize) -> Result<f64> {
    let (a, b) = (grid.a, grid.b);
    if i >= grid.n || j >= grid.n {
        return Err(Error::param("node", "outside grid"));
    }
    let l = grid.at(i, j);
    let complex_derivative = |axis: usize, dir: usize| -> Result<Matrix2<C64>> {
        let re = grid_derivative(grid, i, j, axis, false, |s| s[dir].map(|z| z.re))?;
        let im = grid_derivative(grid, i, j, axis, false, |s| s[dir].map(|z| z.im))?;
        Ok(re.zip_map(&im, c))
    };
    let da_lb = complex_derivative(0, b)?;
    let db_la = complex_derivative(1, a)?;
    let lhs = spinor_curvature(&l[a], &l[b], &da_lb, &db_la);

    let interior = |p: usize| p >= 2 && p + 2 < grid.n;
    let fourth = interior(i) && interior(j);
    let gt = |s: &SpinorCoeffs| induced_h_connection(s);
    let sc = |s: &SpinorCoeffs| induced_scalars(s);
    let da_gtb = grid_derivative(grid, i, j, 0, fourth, |s| gt(s).0[b])?;
    let db_gta = grid_derivative(grid, i, j, 1, fourth, |s| gt(s).0[a])?;
    let da_gb = grid_derivative(grid, i, j, 0, fourth, |s| sc(s).g[b])?;
    let db_ga = grid_derivative(grid, i, j, 1, fourth, |s| sc(s).g[a])?;
    let da_yb = grid_derivative(grid, i, j, 0, fourth, |s| sc(s).y[b])?;
    let db_ya = grid_derivative(grid, i, j, 1, fourth, |s| sc(s).y[a])?;
    let here = gt(l);
    let rt = h_curvature(&here.0[a], &here.0[b], &da_gtb, &db_gta);
    let dg = 0.5 * (da_gb - db_ga);
    let dy = 0.5 * (da_yb - db_ya);
    let rhs = Matrix2::identity() * c(-2.0 * dg, -2.0 * dy) + half_trace(&rt);
    Ok((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Residual of the curvature relation at the grid centre.
pub fn curvature_relation_check(grid: &PlaneGrid) -> Result<f64> {
    let (i, j) = grid.center();
    curvature_relation_residual(grid, i, j)
}

/// `Λ − Λ' = (ρ + iα)𝟙 + φ` with `Tr φ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionDifference {
    pub alpha: Vector4<f64>,
    /// Real trace part `ρ_a`, zero when both connections induce the same `G`.
    pub real_trace: Vector4<f64>,
    pub phi: [Matrix2<C64>; 4],
}

impl ConnectionDifference {
    /// `Φ♭_a = φ_a ⊗ δ + δ ⊗ φ̄_a` on `H`.
    pub fn phi_flat(&self, a: usize) -> Matrix4<f64> {
        induced_end_h(&self.phi[a])
    }
}

pub fn connection_difference_decompose(l: &SpinorCoeffs, lp: &SpinorCoeffs) -> ConnectionDifference {
    let mut out =
        ConnectionDifference { alpha: Vector4::zeros(), real_trace: Vector4::zeros(), phi: [Matrix2::zeros(); 4] };
    for a in 0..4 {
        let theta = l[a] - lp[a];
        let half = theta.trace() * 0.5;
        out.real_trace[a] = half.re;
        out.alpha[a] = half.im;
        out.phi[a] = theta - Matrix2::identity() * half;
    }
    out
}
