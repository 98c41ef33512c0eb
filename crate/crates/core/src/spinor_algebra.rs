//! Finite-dimensional 2-spinor algebra.
//!
//! `U` is a complex 2-dimensional space with a normalized basis `(ζ_A)`. A
//! normalized symplectic form `ε` is fixed only up to a phase, so the phase is
//! an explicit parameter of [`SymplecticForm`]. Minkowski space `H` is the
//! Hermitian part of `U ⊗ Ū`; elements are stored as Hermitian 2×2 matrices
//! `w^{AȦ}` and read off in the Pauli basis `τ_λ = σ_λ / √2`.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

use crate::{Error, Result, C64};

/// Sign `s` in `eps_sharp(eps_flat(u)) = s·u`, fixed by a 2×2 brute-force
/// computation with the Ricci matrix in both index positions.
pub const FLAT_SHARP_SIGN: f64 = -1.0;

/// Relative tolerance for the null-cone test `|det w| ≤ tol·‖w‖²`.
pub const NULL_TOLERANCE: f64 = 1e-10;

/// Minkowski metric in the Pauli frame, signature `(+,-,-,-)`.
pub fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// `g(x, y)` for Pauli components.
pub fn minkowski_dot(x: &Vector4<f64>, y: &Vector4<f64>) -> f64 {
    x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3]
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The Pauli matrices `σ_0 = 𝟙, σ_1, σ_2, σ_3`.
pub fn pauli_matrices() -> [Matrix2<C64>; 4] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        Matrix2::new(one, z, z, one),
        Matrix2::new(z, one, one, z),
        Matrix2::new(z, -i, i, z),
        Matrix2::new(one, z, z, -one),
    ]
}

/// Antisymmetric Ricci matrix with `ε_12 = +1`.
pub fn ricci() -> Matrix2<C64> {
    Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0))
}

/// An element `u^A ζ_A` of `U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpinor(pub Vector2<C64>);

/// An element `λ_A z^A` of `U*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoSpinor(pub Vector2<C64>);

impl TwoSpinor {
    pub fn new(u1: C64, u2: C64) -> Self {
        TwoSpinor(Vector2::new(u1, u2))
    }

    /// `u ⊗ ū` as the matrix `u^A ū^Ȧ`.
    pub fn outer(&self) -> Matrix2<C64> {
        self.0 * self.0.adjoint()
    }
}

impl CoSpinor {
    pub fn new(l1: C64, l2: C64) -> Self {
        CoSpinor(Vector2::new(l1, l2))
    }

    /// Pairing `⟨λ, u⟩ = λ_A u^A`.
    pub fn pair(&self, u: &TwoSpinor) -> C64 {
        self.0[0] * u.0[0] + self.0[1] * u.0[1]
    }
}

/// Normalized antisymmetric form `ε = e^{it}·Ricci` on `U`.
///
/// The inverse form `ε^{-1}` on `U*` then has matrix `e^{-it}·Ricci`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticForm {
    phase: C64,
}

impl Default for SymplecticForm {
    fn default() -> Self {
        Self::ricci()
    }
}

impl SymplecticForm {
    pub fn ricci() -> Self {
        SymplecticForm { phase: c(1.0, 0.0) }
    }

    pub fn with_phase(t: f64) -> Self {
        SymplecticForm { phase: C64::from_polar(1.0, t) }
    }

    pub fn phase(&self) -> C64 {
        self.phase
    }

    /// `ε_AB`.
    pub fn lower(&self) -> Matrix2<C64> {
        ricci() * self.phase
    }

    /// `ε^{AB}`, the components of `ε^{-1}`.
    pub fn upper(&self) -> Matrix2<C64> {
        ricci() * self.phase.conj()
    }

    /// `ε(u, v) = ε_AB u^A v^B`.
    pub fn eval(&self, u: &TwoSpinor, v: &TwoSpinor) -> C64 {
        (u.0.transpose() * self.lower() * v.0)[0]
    }

    /// `ε^{-1}(λ, μ) = ε^{AB} λ_A μ_B`.
    pub fn eval_inverse(&self, l: &CoSpinor, m: &CoSpinor) -> C64 {
        (l.0.transpose() * self.upper() * m.0)[0]
    }
}

/// `(u♭)_B = ε_AB u^A`.
pub fn eps_flat(u: &TwoSpinor, eps: &SymplecticForm) -> CoSpinor {
    CoSpinor(eps.lower().transpose() * u.0)
}

/// `(λ#)^B = ε^{AB} λ_A`.
pub fn eps_sharp(l: &CoSpinor, eps: &SymplecticForm) -> TwoSpinor {
    TwoSpinor(eps.upper().transpose() * l.0)
}

/// Arbitrary element of `U ⊗ Ū`, not necessarily Hermitian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexTensorUU(pub Matrix2<C64>);

/// Element of `H`: a Hermitian matrix `w^{AȦ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinkVector {
    herm: Matrix2<C64>,
}

impl MinkVector {
    /// Accepts `m` if it is Hermitian to round-off.
    pub fn from_herm(m: Matrix2<C64>) -> Result<Self> {
        let defect = (m - m.adjoint()).camax();
        let scale = 1.0 + m.camax();
        if defect > 1e-12 * scale {
            return Err(Error::param("herm", format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(Self::hermitize(m))
    }

    /// Hermitian part `½(m + m†)`.
    pub fn hermitize(m: Matrix2<C64>) -> Self {
        MinkVector { herm: (m + m.adjoint()) * c(0.5, 0.0) }
    }

    /// `w^{AȦ} = (1/√2) σ_λ^{AȦ} w^λ`.
    pub fn from_pauli(w: &Vector4<f64>) -> Self {
        let s = pauli_matrices();
        let mut m = Matrix2::zeros();
        for l in 0..4 {
            m += s[l] * c(w[l] / std::f64::consts::SQRT_2, 0.0);
        }
        MinkVector { herm: m }
    }

    /// `w^λ = Tr(σ_λ w) / √2`.
    pub fn pauli(&self) -> Vector4<f64> {
        pauli_components(&self.herm).map(|z| z.re)
    }

    pub fn herm(&self) -> &Matrix2<C64> {
        &self.herm
    }

    pub fn zero() -> Self {
        MinkVector { herm: Matrix2::zeros() }
    }

    pub fn is_zero(&self) -> bool {
        self.herm.iter().all(|z| z.norm() == 0.0)
    }
}

/// Complex Pauli components `Tr(σ_λ m)/√2` of any `m ∈ U ⊗ Ū`.
pub fn pauli_components(m: &Matrix2<C64>) -> Vector4<C64> {
    let s = pauli_matrices();
    Vector4::from_fn(|l, _| (s[l] * m).trace() / std::f64::consts::SQRT_2)
}

/// Unique split `w = h + i·a` with `h`, `a` Hermitian.
pub fn herm_decompose(w: &ComplexTensorUU) -> (MinkVector, MinkVector) {
    let m = w.0;
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let a = (m - m.adjoint()) * c(0.0, -0.5);
    (MinkVector { herm: h }, MinkVector { herm: a })
}

/// `g(w, w') = ε_AB ε̄_ȦḂ w^{AȦ} w'^{BḂ}`; the phase of `ε` cancels.
pub fn g_bilinear(w: &Matrix2<C64>, wp: &Matrix2<C64>, eps: &SymplecticForm) -> C64 {
    let e = eps.lower();
    let eb = e.map(|z| z.conj());
    let mut acc = c(0.0, 0.0);
    for a in 0..2 {
        for ad in 0..2 {
            for b in 0..2 {
                for bd in 0..2 {
                    acc += e[(a, b)] * eb[(ad, bd)] * w[(a, ad)] * wp[(b, bd)];
                }
            }
        }
    }
    acc
}

/// `g` restricted to `H`, always real.
pub fn g_mink(x: &MinkVector, y: &MinkVector) -> f64 {
    g_bilinear(&x.herm, &y.herm, &SymplecticForm::ricci()).re
}

/// Pauli basis `τ_λ = σ_λ/√2` of `H`.
pub fn pauli_basis() -> [MinkVector; 4] {
    let s = pauli_matrices();
    s.map(|m| MinkVector { herm: m * c(std::f64::consts::FRAC_1_SQRT_2, 0.0) })
}

/// Time orientation of a null vector: `w = s·u⊗ū`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullSign {
    Future,
    Past,
}

impl NullSign {
    pub fn value(self) -> f64 {
        match self {
            NullSign::Future => 1.0,
            NullSign::Past => -1.0,
        }
    }
}

/// Writes a nonzero null `w` as `±u⊗ū`; `None` when `w` is not null or is zero.
///
/// `u` is read off the column of the dominant diagonal entry and normalized so
/// that that component is real positive.
pub fn null_decompose(w: &MinkVector) -> Option<(TwoSpinor, NullSign)> {
    let m = &w.herm;
    let norm2 = m.norm_squared();
    if norm2 == 0.0 {
        return None;
    }
    let det = m.determinant();
    if det.norm() > NULL_TOLERANCE * norm2 {
        return None;
    }
    let k = if m[(0, 0)].re.abs() >= m[(1, 1)].re.abs() { 0 } else { 1 };
    let d = m[(k, k)].re;
    if d == 0.0 {
        return None;
    }
    let sign = if d > 0.0 { NullSign::Future } else { NullSign::Past };
    let scale = sign.value() / d.abs().sqrt();
    let u = TwoSpinor(m.column(k).into_owned() * c(scale, 0.0));
    Some((u, sign))
}

/// The endomorphism `w ↦ ψ w + w ψ†` of `H` induced by `ψ ∈ End U`, as the
/// real matrix `M^λ_μ` in the Pauli frame.
pub fn induced_end_h(psi: &Matrix2<C64>) -> Matrix4<f64> {
    let s = pauli_matrices();
    let mut out = Matrix4::zeros();
    for mu in 0..4 {
        let img = psi * s[mu] + s[mu] * psi.adjoint();
        for l in 0..4 {
            out[(l, mu)] = 0.5 * (s[l] * img).trace().re;
        }
    }
    out
}

/// Half the trace over the conjugate index: `½ M^{AȦ}_{BȦ} = ¼ M^λ_μ σ_λ σ_μ`.
pub fn half_trace(m: &Matrix4<f64>) -> Matrix2<C64> {
    let s = pauli_matrices();
    let mut out = Matrix2::zeros();
    for l in 0..4 {
        for mu in 0..4 {
            out += s[l] * s[mu] * c(0.25 * m[(l, mu)], 0.0);
        }
    }
    out
}

/// The boost carrying the unit future timelike `a` to `b` and fixing the
/// orthogonal complement of their span:
/// `Λ = 𝟙 − (a+b)(a+b)♭/(1 + g(a,b)) + 2 b a♭`.
pub fn boost_matrix(a: &Vector4<f64>, b: &Vector4<f64>) -> Matrix4<f64> {
    let e = eta();
    let s = a + b;
    let ab = minkowski_dot(a, b);
    Matrix4::identity() - s * (e * s).transpose() / (1.0 + ab) + b * (e * a).transpose() * 2.0
}
