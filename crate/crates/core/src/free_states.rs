//! Free electron and positron states: the splitting `W = W⁺_p ⊕ W⁻_p` of
//! Dirac spinors by a mass-shell momentum, rest-frame Dirac bases, boosts with
//! their spin lifts, and Dirac frames carried along a worldline.

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::backgrounds::{Background, Worldline};
use crate::dirac_algebra::{dirac_basis_in_weyl, gamma_covector, EndW};
use crate::fermi::{fermi_data, transport_dirac_frame, Gauge};
use crate::spinor_algebra::{boost_matrix, c, eta, minkowski_dot, pauli_matrices, MinkVector};
use crate::{Error, Result, C64};

/// Relative tolerance of the mass-shell condition.
pub const SHELL_TOLERANCE: f64 = 1e-10;

/// A future-pointing covector `p_λ` (orthonormal frame) with `g#(p,p) = m²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassShellMomentum {
    p: Vector4<f64>,
    m: f64,
}

impl MassShellMomentum {
    pub fn new(p: Vector4<f64>, m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::ZeroMass);
        }
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::param("momentum", "components must be finite"));
        }
        let n = minkowski_dot(&p, &p);
        if (n - m * m).abs() > SHELL_TOLERANCE * (m * m).max(p.norm_squared()) {
            return Err(Error::OffShell(n.sqrt() - m));
        }
        if p[0] <= 0.0 {
            return Err(Error::PastPointing);
        }
        Ok(MassShellMomentum { p, m })
    }

    /// On-shell covector whose vector `g#(p)` has spatial part `k`.
    pub fn from_three_momentum(m: f64, k: [f64; 3]) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::ZeroMass);
        }
        let e = (m * m + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        Self::new(Vector4::new(e, -k[0], -k[1], -k[2]), m)
    }

    /// `p = m·τ♭`.
    pub fn at_rest(m: f64, tau: &Vector4<f64>) -> Result<Self> {
        Self::new(eta() * tau * m, m)
    }

    pub fn covector(&self) -> &Vector4<f64> {
        &self.p
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    /// Unit timelike vector `g#(p)/m`.
    pub fn velocity(&self) -> Vector4<f64> {
        eta() * self.p / self.m
    }
}

/// `P± = ½(𝟙 ± γ[p]/m)`, the projectors onto `Ker(γ[p] ∓ m)`.
pub fn energy_splitting(p: &MassShellMomentum) -> (EndW, EndW) {
    let g = gamma_covector(&p.p).matrix * c(0.5 / p.m, 0.0);
    let half = Matrix4::identity() * c(0.5, 0.0);
    (EndW::weyl(half + g), EndW::weyl(half - g))
}

/// `(u₁, u₂, v₁, v₂)` stored as the columns of a Weyl-basis matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracFrame(pub Matrix4<C64>);

impl DiracFrame {
    pub fn u(&self, a: usize) -> Vector4<C64> {
        self.0.column(a).into_owned()
    }

    pub fn v(&self, a: usize) -> Vector4<C64> {
        self.0.column(2 + a).into_owned()
    }

    /// Largest of `|(γ[p] − m)u_A|` and `|(γ[p] + m)v_A|`.
    pub fn adaptedness_residual(&self, p: &MassShellMomentum) -> f64 {
        let g = gamma_covector(&p.p).matrix;
        let m = Matrix4::identity() * c(p.m, 0.0);
        let (plus, minus) = (g - m, g + m);
        let mut r: f64 = 0.0;
        for a in 0..2 {
            r = r.max((plus * self.u(a)).norm());
            r = r.max((minus * self.v(a)).norm());
        }
        r
    }

    /// `k`-Gram matrix of the four columns.
    pub fn k_gram(&self) -> Matrix4<C64> {
        self.0.adjoint() * crate::dirac_algebra::k_matrix() * self.0
    }
}

/// `u_A = (ζ_A, z̄^A)/√2` and `v_A = (ζ_A, −z̄^A)/√2`.
pub fn rest_dirac_basis() -> DiracFrame {
    DiracFrame(dirac_basis_in_weyl())
}

/// A boost together with one of its two spin lifts.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostLift {
    pub lambda: Matrix4<f64>,
    pub k: Matrix2<C64>,
    /// `±1` per sample: the sign applied by the continuity rule.
    pub sign_history: Vec<i8>,
}

/// `Λ^μ_ν = ½ Re Tr(σ_μ K σ_ν K†)`, the action `w ↦ K w K†` on `H`.
pub fn lorentz_of_spin(k: &Matrix2<C64>) -> Matrix4<f64> {
    let s = pauli_matrices();
    Matrix4::from_fn(|mu, nu| 0.5 * (s[mu] * k * s[nu] * k.adjoint()).trace().re)
}

/// One of the two `K ∈ Sl(U)` over a proper orthochronous `Λ`, taken with
/// `Re Tr K ≥ 0`. Uses `Σ Λ^μ_ν σ_μ σ_ν = 2 conj(Tr K)·K`.
pub fn lift_lorentz(l: &Matrix4<f64>) -> Result<Matrix2<C64>> {
    let s = pauli_matrices();
    let mut m = Matrix2::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            m += s[mu] * s[nu] * c(l[(mu, nu)], 0.0);
        }
    }
    let d = m.determinant();
    if d.norm() < 1e-24 {
        return Err(Error::param("lorentz", "spin lift undefined (rotation by π)"));
    }
    let mut k = m / d.sqrt();
    if k.trace().re < 0.0 {
        k = -k;
    }
    Ok(k)
}

/// Square root of a positive Hermitian 2×2 matrix with unit determinant.
fn sqrt_unimodular(m: &Matrix2<C64>) -> Matrix2<C64> {
    let tr = m.trace().re;
    (m + Matrix2::identity()) / c((tr + 2.0).sqrt(), 0.0)
}

fn sigma_of(v: &Vector4<f64>) -> Matrix2<C64> {
    MinkVector::from_pauli(v).herm() * c(std::f64::consts::SQRT_2, 0.0)
}

/// The boost-type lift carrying `τ` to `q`:
/// `K = B·sqrt(B⁻¹ σ(q) B⁻¹)·B⁻¹` with `B = sqrt(σ(τ))`.
pub fn boost_spin(tau: &Vector4<f64>, q: &Vector4<f64>) -> Result<Matrix2<C64>> {
    let b = sqrt_unimodular(&sigma_of(tau));
    let bi = b.try_inverse().ok_or_else(|| Error::param("tau", "singular observer"))?;
    let x = sqrt_unimodular(&(bi * sigma_of(q) * bi));
    Ok(b * x * bi)
}

/// Keeps spin lifts on one sheet of the double cover along a path: each new
/// `K` is replaced by `−K` when that is closer to the previous sample.
#[derive(Debug, Clone, Default)]
pub struct SpinLiftTracker {
    prev: Option<Matrix2<C64>>,
    pub history: Vec<i8>,
}

impl SpinLiftTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next(&mut self, k: Matrix2<C64>) -> Matrix2<C64> {
        let chosen = match self.prev {
            Some(p) if (k + p).norm() < (k - p).norm() => {
                self.history.push(-1);
                -k
            }
            _ => {
                self.history.push(1);
                k
            }
        };
        self.prev = Some(chosen);
        chosen
    }

    pub fn flips(&self) -> usize {
        self.history.iter().filter(|&&s| s < 0).count()
    }
}

fn check_observer(tau: &Vector4<f64>) -> Result<()> {
    let n = minkowski_dot(tau, tau);
    if (n - 1.0).abs() > 1e-8 {
        return Err(Error::param("tau", format!("not unit timelike (g = {n})")));
    }
    if tau[0] <= 0.0 {
        return Err(Error::PastPointing);
    }
    Ok(())
}

/// The boost taking `τ` to `g#(p)/m` and its lift continuous from `K = 𝟙`
/// at `p = mτ♭`.
pub fn boost_for(tau: &Vector4<f64>, p: &MassShellMomentum) -> Result<BoostLift> {
    check_observer(tau)?;
    let q = p.velocity();
    let k = boost_spin(tau, &q)?;
    Ok(BoostLift { lambda: boost_matrix(tau, &q), k, sign_history: vec![1] })
}

/// `boost_for` along a path of momenta, with the nearest-sign rule.
pub fn boost_path(tau: &Vector4<f64>, path: &[MassShellMomentum]) -> Result<Vec<BoostLift>> {
    let mut tracker = SpinLiftTracker::new();
    let mut out = Vec::with_capacity(path.len());
    for p in path {
        let mut b = boost_for(tau, p)?;
        b.k = tracker.next(b.k);
        b.sign_history = tracker.history.clone();
        out.push(b);
    }
    Ok(out)
}

/// `(K, (K†)⁻¹)` acting on `U ⊕ Ū*`, Weyl basis.
pub fn spin_action(k: &Matrix2<C64>) -> Result<EndW> {
    let inv = k.adjoint().try_inverse().ok_or_else(|| Error::param("K", "not invertible"))?;
    Ok(crate::dirac_algebra::block_diag(k, &inv))
}

/// Applies the lift of the boost `τ → g#(p)/m` to a frame adapted to `τ`.
pub fn dirac_frame(p: &MassShellMomentum, tau: &Vector4<f64>, rest: &DiracFrame) -> Result<(DiracFrame, BoostLift)> {
    let lift = boost_for(tau, p)?;
    let s = spin_action(&lift.k)?;
    Ok((DiracFrame(s.matrix * rest.0), lift))
}

/// Per-sample output of [`frames_along_worldline`].
#[derive(Debug, Clone)]
pub struct FrameSample {
    pub s: f64,
    pub tau: Vector4<f64>,
    /// Fermi-transported rest frame.
    pub transported: DiracFrame,
    /// Residual of adaptedness of the transported frame to `mτ♭`.
    pub rest_residual: f64,
    /// One boosted frame per requested momentum.
    pub boosted: Vec<(DiracFrame, f64)>,
}

/// Fermi-transports the rest Dirac frame along the worldline (gauge `α = 0`)
/// and at every step boosts it to each momentum in `momenta`.
pub fn frames_along_worldline(
    wl: &dyn Worldline,
    bg: &dyn Background,
    s0: f64,
    s_end: f64,
    h: f64,
    momenta: &[MassShellMomentum],
) -> Result<Vec<FrameSample>> {
    let tau0 = fermi_data(wl, bg, s0)?.tau;
    let start = spin_action(&boost_spin(&Vector4::x(), &tau0)?)?.matrix * rest_dirac_basis().0;
    let path = transport_dirac_frame(wl, bg, start, s0, s_end, h, &Gauge::Constant(0.0))?;
    let mass = momenta.first().map(|p| p.m).unwrap_or(1.0);
    path.into_iter()
        .map(|(s, f)| {
            let tau = fermi_data(wl, bg, s)?.tau;
            let frame = DiracFrame(f);
            let rest_p = MassShellMomentum::at_rest(mass, &tau)?;
            let rest_residual = frame.adaptedness_residual(&rest_p);
            let boosted = momenta
                .iter()
                .map(|p| {
                    let (bf, _) = dirac_frame(p, &tau, &frame)?;
                    let r = bf.adaptedness_residual(p);
                    Ok((bf, r))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FrameSample { s, tau, transported: frame, rest_residual, boosted })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac_algebra::{gamma_lambda, gamma_vector};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_p(rng: &mut ChaCha8Rng, m: f64) -> MassShellMomentum {
        let k = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        MassShellMomentum::from_three_momentum(m, k).unwrap()
    }

    fn cmax(m: &Matrix4<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn momentum_validation() {
        assert!(matches!(MassShellMomentum::new(Vector4::new(1.0, 0.0, 0.0, 0.0), 0.0), Err(Error::ZeroMass)));
        assert!(matches!(MassShellMomentum::new(Vector4::new(2.0, 0.0, 0.0, 0.0), 1.0), Err(Error::OffShell(_))));
        assert!(matches!(MassShellMomentum::new(Vector4::new(-1.0, 0.0, 0.0, 0.0), 1.0), Err(Error::PastPointing)));
        assert!(MassShellMomentum::new(Vector4::new(1.25, 0.75, 0.0, 0.0), 1.0).is_ok());
    }

    #[test]
    fn rest_projectors() {
        let p = MassShellMomentum::at_rest(2.0, &Vector4::x()).unwrap();
        let (pp, pm) = energy_splitting(&p);
        let g0 = gamma_lambda(0).matrix;
        let half = Matrix4::identity() * c(0.5, 0.0);
        assert!(cmax(&(pp.matrix - (half + g0 * c(0.5, 0.0)))) < 1e-15);
        assert!(cmax(&(pm.matrix - (half - g0 * c(0.5, 0.0)))) < 1e-15);
    }

    #[test]
    fn splitting_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let p = rand_p(&mut rng, 1.0);
            let (pp, pm) = energy_splitting(&p);
            assert!(cmax(&(pp.matrix + pm.matrix - Matrix4::identity())) < 1e-12);
            assert!(cmax(&(pp.matrix * pm.matrix)) < 1e-10);
            assert!(cmax(&(pp.matrix * pp.matrix - pp.matrix)) < 1e-10);
            assert!((pp.matrix.trace() - c(2.0, 0.0)).norm() < 1e-12);
            let g = gamma_covector(p.covector()).matrix;
            assert!(cmax(&(g * pp.matrix - pp.matrix * c(1.0, 0.0))) < 1e-10);
        }
    }

    #[test]
    fn rest_basis_properties() {
        let f = rest_dirac_basis();
        let p = MassShellMomentum::at_rest(1.0, &Vector4::x()).unwrap();
        assert!(f.adaptedness_residual(&p) < 1e-15);
        let gram = f.k_gram();
        let expected = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, -1.0)).map(|x| c(x, 0.0));
        assert!(cmax(&(gram - expected)) < 1e-15);
    }

    #[test]
    fn boost_anchor_and_properties() {
        let tau = Vector4::x();
        let p = MassShellMomentum::at_rest(1.0, &tau).unwrap();
        let b = boost_for(&tau, &p).unwrap();
        assert!((b.lambda - Matrix4::identity()).amax() < 1e-15);
        assert!((b.k - Matrix2::identity()).iter().all(|z| z.norm() < 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..200 {
            let p = rand_p(&mut rng, 1.0);
            let obs = rand_p(&mut rng, 1.0).velocity();
            let b = boost_for(&obs, &p).unwrap();
            assert!((b.k.determinant() - c(1.0, 0.0)).norm() < 1e-12);
            let l = lorentz_of_spin(&b.k);
            assert!((l - b.lambda).amax() < 1e-10 * b.lambda.amax());
            assert!((l * obs - p.velocity()).amax() < 1e-10 * p.velocity().amax());
            let (frame, _) = dirac_frame(&p, &Vector4::x(), &rest_dirac_basis()).unwrap();
            assert!(frame.adaptedness_residual(&p) < 1e-10 * p.covector()[0]);
            let expected = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, -1.0)).map(|x| c(x, 0.0));
            assert!(cmax(&(frame.k_gram() - expected)) < 1e-10 * p.covector()[0]);
        }
        let past = Vector4::new(-1.0, 0.0, 0.0, 0.0);
        assert!(matches!(boost_for(&past, &p), Err(Error::PastPointing)));
    }

    #[test]
    fn spin_action_intertwines_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..50 {
            let p = rand_p(&mut rng, 1.0);
            let k = boost_for(&Vector4::x(), &p).unwrap().k;
            let s = spin_action(&k).unwrap().matrix;
            let si = s.try_inverse().unwrap();
            let y = Vector4::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let lhs = s * gamma_vector(&y).matrix * si;
            let rhs = gamma_vector(&(lorentz_of_spin(&k) * y)).matrix;
            assert!(cmax(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn lift_homomorphism_collinear() {
        let boost = |chi: f64| {
            let p = MassShellMomentum::from_three_momentum(1.0, [chi.sinh(), 0.0, 0.0]).unwrap();
            boost_for(&Vector4::x(), &p).unwrap()
        };
        let (b1, b2) = (boost(0.4), boost(0.9));
        let prod = b1.k * b2.k;
        let direct = lift_lorentz(&(b1.lambda * b2.lambda)).unwrap();
        assert!((prod - direct).iter().all(|z| z.norm() < 1e-12));
        assert!((lift_lorentz(&b1.lambda).unwrap() - b1.k).iter().all(|z| z.norm() < 1e-12));
        assert!((boost(1.3).k - direct).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn lift_homomorphism_up_to_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..100 {
            let b1 = boost_for(&Vector4::x(), &rand_p(&mut rng, 1.0)).unwrap();
            let b2 = boost_for(&Vector4::x(), &rand_p(&mut rng, 1.0)).unwrap();
            let prod = b1.k * b2.k;
            let direct = lift_lorentz(&(b1.lambda * b2.lambda)).unwrap();
            let plus = (prod - direct).norm();
            let minus = (prod + direct).norm();
            assert!(plus.min(minus) < 1e-9 * prod.norm());
        }
    }

    #[test]
    fn rapidity_ramp_has_no_flips() {
        let path: Vec<_> = (0..100)
            .map(|i| {
                let chi = 4.0 * i as f64 / 99.0;
                MassShellMomentum::from_three_momentum(1.0, [0.6 * chi.sinh(), 0.0, 0.8 * chi.sinh()]).unwrap()
            })
            .collect();
        let lifts = boost_path(&Vector4::x(), &path).unwrap();
        assert!(lifts.last().unwrap().sign_history.iter().all(|&s| s == 1));
        let mut tracker = SpinLiftTracker::new();
        tracker.next(Matrix2::identity());
        let flipped = tracker.next(-Matrix2::identity());
        assert_eq!(flipped, Matrix2::identity());
        assert_eq!(tracker.flips(), 1);
    }
}
