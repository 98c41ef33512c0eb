//! Seeded identity suites behind `spinfermi check`.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::RunReport;
use super::CliError;
use crate::backgrounds::{levi_civita_fd, Background, CanonicalWorldline, Minkowski, SchwarzschildLike};
use crate::connection::{
    curvature_relation_check, induced_h_connection, induced_scalars, reconstruct_spinor, torsion, PlaneGrid,
    SpinorCoeffs, TetradField,
};
use crate::dirac_algebra::{block_diag, clifford_defect, hat_gamma, Bivector};
use crate::fermi::{
    adapted_frame, fermi_data, product_rule_residual, rest_frame_angle, transport, transport_vector_frame,
    unwrap_angles, Components, Gauge, TransportState,
};
use crate::free_states::{
    boost_for, boost_path, dirac_frame, energy_splitting, lorentz_of_spin, rest_dirac_basis, MassShellMomentum,
};
use crate::spinor_algebra::{g_mink, half_trace, minkowski_dot, null_decompose, pauli_basis, MinkVector, TwoSpinor};
use crate::{Point, Result, C64};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Suite names in execution order.
pub const SUITES: [&str; 12] = [
    "clifford",
    "pauli",
    "null-cone",
    "connection",
    "curvature",
    "torsion",
    "fermi-isometry",
    "thomas",
    "fermi-compat",
    "gauge",
    "hat-gamma",
    "free-states",
];

/// Accepted band for an observed convergence ratio under step halving.
pub const ORDER_TWO_RATIO: (f64, f64) = (3.7, 4.3);

type SuiteFn = fn(&mut ChaCha8Rng, &mut RunReport) -> Result<()>;

fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "clifford" => clifford,
        "pauli" => pauli,
        "null-cone" => null_cone,
        "connection" => connection,
        "curvature" => curvature,
        "torsion" => torsion_suite,
        "fermi-isometry" => fermi_isometry,
        "thomas" => thomas,
        "fermi-compat" => fermi_compat,
        "gauge" => gauge,
        "hat-gamma" => hat_gamma_suite,
        "free-states" => free_states,
        _ => return None,
    })
}

/// Runs one suite, or every suite for `"all"`. Suites run on separate
/// threads and their results are merged in the fixed order of [`SUITES`].
pub fn run_check(selector: &str, seed: u64) -> std::result::Result<RunReport, CliError> {
    let names: Vec<&str> = if selector == "all" {
        SUITES.to_vec()
    } else if suite_fn(selector).is_some() {
        vec![selector]
    } else {
        return Err(CliError::Invalid {
            path: "suite".into(),
            message: format!("unknown suite '{selector}'; expected one of: all, {}", SUITES.join(", ")),
        });
    };
    let results: Vec<std::result::Result<RunReport, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = names.iter().map(|name| scope.spawn(move || run_one(name, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    });
    let mut report = RunReport::new("check");
    report.seed = Some(seed);
    report.set_meta("suites", &names);
    for r in results {
        report.merge(r?);
    }
    Ok(report)
}

fn run_one(name: &str, seed: u64) -> std::result::Result<RunReport, CliError> {
    let f = suite_fn(name).expect("known suite");
    // Each suite draws from its own stream so that results do not depend on
    // which other suites were selected.
    let salt = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    let mut report = RunReport::new("check");
    f(&mut rng, &mut report).map_err(CliError::Runtime)?;
    Ok(report)
}

fn rc(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_herm(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    let v = Vector4::from_fn(|_, _| rng.random_range(-2.0..2.0));
    *MinkVector::from_pauli(&v).herm()
}

fn cmax2(m: &Matrix2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn cmax4(m: &Matrix4<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn ratio_residual(ratio: f64) -> f64 {
    let (lo, hi) = ORDER_TWO_RATIO;
    let mid = 0.5 * (lo + hi);
    if ratio.is_finite() {
        (ratio - mid).abs()
    } else {
        f64::INFINITY
    }
}

fn check_ratio(report: &mut RunReport, name: &str, coarse: f64, fine: f64) {
    let ratio = coarse / fine;
    report.set_meta(&format!("{name}.coarse"), coarse);
    report.set_meta(&format!("{name}.fine"), fine);
    report.set_meta(&format!("{name}.ratio"), ratio);
    let (lo, hi) = ORDER_TWO_RATIO;
    report.check(name, ratio_residual(ratio), 0.5 * (hi - lo));
}

fn clifford(rng: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (y, yp) = (random_herm(rng), random_herm(rng));
        worst = worst.max(clifford_defect(&y, &yp).max_abs());
    }
    report.check("clifford.defect", worst, 1e-12);
    Ok(())
}

fn pauli(_: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let b = pauli_basis();
    let target = Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0));
    let gram = Matrix4::from_fn(|l, m| g_mink(&b[l], &b[m]));
    report.check("pauli.gram", (gram - target).amax(), 1e-14);
    Ok(())
}

fn null_cone(rng: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let (mut g_worst, mut rec_worst): (f64, f64) = (0.0, 0.0);
    let mut wrong = 0usize;
    for k in 0..1000 {
        let u = Vector2::new(rc(rng), rc(rng));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let w = MinkVector::hermitize(u * u.adjoint() * C64::new(sign, 0.0));
        g_worst = g_worst.max(g_mink(&w, &w).abs());
        match null_decompose(&w) {
            Some((TwoSpinor(v), s)) => {
                if s.value() != sign {
                    wrong += 1;
                }
                let overlap = v.dotc(&u);
                let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
                rec_worst = rec_worst.max((u - v * phase).norm());
            }
            None => wrong += 1,
        }
        // A non-null partner: shift the time component.
        let mut p = w.pauli();
        p[0] += if p[0] >= 0.0 { 0.5 } else { -0.5 } + 0.1 * rng.random_range(0.0..1.0);
        p[1] += 0.3;
        let nn = MinkVector::from_pauli(&p);
        if g_mink(&nn, &nn).abs() > 1e-6 * p.norm_squared() && null_decompose(&nn).is_some() {
            wrong += 1;
        }
    }
    report.check("null-cone.g_of_null", g_worst, 1e-12);
    report.check("null-cone.recovery", rec_worst, 1e-10);
    report.check("null-cone.misclassified", wrong as f64, 0.0);
    Ok(())
}

fn random_coeffs(rng: &mut ChaCha8Rng) -> SpinorCoeffs {
    std::array::from_fn(|_| Matrix2::from_fn(|_, _| rc(rng)))
}

fn connection(rng: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let (mut rt, mut anti, mut tr): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let l = random_coeffs(rng);
        let gt = induced_h_connection(&l);
        anti = anti.max(gt.antisymmetry_defect());
        tr = tr.max(gt.trace_defect());
        let back = reconstruct_spinor(&induced_scalars(&l), &gt)?;
        for a in 0..4 {
            rt = rt.max(cmax2(&(back[a] - l[a])));
        }
    }
    report.check("connection.roundtrip", rt, 1e-13);
    report.check("connection.antisymmetry", anti, 1e-13);
    report.check("connection.traceless", tr, 1e-13);
    Ok(())
}

/// A smooth field `Λ_a(x) = A_a + B_a·(k·x) + C_a sin(q·x + φ_a)`.
struct SmoothField {
    a: SpinorCoeffs,
    b: SpinorCoeffs,
    cc: SpinorCoeffs,
    k: Vector4<f64>,
    q: Vector4<f64>,
    phase: [f64; 4],
}

impl SmoothField {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        SmoothField {
            a: random_coeffs(rng),
            b: random_coeffs(rng),
            cc: random_coeffs(rng),
            k: Vector4::from_fn(|_, _| rng.random_range(-1.0..1.0)),
            q: Vector4::from_fn(|_, _| rng.random_range(0.5..1.5)),
            phase: std::array::from_fn(|_| rng.random_range(0.0..6.0)),
        }
    }

    fn eval(&self, x: &Point) -> SpinorCoeffs {
        let lin = self.k.dot(x);
        let arg = self.q.dot(x);
        std::array::from_fn(|i| {
            self.a[i] + self.b[i] * C64::new(lin, 0.0) + self.cc[i] * C64::new((arg + self.phase[i]).sin(), 0.0)
        })
    }
}

fn curvature(rng: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let field = SmoothField::random(rng);
    let center = Point::from_fn(|_, _| rng.random_range(-0.5..0.5));
    let h = 0.04;
    let coarse = curvature_relation_check(&PlaneGrid::sample(|x| field.eval(x), &center, 0, 1, h, 17)?)?;
    let fine = curvature_relation_check(&PlaneGrid::sample(|x| field.eval(x), &center, 0, 1, h / 2.0, 17)?)?;
    check_ratio(report, "curvature.order", coarse, fine);
    Ok(())
}

fn torsion_suite(rng: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let bg = SchwarzschildLike::new(1.0)?;
    let x = Point::new(0.0, 3.0, 1.0, -2.0);
    let res = |h: f64| -> Result<f64> {
        let gt = levi_civita_fd(&bg, &x, h)?;
        Ok(torsion(&bg, &gt, &Vector4::zeros(), &x)?.max_abs())
    };
    let (coarse, fine) = (res(0.1)?, res(0.05)?);
    check_ratio(report, "torsion.order", coarse, fine);

    let flat = SchwarzschildLike::new(0.0)?;
    let mut diff: f64 = 0.0;
    for _ in 0..50 {
        let p = Point::from_fn(|_, _| rng.random_range(-5.0..5.0));
        diff = diff.max((flat.tetrad(&p)? - Minkowski.tetrad(&p)?).amax());
        let (a, b) = (flat.h_connection(&p)?, Minkowski.h_connection(&p)?);
        for i in 0..4 {
            diff = diff.max((a.0[i] - b.0[i]).amax());
        }
    }
    report.check("torsion.zero_mass_is_minkowski", diff, 0.0);
    Ok(())
}

/// The orbit used by the transport suites: `R = 1`, `v = 0.6`, `γ = 1.25`.
fn reference_orbit() -> Result<CanonicalWorldline> {
    CanonicalWorldline::circular_in(&Minkowski, 1.0, 0.6, 0.0)
}

const ORBIT_STEPS: f64 = 1e4;

fn fermi_isometry(_: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let wl = reference_orbit()?;
    let period = wl.proper_period().expect("circular");
    let tau0 = fermi_data(&wl, &Minkowski, 0.0)?.tau;
    let frame0 = adapted_frame(&tau0);
    let gram =
        |f: &Matrix4<f64>| Matrix4::from_fn(|i, j| minkowski_dot(&f.column(i).into_owned(), &f.column(j).into_owned()));
    let g0 = gram(&frame0);
    let path = transport_vector_frame(&wl, &Minkowski, frame0, 0.0, period, period / ORBIT_STEPS)?;
    let drift = path.iter().map(|(_, f)| (gram(f) - g0).amax()).fold(0.0, f64::max);
    report.check("fermi-isometry.metric_drift", drift, 1e-8);

    let x = |s: f64| Vector4::new(1.0 + s * s, s.sin(), (2.0 * s).cos(), 0.5 * s);
    let y = |s: f64| Vector4::new(s.cos(), 1.0 - s, 0.3 * s * s, (0.7 * s).sin());
    let s = 0.8;
    let coarse = product_rule_residual(&wl, &Minkowski, &x, &y, s, 1e-2)?;
    let fine = product_rule_residual(&wl, &Minkowski, &x, &y, s, 5e-3)?;
    check_ratio(report, "fermi-isometry.product_rule_order", coarse, fine);
    Ok(())
}

/// Result of the Thomas-precession experiment.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Precession {
    pub radius: f64,
    pub omega: f64,
    pub steps: usize,
    pub speed: f64,
    pub gamma: f64,
    pub proper_period: f64,
    /// Rotation of a Fermi-transported spatial vector over one orbit, seen in
    /// the instantaneous rest frame (negative = retrograde).
    pub measured: f64,
    /// `2π(1 − γ)`.
    pub expected: f64,
    pub error: f64,
}

/// Transports `e_r` once around a circular Minkowski orbit in `steps` RK4
/// steps and measures the accumulated rest-frame rotation.
pub fn thomas_precession(radius: f64, omega: f64, steps: usize) -> Result<Precession> {
    if steps == 0 {
        return Err(crate::Error::param("steps", "must be at least 1"));
    }
    let wl = CanonicalWorldline::circular_in(&Minkowski, radius, omega, 0.0)?;
    let period = wl.proper_period().expect("circular");
    let init = TransportState { s: 0.0, components: Components::Vector(Vector4::new(0.0, 1.0, 0.0, 0.0)) };
    let out = transport(&wl, &Minkowski, &init, period, period / steps as f64, &Gauge::default())?;
    let raw: Vec<f64> = out
        .iter()
        .map(|st| match st.components {
            Components::Vector(x) => Ok(rest_frame_angle(&fermi_data(&wl, &Minkowski, st.s)?.tau, &x)),
            _ => unreachable!(),
        })
        .collect::<Result<_>>()?;
    let un = unwrap_angles(&raw);
    let measured = un[un.len() - 1] - un[0];
    let speed = (radius * omega).abs();
    let gamma = 1.0 / (1.0 - speed * speed).sqrt();
    let expected = 2.0 * std::f64::consts::PI * (1.0 - gamma);
    Ok(Precession {
        radius,
        omega,
        steps,
        speed,
        gamma,
        proper_period: period,
        measured,
        expected,
        error: (measured - expected).abs(),
    })
}

fn thomas(_: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let p = thomas_precession(1.0, 0.6, ORBIT_STEPS as usize)?;
    report.set_meta("thomas.measured", p.measured);
    report.set_meta("thomas.expected", p.expected);
    report.check("thomas.angle", p.error, 1e-6);
    Ok(())
}

fn spinor_path(
    wl: &CanonicalWorldline,
    u0: Vector2<C64>,
    s_end: f64,
    h: f64,
    alpha: f64,
) -> Result<Vec<(f64, Vector2<C64>)>> {
    let init = TransportState { s: 0.0, components: Components::TwoSpinor(u0) };
    Ok(transport(wl, &Minkowski, &init, s_end, h, &Gauge::Constant(alpha))?
        .into_iter()
        .map(|st| match st.components {
            Components::TwoSpinor(u) => (st.s, u),
            _ => unreachable!(),
        })
        .collect())
}

fn flag(u: &Vector2<C64>) -> Vector4<f64> {
    MinkVector::hermitize(u * u.adjoint()).pauli()
}

fn fermi_compat(rng: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let wl = reference_orbit()?;
    let period = wl.proper_period().expect("circular");
    let h = period / ORBIT_STEPS;
    let u0 = Vector2::new(rc(rng), rc(rng));
    let init = TransportState { s: 0.0, components: Components::Vector(flag(&u0)) };
    let vec_path = transport(&wl, &Minkowski, &init, period, h, &Gauge::default())?;
    for (alpha, name) in [(0.0, "fermi-compat.alpha_0"), (0.7, "fermi-compat.alpha_0_7")] {
        let sp = spinor_path(&wl, u0, period, h, alpha)?;
        let mut worst: f64 = 0.0;
        for ((_, u), v) in sp.iter().zip(&vec_path) {
            let Components::Vector(x) = v.components else { unreachable!() };
            worst = worst.max((flag(u) - x).amax());
        }
        report.check(name, worst, 1e-8);
    }
    Ok(())
}

fn gauge(rng: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let wl = reference_orbit()?;
    let period = wl.proper_period().expect("circular");
    let h = period / 2000.0;
    let u0 = Vector2::new(rc(rng), rc(rng));
    let alpha = 0.9;
    let base = spinor_path(&wl, u0, period, h, 0.0)?;
    let shifted = spinor_path(&wl, u0, period, h, alpha)?;
    let (mut phase, mut obs): (f64, f64) = (0.0, 0.0);
    for ((s, u), (_, v)) in base.iter().zip(&shifted) {
        let expect = u * C64::from_polar(1.0, alpha * s);
        phase = phase.max((v - expect).norm());
        obs = obs.max((flag(u) - flag(v)).amax());
    }
    report.check("gauge.phase", phase, 1e-10);
    report.check("gauge.vector_observables", obs, 1e-10);
    Ok(())
}

fn hat_gamma_suite(rng: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let (mut blocks, mut trace): (f64, f64) = (0.0, 0.0);
    for _ in 0..400 {
        let phi = Bivector::from_matrix(Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0)));
        let half = half_trace(&phi.flat());
        let lhs = hat_gamma(&phi).matrix * C64::new(0.25, 0.0);
        let rhs = block_diag(&half, &(-half.adjoint())).matrix;
        blocks = blocks.max(cmax4(&(lhs - rhs)));
        trace = trace.max(half.trace().norm());
    }
    report.check("hat-gamma.blocks", blocks, 1e-12);
    report.check("hat-gamma.trace", trace, 1e-14);
    Ok(())
}

fn free_states(rng: &mut ChaCha8Rng, report: &mut RunReport) -> Result<()> {
    let m = 1.0;
    let tau = Vector4::x();
    let rest = rest_dirac_basis();
    let id = Matrix4::<C64>::identity();
    let (mut proj, mut annihil, mut lift, mut det): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..200 {
        let k = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let p = MassShellMomentum::from_three_momentum(m, k)?;
        let (pp, pm) = energy_splitting(&p);
        let (a, b) = (pp.matrix, pm.matrix);
        proj = proj
            .max(cmax4(&(a * a - a)))
            .max(cmax4(&(b * b - b)))
            .max(cmax4(&(a + b - id)))
            .max(cmax4(&(a * b)))
            .max((a.trace() - C64::new(2.0, 0.0)).norm())
            .max((b.trace() - C64::new(2.0, 0.0)).norm());
        let (frame, bl) = dirac_frame(&p, &tau, &rest)?;
        annihil = annihil.max(frame.adaptedness_residual(&p));
        lift = lift.max((lorentz_of_spin(&bl.k) - bl.lambda).amax()).max((bl.lambda * tau - p.velocity()).amax());
        det = det.max((bl.k.determinant() - C64::new(1.0, 0.0)).norm());
    }
    report.check("free-states.projectors", proj, 1e-10);
    report.check("free-states.annihilation", annihil, 1e-10);
    report.check("free-states.boost_lift", lift, 1e-12);
    report.check("free-states.det_k", det, 1e-12);

    let dir = Vector4::new(0.0, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let n = dir.fixed_rows::<3>(1).normalize();
    let ramp: Vec<MassShellMomentum> = (0..100)
        .map(|i| {
            let chi = 3.0 * i as f64 / 99.0;
            MassShellMomentum::from_three_momentum(
                m,
                [m * chi.sinh() * n[0], m * chi.sinh() * n[1], m * chi.sinh() * n[2]],
            )
        })
        .collect::<Result<_>>()?;
    let path = boost_path(&tau, &ramp)?;
    let flips = path.last().map(|b| b.sign_history.iter().filter(|&&s| s < 0).count()).unwrap_or(0);
    let anchor = (path[0].k - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let free = boost_for(&tau, &ramp[99])?;
    report.check("free-states.sign_flips", flips as f64, 0.0);
    report.check("free-states.anchor", anchor, 1e-12);
    report.check("free-states.ramp_end_on_sheet", cmax2(&(path[99].k - free.k)), 1e-12);
    Ok(())
}
