//! `transport`, `frames` and `precession` runs.

use nalgebra::{Vector2, Vector4};

use super::report::RunReport;
use super::scenario::{Scenario, TransportPlan};
use super::suites::thomas_precession;
use super::CliError;
use crate::backgrounds::{Background, CanonicalWorldline, Worldline};
use crate::dirac_algebra::{change_basis_coords, k_product, observer_h, Basis, DiracSpinor, Observer};
use crate::fermi::{fermi_data, rest_frame_angle, transport, unwrap_angles, Components, TransportState};
use crate::free_states::frames_along_worldline;
use crate::spinor_algebra::{minkowski_dot, MinkVector};
use crate::C64;

/// Relative drift allowed for conserved transport observables.
pub const DRIFT_TOLERANCE: f64 = 1e-8;
/// Adaptedness of boosted frames.
pub const BOOSTED_TOLERANCE: f64 = 1e-10;
/// Adaptedness of the Fermi-transported rest frame.
pub const TRANSPORTED_TOLERANCE: f64 = 1e-8;
/// Thomas angle error accepted by `precession`.
pub const PRECESSION_TOLERANCE: f64 = 1e-6;

/// CSV text plus the report that goes into the sidecar.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: Vec<u8>,
    pub report: RunReport,
}

fn runtime(e: crate::Error) -> CliError {
    CliError::Runtime(e)
}

/// Shortest representation that round-trips.
fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn flag(u: &Vector2<C64>) -> Vector4<f64> {
    MinkVector::hermitize(u * u.adjoint()).pauli()
}

/// Vector whose rest-frame direction tracks the rotation of the section.
fn direction(c: &Components) -> Vector4<f64> {
    match c {
        Components::Vector(x) => *x,
        Components::TwoSpinor(u) => flag(u),
        Components::FourSpinor(p) => flag(&Vector2::new(p[0], p[1])),
    }
}

fn flat_components(c: &Components, basis: Basis) -> Vec<f64> {
    match c {
        Components::Vector(x) => x.iter().copied().collect(),
        Components::TwoSpinor(u) => u.iter().flat_map(|z| [z.re, z.im]).collect(),
        Components::FourSpinor(p) => {
            change_basis_coords(p, Basis::Weyl, basis).iter().flat_map(|z| [z.re, z.im]).collect()
        }
    }
}

fn component_headers(c: &Components) -> Vec<String> {
    match c {
        Components::Vector(_) => (0..4).map(|i| format!("X{i}")).collect(),
        Components::TwoSpinor(_) => (1..=2).flat_map(|i| [format!("u{i}_re"), format!("u{i}_im")]).collect(),
        Components::FourSpinor(_) => (1..=4).flat_map(|i| [format!("psi{i}_re"), format!("psi{i}_im")]).collect(),
    }
}

fn observable_names(c: &Components) -> &'static [&'static str] {
    match c {
        Components::Vector(_) => &["g_xx", "g_x_tau"],
        Components::TwoSpinor(_) => &["g_flag_tau"],
        Components::FourSpinor(_) => &["k_psi_psi", "h_tau_psi_psi"],
    }
}

fn observables(c: &Components, tau: &Vector4<f64>) -> Result<Vec<f64>, CliError> {
    Ok(match c {
        Components::Vector(x) => vec![minkowski_dot(x, x), minkowski_dot(x, tau)],
        Components::TwoSpinor(u) => vec![minkowski_dot(&flag(u), tau)],
        Components::FourSpinor(p) => {
            let psi = DiracSpinor::from_weyl(*p);
            let obs = Observer::new(*tau).map_err(runtime)?;
            vec![k_product(&psi, &psi).re, observer_h(&psi, &psi, &obs).re]
        }
    })
}

fn final_components(states: &[TransportState]) -> Vec<f64> {
    states.last().map(|s| flat_components(&s.components, Basis::Weyl)).unwrap_or_default()
}

/// Fermi transport described by the scenario.
pub fn run_transport(scn: &Scenario) -> Result<RunOutput, CliError> {
    let bg = scn.background()?;
    let wl = scn.worldline_in(bg.as_ref())?;
    let plan = scn.transport_plan(&wl)?;
    let basis = scn
        .transport
        .as_ref()
        .and_then(|t| t.basis.as_deref())
        .map(|b| b.parse::<Basis>().expect("validated"))
        .unwrap_or(Basis::Weyl);
    let states = integrate(&wl, bg.as_ref(), &plan, plan.step)?;
    let halved = integrate(&wl, bg.as_ref(), &plan, 0.5 * plan.step)?;
    let richardson =
        final_components(&states).iter().zip(final_components(&halved)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            / 15.0;

    let circular = matches!(wl, CanonicalWorldline::Circular { .. });
    let taus: Vec<Vector4<f64>> = states
        .iter()
        .map(|st| fermi_data(&wl, bg.as_ref(), st.s).map(|d| d.tau))
        .collect::<crate::Result<_>>()
        .map_err(runtime)?;
    let angles = if circular {
        let raw: Vec<f64> =
            states.iter().zip(&taus).map(|(st, tau)| rest_frame_angle(tau, &direction(&st.components))).collect();
        let un = unwrap_angles(&raw);
        let a0 = un[0];
        Some(un.into_iter().map(|a| a - a0).collect::<Vec<_>>())
    } else {
        None
    };

    let first = &states[0].components;
    let names = observable_names(first);
    let mut header: Vec<String> = vec!["s".into(), "x0".into(), "x1".into(), "x2".into(), "x3".into()];
    header.extend(component_headers(first));
    header.extend(names.iter().map(|s| s.to_string()));
    if circular {
        header.push("rotation_angle".into());
    }

    let mut report = RunReport::new("transport");
    let initial_obs = observables(first, &taus[0])?;
    let mut drift = vec![0.0f64; names.len()];
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(&header).map_err(csv_error)?;
    let last = states.len() - 1;
    let mut rows = 0usize;
    for (i, (st, tau)) in states.iter().zip(&taus).enumerate() {
        let obs = observables(&st.components, tau)?;
        for (k, (o, o0)) in obs.iter().zip(&initial_obs).enumerate() {
            drift[k] = drift[k].max((o - o0).abs() / o0.abs().max(1.0));
        }
        if i % plan.sample_every != 0 && i != last {
            continue;
        }
        let x = wl.position(st.s);
        let mut rec: Vec<String> = vec![fmt(st.s)];
        rec.extend(x.iter().map(|v| fmt(*v)));
        rec.extend(flat_components(&st.components, basis).into_iter().map(fmt));
        rec.extend(obs.iter().map(|v| fmt(*v)));
        if let Some(a) = &angles {
            rec.push(fmt(a[i]));
        }
        wtr.write_record(&rec).map_err(csv_error)?;
        rows += 1;
    }
    for (name, d) in names.iter().zip(&drift) {
        report.check(format!("transport.{name}_drift"), *d, DRIFT_TOLERANCE);
    }

    report.set_meta("background", &scn.background_json);
    report.set_meta("worldline", &scn.worldline_json);
    report.set_meta("kind", format!("{:?}", first.kind()));
    if matches!(first, Components::FourSpinor(_)) {
        report.set_meta("basis", basis.to_string());
    }
    report.set_meta("s_start", plan.s_start);
    report.set_meta("s_end", plan.s_end);
    report.set_meta("step", plan.step);
    report.set_meta("steps", last);
    report.set_meta("rows", rows);
    report.set_meta("columns", &header);
    report.set_meta("richardson_error", richardson);
    if let Some(a) = &angles {
        report.set_meta("final_rotation_angle", a[last]);
        if let Some(period) = wl.proper_period() {
            report.set_meta("orbits", (plan.s_end - plan.s_start) / period);
        }
        if bg.name() == "minkowski" {
            if let CanonicalWorldline::Circular { omega, rate, .. } = wl {
                let expected = omega * rate * (1.0 - rate) * (plan.s_end - plan.s_start);
                report.set_meta("expected_rotation_angle", expected);
            }
        }
    }
    Ok(RunOutput { csv: wtr.into_inner().map_err(|e| csv_error(e.into_error()))?, report })
}

fn integrate(
    wl: &CanonicalWorldline,
    bg: &dyn Background,
    plan: &TransportPlan,
    step: f64,
) -> Result<Vec<TransportState>, CliError> {
    let init = TransportState { s: plan.s_start, components: plan.initial };
    transport(wl, bg, &init, plan.s_end, step, &plan.gauge).map_err(runtime)
}

fn csv_error(e: impl std::fmt::Display) -> CliError {
    CliError::Io { path: "<csv>".into(), message: e.to_string() }
}

/// Rest and boosted Dirac frames along the scenario worldline.
pub fn run_frames(scn: &Scenario) -> Result<RunOutput, CliError> {
    let bg = scn.background()?;
    let wl = scn.worldline_in(bg.as_ref())?;
    let plan = scn.frames_plan(&wl)?;
    let samples = frames_along_worldline(&wl, bg.as_ref(), plan.s_start, plan.s_end, plan.step, &plan.momenta)
        .map_err(runtime)?;

    let mut header: Vec<String> = ["s", "p_index", "p0", "p1", "p2", "p3"].iter().map(|s| s.to_string()).collect();
    for col in ["u1", "u2", "v1", "v2"] {
        for k in 1..=4 {
            header.push(format!("{col}_{k}_re"));
            header.push(format!("{col}_{k}_im"));
        }
    }
    header.extend(["adaptedness_residual", "rest_residual", "k_gram_residual"].map(String::from));

    let signature = nalgebra::Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, -1.0)).map(|x| C64::new(x, 0.0));
    let (mut boosted_worst, mut rest_worst, mut gram_worst) = (0.0f64, 0.0f64, 0.0f64);
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(&header).map_err(csv_error)?;
    let last = samples.len().saturating_sub(1);
    let mut rows = 0usize;
    for (i, smp) in samples.iter().enumerate() {
        rest_worst = rest_worst.max(smp.rest_residual);
        let sampled = i % plan.sample_every == 0 || i == last;
        for (j, ((frame, resid), p)) in smp.boosted.iter().zip(&plan.momenta).enumerate() {
            let gram = (frame.k_gram() - signature).iter().map(|z| z.norm()).fold(0.0, f64::max);
            boosted_worst = boosted_worst.max(*resid);
            gram_worst = gram_worst.max(gram);
            if !sampled {
                continue;
            }
            let mut rec: Vec<String> = vec![fmt(smp.s), j.to_string()];
            rec.extend(p.covector().iter().map(|v| fmt(*v)));
            for col in 0..4 {
                let v = change_basis_coords(&frame.0.column(col).into_owned(), Basis::Weyl, plan.basis);
                for z in v.iter() {
                    rec.push(fmt(z.re));
                    rec.push(fmt(z.im));
                }
            }
            rec.push(fmt(*resid));
            rec.push(fmt(smp.rest_residual));
            rec.push(fmt(gram));
            wtr.write_record(&rec).map_err(csv_error)?;
            rows += 1;
        }
    }
    let mut report = RunReport::new("frames");
    report.check("frames.transported_adaptedness", rest_worst, TRANSPORTED_TOLERANCE);
    if !plan.momenta.is_empty() {
        report.check("frames.boosted_adaptedness", boosted_worst, BOOSTED_TOLERANCE);
        report.check("frames.k_gram", gram_worst, BOOSTED_TOLERANCE);
    }
    report.set_meta("background", &scn.background_json);
    report.set_meta("worldline", &scn.worldline_json);
    report.set_meta("basis", plan.basis.to_string());
    report.set_meta("s_start", plan.s_start);
    report.set_meta("s_end", plan.s_end);
    report.set_meta("step", plan.step);
    report.set_meta("samples", samples.len());
    report.set_meta("momenta", plan.momenta.len());
    report.set_meta("rows", rows);
    report.set_meta("columns", &header);
    Ok(RunOutput { csv: wtr.into_inner().map_err(|e| csv_error(e.into_error()))?, report })
}

/// One-orbit Thomas-precession measurement.
pub fn run_precession(radius: f64, omega: f64, steps: usize) -> Result<RunReport, CliError> {
    let invalid = |path: &str, message: &str| CliError::Invalid { path: path.into(), message: message.into() };
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(invalid("radius", "must be positive"));
    }
    if !omega.is_finite() || omega == 0.0 {
        return Err(invalid("omega", "must be finite and nonzero"));
    }
    if (radius * omega).abs() >= 1.0 {
        return Err(invalid("omega", "orbit speed |ωR| must be below 1"));
    }
    if steps == 0 {
        return Err(invalid("steps", "must be at least 1"));
    }
    let p = thomas_precession(radius, omega, steps).map_err(runtime)?;
    let mut report = RunReport::new("precession");
    report.check("precession.angle", p.error, PRECESSION_TOLERANCE);
    for (k, v) in serde_json::to_value(p).expect("serializes").as_object().expect("object") {
        report.metadata.insert(k.clone(), v.clone());
    }
    Ok(report)
}
