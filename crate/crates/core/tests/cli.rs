use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinfermi"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_rows(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_path(p).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(|x| x.parse::<f64>().unwrap()).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn circular(kind_block: &str) -> String {
    format!(
        r#"{{"schema_version":1,"background":{{"kind":"minkowski"}},
            "worldline":{{"kind":"circular","radius":1.0,"omega":0.6}},{kind_block}}}"#
    )
}

#[test]
fn check_suite_passes_and_is_deterministic() {
    let a = run(&["check", "clifford"]);
    assert_eq!(a.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["schema_version"], 1);

    let x = run(&["check", "--seed", "42"]);
    let y = run(&["check", "--seed", "42"]);
    assert_eq!(x.status.code(), Some(0), "{}", String::from_utf8_lossy(&x.stderr));
    assert_eq!(x.stdout, y.stdout);
    let v: Value = serde_json::from_slice(&x.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    let names: Vec<&str> = v["invariants"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    let mut uniq = names.clone();
    uniq.sort();
    uniq.dedup();
    assert_eq!(uniq.len(), names.len());
}

#[test]
fn fermi_compat_suite() {
    let out = run(&["check", "fermi-compat"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for r in v["invariants"].as_array().unwrap() {
        assert!(r["residual"].as_f64().unwrap() <= 1e-8);
    }
}

#[test]
fn unknown_suite_and_bad_args_exit_2() {
    let out = run(&["check", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["transport", "/nonexistent/scenario.json"]).status.code(), Some(2));
}

#[test]
fn static_transport_rows_are_constant() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(
        dir.path(),
        "static.json",
        r#"{"schema_version":1,"background":{"kind":"minkowski"},
            "worldline":{"kind":"static","position":[1,2,3]},
            "transport":{"kind":"vector","initial":[0.5,1,0,-2],"s_end":3,"step":0.25}}"#,
    );
    let out_csv = dir.path().join("static_out.csv");
    let out = run(&["transport", scn.to_str().unwrap(), "-o", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (h, rows) = csv_rows(&out_csv);
    assert_eq!(rows.len(), 13);
    assert!(!h.contains(&"rotation_angle".to_string()));
    let x0 = col(&h, "X0");
    for r in &rows {
        assert_eq!(&r[x0..x0 + 4], &rows[0][x0..x0 + 4]);
    }
    let side = read_json(&dir.path().join("static_out.json"));
    assert_eq!(side["command"], "transport");
    assert_eq!(side["passed"], true);
}

#[test]
fn circular_transport_reports_thomas_angle() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(
        dir.path(),
        "orbit.json",
        &circular(r#""transport":{"kind":"vector","initial":[0,1,0,0],"orbits":1,"step":0.001,"sample_every":250}"#),
    );
    let out_csv = dir.path().join("orbit_out.csv");
    let out = run(&["transport", scn.to_str().unwrap(), "-o", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (h, rows) = csv_rows(&out_csv);
    let last = rows.last().unwrap()[col(&h, "rotation_angle")];
    let gamma: f64 = 1.25;
    assert!((last + 2.0 * std::f64::consts::PI * (gamma - 1.0)).abs() < 1e-6, "angle {last}");
    let gxx = col(&h, "g_xx");
    assert!(rows.iter().all(|r| (r[gxx] + 1.0).abs() < 1e-10));
}

#[test]
fn richardson_estimate_shrinks_sixteen_fold() {
    let dir = tempfile::tempdir().unwrap();
    let est = |step: f64| {
        let scn = write(
            dir.path(),
            "r.json",
            &circular(&format!(
                r#""transport":{{"kind":"two_spinor","initial":[[1,0],[0.3,0.4]],"s_end":5,"step":{step},"alpha":0.2}}"#
            )),
        );
        let out_csv = dir.path().join("r_out.csv");
        let out = run(&["transport", scn.to_str().unwrap(), "-o", out_csv.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        read_json(&dir.path().join("r_out.json"))["metadata"]["richardson_error"].as_f64().unwrap()
    };
    let ratio = est(0.05) / est(0.025);
    assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
}

#[test]
fn four_spinor_transport_in_schwarzschild() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(
        dir.path(),
        "s.json",
        r#"{"schema_version":1,"background":{"kind":"schwarzschild","mass":1},
            "worldline":{"kind":"circular","radius":12,"omega":0.02},
            "transport":{"kind":"four_spinor","basis":"dirac","initial":[[1,0],[0,0],[0,0.5],[0,0]],
                         "orbits":0.25,"step":0.05,"alpha":[[0,0],[50,0.5]]}}"#,
    );
    let out_csv = dir.path().join("s_out.csv");
    let out = run(&["transport", scn.to_str().unwrap(), "-o", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = csv_rows(&out_csv);
    assert!((rows[0][col(&h, "psi1_re")] - 1.0).abs() < 1e-14);
    assert!((rows[0][col(&h, "psi3_im")] - 0.5).abs() < 1e-14);
    let side = read_json(&dir.path().join("s_out.json"));
    assert_eq!(side["metadata"]["basis"], "dirac");
}

#[test]
fn outputs_are_reproducible_and_stdout_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(
        dir.path(),
        "d.json",
        &circular(r#""transport":{"kind":"two_spinor","initial":[[1,0],[0,1]],"s_end":2,"step":0.05}"#),
    );
    let a = run(&["transport", scn.to_str().unwrap()]);
    let b = run(&["transport", scn.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("s,x0,x1,x2,x3,u1_re"));
    let report: Value = serde_json::from_slice(&a.stderr).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn invalid_scenarios_report_field_paths() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"schema_version":1,"background":{"kind":"minkowski"},"worldline":{"kind":"circular","radius":1,"omega":1.2}}"#,
            "worldline.omega",
        ),
        (
            r#"{"schema_version":1,"background":{"kind":"flat"},"worldline":{"kind":"static","position":[0,0,0]}}"#,
            "background.kind",
        ),
        (&circular(r#""transport":{"kind":"vector","initial":[0,1,0,0],"s_end":1,"step":-1}"#), "transport.step"),
        (
            &circular(r#""transport":{"kind":"two_spinor","initial":[[1,0],[0,"x"]],"s_end":1,"step":0.1}"#),
            "transport.initial[1][1]",
        ),
        (
            &circular(r#""transport":{"kind":"vector","initial":[0,1,0,0],"s_end":1,"step":0.1,"extra":1}"#),
            "transport.extra",
        ),
    ];
    for (i, (body, path)) in cases.iter().enumerate() {
        let scn = write(dir.path(), &format!("bad{i}.json"), body);
        let out = run(&["transport", scn.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "case {i}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(&format!("at {path}:")), "case {i}: {err}");
    }
}

#[test]
fn frames_rows_and_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(
        dir.path(),
        "f.json",
        r#"{"schema_version":1,"background":{"kind":"minkowski"},
            "worldline":{"kind":"static","position":[0,0,0]},
            "frames":{"s_end":1,"step":0.25},
            "momenta":{"mass":1,"list":[[1,0,0,0],[1.25,-0.75,0,0]]}}"#,
    );
    let out_csv = dir.path().join("f_out.csv");
    let out = run(&["frames", scn.to_str().unwrap(), "-o", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (h, rows) = csv_rows(&out_csv);
    assert_eq!(h.len(), 6 + 32 + 3);
    assert_eq!(rows.len(), 5 * 2);
    let (pi, ar, rr) = (col(&h, "p_index"), col(&h, "adaptedness_residual"), col(&h, "rest_residual"));
    for r in &rows {
        if r[pi] == 0.0 {
            assert!(r[ar] <= 1e-12 && r[rr] <= 1e-12);
        } else {
            assert!(r[ar] <= 1e-10);
        }
    }
    // The static observer's frames do not change along the worldline.
    let u1 = col(&h, "u1_1_re");
    assert_eq!(&rows[0][u1..u1 + 32], &rows[8][u1..u1 + 32]);
}

#[test]
fn frames_empty_list_and_off_shell() {
    let dir = tempfile::tempdir().unwrap();
    let scn =
        write(dir.path(), "e.json", &circular(r#""frames":{"s_end":1,"step":0.01},"momenta":{"mass":1,"list":[]}"#));
    let out_csv = dir.path().join("e_out.csv");
    let out = run(&["frames", scn.to_str().unwrap(), "-o", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("s,p_index,"));

    let scn = write(
        dir.path(),
        "o.json",
        &circular(r#""frames":{"s_end":1,"step":0.1},"momenta":{"mass":1,"list":[[1,0,0,0],[3,0,0,0]]}"#),
    );
    let out = run(&["frames", scn.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("momenta.list[1]"));
}

#[test]
fn precession_command() {
    let out = run(&["precession", "--radius", "1", "--omega", "0.6", "--steps", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let measured = v["metadata"]["measured"].as_f64().unwrap();
    assert!((measured + std::f64::consts::FRAC_PI_2).abs() < 1e-6);

    let coarse = run(&["precession", "--radius", "1", "--omega", "0.6", "--steps", "4"]);
    assert_eq!(coarse.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&coarse.stderr).contains("precession.angle"));

    assert_eq!(run(&["precession", "--radius", "1", "--omega", "1.5", "--steps", "10"]).status.code(), Some(2));
    assert_eq!(run(&["precession", "--radius", "1", "--omega", "0.5", "--steps", "0"]).status.code(), Some(2));
}
