use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use spinor_fermi_ffi::*;

fn last_error() -> String {
    let p = sf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn minkowski() -> *mut SfBackground {
    let mut bg = ptr::null_mut();
    assert_eq!(unsafe { sf_background_new_minkowski(&mut bg) }, SfStatus::Ok);
    bg
}

#[test]
fn thomas_angle_through_handles() {
    let bg = minkowski();
    let mut wl = ptr::null_mut();
    unsafe {
        assert_eq!(sf_worldline_new_circular(bg, 1.0, 0.6, 0.0, &mut wl), SfStatus::Ok);
        let mut period = 0.0;
        assert_eq!(sf_worldline_proper_period(wl, &mut period), SfStatus::Ok);
        assert!((period - 2.0 * std::f64::consts::PI / 0.6 / 1.25).abs() < 1e-12);

        // Radial unit vector at s = 0 returns rotated by 2π(γ − 1) after one
        // orbit; its component along the initial direction is cos of that.
        let x = [0.0, 1.0, 0.0, 0.0];
        let mut out = [0.0; 4];
        assert_eq!(
            sf_transport_vector(bg, wl, x.as_ptr(), 0.0, period, period / 4000.0, out.as_mut_ptr()),
            SfStatus::Ok
        );
        let norm = out[0] * out[0] - out[1] * out[1] - out[2] * out[2] - out[3] * out[3];
        assert!((norm + 1.0).abs() < 1e-9);
        assert!(out[1].abs() < 1e-6, "cos(π/2) expected, got {}", out[1]);

        let (mut measured, mut expected) = (0.0, 0.0);
        assert_eq!(sf_thomas_precession(1.0, 0.6, 10_000, &mut measured, &mut expected), SfStatus::Ok);
        assert!((measured + std::f64::consts::FRAC_PI_2).abs() < 1e-6);
        assert!((expected + std::f64::consts::FRAC_PI_2).abs() < 1e-14);

        sf_worldline_free(wl);
        sf_background_free(bg);
    }
}

#[test]
fn spinor_gauge_phase() {
    let bg = minkowski();
    let mut wl = ptr::null_mut();
    unsafe {
        assert_eq!(sf_worldline_new_circular(bg, 2.0, 0.2, 0.0, &mut wl), SfStatus::Ok);
        let u = [SfComplex { re: 1.0, im: 0.0 }, SfComplex { re: 0.3, im: -0.4 }];
        let (mut a, mut b) = ([SfComplex::default(); 2], [SfComplex::default(); 2]);
        assert_eq!(sf_transport_two_spinor(bg, wl, u.as_ptr(), 0.0, 3.0, 0.01, 0.0, a.as_mut_ptr()), SfStatus::Ok);
        assert_eq!(sf_transport_two_spinor(bg, wl, u.as_ptr(), 0.0, 3.0, 0.01, 0.5, b.as_mut_ptr()), SfStatus::Ok);
        let (c, s) = (1.5f64.cos(), 1.5f64.sin());
        for k in 0..2 {
            let rotated = (a[k].re * c - a[k].im * s, a[k].re * s + a[k].im * c);
            assert!((rotated.0 - b[k].re).abs() < 1e-9 && (rotated.1 - b[k].im).abs() < 1e-9);
        }
        sf_worldline_free(wl);
        sf_background_free(bg);
    }
}

#[test]
fn static_observer_keeps_four_spinor() {
    let mut bg = ptr::null_mut();
    let mut wl = ptr::null_mut();
    unsafe {
        assert_eq!(sf_background_new_schwarzschild(1.0, &mut bg), SfStatus::Ok);
        assert_eq!(sf_worldline_new_static(bg, [5.0, 0.0, 0.0].as_ptr(), &mut wl), SfStatus::Ok);
        let psi = [
            SfComplex { re: 1.0, im: 0.0 },
            SfComplex { re: 0.0, im: 0.5 },
            SfComplex { re: -0.2, im: 0.0 },
            SfComplex { re: 0.0, im: 0.0 },
        ];
        let mut out = [SfComplex::default(); 4];
        // A static observer is accelerated but its rest frame does not rotate.
        assert_eq!(
            sf_transport_four_spinor(bg, wl, psi.as_ptr(), SF_BASIS_DIRAC, 0.0, 2.0, 0.01, 0.0, out.as_mut_ptr()),
            SfStatus::Ok
        );
        for k in 0..4 {
            assert!((out[k].re - psi[k].re).abs() < 1e-9 && (out[k].im - psi[k].im).abs() < 1e-9, "{k}: {:?}", out[k]);
        }
        sf_worldline_free(wl);
        sf_background_free(bg);
    }
}

#[test]
fn gamma_matrices_satisfy_clifford() {
    let eta = [1.0, -1.0, -1.0, -1.0];
    for basis in [SF_BASIS_WEYL, SF_BASIS_DIRAC] {
        let mut g = [[SfComplex::default(); 16]; 4];
        for (l, m) in g.iter_mut().enumerate() {
            assert_eq!(unsafe { sf_gamma_matrix(l as u32, basis, m.as_mut_ptr()) }, SfStatus::Ok);
        }
        let mul = |a: &[SfComplex; 16], b: &[SfComplex; 16], r: usize, c: usize| {
            (0..4).fold((0.0, 0.0), |acc, k| {
                let (x, y) = (a[4 * r + k], b[4 * k + c]);
                (acc.0 + x.re * y.re - x.im * y.im, acc.1 + x.re * y.im + x.im * y.re)
            })
        };
        for mu in 0..4 {
            for nu in 0..4 {
                for r in 0..4 {
                    for c in 0..4 {
                        let (p, q) = (mul(&g[mu], &g[nu], r, c), mul(&g[nu], &g[mu], r, c));
                        let want = if mu == nu && r == c { 2.0 * eta[mu] } else { 0.0 };
                        assert!((p.0 + q.0 - want).abs() < 1e-12 && (p.1 + q.1).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn dirac_frame_rest_and_boosted() {
    let tau = [1.0, 0.0, 0.0, 0.0];
    let mut rest = [SfComplex::default(); 16];
    let mut boosted = [SfComplex::default(); 16];
    unsafe {
        assert_eq!(
            sf_dirac_frame([1.0, 0.0, 0.0, 0.0].as_ptr(), 1.0, tau.as_ptr(), SF_BASIS_DIRAC, rest.as_mut_ptr()),
            SfStatus::Ok
        );
        assert_eq!(
            sf_dirac_frame([1.25, -0.75, 0.0, 0.0].as_ptr(), 1.0, tau.as_ptr(), SF_BASIS_WEYL, boosted.as_mut_ptr()),
            SfStatus::Ok
        );
    }
    // In the Dirac basis the rest frame is the standard basis.
    for r in 0..4 {
        for c in 0..4 {
            let want = if r == c { 1.0 } else { 0.0 };
            assert!((rest[4 * r + c].re - want).abs() < 1e-14 && rest[4 * r + c].im.abs() < 1e-14);
        }
    }
    // (γ[p] − m) u_1 = 0 with γ[p] = p_λ γ^λ, checked in the Weyl basis.
    let p = [1.25, 0.75, 0.0, 0.0];
    let mut gp = [SfComplex::default(); 16];
    for l in 0..4 {
        let mut g = [SfComplex::default(); 16];
        unsafe { sf_gamma_matrix(l as u32, SF_BASIS_WEYL, g.as_mut_ptr()) };
        for i in 0..16 {
            gp[i].re += p[l] * g[i].re;
            gp[i].im += p[l] * g[i].im;
        }
    }
    let mut worst: f64 = 0.0;
    for r in 0..4 {
        let mut acc = (-boosted[4 * r].re, -boosted[4 * r].im);
        for k in 0..4 {
            let (x, y) = (gp[4 * r + k], boosted[4 * k]);
            acc.0 += x.re * y.re - x.im * y.im;
            acc.1 += x.re * y.im + x.im * y.re;
        }
        worst = worst.max(acc.0.hypot(acc.1));
    }
    assert!(worst < 1e-12, "residual {worst}");
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut bg = ptr::null_mut();
        assert_eq!(sf_background_new_minkowski(ptr::null_mut()), SfStatus::NullPointer);
        assert!(last_error().contains("out"));
        assert_eq!(sf_background_new_schwarzschild(-1.0, &mut bg), SfStatus::InvalidArgument);
        assert!(last_error().contains("mass"));
        assert!(bg.is_null());

        let bg = minkowski();
        assert!(sf_last_error_message().is_null());
        let mut wl = ptr::null_mut();
        assert_eq!(sf_worldline_new_circular(bg, 1.0, 1.5, 0.0, &mut wl), SfStatus::InvalidArgument);
        assert!(wl.is_null());
        assert_eq!(sf_worldline_new_rindler(0.5, &mut wl), SfStatus::Ok);
        let mut period = 0.0;
        assert_eq!(sf_worldline_proper_period(wl, &mut period), SfStatus::InvalidArgument);

        let mut out = [0.0; 4];
        let x = [0.0, 1.0, 0.0, 0.0];
        assert_eq!(
            sf_transport_vector(bg, wl, x.as_ptr(), 0.0, 1.0, -0.1, out.as_mut_ptr()),
            SfStatus::InvalidArgument
        );
        assert!(last_error().contains("step"));
        assert_eq!(
            sf_transport_vector(bg, ptr::null(), x.as_ptr(), 0.0, 1.0, 0.1, out.as_mut_ptr()),
            SfStatus::NullPointer
        );

        let mut g = [SfComplex::default(); 16];
        assert_eq!(sf_gamma_matrix(4, SF_BASIS_WEYL, g.as_mut_ptr()), SfStatus::InvalidArgument);
        assert_eq!(sf_gamma_matrix(0, 7, g.as_mut_ptr()), SfStatus::InvalidArgument);
        assert!(last_error().contains("basis"));

        let tau = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(
            sf_dirac_frame([2.0, 0.0, 0.0, 0.0].as_ptr(), 1.0, tau.as_ptr(), SF_BASIS_WEYL, g.as_mut_ptr()),
            SfStatus::Domain
        );
        assert_eq!(
            sf_dirac_frame([1.0, 0.0, 0.0, 0.0].as_ptr(), 0.0, tau.as_ptr(), SF_BASIS_WEYL, g.as_mut_ptr()),
            SfStatus::Domain
        );

        sf_worldline_free(wl);
        sf_background_free(bg);
        sf_worldline_free(ptr::null_mut());
        sf_background_free(ptr::null_mut());
    }
    assert!(!unsafe { CStr::from_ptr(sf_version()) }.to_bytes().is_empty());
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/spinor_fermi.h")).unwrap();
    for name in [
        "sf_last_error_message",
        "sf_version",
        "sf_background_new_minkowski",
        "sf_background_new_schwarzschild",
        "sf_background_new_rindler",
        "sf_background_free",
        "sf_worldline_new_static",
        "sf_worldline_new_circular",
        "sf_worldline_new_rindler",
        "sf_worldline_proper_period",
        "sf_worldline_free",
        "sf_transport_vector",
        "sf_transport_two_spinor",
        "sf_transport_four_spinor",
        "sf_gamma_matrix",
        "sf_dirac_frame",
        "sf_thomas_precession",
        "typedef struct SfBackground SfBackground;",
        "SF_STATUS_DOMAIN = 3",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compiles `tests/smoke.c` against the header and the shared library.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let target_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib =
        target_dir.join(format!("{}spinor_fermi_ffi{}", std::env::consts::DLL_PREFIX, std::env::consts::DLL_SUFFIX));
    assert!(lib.exists(), "missing {}", lib.display());
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/smoke.c"))
        .arg("-o")
        .arg(&bin)
        .arg(format!("-L{}", target_dir.display()))
        .arg("-lspinor_fermi_ffi")
        .arg(format!("-Wl,-rpath,{}", target_dir.display()))
        .arg("-lm")
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok"));
}
