//! Hand-computed values and identities, checked through the public API.

use std::f64::consts::PI;

use num_complex::Complex64;

use np_elastic::harmonics::{
    a_nm, eval_solid_mode, eval_trace_mode, eval_ynm, Family, ModeIndex, SolidPoint, SurfacePoint,
};
use np_elastic::kelvin::{gamma_laplace, kelvin_matrix, LameParams};
use np_elastic::oracle::{fd_traction, quad_np_apply, quad_surface_integral, FdOrder, FdStencil, QuadratureRule};
use np_elastic::potentials::{
    elastic_sl_on_m, elastic_sl_on_n, np_apply, np_apply_decomposed, np_eigenvalue, scalar_sl_on_mode, t_layer_action,
    CoefficientSpectrum,
};
use np_elastic::transmission::{
    choose_n0, classify_calr, denominator, energy, field_eval, g_i_from_g_e, solve, CalrVerdict, PlasmonicConfig,
    ShellGeometry, SourceModel, SourceProfile, SourceSpectrum, SweepOptions, TuningPolicy,
};
use np_elastic::RVec3;

type C64 = Complex64;

fn unit() -> LameParams {
    LameParams::new(1.0, 1.0).unwrap()
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b}");
}

#[test]
fn scalar_harmonics_and_quadrature() {
    let p = SurfacePoint::unit(0.7, 2.1);
    close(eval_ynm(0, 0, &p).unwrap().re, 0.282_094_791_773_878_1, 1e-15);
    close(eval_ynm(1, 0, &SurfacePoint::unit(0.0, 0.0)).unwrap().re, 0.488_602_511_902_919_9, 1e-15);
    let rule = QuadratureRule::new(8, 16).unwrap();
    let area: C64 = quad_surface_integral(|_| C64::new(1.0, 0.0), &rule, 1.0);
    close(area.re, 4.0 * PI, 1e-12);
    let norm: C64 = quad_surface_integral(
        |u| {
            let q = SurfacePoint::from_cartesian(u).unwrap();
            C64::new(eval_ynm(3, 1, &q).unwrap().norm_sqr(), 0.0)
        },
        &rule,
        1.0,
    );
    close(norm.re, 1.0, 1e-13);
    let mean: C64 = quad_surface_integral(|u| eval_ynm(2, 0, &SurfacePoint::from_cartesian(u).unwrap()).unwrap(), &rule, 1.0);
    assert!(mean.norm() < 1e-14);
}

#[test]
fn mode_coefficients_and_kernels() {
    close(a_nm(1, &unit()).unwrap().re, 0.25, 1e-15);
    close(a_nm(2, &unit()).unwrap().re, 1.0, 1e-15);
    close(gamma_laplace(&RVec3::new(1.0, 0.0, 0.0)).unwrap(), -0.079_577_471_545_947_67, 1e-15);
    close(gamma_laplace(&RVec3::new(0.0, 2.0, 0.0)).unwrap(), -0.039_788_735_772_973_83, 1e-15);
    let g = kelvin_matrix(&RVec3::new(1.0, 0.0, 0.0), &unit()).unwrap();
    close(g[(0, 0)].re, -1.0 / (4.0 * PI), 1e-15);
    close(g[(1, 1)].re, -2.0 / 3.0 / (4.0 * PI), 1e-15);
    assert!(g[(0, 1)].norm() < 1e-16 && g[(1, 2)].norm() < 1e-16);
}

#[test]
fn layer_and_np_values() {
    close(scalar_sl_on_mode(&ModeIndex::t(2, 0).unwrap(), 1.0).unwrap(), -0.2, 1e-15);
    close(scalar_sl_on_mode(&ModeIndex::m(2, 0).unwrap(), 1.0).unwrap(), -1.0 / 3.0, 1e-15);
    // The N mode built on Y_2.
    close(scalar_sl_on_mode(&ModeIndex::n(3, 0).unwrap(), 1.0).unwrap(), -1.0 / 7.0, 1e-15);
    close(elastic_sl_on_m(2, &unit()).unwrap().re, -11.0 / 45.0, 1e-15);
    close(elastic_sl_on_n(3, &unit()).unwrap().re, -3.0 / 35.0, 1e-15);
    close(np_eigenvalue(Family::T, 1, &unit()).unwrap().value.re, 0.5, 1e-15);
    close(np_eigenvalue(Family::M, 2, &unit()).unwrap().value.re, 1.0 / 90.0, 1e-15);
    close(np_eigenvalue(Family::N, 2, &unit()).unwrap().value.re, 1.0 / 6.0, 1e-15);
}

#[test]
fn n_modes_match_their_eigenvalue_by_quadrature() {
    let rule = QuadratureRule::singular(32, 64).unwrap();
    for lame in [unit(), LameParams::new(2.0, 1.0).unwrap()] {
        for n in 1..=4 {
            let fit = quad_np_apply(&ModeIndex::n(n, 0).unwrap(), &lame, &rule).unwrap();
            let xi = np_eigenvalue(Family::N, n, &lame).unwrap().value;
            assert!((fit.estimate - xi).norm() < 1e-9 * xi.norm(), "N{n}: {} vs {xi}", fit.estimate);
        }
    }
}

#[test]
fn mixed_spectrum_scales_each_family() {
    let lame = LameParams::new(0.7, 1.3).unwrap();
    let mut spec = CoefficientSpectrum::new();
    spec.insert(ModeIndex::t(3, -2).unwrap(), C64::new(1.0, 1.0)).unwrap();
    spec.insert(ModeIndex::m(2, 1).unwrap(), C64::new(-2.0, 0.0)).unwrap();
    spec.insert(ModeIndex::n(4, 3).unwrap(), C64::new(0.0, 0.5)).unwrap();
    let out = np_apply(&spec, &lame).unwrap();
    assert_eq!(out.len(), 3);
    for (idx, c) in spec.iter() {
        let xi = np_eigenvalue(idx.family, idx.n, &lame).unwrap().value;
        assert!((out.get(idx) - c * xi).norm() < 1e-15);
    }
    assert!(np_apply_decomposed(&spec, &lame, 1.7).unwrap().max_abs_diff(&out) < 1e-13);
    assert!(np_apply(&CoefficientSpectrum::new(), &lame).unwrap().is_empty());
}

#[test]
fn single_layer_traction_jump_is_the_density() {
    let lame = LameParams::new(1.4, 0.6).unwrap();
    let st = FdStencil::new(1e-3, FdOrder::Four).unwrap();
    for (n, m, r0) in [(2, 0, 1.0), (3, 2, 0.8), (5, -1, 1.5)] {
        let layer = t_layer_action(n, m, r0, &lame).unwrap();
        let idx = layer.mode;
        for (theta, phi) in [(0.4, 0.2), (1.9, -2.5)] {
            let p = SurfacePoint::new(theta, phi, r0).unwrap();
            let outside = fd_traction(|x: &RVec3| layer.exterior(&lame, x), &lame, &p, &st);
            let inside = fd_traction(|x: &RVec3| layer.interior(&lame, x), &lame, &p, &st);
            let density = eval_trace_mode(&idx, &lame, &SurfacePoint::unit(theta, phi)).unwrap();
            assert!((outside - inside - density).norm() < 1e-8 * density.norm().max(1.0), "T({n},{m})");
            // Continuity of the layer itself.
            assert!((layer.exterior(&lame, &p.position()) - layer.interior(&lame, &p.position())).norm() < 1e-12);
            // The average of the two sides is K* of the density.
            let xi = np_eigenvalue(Family::T, n, &lame).unwrap().value;
            assert!(((outside + inside) * C64::new(0.5, 0.0) - density * xi).norm() < 1e-8 * density.norm().max(1.0));
        }
    }
}

#[test]
fn solid_t_traction_on_the_unit_sphere() {
    let lame = LameParams::new(2.0, 0.5).unwrap();
    let st = FdStencil::new(1e-3, FdOrder::Four).unwrap();
    for n in 1..=4u32 {
        let idx = ModeIndex::t(n, 1).unwrap();
        let p = SurfacePoint::unit(1.1, 0.3);
        let t = fd_traction(|x: &RVec3| eval_solid_mode(&idx, &lame, &SolidPoint::from(*x)).unwrap(), &lame, &p, &st);
        let expect = eval_trace_mode(&idx, &lame, &p).unwrap() * (lame.mu * (n as f64 - 1.0));
        assert!((t - expect).norm() < 1e-9, "n = {n}");
    }
}

#[test]
fn transmission_worked_values() {
    let geom = ShellGeometry::new(1.0, 2.0).unwrap();
    close(geom.critical_radius(), 2.0 * 2f64.sqrt(), 1e-15);
    close(g_i_from_g_e(3, C64::new(1.0, 0.0), &geom).re, 0.25, 1e-16);
    assert_eq!(g_i_from_g_e(1, C64::new(0.3, 0.1), &geom), C64::new(0.3, 0.1));
    let cfg = PlasmonicConfig::resonant(2, 0.0).unwrap();
    close(denominator(3, &geom, &cfg, &unit()).unwrap().re, 0.008_941, 1e-6);
    assert_eq!(choose_n0(0.1, &geom).unwrap(), 4);
    assert_eq!(choose_n0(0.3, &geom).unwrap(), 2);
    assert_eq!(choose_n0(0.125, &geom).unwrap(), 4);
}

#[test]
fn single_mode_energy_term() {
    let geom = ShellGeometry::new(1.0, 2.0).unwrap();
    let cfg = PlasmonicConfig::resonant(2, 0.005).unwrap();
    let src = SourceSpectrum::single(2, 0, C64::new(1.0, 0.0)).unwrap();
    let sol = solve(&src, &geom, &cfg, &unit()).unwrap();
    let rep = energy(&sol, &src, &geom, &cfg, &unit(), None).unwrap();
    close(rep.energy_asymptotic, 0.005 / (2.0 * (0.000_025 + 0.0625)), 1e-15);
    assert!(rep.energy_modal > 0.0);
    let empty = SourceSpectrum::new();
    let none = energy(&solve(&empty, &geom, &cfg, &unit()).unwrap(), &empty, &geom, &cfg, &unit(), None).unwrap();
    assert_eq!(none.energy_modal, 0.0);
}

#[test]
fn field_is_continuous_and_decays() {
    let lame = LameParams::new(1.0, 0.8).unwrap();
    let geom = ShellGeometry::new(1.0, 2.0).unwrap();
    let cfg = PlasmonicConfig::resonant(3, 0.01).unwrap();
    let mut src = SourceSpectrum::new();
    src.insert(2, 1, C64::new(0.4, -0.2)).unwrap();
    let sol = solve(&src, &geom, &cfg, &lame).unwrap();
    let dir = RVec3::new(0.3, -0.5, 0.8).normalize();
    for r in [geom.r_i, geom.r_e] {
        let a = field_eval(&sol, &src, &geom, &lame, &SolidPoint::from(dir * (r * (1.0 - 1e-9))), false);
        let b = field_eval(&sol, &src, &geom, &lame, &SolidPoint::from(dir * (r * (1.0 + 1e-9))), false);
        assert!((a - b).norm() < 1e-7 * a.norm(), "r = {r}");
    }
    let far = |r: f64| field_eval(&sol, &src, &geom, &lame, &SolidPoint::from(dir * r), false).norm();
    close(far(40.0) / far(80.0), 8.0, 1e-9);
}

#[test]
fn source_on_the_critical_sphere_is_a_boundary_case() {
    let geom = ShellGeometry::new(1.0, 2.0).unwrap();
    let model = SourceModel { r_s: geom.critical_radius(), kappa: 1.0, profile: SourceProfile::MonopoleLine };
    let grid: Vec<f64> = (1..=5).map(|k| 10f64.powi(-k)).collect();
    let s = classify_calr(&geom, &unit(), TuningPolicy::Retune, &model, &grid, &SweepOptions::default()).unwrap();
    assert_eq!(s.verdict, CalrVerdict::Boundary);
}
