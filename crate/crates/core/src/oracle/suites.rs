//! Named batches of closed-form versus oracle comparisons.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde_json::json;

use crate::error::{domain, Error, Result};
use crate::harmonics::{eval_solid_mode, gram_matrix, Family, ModeIndex, SolidPoint};
use crate::kelvin::LameParams;
use crate::oracle::energy::EnergyQuadrature;
use crate::oracle::fd::{fd_lame_residual, FdOrder, FdStencil};
use crate::oracle::interface::direct_mode_solve;
use crate::oracle::layers::{quad_elastic_sl_multiplier, quad_np_apply, quad_scalar_sl_multiplier, sample_directions};
use crate::oracle::quadrature::QuadratureRule;
use crate::oracle::record::ValidationRecord;
use crate::potentials::{elastic_sl_multiplier, np_eigenvalue, scalar_sl_on_mode};
use crate::transmission::{
    denominator_band, energy, log_grid, solve, solve_mode, PlasmonicConfig, ShellGeometry, SourceSpectrum,
};
use crate::RVec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Layers,
    Np,
    Lame,
    Gram,
    Energy,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Layers, Suite::Np, Suite::Lame, Suite::Gram, Suite::Energy];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Layers => "layers",
            Suite::Np => "np",
            Suite::Lame => "lame",
            Suite::Gram => "gram",
            Suite::Energy => "energy",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s.trim())
            .ok_or_else(|| domain(format!("unknown suite `{s}` (expected layers, np, lame, gram or energy)")))
    }
}

/// Inputs shared by the suites.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub lame: LameParams,
    pub n_max: u32,
    pub quad_theta: usize,
    pub quad_phi: usize,
    pub geometry: ShellGeometry,
    /// Added to every closed-form value; a nonzero value must make the suite fail.
    pub fault: f64,
}

impl SuiteConfig {
    pub fn new(lame: LameParams, n_max: u32) -> Self {
        SuiteConfig {
            lame,
            n_max,
            quad_theta: 64,
            quad_phi: 128,
            geometry: ShellGeometry { r_i: 1.0, r_e: 2.0 },
            fault: 0.0,
        }
    }
}

pub const LAYER_TOL: f64 = 1e-6;
pub const NP_TOL: f64 = 1e-6;
pub const LAME_TOL: f64 = 1e-6;
pub const GRAM_TOL: f64 = 1e-10;
pub const ENERGY_TOL: f64 = 0.05;
pub const SOLVE_TOL: f64 = 1e-10;
/// Largest allowed spread of the normalised determinant.
pub const BAND_RATIO_TOL: f64 = 100.0;

/// Orders sampled per degree: `0` and, when it exists, `1`.
fn sample_orders(idx_degree: u32) -> Vec<i32> {
    if idx_degree >= 1 {
        vec![0, 1]
    } else {
        vec![0]
    }
}

fn modes(n_max: u32) -> Vec<ModeIndex> {
    let mut out = Vec::new();
    for family in Family::ALL {
        for n in 1..=n_max {
            let deg = if family == Family::N { n - 1 } else { n };
            for m in sample_orders(deg) {
                out.push(ModeIndex { family, n, m });
            }
        }
    }
    out
}

fn fault(cfg: &SuiteConfig) -> Complex64 {
    Complex64::new(cfg.fault, 0.0)
}

fn params(idx: &ModeIndex, extra: serde_json::Value) -> serde_json::Value {
    let mut v = json!({"family": idx.family.as_str(), "n": idx.n, "m": idx.m});
    if let (Some(obj), serde_json::Value::Object(more)) = (v.as_object_mut(), extra) {
        obj.extend(more);
    }
    v
}

fn layers(cfg: &SuiteConfig) -> Result<Vec<ValidationRecord>> {
    let rule = QuadratureRule::singular(cfg.quad_theta, cfg.quad_phi)?;
    let mut out = Vec::new();
    for idx in modes(cfg.n_max) {
        for r0 in [0.5, 1.0, 2.0] {
            let p = params(&idx, json!({"r0": r0}));
            let closed = Complex64::new(scalar_sl_on_mode(&idx, r0)?, 0.0) + fault(cfg);
            let fit = quad_scalar_sl_multiplier(&idx, &cfg.lame, r0, &rule)?;
            out.push(ValidationRecord::compare("layers", "scalar_single_layer", p.clone(), closed, fit.estimate, LAYER_TOL));
            out.push(ValidationRecord::residual("layers", "scalar_single_layer_residual", p.clone(), fit.residual, LAYER_TOL));
            let closed = elastic_sl_multiplier(&idx, r0, &cfg.lame)? + fault(cfg);
            let fit = quad_elastic_sl_multiplier(&idx, &cfg.lame, r0, &rule)?;
            out.push(ValidationRecord::compare("layers", "elastic_single_layer", p.clone(), closed, fit.estimate, LAYER_TOL));
            out.push(ValidationRecord::residual("layers", "elastic_single_layer_residual", p, fit.residual, LAYER_TOL));
        }
    }
    Ok(out)
}

fn np(cfg: &SuiteConfig) -> Result<Vec<ValidationRecord>> {
    let rule = QuadratureRule::singular(cfg.quad_theta, cfg.quad_phi)?;
    let mut out = Vec::new();
    for idx in modes(cfg.n_max) {
        let closed = np_eigenvalue(idx.family, idx.n, &cfg.lame)?.value + fault(cfg);
        let p = params(&idx, json!({}));
        match quad_np_apply(&idx, &cfg.lame, &rule) {
            Ok(fit) => {
                out.push(ValidationRecord::compare("np", "np_eigenvalue", p.clone(), closed, fit.estimate, NP_TOL));
                out.push(ValidationRecord::residual("np", "eigenfunction_residual", p, fit.residual, NP_TOL));
            }
            Err(Error::NotEigenfunction { residual, .. }) => {
                out.push(ValidationRecord::residual("np", "eigenfunction_residual", p, residual, NP_TOL));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Twenty fixed points in the ball of radius 1.5.
pub fn lame_sample_points() -> Vec<RVec3> {
    sample_directions(20)
        .into_iter()
        .enumerate()
        .map(|(k, u)| u * (0.3 + 1.2 * ((k as f64 * 0.618_033_988_75).fract())))
        .collect()
}

fn lame(cfg: &SuiteConfig) -> Result<Vec<ValidationRecord>> {
    let st = FdStencil::new(1e-3, FdOrder::Four)?;
    let mut out = Vec::new();
    for family in Family::ALL {
        for n in 1..=cfg.n_max {
            let deg = if family == Family::N { n - 1 } else { n };
            let idx = ModeIndex::new(family, n, deg.min(1) as i32)?;
            let mut worst = 0.0f64;
            for x in lame_sample_points() {
                let f = |y: &RVec3| eval_solid_mode(&idx, &cfg.lame, &SolidPoint::from(*y)).expect("valid mode");
                worst = worst.max(fd_lame_residual(f, &cfg.lame, &x, &st).relative);
            }
            out.push(ValidationRecord::residual("lame", "lame_residual", params(&idx, json!({"points": 20})), worst + cfg.fault.abs(), LAME_TOL));
        }
    }
    Ok(out)
}

fn gram(cfg: &SuiteConfig) -> Result<Vec<ValidationRecord>> {
    let n_theta = (cfg.n_max as usize + 2).max(4);
    let rule = QuadratureRule::new(n_theta, 2 * n_theta)?;
    let g = gram_matrix(cfg.n_max, &cfg.lame, &rule)?;
    let mut out = vec![ValidationRecord::residual(
        "gram",
        "max_off_diagonal",
        json!({"n_max": cfg.n_max, "modes": g.dim()}),
        g.max_off_diagonal() + cfg.fault.abs(),
        GRAM_TOL,
    )];
    out.push(ValidationRecord::residual("gram", "hermitian_defect", json!({"n_max": cfg.n_max}), g.hermitian_defect(), GRAM_TOL));
    for (i, idx) in g.modes.iter().enumerate() {
        if idx.family == Family::T && idx.m == 0 {
            let n = idx.n as f64;
            let closed = Complex64::new(n * (n + 1.0), 0.0) + fault(cfg);
            out.push(ValidationRecord::compare("gram", "t_norm", params(idx, json!({})), closed, g.get(i, i), GRAM_TOL));
        }
    }
    Ok(out)
}

fn energy_suite(cfg: &SuiteConfig) -> Result<Vec<ValidationRecord>> {
    let geom = cfg.geometry;
    let mut out = Vec::new();
    for n in 2..=cfg.n_max.clamp(2, 6) {
        for m in [0, n as i32] {
            let delta = 0.05;
            let pc = PlasmonicConfig::resonant(n, delta)?;
            let src = SourceSpectrum::single(n, m, Complex64::new(1.0, 0.0))?;
            let sol = solve(&src, &geom, &pc, &cfg.lame)?;
            let nt = n as usize + 4;
            let q = EnergyQuadrature::new(nt, 2 * nt, 24)?;
            let rep = energy(&sol, &src, &geom, &pc, &cfg.lame, Some(&q))?;
            let p = json!({"n": n, "m": m, "delta": delta, "r_i": geom.r_i, "r_e": geom.r_e});
            out.push(ValidationRecord::compare(
                "energy",
                "shell_energy",
                p,
                Complex64::new(rep.energy_modal + cfg.fault, 0.0),
                Complex64::new(rep.energy_quadrature.unwrap_or(f64::NAN), 0.0),
                ENERGY_TOL,
            ));
        }
        for delta in [0.0, 1e-3, 0.3] {
            let pc = PlasmonicConfig::resonant(2, delta)?;
            let g = Complex64::new(0.8, -0.3);
            let (ci, ce) = solve_mode(n, 0, g, &geom, &pc, &cfg.lame)?;
            let (di, de) = direct_mode_solve(n, g, &geom, &pc, &cfg.lame)?;
            let p = json!({"n": n, "delta": delta});
            out.push(ValidationRecord::compare("energy", "mode_solve_phi_i", p.clone(), ci + fault(cfg), di, SOLVE_TOL));
            out.push(ValidationRecord::compare("energy", "mode_solve_phi_e", p, ce + fault(cfg), de, SOLVE_TOL));
        }
    }
    let deltas = log_grid(1e-1, 1e-8, 71)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for rho in [0.3, 0.5, 0.7] {
        let b = denominator_band(rho, &deltas, &cfg.lame)?;
        lo = lo.min(b.lower);
        hi = hi.max(b.upper);
        let p = json!({"rho": rho, "lower": b.lower, "upper": b.upper});
        out.push(ValidationRecord::residual("energy", "denominator_band_ratio", p, b.ratio() + cfg.fault.abs(), BAND_RATIO_TOL));
    }
    let p = json!({"rho": [0.3, 0.5, 0.7], "delta_range": [1e-8, 1e-1], "lower": lo, "upper": hi});
    out.push(ValidationRecord::residual("energy", "denominator_band_ratio", p, hi / lo + cfg.fault.abs(), BAND_RATIO_TOL));
    Ok(out)
}

/// Runs one suite and returns its records in a fixed order.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<ValidationRecord>> {
    match suite {
        Suite::Layers => layers(cfg),
        Suite::Np => np(cfg),
        Suite::Lame => lame(cfg),
        Suite::Gram => gram(cfg),
        Suite::Energy => energy_suite(cfg),
    }
}
