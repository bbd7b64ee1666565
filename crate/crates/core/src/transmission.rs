//! Core-shell-matrix transmission problem with a plasmonic shell.
//!
//! The core `|x| < r_i` has moduli `c·(λ, μ)`, the shell `r_i < |x| < r_e`
//! has `(ε + iδ)·(λ, μ)` and the matrix outside is `(λ, μ)`. For a source
//! whose traction on `|x| = r_e` expands in `T` modes with coefficients
//! `g_e^{n,m}`, the solution is
//!
//! ```text
//! u = S_{r_i}[φ_i] + S_{r_e}[φ_e] + F
//! ```
//!
//! and each `(n, m)` decouples into a 2x2 system for the densities. With
//! `c`, `ε` tuned to degree `n0` the system is nearly singular for small
//! `δ`, and the dissipated energy blows up exactly when the source sits
//! inside the critical radius `r* = sqrt(r_e³/r_i)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::harmonics::{solid_harmonic_gradient, ModeIndex, SolidPoint};
use crate::kelvin::LameParams;
use crate::oracle::energy::{quad_energy_shell, EnergyQuadrature};
use crate::potentials::{d1, CoefficientSpectrum};
use crate::{cross_cr, CVec3, RVec3};

type C64 = Complex64;

/// Radii of the core and of the shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellGeometry {
    pub r_i: f64,
    pub r_e: f64,
}

impl ShellGeometry {
    pub fn new(r_i: f64, r_e: f64) -> Result<Self> {
        if !(r_i > 0.0 && r_i < r_e && r_e.is_finite()) {
            return Err(domain(format!("need 0 < r_i < r_e, got r_i = {r_i}, r_e = {r_e}")));
        }
        Ok(ShellGeometry { r_i, r_e })
    }

    /// `ρ = r_i / r_e`.
    pub fn ratio(&self) -> f64 {
        self.r_i / self.r_e
    }

    pub fn critical_radius(&self) -> f64 {
        critical_radius_of(self.r_i, self.r_e)
    }

    /// Radius beyond which the field should stay bounded: `r_e²/r_i`.
    pub fn cloaking_radius(&self) -> f64 {
        self.r_e * self.r_e / self.r_i
    }
}

/// `sqrt(r_e³/r_i)`.
pub fn critical_radius_of(r_i: f64, r_e: f64) -> f64 {
    (r_e.powi(3) / r_i).sqrt()
}

pub fn critical_radius(geom: &ShellGeometry) -> f64 {
    geom.critical_radius()
}

/// Material scalings of the core (`c_n`) and shell (`ε_n + iδ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmonicConfig {
    pub n0: u32,
    pub c_n: f64,
    pub eps_n: f64,
    pub delta: f64,
}

impl PlasmonicConfig {
    /// Parameters resonant at degree `n0` with loss `delta`.
    pub fn resonant(n0: u32, delta: f64) -> Result<Self> {
        let (c_n, eps_n) = plasmonic_params(n0)?;
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(domain(format!("loss δ = {delta} must be non-negative")));
        }
        Ok(PlasmonicConfig { n0, c_n, eps_n, delta })
    }

    /// `ε_n + iδ`.
    pub fn shell_factor(&self) -> C64 {
        C64::new(self.eps_n, self.delta)
    }
}

/// `(c, ε)` that make degree `n0` resonant at zero loss.
pub fn plasmonic_params(n0: u32) -> Result<(f64, f64)> {
    if n0 < 2 {
        return Err(domain(format!("resonant degree {n0} < 2: degree-1 tractions vanish")));
    }
    let k = n0 as f64 - 1.0;
    let c = ((n0 as f64 + 2.0) / k).powi(2);
    Ok((c, -1.0 - 3.0 / k))
}

/// The interface constants of the 2x2 mode system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ADeltaPair {
    pub a1: C64,
    pub a2: C64,
}

pub fn a_delta(cfg: &PlasmonicConfig) -> Result<ADeltaPair> {
    let e = cfg.shell_factor();
    let c = C64::new(cfg.c_n, 0.0);
    if (c - e).norm() == 0.0 {
        return Err(Error::SingularParameter("core and shell moduli coincide".into()));
    }
    if (e - 1.0).norm() == 0.0 {
        return Err(Error::SingularParameter("shell and matrix moduli coincide".into()));
    }
    Ok(ADeltaPair { a1: (c + e) / ((c - e) * 2.0), a2: (e + 1.0) / ((e - 1.0) * 2.0) })
}

/// Traction coefficient of the source on the core boundary.
pub fn g_i_from_g_e(n: u32, g_e: C64, geom: &ShellGeometry) -> C64 {
    g_e * geom.ratio().powi(n as i32 - 1)
}

fn xi_t(n: u32) -> f64 {
    3.0 / (4.0 * n as f64 + 2.0)
}

/// Determinant of the mode system at degree `n`.
pub fn denominator(n: u32, geom: &ShellGeometry, cfg: &PlasmonicConfig, lame: &LameParams) -> Result<C64> {
    let a = a_delta(cfg)?;
    let xi = xi_t(n);
    let dm = d1(n, lame) * lame.mu;
    let nf = n as f64;
    Ok((a.a1 - xi) * (a.a2 - xi) + dm * dm * ((nf - 1.0) * (nf + 2.0) * geom.ratio().powi(2 * n as i32 + 1)))
}

/// Densities `(φ_i, φ_e)` for one `T_n^m` component of the source.
pub fn solve_mode(n: u32, m: i32, g_e: C64, geom: &ShellGeometry, cfg: &PlasmonicConfig, lame: &LameParams) -> Result<(C64, C64)> {
    if n < 2 {
        return Err(domain("transmission modes start at n = 2"));
    }
    ModeIndex::t(n, m)?;
    let a = a_delta(cfg)?;
    let d = denominator(n, geom, cfg, lame)?;
    if d.norm() == 0.0 {
        return Err(Error::ExactResonance { n });
    }
    let xi = xi_t(n);
    let dm = d1(n, lame) * lame.mu;
    let rho = geom.ratio();
    let nf = n as f64;
    let phi_i = g_e * (a.a2 - xi + dm * (nf - 1.0)) * rho.powi(n as i32 - 1) / d;
    let phi_e = -g_e * (xi - a.a1 + dm * ((nf + 2.0) * rho.powi(2 * n as i32 + 1))) / d;
    Ok((phi_i, phi_e))
}

/// `T`-mode traction coefficients `g_e^{n,m}` of a source on `|x| = r_e`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceSpectrum {
    pub coeffs: BTreeMap<(u32, i32), C64>,
    pub source_radius: Option<f64>,
}

impl SourceSpectrum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(n: u32, m: i32, g: C64) -> Result<Self> {
        let mut s = Self::new();
        s.insert(n, m, g)?;
        Ok(s)
    }

    pub fn insert(&mut self, n: u32, m: i32, g: C64) -> Result<()> {
        if n < 2 {
            return Err(domain("source modes start at n = 2"));
        }
        ModeIndex::t(n, m)?;
        self.coeffs.insert((n, m), g);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.coeffs.keys().map(|k| k.0).max().unwrap_or(0)
    }

    /// Only the modes with degree at most `n_max`.
    pub fn truncated(&self, n_max: u32) -> Self {
        SourceSpectrum {
            coeffs: self.coeffs.iter().filter(|(k, _)| k.0 <= n_max).map(|(k, v)| (*k, *v)).collect(),
            source_radius: self.source_radius,
        }
    }

    /// `(Σ_m |g^{n,m}| / (n r_e^{n-1}))^{1/n}`; its limit is the reciprocal
    /// convergence radius of the source potential.
    pub fn root_test(&self, n: u32, r_e: f64) -> f64 {
        let s: f64 = self.coeffs.range((n, i32::MIN)..=(n, i32::MAX)).map(|(_, g)| g.norm()).sum();
        (s / (n as f64 * r_e.powi(n as i32 - 1))).powf(1.0 / n as f64)
    }
}

/// How synthetic source amplitude is distributed over orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceProfile {
    /// Axisymmetric: `m = 0` only.
    MonopoleLine,
    /// The same total `Σ_m |g|` spread evenly over all `2n+1` orders.
    UniformM,
}

/// Synthetic source with `g_e^{n,0} = κ μ (n-1) r_e^{n-1} r_s^{-n}`, so the
/// source potential converges exactly for `|x| < r_s`. Degrees run from 2 up
/// to `n_max`, stopping early once `|g|` drops below `floor` times the largest
/// coefficient.
pub fn synth_source(
    r_s: f64,
    kappa: f64,
    geom: &ShellGeometry,
    lame: &LameParams,
    profile: SourceProfile,
    n_max: u32,
    floor: f64,
) -> Result<SourceSpectrum> {
    if !(r_s > geom.r_e) {
        return Err(domain(format!("source radius {r_s} must exceed r_e = {}", geom.r_e)));
    }
    let mut out = SourceSpectrum { coeffs: BTreeMap::new(), source_radius: Some(r_s) };
    if kappa == 0.0 {
        return Ok(out);
    }
    let mut peak = 0.0f64;
    for n in 2..=n_max {
        let nf = n as f64;
        // r_e^{n-1} r_s^{-n} in a form that neither overflows nor underflows early.
        let g = lame.mu * (kappa * (nf - 1.0) * (geom.r_e / r_s).powi(n as i32 - 1) / r_s);
        peak = peak.max(g.norm());
        if g.norm() < floor * peak {
            break;
        }
        match profile {
            SourceProfile::MonopoleLine => {
                out.coeffs.insert((n, 0), g);
            }
            SourceProfile::UniformM => {
                let share = g / (2.0 * nf + 1.0);
                for m in -(n as i32)..=(n as i32) {
                    out.coeffs.insert((n, m), share);
                }
            }
        }
    }
    Ok(out)
}

/// Densities on the two interfaces, `T` family only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DensitySolution {
    pub phi_i: CoefficientSpectrum,
    pub phi_e: CoefficientSpectrum,
}

/// Solves every mode of the source.
pub fn solve(src: &SourceSpectrum, geom: &ShellGeometry, cfg: &PlasmonicConfig, lame: &LameParams) -> Result<DensitySolution> {
    let mut sol = DensitySolution::default();
    for (&(n, m), &g) in &src.coeffs {
        let (pi, pe) = solve_mode(n, m, g, geom, cfg, lame)?;
        let idx = ModeIndex::t(n, m)?;
        sol.phi_i.0.insert(idx, pi);
        sol.phi_e.0.insert(idx, pe);
    }
    Ok(sol)
}

/// Radial profile `h` with `u = Σ h_{n,m}(r) 𝒯_n^m(x) / r^n` in each region.
fn mode_amplitude(n: u32, phi_i: C64, phi_e: C64, g_e: C64, with_source: bool, geom: &ShellGeometry, lame: &LameParams, r: f64) -> C64 {
    let d = d1(n, lame);
    let ni = n as i32;
    let inner_i = geom.r_i.powi(1 - ni);
    let inner_e = geom.r_e.powi(1 - ni);
    let outer_i = geom.r_i.powi(ni + 2) * r.powi(-2 * ni - 1);
    let outer_e = geom.r_e.powi(ni + 2) * r.powi(-2 * ni - 1);
    let layers = if r <= geom.r_i {
        d * (phi_i * inner_i + phi_e * inner_e)
    } else if r <= geom.r_e {
        d * (phi_i * outer_i + phi_e * inner_e)
    } else {
        d * (phi_i * outer_i + phi_e * outer_e)
    };
    if with_source && r <= geom.r_e {
        layers + source_amplitude(n, g_e, geom, lame)
    } else {
        layers
    }
}

/// Coefficient of `𝒯_n^m` in the source potential `F` near the shell.
fn source_amplitude(n: u32, g_e: C64, geom: &ShellGeometry, lame: &LameParams) -> C64 {
    g_e / (lame.mu * ((n as f64 - 1.0) * geom.r_e.powi(n as i32 - 1)))
}

fn solid_t(n: u32, m: i32, x: &RVec3) -> CVec3 {
    cross_cr(&solid_harmonic_gradient(n, m, x), x)
}

/// `u_δ - F` at `x`, plus `F` inside `|x| <= r_e` when `with_source` is set.
/// The constant vector in `F` is taken to be zero.
pub fn field_eval(
    sol: &DensitySolution,
    src: &SourceSpectrum,
    geom: &ShellGeometry,
    lame: &LameParams,
    x: &SolidPoint,
    with_source: bool,
) -> CVec3 {
    let r = x.radius();
    let mut u = CVec3::zeros();
    let keys: std::collections::BTreeSet<ModeIndex> = sol
        .phi_i
        .0
        .keys()
        .chain(sol.phi_e.0.keys())
        .copied()
        .chain(if with_source {
            src.coeffs.keys().filter_map(|&(n, m)| ModeIndex::t(n, m).ok()).collect::<Vec<_>>()
        } else {
            Vec::new()
        })
        .collect();
    for idx in keys {
        let g = src.coeffs.get(&(idx.n, idx.m)).copied().unwrap_or_default();
        let h = mode_amplitude(idx.n, sol.phi_i.get(&idx), sol.phi_e.get(&idx), g, with_source, geom, lame, r);
        if h.norm() != 0.0 {
            u += solid_t(idx.n, idx.m, &x.x) * h;
        }
    }
    u
}

/// CALR classification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalrVerdict {
    Resonant,
    Bounded,
    /// Source on the critical sphere, where neither hypothesis applies.
    Boundary,
    /// Too few loss values, or a grid spanning fewer than four decades.
    InsufficientGrid,
}

impl fmt::Display for CalrVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CalrVerdict::Resonant => "resonant",
            CalrVerdict::Bounded => "bounded",
            CalrVerdict::Boundary => "boundary",
            CalrVerdict::InsufficientGrid => "insufficient-grid",
        })
    }
}

/// Dissipated energy and related diagnostics at one loss value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub delta: f64,
    pub n0: u32,
    pub c_n: f64,
    pub eps_n: f64,
    /// `(δ/2) P(u, u)` over the shell, exact per-mode closed form.
    pub energy_modal: f64,
    /// The same by volume quadrature with finite-difference gradients.
    pub energy_quadrature: Option<f64>,
    /// Leading-order estimate `Σ_m δ|g^{n0,m}|² / (n0 (δ² + ρ^{2 n0}))`.
    pub energy_asymptotic: f64,
    /// Bound on the non-resonant modes,
    /// `Σ_{n≠n0} |g|²/n (n²/(n-n0)² + n⁴/(n-n0)⁴ ρ^{2n})`.
    pub remainder_bound: f64,
    /// `|u_δ - F|` at `|x| = 1.05 r_e²/r_i`.
    pub farfield_sample: f64,
    /// Degree with the largest energy contribution.
    pub dominant_n: u32,
    /// Highest degree kept in the mode sums.
    pub n_max: u32,
    /// Relative change of `energy_modal` when `n_max` is doubled, if audited.
    pub truncation_audit: Option<f64>,
    pub verdict: Option<CalrVerdict>,
}

/// Per-degree closed-form shell energy `(δ/2) P_n`, in degree order.
pub fn modal_energies(sol: &DensitySolution, src: &SourceSpectrum, geom: &ShellGeometry, lame: &LameParams, delta: f64) -> Vec<(u32, f64)> {
    let mu = lame.mu.re;
    let mut per_n: BTreeMap<u32, f64> = BTreeMap::new();
    for (idx, &pi) in sol.phi_i.iter() {
        let pe = sol.phi_e.get(idx);
        let g = src.coeffs.get(&(idx.n, idx.m)).copied().unwrap_or_default();
        let n = idx.n;
        let nf = n as f64;
        let ni = n as i32;
        let d = d1(n, lame);
        // Shell profile h(r) = α r^{-n-1} + β r^n for the coefficient of T_n^m(x̂).
        let alpha = d * pi * geom.r_i.powi(ni + 2);
        let beta = d * pe * geom.r_e.powi(1 - ni) + source_amplitude(n, g, geom, lame);
        let p = mu
            * nf
            * (nf + 1.0)
            * ((nf + 2.0) * alpha.norm_sqr() * (geom.r_i.powi(-2 * ni - 1) - geom.r_e.powi(-2 * ni - 1))
                + (nf - 1.0) * beta.norm_sqr() * (geom.r_e.powi(2 * ni + 1) - geom.r_i.powi(2 * ni + 1)));
        *per_n.entry(n).or_insert(0.0) += 0.5 * delta * p;
    }
    per_n.into_iter().collect()
}

fn energy_asymptotic(src: &SourceSpectrum, n0: u32, rho: f64, delta: f64) -> f64 {
    let rn = rho.powi(2 * n0 as i32);
    src.coeffs
        .range((n0, i32::MIN)..=(n0, i32::MAX))
        .map(|(_, g)| delta * g.norm_sqr() / (n0 as f64 * (delta * delta + rn)))
        .sum()
}

fn remainder_bound(src: &SourceSpectrum, n0: u32, rho: f64) -> f64 {
    src.coeffs
        .iter()
        .filter(|((n, _), _)| *n != n0)
        .map(|(&(n, _), g)| {
            let nf = n as f64;
            let k = nf - n0 as f64;
            g.norm_sqr() / nf * (nf * nf / (k * k) + nf.powi(4) / k.powi(4) * rho.powi(2 * n as i32))
        })
        .sum()
}

/// Direction of the far-field probe.
pub const FARFIELD_THETA: f64 = 1.1;
pub const FARFIELD_PHI: f64 = 0.7;

/// Far-field probe point at `1.05 r_e²/r_i`.
pub fn farfield_point(geom: &ShellGeometry) -> SolidPoint {
    let r = 1.05 * geom.cloaking_radius();
    let (st, ct) = FARFIELD_THETA.sin_cos();
    let (sp, cp) = FARFIELD_PHI.sin_cos();
    SolidPoint::new(r * st * cp, r * st * sp, r * ct)
}

/// Energy report for an assembled solution.
pub fn energy(
    sol: &DensitySolution,
    src: &SourceSpectrum,
    geom: &ShellGeometry,
    cfg: &PlasmonicConfig,
    lame: &LameParams,
    quad: Option<&EnergyQuadrature>,
) -> Result<EnergyReport> {
    let per_n = modal_energies(sol, src, geom, lame, cfg.delta);
    let energy_modal: f64 = per_n.iter().map(|(_, e)| e).sum();
    let dominant_n = per_n
        .iter()
        .fold((0u32, f64::NEG_INFINITY), |best, &(n, e)| if e > best.1 { (n, e) } else { best })
        .0;
    let energy_quadrature = match quad {
        Some(q) => Some(quad_energy_shell(
            |x: &RVec3| field_eval(sol, src, geom, lame, &SolidPoint::from(*x), true),
            lame,
            cfg.delta,
            geom,
            q,
        )?),
        None => None,
    };
    let rho = geom.ratio();
    let far = field_eval(sol, src, geom, lame, &farfield_point(geom), false).norm();
    Ok(EnergyReport {
        delta: cfg.delta,
        n0: cfg.n0,
        c_n: cfg.c_n,
        eps_n: cfg.eps_n,
        energy_modal,
        energy_quadrature,
        energy_asymptotic: energy_asymptotic(src, cfg.n0, rho, cfg.delta),
        remainder_bound: remainder_bound(src, cfg.n0, rho),
        farfield_sample: far,
        dominant_n,
        n_max: src.max_degree(),
        truncation_audit: None,
        verdict: None,
    })
}

/// The degree `n0` with `ρ^{n0} < δ <= ρ^{n0-1}`.
pub fn choose_n0(delta: f64, geom: &ShellGeometry) -> Result<u32> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("loss δ = {delta} must lie in (0, 1)")));
    }
    let rho = geom.ratio();
    let mut k = ((delta.ln() / rho.ln()).floor() as i64 + 1).max(1) as i32;
    while rho.powi(k) >= delta {
        k += 1;
    }
    while k > 1 && rho.powi(k - 1) < delta {
        k -= 1;
    }
    Ok(k as u32)
}

/// How the plasmonic parameters follow the loss along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TuningPolicy {
    /// Re-select `n0` per loss value, clamped to at least 2.
    Retune,
    /// Keep one resonant degree throughout.
    Fixed { n0: u32 },
}

impl TuningPolicy {
    pub fn n0_for(&self, delta: f64, geom: &ShellGeometry) -> Result<u32> {
        match *self {
            TuningPolicy::Retune => Ok(choose_n0(delta, geom)?.max(2)),
            TuningPolicy::Fixed { n0 } => Ok(n0),
        }
    }
}

/// Synthetic source used in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub r_s: f64,
    pub kappa: f64,
    pub profile: SourceProfile,
}

/// Knobs of [`classify_calr`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    /// Relative distance to `r*` treated as on the critical sphere.
    pub boundary_tol: f64,
    /// Growth factor `E(δ_min)/E(δ_max)` required for a resonant verdict.
    pub growth_threshold: f64,
    /// Minimum decades spanned by the loss grid.
    pub min_decades: f64,
    /// Minimum truncation degree; the sweep uses `max(n0 + 20, n_min)`.
    pub n_min: u32,
    /// Recompute each point with twice the degrees and record the change.
    pub audit: bool,
    pub quadrature: Option<EnergyQuadrature>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { boundary_tol: 1e-9, growth_threshold: 1e3, min_decades: 4.0, n_min: 40, audit: true, quadrature: None }
    }
}

/// All reports of a loss sweep and the resulting verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalrSweep {
    pub geometry: ShellGeometry,
    pub source_radius: f64,
    pub critical_radius: f64,
    pub reports: Vec<EnergyReport>,
    pub verdict: CalrVerdict,
    /// `E(δ_min) / E(δ_max)`.
    pub growth: f64,
    /// Max over min of the energy along the grid.
    pub energy_spread: f64,
    /// Max over min of the far-field sample along the grid.
    pub farfield_spread: f64,
}

/// Tail threshold on the per-degree energy, relative to the total.
const TAIL_TOL: f64 = 1e-14;
const N_CAP: u32 = 4000;

fn sweep_point(delta: f64, geom: &ShellGeometry, lame: &LameParams, policy: TuningPolicy, model: &SourceModel, opts: &SweepOptions) -> Result<EnergyReport> {
    let n0 = policy.n0_for(delta, geom)?;
    let cfg = PlasmonicConfig::resonant(n0, delta)?;
    let run = |n_max: u32, quad: Option<&EnergyQuadrature>| -> Result<(EnergyReport, f64)> {
        let src = synth_source(model.r_s, model.kappa, geom, lame, model.profile, n_max, 0.0)?;
        let sol = solve(&src, geom, &cfg, lame)?;
        let rep = energy(&sol, &src, geom, &cfg, lame, quad)?;
        let tail = modal_energies(&sol, &src, geom, lame, delta).last().map_or(0.0, |x| x.1);
        Ok((rep, tail))
    };
    let mut n_max = (n0 + 20).max(opts.n_min);
    let (mut rep, mut tail) = run(n_max, None)?;
    while tail >= TAIL_TOL * rep.energy_modal && n_max < N_CAP {
        n_max = (n_max + n_max / 2).min(N_CAP);
        (rep, tail) = run(n_max, None)?;
    }
    if opts.quadrature.is_some() {
        rep = run(n_max, opts.quadrature.as_ref())?.0;
    }
    if opts.audit {
        let (doubled, _) = run(2 * n_max, None)?;
        rep.truncation_audit = Some(rel_change(rep.energy_modal, doubled.energy_modal));
    }
    Ok(rep)
}

fn rel_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > 0.0 {
        hi / lo
    } else if hi == lo {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Runs the full pipeline along a loss grid and classifies the source.
pub fn classify_calr(
    geom: &ShellGeometry,
    lame: &LameParams,
    policy: TuningPolicy,
    model: &SourceModel,
    delta_grid: &[f64],
    opts: &SweepOptions,
) -> Result<CalrSweep> {
    if delta_grid.is_empty() {
        return Err(domain("empty loss grid"));
    }
    if delta_grid.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(domain("loss values must lie in (0, 1)"));
    }
    if delta_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain("loss grid must be strictly decreasing"));
    }
    let mut reports = delta_grid
        .par_iter()
        .map(|&d| sweep_point(d, geom, lame, policy, model, opts))
        .collect::<Result<Vec<_>>>()?;
    let first = reports.first().unwrap().energy_modal;
    let last = reports.last().unwrap().energy_modal;
    let growth = last / first;
    let decades = (delta_grid[0] / delta_grid[delta_grid.len() - 1]).log10();
    let r_star = geom.critical_radius();
    let verdict = if delta_grid.len() < 2 || decades < opts.min_decades {
        CalrVerdict::InsufficientGrid
    } else if (model.r_s - r_star).abs() <= opts.boundary_tol * r_star {
        CalrVerdict::Boundary
    } else if growth > opts.growth_threshold {
        CalrVerdict::Resonant
    } else {
        CalrVerdict::Bounded
    };
    for r in &mut reports {
        r.verdict = Some(verdict);
    }
    Ok(CalrSweep {
        geometry: *geom,
        source_radius: model.r_s,
        critical_radius: r_star,
        energy_spread: spread(reports.iter().map(|r| r.energy_modal)),
        farfield_spread: spread(reports.iter().map(|r| r.farfield_sample)),
        reports,
        verdict,
        growth,
    })
}

/// Range of `|D(n0)| / (δ² + ρ^{2 n0})` over a set of losses, with `n0`
/// retuned per loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenominatorBand {
    pub rho: f64,
    pub lower: f64,
    pub upper: f64,
}

impl DenominatorBand {
    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }
}

/// `count` losses spaced evenly in `log10` from `hi` down to `lo`.
pub fn log_grid(hi: f64, lo: f64, count: usize) -> Result<Vec<f64>> {
    if !(hi > lo && lo > 0.0 && count >= 2) {
        return Err(domain(format!("bad log grid {hi} .. {lo} with {count} points")));
    }
    let (a, b) = (hi.log10(), lo.log10());
    Ok((0..count).map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64)).collect())
}

/// Band of the normalised determinant for the geometry `r_i = ρ`, `r_e = 1`.
pub fn denominator_band(rho: f64, deltas: &[f64], lame: &LameParams) -> Result<DenominatorBand> {
    let geom = ShellGeometry::new(rho, 1.0)?;
    let (mut lower, mut upper) = (f64::INFINITY, 0.0f64);
    for &delta in deltas {
        let n0 = TuningPolicy::Retune.n0_for(delta, &geom)?;
        let cfg = PlasmonicConfig::resonant(n0, delta)?;
        let q = denominator(n0, &geom, &cfg, lame)?.norm() / (delta * delta + rho.powi(2 * n0 as i32));
        lower = lower.min(q);
        upper = upper.max(q);
    }
    Ok(DenominatorBand { rho, lower, upper })
}
