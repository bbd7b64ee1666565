//! Scalar spherical harmonics and the vector spherical harmonic families.
//!
//! Convention: `Y_n^m` are the fully orthonormal complex harmonics on the unit
//! sphere with the Condon-Shortley phase,
//!
//! ```text
//! Y_n^m(θ, φ) = (-1)^m sqrt((2n+1)/(4π) (n-m)!/(n+m)!) P_n^m(cos θ) e^{imφ},   m ≥ 0
//! Y_n^{-m}    = (-1)^m conj(Y_n^m)
//! ```
//!
//! where `P_n^m` carries no Condon-Shortley factor. The solid harmonics
//! `R_n^m(x) = |x|^n Y_n^m(x̂)` are homogeneous harmonic polynomials; their
//! gradients are evaluated with the ladder identities, which keeps surface
//! gradients regular at the poles.
//!
//! The three vector families are
//!
//! ```text
//! 𝒯_n^m = ∇R_n^m × x
//! ℳ_n^m = ∇R_n^m
//! 𝒩_n^m = a_n R_{n-1}^m x + (1 - a_n/(2n-1) - r²) ∇R_{n-1}^m
//! ```
//!
//! with traces on the unit sphere `T = ∇_S Y_n × ν`, `M = ∇_S Y_n + n Y_n ν`
//! and `N = a_n/(2n-1) (-∇_S Y_{n-1} + n Y_{n-1} ν)`. An `N` mode is addressed
//! by its own subscript, so `N_n^m` is built on `Y_{n-1}^m`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::kelvin::LameParams;
use crate::oracle::quadrature::{CompensatedSum, QuadratureRule};
use crate::{complexify, cross_cr, CVec3, RVec3};

/// One of the three vector spherical harmonic families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    T,
    M,
    N,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::T, Family::M, Family::N];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::T => "T",
            Family::M => "M",
            Family::N => "N",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "T" | "t" => Ok(Family::T),
            "M" | "m" => Ok(Family::M),
            "N" | "n" => Ok(Family::N),
            other => Err(domain(format!("unknown family `{other}`"))),
        }
    }
}

/// Address of a single vector spherical harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub family: Family,
    pub n: u32,
    pub m: i32,
}

impl ModeIndex {
    pub fn new(family: Family, n: u32, m: i32) -> Result<Self> {
        let idx = ModeIndex { family, n, m };
        idx.validate()?;
        Ok(idx)
    }

    pub fn t(n: u32, m: i32) -> Result<Self> {
        Self::new(Family::T, n, m)
    }

    pub fn m(n: u32, m: i32) -> Result<Self> {
        Self::new(Family::M, n, m)
    }

    pub fn n(n: u32, m: i32) -> Result<Self> {
        Self::new(Family::N, n, m)
    }

    /// Degree of the scalar harmonic the mode is built on.
    pub fn harmonic_degree(&self) -> u32 {
        match self.family {
            Family::T | Family::M => self.n,
            Family::N => self.n - 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(domain(format!("mode {self}: degree must be at least 1")));
        }
        let l = self.harmonic_degree() as i64;
        if (self.m as i64).abs() > l {
            return Err(domain(format!("mode {self}: order out of range |m| <= {l}")));
        }
        Ok(())
    }

    /// Every valid mode of the given family with degree in `1..=n_max`.
    pub fn family_modes(family: Family, n_max: u32) -> Vec<ModeIndex> {
        let mut out = Vec::new();
        for n in 1..=n_max {
            let l = match family {
                Family::T | Family::M => n as i32,
                Family::N => n as i32 - 1,
            };
            for m in -l..=l {
                out.push(ModeIndex { family, n, m });
            }
        }
        out
    }

    /// All modes of all families up to `n_max`, ordered by family, degree, order.
    pub fn all_modes(n_max: u32) -> Vec<ModeIndex> {
        Family::ALL
            .iter()
            .flat_map(|&f| Self::family_modes(f, n_max))
            .collect()
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.family, self.n, self.m)
    }
}

/// A point on an origin-centred sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    /// Colatitude in `[0, π]`.
    pub theta: f64,
    /// Azimuth in `[0, 2π)`.
    pub phi: f64,
    pub radius: f64,
}

impl SurfacePoint {
    pub fn new(theta: f64, phi: f64, radius: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(domain(format!("colatitude {theta} outside [0, π]")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(domain(format!("sphere radius {radius} must be positive")));
        }
        Ok(SurfacePoint { theta, phi: phi.rem_euclid(2.0 * PI), radius })
    }

    /// A point on the unit sphere.
    pub fn unit(theta: f64, phi: f64) -> Self {
        SurfacePoint { theta, phi: phi.rem_euclid(2.0 * PI), radius: 1.0 }
    }

    pub fn from_cartesian(x: &RVec3) -> Result<Self> {
        let r = x.norm();
        if !(r > 0.0 && r.is_finite()) {
            return Err(domain("surface point must be a nonzero finite vector"));
        }
        let (theta, phi) = angles(&(x / r));
        Ok(SurfacePoint { theta, phi, radius: r })
    }

    /// Outward unit normal, equal to the radial direction.
    pub fn normal(&self) -> RVec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        RVec3::new(st * cp, st * sp, ct)
    }

    pub fn position(&self) -> RVec3 {
        self.normal() * self.radius
    }
}

/// A point in space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolidPoint {
    pub x: RVec3,
}

impl SolidPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        SolidPoint { x: RVec3::new(x, y, z) }
    }

    pub fn radius(&self) -> f64 {
        self.x.norm()
    }
}

impl From<RVec3> for SolidPoint {
    fn from(x: RVec3) -> Self {
        SolidPoint { x }
    }
}

/// Colatitude and azimuth of a unit vector.
pub fn angles(u: &RVec3) -> (f64, f64) {
    let theta = (u.x * u.x + u.y * u.y).sqrt().atan2(u.z);
    let phi = u.y.atan2(u.x).rem_euclid(2.0 * PI);
    (theta, phi)
}

fn check_order(n: u32, m: i32) -> Result<()> {
    if (m as i64).abs() > n as i64 {
        return Err(domain(format!("|m| = {} exceeds degree {n}", m.abs())));
    }
    Ok(())
}

/// Normalized associated Legendre values `P̄_l^m(cos θ)` for `l = m..=l_max`,
/// including the Condon-Shortley phase, so that `Y_l^m = P̄_l^m e^{imφ}`.
///
/// Upward recurrence in `l` at fixed `m` with prenormalized coefficients.
pub fn normalized_legendre(l_max: u32, m: u32, cos_t: f64, sin_t: f64) -> Vec<f64> {
    if m > l_max {
        return Vec::new();
    }
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for k in 1..=m {
        let k = k as f64;
        pmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * sin_t;
    }
    let mut out = Vec::with_capacity((l_max - m + 1) as usize);
    out.push(pmm);
    if l_max == m {
        return out;
    }
    let mf = m as f64;
    let mut prev2 = pmm;
    let mut prev1 = (2.0 * mf + 3.0).sqrt() * cos_t * pmm;
    out.push(prev1);
    let mut a_prev = (2.0 * mf + 3.0).sqrt();
    for l in (m + 2)..=l_max {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let p = a * (cos_t * prev1 - prev2 / a_prev);
        out.push(p);
        prev2 = prev1;
        prev1 = p;
        a_prev = a;
    }
    out
}

fn ylm_unit(n: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    if (m.unsigned_abs()) > n {
        return Complex64::new(0.0, 0.0);
    }
    let ma = m.unsigned_abs();
    let (st, ct) = theta.sin_cos();
    let p = *normalized_legendre(n, ma, ct, st).last().unwrap();
    let y = Complex64::from_polar(p, ma as f64 * phi);
    if m >= 0 {
        y
    } else if ma % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}

/// Orthonormal complex spherical harmonic `Y_n^m` at the direction of `p`.
pub fn eval_ynm(n: u32, m: i32, p: &SurfacePoint) -> Result<Complex64> {
    check_order(n, m)?;
    Ok(ylm_unit(n, m, p.theta, p.phi))
}

/// `Y_n^m(x̂)` for a unit direction; zero when `|m| > n`.
pub(crate) fn ylm_dir(n: u32, m: i32, u: &RVec3) -> Complex64 {
    let (theta, phi) = angles(u);
    ylm_unit(n, m, theta, phi)
}

/// Regular solid harmonic `R_n^m(x) = |x|^n Y_n^m(x̂)`; zero when `|m| > n`.
pub fn solid_harmonic(n: u32, m: i32, x: &RVec3) -> Complex64 {
    if m.unsigned_abs() > n {
        return Complex64::new(0.0, 0.0);
    }
    let r = x.norm();
    if r == 0.0 {
        return if n == 0 {
            Complex64::new(1.0 / (4.0 * PI).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    ylm_dir(n, m, &(x / r)) * r.powi(n as i32)
}

/// Gradient of the solid harmonic `R_n^m` by the ladder identities
/// `∂_z R_n^m ∝ R_{n-1}^m`, `(∂_x ± i∂_y) R_n^m ∝ R_{n-1}^{m±1}`.
pub fn solid_harmonic_gradient(n: u32, m: i32, x: &RVec3) -> CVec3 {
    let zero = Complex64::new(0.0, 0.0);
    if n == 0 || m.unsigned_abs() > n {
        return CVec3::new(zero, zero, zero);
    }
    let l = n as f64;
    let mf = m as f64;
    let c = (2.0 * l + 1.0) / (2.0 * l - 1.0);
    let plus = (c * (l - mf) * (l - mf - 1.0)).max(0.0).sqrt() * solid_harmonic(n - 1, m + 1, x);
    let minus = -(c * (l + mf) * (l + mf - 1.0)).max(0.0).sqrt() * solid_harmonic(n - 1, m - 1, x);
    let dz = (c * (l - mf) * (l + mf)).max(0.0).sqrt() * solid_harmonic(n - 1, m, x);
    let i = Complex64::new(0.0, 1.0);
    let dx = (plus + minus) * 0.5;
    let dy = -(plus - minus) * i * 0.5;
    CVec3::new(dx, dy, dz)
}

/// Surface gradient `∇_S Y_n^m` on the unit sphere at direction `u`.
pub(crate) fn surface_gradient_dir(n: u32, m: i32, u: &RVec3) -> CVec3 {
    if n == 0 || m.unsigned_abs() > n {
        return CVec3::zeros();
    }
    let grad = solid_harmonic_gradient(n, m, u);
    grad - complexify(u) * (ylm_dir(n, m, u) * n as f64)
}

/// Surface gradient `∇_S Y_n^m` on the unit sphere, evaluated at the
/// direction of `p`. Tangential to machine precision.
pub fn surface_gradient_ynm(n: u32, m: i32, p: &SurfacePoint) -> Result<CVec3> {
    check_order(n, m)?;
    Ok(surface_gradient_dir(n, m, &p.normal()))
}

/// The coefficient `a_n` of the `N` family. Depends on `n` only.
pub fn a_nm(n: u32, lame: &LameParams) -> Result<Complex64> {
    if n < 1 {
        return Err(domain("a_n requires n >= 1"));
    }
    let nf = n as f64;
    let (la, mu) = (lame.lambda, lame.mu);
    let num = la * (2.0 * (nf - 1.0)) + mu * (2.0 * (3.0 * nf - 2.0));
    let den = la * (nf + 2.0) + mu * (nf + 4.0);
    if den.norm() < 1e-300 {
        return Err(crate::Error::SingularParameter(format!(
            "a_n denominator (n+2)λ + (n+4)μ vanishes at n = {n}"
        )));
    }
    Ok(num / den)
}

/// Value of the solid vector polynomial at `x`.
pub fn eval_solid_mode(idx: &ModeIndex, lame: &LameParams, x: &SolidPoint) -> Result<CVec3> {
    idx.validate()?;
    let (n, m) = (idx.n, idx.m);
    Ok(match idx.family {
        Family::T => cross_cr(&solid_harmonic_gradient(n, m, &x.x), &x.x),
        Family::M => solid_harmonic_gradient(n, m, &x.x),
        Family::N => {
            let a = a_nm(n, lame)?;
            let r2 = x.x.norm_squared();
            let radial = complexify(&x.x) * (a * solid_harmonic(n - 1, m, &x.x));
            let shape = Complex64::new(1.0 - r2, 0.0) - a / (2.0 * n as f64 - 1.0);
            radial + solid_harmonic_gradient(n - 1, m, &x.x) * shape
        }
    })
}

/// Trace mode on the unit sphere at direction `u`; `a` is `a_n` for N modes.
pub(crate) fn trace_mode_dir(idx: &ModeIndex, a: Complex64, u: &RVec3) -> CVec3 {
    let (n, m) = (idx.n, idx.m);
    match idx.family {
        Family::T => cross_cr(&surface_gradient_dir(n, m, u), u),
        Family::M => surface_gradient_dir(n, m, u) + complexify(u) * (ylm_dir(n, m, u) * n as f64),
        Family::N => {
            let l = n - 1;
            let v = -surface_gradient_dir(l, m, u) + complexify(u) * (ylm_dir(l, m, u) * n as f64);
            v * (a / (2.0 * n as f64 - 1.0))
        }
    }
}

/// Coefficient needed by [`trace_mode_dir`] for the given mode.
pub(crate) fn mode_coefficient(idx: &ModeIndex, lame: &LameParams) -> Result<Complex64> {
    match idx.family {
        Family::N => a_nm(idx.n, lame),
        _ => Ok(Complex64::new(1.0, 0.0)),
    }
}

/// Trace `T_n^m`, `M_n^m` or `N_n^m` on the unit sphere at the direction of `p`.
pub fn eval_trace_mode(idx: &ModeIndex, lame: &LameParams, p: &SurfacePoint) -> Result<CVec3> {
    idx.validate()?;
    let a = mode_coefficient(idx, lame)?;
    Ok(trace_mode_dir(idx, a, &p.normal()))
}

/// Gram matrix of the trace modes over the unit sphere.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub modes: Vec<ModeIndex>,
    entries: Vec<Complex64>,
    /// Set when the rule cannot integrate the mode products exactly.
    pub under_resolved: bool,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.modes.len() + j]
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    worst = worst.max(self.get(i, j).norm());
                }
            }
        }
        worst
    }

    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// `G_ij = ∮ V_i · conj(V_j)` over all trace modes with degree `<= n_max`.
pub fn gram_matrix(n_max: u32, lame: &LameParams, quad: &QuadratureRule) -> Result<GramMatrix> {
    let modes = ModeIndex::all_modes(n_max);
    let coeffs = modes
        .iter()
        .map(|idx| mode_coefficient(idx, lame))
        .collect::<Result<Vec<_>>>()?;
    let nodes = quad.nodes();
    let values: Vec<Vec<CVec3>> = modes
        .iter()
        .zip(&coeffs)
        .map(|(idx, &a)| nodes.iter().map(|(u, _)| trace_mode_dir(idx, a, u)).collect())
        .collect();
    let d = modes.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in i..d {
            let mut acc = CompensatedSum::default();
            for (k, (_, w)) in nodes.iter().enumerate() {
                acc.add(values[i][k].dotc(&values[j][k]).conj() * *w);
            }
            let g = acc.total();
            entries[i * d + j] = g;
            entries[j * d + i] = g.conj();
        }
    }
    let under_resolved = quad.exact_degree().map_or(true, |deg| deg < 2 * n_max as usize);
    Ok(GramMatrix { modes, entries, under_resolved })
}
