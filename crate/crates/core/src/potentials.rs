//! Closed-form actions of the layer potentials and of the N-P operator
//! `K*` on vector spherical harmonics.
//!
//! `K*` is diagonal in the `T`, `M`, `N` families with eigenvalues
//!
//! ```text
//! T_n:  3 / (4n + 2)
//! M_n:  (3λ - 2μ(2n² - 2n - 3)) / (2(λ + 2μ)(4n² - 1))
//! N_n:  (-3λ + 2μ(2n² + 2n - 3)) / (2(λ + 2μ)(4n² - 1))
//! ```
//!
//! where `N_n` is the mode built on `Y_{n-1}` (see [`crate::harmonics`]). The
//! same numbers are reachable without the eigenvalue formula through
//! [`np_apply_decomposed`], which writes `K*` as a combination of the elastic
//! single layer, the scalar single layer and a curl/gradient term, and
//! evaluates each piece per harmonic block.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::harmonics::{a_nm, eval_solid_mode, Family, ModeIndex, SolidPoint};
use crate::kelvin::LameParams;
use crate::{CVec3, RVec3};

type C64 = Complex64;

/// Amplitudes of a surface field in the vector spherical harmonic basis.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSpectrum(pub BTreeMap<ModeIndex, C64>);

impl CoefficientSpectrum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(idx: ModeIndex, amp: C64) -> Self {
        let mut s = Self::new();
        s.0.insert(idx, amp);
        s
    }

    pub fn insert(&mut self, idx: ModeIndex, amp: C64) -> Result<()> {
        idx.validate()?;
        self.0.insert(idx, amp);
        Ok(())
    }

    /// Adds `amp` to the amplitude of `idx`.
    pub fn accumulate(&mut self, idx: ModeIndex, amp: C64) {
        *self.0.entry(idx).or_insert(C64::new(0.0, 0.0)) += amp;
    }

    pub fn get(&self, idx: &ModeIndex) -> C64 {
        self.0.get(idx).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeIndex, &C64)> {
        self.0.iter()
    }

    /// Largest amplitude difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .keys()
            .chain(other.0.keys())
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Deviation from the symmetry `c(n, -m) = (-1)^m conj(c(n, m))` that the
    /// spectrum of a real field has when the Lamé parameters are real.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (idx, &c) in &self.0 {
            let mirror = ModeIndex { m: -idx.m, ..*idx };
            let sign = if idx.m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            worst = worst.max((self.get(&mirror) - c.conj() * sign).norm());
        }
        worst
    }
}

/// One eigenvalue of `K*` on a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NpEigenvalue {
    pub family: Family,
    pub n: u32,
    pub value: C64,
}

/// Eigenvalue of `K*` on the family and degree; independent of `m` and of the
/// sphere radius.
pub fn np_eigenvalue(family: Family, n: u32, lame: &LameParams) -> Result<NpEigenvalue> {
    if n < 1 {
        return Err(domain("eigenvalues are indexed from n = 1"));
    }
    let (la, mu) = (lame.lambda, lame.mu);
    let nf = n as f64;
    let den = (la + mu * 2.0) * (2.0 * (4.0 * nf * nf - 1.0));
    if den.norm() == 0.0 {
        return Err(Error::SingularParameter("λ + 2μ = 0".into()));
    }
    let value = match family {
        Family::T => C64::new(3.0 / (4.0 * nf + 2.0), 0.0),
        Family::M => (la * 3.0 - mu * (2.0 * (2.0 * nf * nf - 2.0 * nf - 3.0))) / den,
        Family::N => (-la * 3.0 + mu * (2.0 * (2.0 * nf * nf + 2.0 * nf - 3.0))) / den,
    };
    Ok(NpEigenvalue { family, n, value })
}

/// Accumulation point of the family's eigenvalues as `n → ∞`.
pub fn np_limit(family: Family, lame: &LameParams) -> C64 {
    let half = lame.mu / ((lame.lambda + lame.mu * 2.0) * 2.0);
    match family {
        Family::T => C64::new(0.0, 0.0),
        Family::M => -half,
        Family::N => half,
    }
}

/// Multiplier of the scalar single layer (applied componentwise) on a trace
/// mode placed on the sphere of radius `r0`.
pub fn scalar_sl_on_mode(idx: &ModeIndex, r0: f64) -> Result<f64> {
    idx.validate()?;
    positive_radius(r0)?;
    let n = idx.n as f64;
    Ok(match idx.family {
        Family::T => -r0 / (2.0 * n + 1.0),
        Family::M => -r0 / (2.0 * n - 1.0),
        Family::N => -r0 / (2.0 * n + 1.0),
    })
}

fn positive_radius(r0: f64) -> Result<()> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(domain(format!("sphere radius {r0} must be positive")));
    }
    Ok(())
}

/// `d₁ = -1/(μ(2n+1))`, the elastic single-layer multiplier of `T_n` on the
/// unit sphere.
pub fn d1(n: u32, lame: &LameParams) -> C64 {
    -(lame.mu * (2.0 * n as f64 + 1.0)).inv()
}

/// The elastic single layer of `T_n^m` on `|x| = r0`, split into its two
/// harmonic representations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerAction {
    pub mode: ModeIndex,
    pub r0: f64,
    /// Inside: `interior_coeff · 𝒯_n^m(x)`.
    pub interior_coeff: C64,
    /// Outside: `exterior_coeff · |x|^{-(2n+1)} 𝒯_n^m(x)`, which is
    /// `exterior_coeff · ∇(r^{-(n+1)} Y_n^m) × x` and decays like `|x|^{-(n+1)}`.
    pub exterior_coeff: C64,
    pub exterior_decay: u32,
}

impl LayerAction {
    pub fn interior(&self, lame: &LameParams, x: &RVec3) -> CVec3 {
        solid_t(&self.mode, lame, x) * self.interior_coeff
    }

    pub fn exterior(&self, lame: &LameParams, x: &RVec3) -> CVec3 {
        let r = x.norm();
        solid_t(&self.mode, lame, x) * (self.exterior_coeff * r.powi(-(2 * self.mode.n as i32 + 1)))
    }

    pub fn eval(&self, lame: &LameParams, x: &RVec3) -> CVec3 {
        if x.norm() <= self.r0 {
            self.interior(lame, x)
        } else {
            self.exterior(lame, x)
        }
    }
}

fn solid_t(idx: &ModeIndex, lame: &LameParams, x: &RVec3) -> CVec3 {
    eval_solid_mode(idx, lame, &SolidPoint::from(*x)).expect("validated T mode")
}

/// Closed form of the elastic single layer on a `T` density.
pub fn t_layer_action(n: u32, m: i32, r0: f64, lame: &LameParams) -> Result<LayerAction> {
    let mode = ModeIndex::t(n, m)?;
    positive_radius(r0)?;
    let d = d1(n, lame);
    Ok(LayerAction {
        mode,
        r0,
        interior_coeff: d * r0.powi(1 - n as i32),
        exterior_coeff: d * r0.powi(n as i32 + 2),
        exterior_decay: n + 1,
    })
}

/// `S_{B_r0}[T_n^m](x)`.
pub fn elastic_sl_on_t(n: u32, m: i32, r0: f64, lame: &LameParams, x: &SolidPoint) -> Result<CVec3> {
    Ok(t_layer_action(n, m, r0, lame)?.eval(lame, &x.x))
}

/// Coefficient `c` with `S[M_n^m] = c ℳ_n^m` inside the unit sphere.
pub fn elastic_sl_on_m(n: u32, lame: &LameParams) -> Result<C64> {
    if n < 1 {
        return Err(domain("M modes start at n = 1"));
    }
    let (la, mu) = (lame.lambda, lame.mu);
    let nf = n as f64;
    let inner = C64::new(0.5 + 3.0 / (2.0 * (2.0 * nf - 1.0)), 0.0)
        + mu * nf / ((mu * 2.0 + la) * (2.0 * nf - 1.0));
    Ok(-inner / (mu * (2.0 * nf + 1.0)))
}

/// Coefficient `c` with `S[N_k^m] = c 𝒩_k^m` inside the unit sphere, where
/// `k` is the mode's own subscript (the density is built on `Y_{k-1}`).
pub fn elastic_sl_on_n(k: u32, lame: &LameParams) -> Result<C64> {
    if k < 1 {
        return Err(domain("N modes start at k = 1"));
    }
    let (la, mu) = (lame.lambda, lame.mu);
    let n = (k - 1) as f64;
    let cmu = -(la * n + mu * (3.0 * n + 1.0)) / ((mu * 2.0 + la) * ((2.0 * n + 3.0) * (2.0 * n + 1.0)));
    Ok(cmu / mu)
}

/// Multiplier of the elastic single layer on a trace mode of the sphere of
/// radius `r0`, as seen on that sphere.
pub fn elastic_sl_multiplier(idx: &ModeIndex, r0: f64, lame: &LameParams) -> Result<C64> {
    idx.validate()?;
    positive_radius(r0)?;
    let c = match idx.family {
        Family::T => d1(idx.n, lame),
        Family::M => elastic_sl_on_m(idx.n, lame)?,
        Family::N => elastic_sl_on_n(idx.n, lame)?,
    };
    Ok(c * r0)
}

/// Interior value of `S_{B_r0}[V](x)` for a trace mode `V`, using
/// `S_{B_r0}[φ](x) = r0 S_{B_1}[φ](x/r0)`.
pub fn elastic_sl_interior(idx: &ModeIndex, r0: f64, lame: &LameParams, x: &SolidPoint) -> Result<CVec3> {
    let c = elastic_sl_multiplier(idx, 1.0, lame)?;
    positive_radius(r0)?;
    let v = eval_solid_mode(idx, lame, &SolidPoint::from(x.x / r0))?;
    Ok(v * (c * r0))
}

/// `K*` applied through its eigenvalues.
pub fn np_apply(spec: &CoefficientSpectrum, lame: &LameParams) -> Result<CoefficientSpectrum> {
    let mut out = CoefficientSpectrum::new();
    for (idx, &amp) in spec.iter() {
        let xi = np_eigenvalue(idx.family, idx.n, lame)?.value;
        out.0.insert(*idx, amp * xi);
    }
    Ok(out)
}

/// A vector field on the unit sphere restricted to one `(l, m)` harmonic
/// block, written as `c ∇_S Y × ν + b ∇_S Y + p Y ν`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Block {
    c: C64,
    b: C64,
    p: C64,
}

impl Block {
    fn scale(self, s: C64) -> Self {
        Block { c: self.c * s, b: self.b * s, p: self.p * s }
    }

    fn add(self, o: Self) -> Self {
        Block { c: self.c + o.c, b: self.b + o.b, p: self.p + o.p }
    }

    /// Coordinates of the `(b, p)` part in the pair
    /// `M' = ∇_S Y + l Y ν`, `N' = -∇_S Y + (l+1) Y ν`.
    fn split(&self, l: u32) -> (C64, C64) {
        let lf = l as f64;
        let s = 2.0 * lf + 1.0;
        ((self.b * (lf + 1.0) + self.p) / s, (self.p - self.b * lf) / s)
    }

    fn from_split(l: u32, alpha: C64, beta: C64) -> Self {
        let lf = l as f64;
        Block { c: C64::new(0.0, 0.0), b: alpha - beta, p: alpha * lf + beta * (lf + 1.0) }
    }
}

/// Block representation of a trace mode and the harmonic degree it lives on.
fn mode_block(idx: &ModeIndex, lame: &LameParams) -> Result<(u32, Block)> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    Ok(match idx.family {
        Family::T => (idx.n, Block { c: one, b: zero, p: zero }),
        Family::M => (idx.n, Block { c: zero, b: one, p: C64::new(idx.n as f64, 0.0) }),
        Family::N => {
            let k = idx.n;
            let s = a_nm(k, lame)? / (2.0 * k as f64 - 1.0);
            (k - 1, Block { c: zero, b: -s, p: s * k as f64 })
        }
    })
}

/// Scalar single layer on a block of the unit sphere.
fn scalar_sl_block(l: u32, v: Block) -> Block {
    let lf = l as f64;
    let (alpha, beta) = v.split(l);
    let alpha = if l == 0 { C64::new(0.0, 0.0) } else { alpha };
    let c = v.c * (-1.0 / (2.0 * lf + 1.0));
    Block::from_split(l, alpha * (-1.0 / (2.0 * lf - 1.0)), beta * (-1.0 / (2.0 * lf + 3.0)))
        .add(Block { c, ..Default::default() })
}

/// Elastic single layer on a block of the unit sphere.
fn elastic_sl_block(l: u32, v: Block, lame: &LameParams) -> Result<Block> {
    let (alpha, beta) = v.split(l);
    let c = if l == 0 { C64::new(0.0, 0.0) } else { v.c * d1(l, lame) };
    let alpha = if l == 0 { C64::new(0.0, 0.0) } else { alpha * elastic_sl_on_m(l, lame)? };
    let beta = beta * elastic_sl_on_n(l + 1, lame)?;
    Ok(Block::from_split(l, alpha, beta).add(Block { c, ..Default::default() }))
}

/// Boundary value of `∇×𝒮[ν×φ] - ∇𝒮[ν·φ]` on the unit sphere, principal value.
fn curl_grad_block(l: u32, v: Block) -> Block {
    let lf = l as f64;
    let s = 2.0 * lf + 1.0;
    Block {
        c: -v.c / (2.0 * s),
        b: v.b / (2.0 * s) + v.p / s,
        p: v.b * (lf * (lf + 1.0) / s) - v.p / (2.0 * s),
    }
}

/// `K*` on a sphere of radius `r0`, assembled as
/// `-(3μ/r0) S + (3/2 + b₁/2)(1/r0) 𝒮 - b₁ (∇×𝒮[ν×·] - ∇𝒮[ν·])`
/// from the closed-form actions of each piece. Must agree with [`np_apply`].
pub fn np_apply_decomposed(spec: &CoefficientSpectrum, lame: &LameParams, r0: f64) -> Result<CoefficientSpectrum> {
    positive_radius(r0)?;
    let b1 = lame.coeffs().b1;
    let mut out = CoefficientSpectrum::new();
    for (idx, &amp) in spec.iter() {
        idx.validate()?;
        let (l, v) = mode_block(idx, lame)?;
        let v = v.scale(amp);
        // On the sphere of radius r0 both single layers pick up a factor r0
        // and the curl/gradient term is scale invariant.
        let s_el = elastic_sl_block(l, v, lame)?.scale(C64::new(r0, 0.0));
        let s_sc = scalar_sl_block(l, v).scale(C64::new(r0, 0.0));
        let cg = curl_grad_block(l, v);
        let k = s_el
            .scale(-lame.mu * 3.0 / r0)
            .add(s_sc.scale((b1 * 0.5 + 1.5) / r0))
            .add(cg.scale(-b1));
        for (mode, a) in block_to_modes(l, idx.m, k, lame)? {
            out.accumulate(mode, a);
        }
    }
    out.0.retain(|_, v| v.norm() != 0.0);
    Ok(out)
}

fn block_to_modes(l: u32, m: i32, v: Block, lame: &LameParams) -> Result<Vec<(ModeIndex, C64)>> {
    let mut out = Vec::new();
    let (alpha, beta) = v.split(l);
    if l >= 1 {
        out.push((ModeIndex::t(l, m)?, v.c));
        out.push((ModeIndex::m(l, m)?, alpha));
    }
    let k = l + 1;
    let s = a_nm(k, lame)? / (2.0 * k as f64 - 1.0);
    if s.norm() == 0.0 {
        return Err(Error::SingularParameter(format!("a_n vanishes at n = {k}")));
    }
    out.push((ModeIndex::n(k, m)?, beta / s));
    Ok(out)
}
