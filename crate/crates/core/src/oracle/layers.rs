//! Brute-force layer potentials and N-P operator on a sphere.
//!
//! Every integral is taken with a product rule whose pole is rotated onto the
//! target point. In polar coordinates around the target the surface element
//! `sin θ dθ dφ` absorbs the `1/|x - y|` singularity of `Γ` and `G`. The
//! traction kernel also carries a `1/|x - y|²` part, but its leading term is
//! odd in the azimuth and cancels exactly under the equispaced azimuthal rule;
//! that cancellation is the principal value.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::harmonics::{mode_coefficient, trace_mode_dir, ModeIndex, SurfacePoint};
use crate::kelvin::{gamma_laplace, kelvin_matrix, traction_kernel, LameParams};
use crate::oracle::quadrature::{CompensatedSum, PolarMapping, QuadratureRule};
use crate::potentials::CoefficientSpectrum;
use crate::{CMat3, CVec3, RVec3};

fn require_singular(rule: &QuadratureRule) -> Result<()> {
    if rule.mapping != PolarMapping::Colatitude {
        return Err(domain("singular integrals need a colatitude-mapped rule"));
    }
    Ok(())
}

fn integrate_kernel<K>(idx: &ModeIndex, lame: &LameParams, x: &SurfacePoint, rule: &QuadratureRule, kernel: K) -> Result<CVec3>
where
    K: Fn(&RVec3, &RVec3) -> Result<CMat3>,
{
    require_singular(rule)?;
    idx.validate()?;
    let a = mode_coefficient(idx, lame)?;
    let r0 = x.radius;
    let xp = x.position();
    let local = rule.rotated_to(&xp);
    let mut acc = [CompensatedSum::<Complex64>::default(); 3];
    for (u, w) in local.nodes() {
        let y = u * r0;
        let k = kernel(&xp, &y)?;
        let v = k * trace_mode_dir(idx, a, &u) * Complex64::new(w * r0 * r0, 0.0);
        for i in 0..3 {
            acc[i].add(v[i]);
        }
    }
    Ok(CVec3::new(acc[0].total(), acc[1].total(), acc[2].total()))
}

/// `𝒮[V](x) = ∫ Γ(x - y) V(ŷ) dS_y` over the sphere through `x`, with `V`
/// the trace mode `idx` and `Γ` applied componentwise.
pub fn quad_scalar_sl(idx: &ModeIndex, lame: &LameParams, x: &SurfacePoint, rule: &QuadratureRule) -> Result<CVec3> {
    integrate_kernel(idx, lame, x, rule, |x, y| {
        Ok(CMat3::identity() * Complex64::new(gamma_laplace(&(x - y))?, 0.0))
    })
}

/// Elastic single layer `∫ G(x - y) V(ŷ) dS_y` over the sphere through `x`.
pub fn quad_elastic_sl(idx: &ModeIndex, lame: &LameParams, x: &SurfacePoint, rule: &QuadratureRule) -> Result<CVec3> {
    integrate_kernel(idx, lame, x, rule, |x, y| kelvin_matrix(&(x - y), lame))
}

/// `K*[V](x) = p.v. ∫ ∂_{ν_x} G(x - y) V(ŷ) dS_y` on the sphere through `x`.
pub fn quad_np_at(idx: &ModeIndex, lame: &LameParams, x: &SurfacePoint, rule: &QuadratureRule) -> Result<CVec3> {
    integrate_kernel(idx, lame, x, rule, |x, y| traction_kernel(x, y, lame))
}

/// Fixed target directions used to fit multipliers; none at a pole.
pub fn sample_directions(count: usize) -> Vec<RVec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let s = (1.0 - z * z).sqrt();
            let phi = golden * k as f64 + 0.3;
            RVec3::new(s * phi.cos(), s * phi.sin(), z)
        })
        .collect()
}

/// Least-squares multiplier `ξ` with `Q ≈ ξ V` over sample points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplierFit {
    pub estimate: Complex64,
    /// `max |Q - ξ V| / max |V|` over the samples.
    pub residual: f64,
}

fn fit(pairs: &[(CVec3, CVec3)]) -> MultiplierFit {
    let mut num = CompensatedSum::<Complex64>::default();
    let mut den = CompensatedSum::<f64>::default();
    for (q, v) in pairs {
        num.add(v.dotc(q));
        den.add(v.norm_squared());
    }
    let estimate = num.total() / den.total();
    let vmax = pairs.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let rmax = pairs.iter().map(|(q, v)| (q - v * estimate).norm()).fold(0.0, f64::max);
    MultiplierFit { estimate, residual: rmax / vmax }
}

fn fit_operator<F>(idx: &ModeIndex, lame: &LameParams, r0: f64, targets: usize, apply: F) -> Result<MultiplierFit>
where
    F: Fn(&SurfacePoint) -> Result<CVec3>,
{
    let a = mode_coefficient(idx, lame)?;
    let mut pairs = Vec::with_capacity(targets);
    for u in sample_directions(targets) {
        let p = SurfacePoint::from_cartesian(&(u * r0))?;
        pairs.push((apply(&p)?, trace_mode_dir(idx, a, &u)));
    }
    Ok(fit(&pairs))
}

/// Multiplier of the scalar single layer on a trace mode of the sphere of
/// radius `r0`, estimated by quadrature.
pub fn quad_scalar_sl_multiplier(idx: &ModeIndex, lame: &LameParams, r0: f64, rule: &QuadratureRule) -> Result<MultiplierFit> {
    fit_operator(idx, lame, r0, 12, |p| quad_scalar_sl(idx, lame, p, rule))
}

/// Multiplier of the elastic single layer on a trace mode, by quadrature.
pub fn quad_elastic_sl_multiplier(idx: &ModeIndex, lame: &LameParams, r0: f64, rule: &QuadratureRule) -> Result<MultiplierFit> {
    fit_operator(idx, lame, r0, 12, |p| quad_elastic_sl(idx, lame, p, rule))
}

/// Tolerance on the eigenfunction residual in [`quad_np_apply`].
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-6;

/// Eigenvalue estimate of `K*` on a trace mode of the unit sphere, obtained by
/// direct principal-value quadrature and projection onto the mode. Fails with
/// [`Error::NotEigenfunction`] when the image is not parallel to the mode.
pub fn quad_np_apply(idx: &ModeIndex, lame: &LameParams, rule: &QuadratureRule) -> Result<MultiplierFit> {
    quad_np_apply_on(idx, lame, 1.0, rule)
}

/// As [`quad_np_apply`] on the sphere of radius `r0`.
pub fn quad_np_apply_on(idx: &ModeIndex, lame: &LameParams, r0: f64, rule: &QuadratureRule) -> Result<MultiplierFit> {
    let f = fit_operator(idx, lame, r0, 12, |p| quad_np_at(idx, lame, p, rule))?;
    if !(f.residual <= EIGEN_RESIDUAL_TOL) {
        return Err(Error::NotEigenfunction { residual: f.residual, tolerance: EIGEN_RESIDUAL_TOL });
    }
    Ok(f)
}

/// Coefficients of a surface field in the trace-mode basis up to `n_max`,
/// by quadrature against each mode.
pub fn project_field<F>(f: F, lame: &LameParams, n_max: u32, rule: &QuadratureRule) -> Result<CoefficientSpectrum>
where
    F: Fn(&RVec3) -> CVec3,
{
    let nodes = rule.nodes();
    let values: Vec<CVec3> = nodes.iter().map(|(u, _)| f(u)).collect();
    let mut out = CoefficientSpectrum::new();
    for idx in ModeIndex::all_modes(n_max) {
        let a = mode_coefficient(&idx, lame)?;
        let mut num = CompensatedSum::<Complex64>::default();
        let mut den = CompensatedSum::<f64>::default();
        for ((u, w), fv) in nodes.iter().zip(&values) {
            let v = trace_mode_dir(&idx, a, u);
            num.add(v.dotc(fv) * *w);
            den.add(v.norm_squared() * w);
        }
        out.0.insert(idx, num.total() / den.total());
    }
    Ok(out)
}
