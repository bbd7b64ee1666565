//! Lamé parameters, fundamental solutions and the traction kernel.
//!
//! Sign conventions: `Γ(x) = -1/(4π|x|)` and
//! `G(x) = -(α₁/4π) I/|x| - (α₂/4π) x xᵗ/|x|³`, so that `ℒ_{λ,μ} G = δ₀ I`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::{CMat3, RVec3};

/// Isotropic Lamé moduli. Both may be complex (lossy plasmonic shell).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LameParams {
    pub lambda: Complex64,
    pub mu: Complex64,
}

impl LameParams {
    /// A regular material: real moduli with `μ > 0` and `3λ + 2μ > 0`.
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda.is_finite() && mu.is_finite()) {
            return Err(domain("Lamé parameters must be finite"));
        }
        if !(mu > 0.0 && 3.0 * lambda + 2.0 * mu > 0.0) {
            return Err(domain(format!(
                "(λ, μ) = ({lambda}, {mu}) violates strong convexity: need μ > 0 and 3λ + 2μ > 0"
            )));
        }
        Ok(LameParams { lambda: lambda.into(), mu: mu.into() })
    }

    /// Arbitrary complex moduli; only `2μ + λ ≠ 0` and `μ ≠ 0` are required.
    pub fn complex(lambda: Complex64, mu: Complex64) -> Result<Self> {
        let p = LameParams { lambda, mu };
        if !(lambda.is_finite() && mu.is_finite()) {
            return Err(domain("Lamé parameters must be finite"));
        }
        if mu.norm() == 0.0 {
            return Err(Error::SingularParameter("μ = 0".into()));
        }
        if p.p_wave().norm() == 0.0 {
            return Err(Error::SingularParameter("2μ + λ = 0".into()));
        }
        Ok(p)
    }

    /// Both moduli multiplied by `s` (for example the core scaling `c` or the
    /// shell factor `ε + iδ`).
    pub fn scaled(&self, s: Complex64) -> Result<Self> {
        Self::complex(self.lambda * s, self.mu * s)
    }

    /// `2μ + λ`.
    pub fn p_wave(&self) -> Complex64 {
        self.mu * 2.0 + self.lambda
    }

    pub fn is_real(&self) -> bool {
        self.lambda.im == 0.0 && self.mu.im == 0.0
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.is_real() && self.mu.re > 0.0 && 3.0 * self.lambda.re + 2.0 * self.mu.re > 0.0
    }

    /// The shared imaginary part `δ` when `Im λ = Im μ`.
    pub fn common_loss(&self) -> Option<f64> {
        (self.lambda.im == self.mu.im).then_some(self.mu.im)
    }

    pub fn coeffs(&self) -> KernelCoeffs {
        KernelCoeffs::new(self)
    }
}

/// Constants of the Kelvin matrix and of the traction kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCoeffs {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
}

impl KernelCoeffs {
    pub fn new(lame: &LameParams) -> Self {
        let inv_mu = lame.mu.inv();
        let inv_p = lame.p_wave().inv();
        KernelCoeffs {
            alpha1: (inv_mu + inv_p) * 0.5,
            alpha2: (inv_mu - inv_p) * 0.5,
            b1: lame.mu * inv_p,
            b2: (lame.mu + lame.lambda) * 3.0 * inv_p,
        }
    }
}

fn nonzero(x: &RVec3, what: &str) -> Result<f64> {
    let r = x.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Singularity(format!("{what} evaluated at the singular point")));
    }
    Ok(r)
}

/// Laplace fundamental solution `-1/(4π|x|)`.
pub fn gamma_laplace(x: &RVec3) -> Result<f64> {
    let r = nonzero(x, "Γ")?;
    Ok(-1.0 / (4.0 * PI * r))
}

/// Kelvin matrix `G(x)`.
pub fn kelvin_matrix(x: &RVec3, lame: &LameParams) -> Result<CMat3> {
    let r = nonzero(x, "Kelvin matrix")?;
    let k = lame.coeffs();
    let xr = x.map(|c| Complex64::new(c, 0.0));
    let iso = CMat3::identity() * (-k.alpha1 / (4.0 * PI * r));
    let aniso = (xr * xr.transpose()) * (-k.alpha2 / (4.0 * PI * r.powi(3)));
    Ok(iso + aniso)
}

/// `K₁(x, y) = (ν dᵗ - d νᵗ) / (4π|d|³)` with `d = x - y`.
pub fn kernel_k1(d: &RVec3, nu: &RVec3) -> nalgebra::Matrix3<f64> {
    let r3 = d.norm().powi(3);
    (nu * d.transpose() - d * nu.transpose()) / (4.0 * PI * r3)
}

/// `K₂(x, y) = b₁ (d·ν)/(4π|d|³) I + b₂ (d·ν) d dᵗ/(4π|d|⁵)`.
pub fn kernel_k2(d: &RVec3, nu: &RVec3, k: &KernelCoeffs) -> CMat3 {
    let r = d.norm();
    let dn = d.dot(nu);
    let iso = CMat3::identity() * (k.b1 * (dn / (4.0 * PI * r.powi(3))));
    let ddt = (d * d.transpose()).map(|c| Complex64::new(c, 0.0));
    iso + ddt * (k.b2 * (dn / (4.0 * PI * r.powi(5))))
}

/// Traction of the Kelvin matrix with respect to `x`, `∂_{ν_x} G(x - y)`,
/// for `x` on an origin-centred sphere (so `ν_x = x/|x|`).
pub fn traction_kernel(x: &RVec3, y: &RVec3, lame: &LameParams) -> Result<CMat3> {
    nonzero(x, "traction kernel normal")?;
    let d = x - y;
    nonzero(&d, "traction kernel")?;
    let nu = x.normalize();
    let k = lame.coeffs();
    let k1 = kernel_k1(&d, &nu).map(|c| Complex64::new(c, 0.0));
    Ok(k1 * (-k.b1) + kernel_k2(&d, &nu, &k))
}
