//! Shell energy by volume quadrature.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::kelvin::LameParams;
use crate::oracle::fd::{fd_jacobian, FdOrder, FdStencil};
use crate::oracle::quadrature::{gauss_legendre, CompensatedSum, QuadratureRule};
use crate::transmission::ShellGeometry;
use crate::{CVec3, RVec3};

/// Angular rule, radial node count and gradient stencil.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyQuadrature {
    #[serde(skip)]
    pub rule: QuadratureRule,
    pub n_radial: usize,
    pub stencil: FdStencil,
}

impl EnergyQuadrature {
    pub fn new(n_theta: usize, n_phi: usize, n_radial: usize) -> Result<Self> {
        if n_radial == 0 {
            return Err(domain("radial node count must be positive"));
        }
        Ok(EnergyQuadrature {
            rule: QuadratureRule::new(n_theta, n_phi)?,
            n_radial,
            stencil: FdStencil::new(1e-5, FdOrder::Four)?,
        })
    }
}

/// `λ|∇·u|² + 2μ|∇ˢu|²` from a Jacobian, with real moduli.
fn energy_density(j: &[[Complex64; 3]; 3], lambda: f64, mu: f64) -> f64 {
    let div = j[0][0] + j[1][1] + j[2][2];
    let mut sym = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            sym += ((j[a][b] + j[b][a]) * 0.5).norm_sqr();
        }
    }
    lambda * div.norm_sqr() + 2.0 * mu * sym
}

/// `(δ/2) ∫_{r_i<|x|<r_e} λ|∇·u|² + 2μ|∇ˢu|²` with the real parts of the
/// base moduli, Gauss-Legendre in `r` and the product rule in angle.
pub fn quad_energy_shell<F>(u: F, lame: &LameParams, delta: f64, geom: &ShellGeometry, q: &EnergyQuadrature) -> Result<f64>
where
    F: Fn(&RVec3) -> CVec3,
{
    let (lambda, mu) = (lame.lambda.re, lame.mu.re);
    let half = 0.5 * (geom.r_e - geom.r_i);
    let mid = 0.5 * (geom.r_e + geom.r_i);
    let nodes = q.rule.nodes();
    let mut acc = CompensatedSum::<f64>::default();
    for (t, wr) in gauss_legendre(q.n_radial) {
        let r = mid + half * t;
        let st = FdStencil { h: q.stencil.h * r, ..q.stencil };
        for (dir, wa) in &nodes {
            let j = fd_jacobian(&u, &(dir * r), &st);
            acc.add(energy_density(&j, lambda, mu) * wa * wr * half * r * r);
        }
    }
    Ok(0.5 * delta * acc.total())
}
