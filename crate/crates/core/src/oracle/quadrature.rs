//! Product quadrature on the sphere and deterministic summation.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::ops::{Add, Mul};

use gauss_quad::legendre::GaussLegendre;
use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::RVec3;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let Some(deg) = NonZeroUsize::new(n) else {
        return Vec::new();
    };
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(deg).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// What the Gauss-Legendre nodes discretize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarMapping {
    /// Nodes in `cos θ`: exact for spherical polynomials of degree `2 n_theta - 1`.
    CosTheta,
    /// Nodes in `θ` with the `sin θ` Jacobian kept in the weight. Used for
    /// kernels singular at the pole, where `sin θ` cancels a `1/θ` blow-up.
    Colatitude,
}

/// Gauss-Legendre in the polar direction times the trapezoid rule in azimuth,
/// optionally rotated so that its pole sits at a chosen direction.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub n_theta: usize,
    pub n_phi: usize,
    pub mapping: PolarMapping,
    /// Maps the rule's north pole to the singular point.
    pub rotation: Option<Matrix3<f64>>,
}

impl QuadratureRule {
    /// Regular rule with nodes in `cos θ`.
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 {
            return Err(domain("quadrature needs at least one polar node"));
        }
        if n_phi < 2 * n_theta || n_phi % 2 != 0 {
            return Err(domain(format!(
                "azimuthal count {n_phi} must be even and at least twice the polar count {n_theta}"
            )));
        }
        Ok(QuadratureRule { n_theta, n_phi, mapping: PolarMapping::CosTheta, rotation: None })
    }

    /// Rule for integrands singular at the pole.
    pub fn singular(n_theta: usize, n_phi: usize) -> Result<Self> {
        Ok(QuadratureRule { mapping: PolarMapping::Colatitude, ..Self::new(n_theta, n_phi)? })
    }

    /// The same rule with its pole moved to the direction of `target`.
    pub fn rotated_to(&self, target: &RVec3) -> Self {
        QuadratureRule { rotation: Some(pole_rotation(target)), ..self.clone() }
    }

    /// Highest spherical-polynomial degree integrated exactly, if any.
    pub fn exact_degree(&self) -> Option<usize> {
        match self.mapping {
            PolarMapping::CosTheta => Some((2 * self.n_theta - 1).min(self.n_phi - 1)),
            PolarMapping::Colatitude => None,
        }
    }

    /// Unit directions with weights summing to `4π`, in a fixed order.
    pub fn nodes(&self) -> Vec<(RVec3, f64)> {
        let polar: Vec<(f64, f64)> = gauss_legendre(self.n_theta)
            .into_iter()
            .map(|(x, w)| match self.mapping {
                PolarMapping::CosTheta => (x.clamp(-1.0, 1.0).acos(), w),
                PolarMapping::Colatitude => {
                    let t = 0.5 * PI * (x + 1.0);
                    (t, 0.5 * PI * w * t.sin())
                }
            })
            .collect();
        let dphi = 2.0 * PI / self.n_phi as f64;
        let mut out = Vec::with_capacity(self.n_theta * self.n_phi);
        for &(theta, wt) in &polar {
            let (st, ct) = theta.sin_cos();
            for k in 0..self.n_phi {
                let (sp, cp) = (k as f64 * dphi).sin_cos();
                let local = RVec3::new(st * cp, st * sp, ct);
                let u = match &self.rotation {
                    Some(r) => r * local,
                    None => local,
                };
                out.push((u, wt * dphi));
            }
        }
        out
    }
}

/// A rotation whose third column is `target / |target|`.
pub fn pole_rotation(target: &RVec3) -> Matrix3<f64> {
    let e3 = target.normalize();
    let helper = if e3.x.abs() < 0.9 { RVec3::x() } else { RVec3::y() };
    let e1 = (helper - e3 * helper.dot(&e3)).normalize();
    let e2 = e3.cross(&e1);
    Matrix3::from_columns(&[e1, e2, e3])
}

/// Kahan-Babuska compensated sum, reduced in insertion order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T = Complex64> {
    sum: T,
    comp: T,
}

impl<T> CompensatedSum<T>
where
    T: Copy + Default + Add<Output = T> + std::ops::Sub<Output = T> + Magnitude,
{
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.magnitude() >= x.magnitude() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum + self.comp
    }
}

/// Magnitude used to order the compensation step.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

/// Compensated sum of `f(u) * w` over the rule, on a sphere of `radius`.
pub fn quad_surface_integral<T, F>(f: F, rule: &QuadratureRule, radius: f64) -> T
where
    T: Copy + Default + Add<Output = T> + std::ops::Sub<Output = T> + Mul<f64, Output = T> + Magnitude,
    F: Fn(&RVec3) -> T,
{
    let mut acc = CompensatedSum::<T>::default();
    let scale = radius * radius;
    for (u, w) in rule.nodes() {
        acc.add(f(&u) * (w * scale));
    }
    acc.total()
}
