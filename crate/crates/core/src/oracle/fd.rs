//! Central finite differences for Lamé residuals and tractions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::harmonics::SurfacePoint;
use crate::kelvin::LameParams;
use crate::{complexify, CVec3, RVec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdOrder {
    Two,
    Four,
}

/// Step length and accuracy order of a central stencil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdStencil {
    pub h: f64,
    pub order: FdOrder,
}

impl Default for FdStencil {
    fn default() -> Self {
        FdStencil { h: 1e-4, order: FdOrder::Two }
    }
}

impl FdStencil {
    pub fn new(h: f64, order: FdOrder) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(domain(format!("finite-difference step {h} must be positive")));
        }
        Ok(FdStencil { h, order })
    }

    /// Default step scaled to a characteristic length.
    pub fn for_length(length: f64, order: FdOrder) -> Result<Self> {
        Self::new(1e-4 * length, order)
    }

    /// Offsets (in units of `h`) and weights of the first-derivative stencil.
    fn first(&self) -> &'static [(f64, f64)] {
        match self.order {
            FdOrder::Two => &[(-1.0, -0.5), (1.0, 0.5)],
            FdOrder::Four => &[(-2.0, 1.0 / 12.0), (-1.0, -2.0 / 3.0), (1.0, 2.0 / 3.0), (2.0, -1.0 / 12.0)],
        }
    }

    fn second(&self) -> &'static [(f64, f64)] {
        match self.order {
            FdOrder::Two => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
            FdOrder::Four => &[
                (-2.0, -1.0 / 12.0),
                (-1.0, 4.0 / 3.0),
                (0.0, -5.0 / 2.0),
                (1.0, 4.0 / 3.0),
                (2.0, -1.0 / 12.0),
            ],
        }
    }
}

fn axis(k: usize) -> RVec3 {
    let mut e = RVec3::zeros();
    e[k] = 1.0;
    e
}

/// Jacobian `J[i][j] = ∂_j u_i`.
pub fn fd_jacobian<F>(f: &F, x: &RVec3, st: &FdStencil) -> [[Complex64; 3]; 3]
where
    F: Fn(&RVec3) -> CVec3,
{
    let mut j = [[Complex64::default(); 3]; 3];
    for (col, e) in (0..3).map(|k| (k, axis(k))) {
        let mut d = CVec3::zeros();
        for &(o, w) in st.first() {
            d += f(&(x + e * (o * st.h))) * Complex64::new(w, 0.0);
        }
        d /= Complex64::new(st.h, 0.0);
        for row in 0..3 {
            j[row][col] = d[row];
        }
    }
    j
}

/// All second derivatives `H[a][b] = ∂_a ∂_b u`.
fn fd_hessian<F>(f: &F, x: &RVec3, st: &FdStencil) -> [[CVec3; 3]; 3]
where
    F: Fn(&RVec3) -> CVec3,
{
    let mut h = [[CVec3::zeros(); 3]; 3];
    let h2 = st.h * st.h;
    for a in 0..3 {
        let ea = axis(a);
        let mut d = CVec3::zeros();
        for &(o, w) in st.second() {
            d += f(&(x + ea * (o * st.h))) * Complex64::new(w, 0.0);
        }
        h[a][a] = d / Complex64::new(h2, 0.0);
        for b in (a + 1)..3 {
            let eb = axis(b);
            let mut d = CVec3::zeros();
            for &(oa, wa) in st.first() {
                for &(ob, wb) in st.first() {
                    d += f(&(x + ea * (oa * st.h) + eb * (ob * st.h))) * Complex64::new(wa * wb, 0.0);
                }
            }
            h[a][b] = d / Complex64::new(h2, 0.0);
            h[b][a] = h[a][b];
        }
    }
    h
}

/// Size of `ℒ_{λ,μ} u = μΔu + (λ+μ)∇∇·u` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LameResidual {
    pub absolute: f64,
    /// `(|μ| + |λ+μ|)` times the largest of the field's second derivatives,
    /// first derivatives per unit length and values per unit length squared,
    /// the length being `max(|x|, 1)`.
    pub scale: f64,
    pub relative: f64,
    /// Set when rounding noise `ε|u|/h²` is comparable to the scale.
    pub roundoff_dominated: bool,
}

/// Finite-difference Lamé residual of a vector field.
pub fn fd_lame_residual<F>(f: F, lame: &LameParams, x: &RVec3, st: &FdStencil) -> LameResidual
where
    F: Fn(&RVec3) -> CVec3,
{
    let h = fd_hessian(&f, x, st);
    let j = fd_jacobian(&f, x, st);
    let mut lap = CVec3::zeros();
    let mut grad_div = CVec3::zeros();
    for a in 0..3 {
        lap += h[a][a];
        for b in 0..3 {
            grad_div[a] += h[a][b][b];
        }
    }
    let r = lap * lame.mu + grad_div * (lame.lambda + lame.mu);
    let absolute = r.norm();
    let len = x.norm().max(1.0);
    let value = f(x).norm();
    let mut scale: f64 = value / (len * len);
    for row in &j {
        for c in row {
            scale = scale.max(c.norm() / len);
        }
    }
    for row in &h {
        for v in row {
            scale = scale.max(v.iter().map(|c| c.norm()).fold(0.0, f64::max));
        }
    }
    let coef = lame.mu.norm() + (lame.lambda + lame.mu).norm();
    let scale = coef * scale;
    let noise = coef * f64::EPSILON * value / (st.h * st.h);
    LameResidual {
        absolute,
        scale,
        relative: if scale > 0.0 { absolute / scale } else { absolute },
        roundoff_dominated: noise > 1e-3 * scale.max(f64::MIN_POSITIVE),
    }
}

/// `λ(∇·u)ν + μ(∇u + ∇uᵗ)ν` at a point of an origin-centred sphere.
pub fn fd_traction<F>(f: F, lame: &LameParams, p: &SurfacePoint, st: &FdStencil) -> CVec3
where
    F: Fn(&RVec3) -> CVec3,
{
    let j = fd_jacobian(&f, &p.position(), st);
    let nu = complexify(&p.normal());
    let div = j[0][0] + j[1][1] + j[2][2];
    let mut t = nu * (div * lame.lambda);
    for i in 0..3 {
        let mut s = Complex64::default();
        for k in 0..3 {
            s += (j[i][k] + j[k][i]) * nu[k];
        }
        t[i] += s * lame.mu;
    }
    t
}
