//! Mode system of the core-shell problem assembled from the raw transmission
//! conditions, without the closed-form solution.
//!
//! On each interface the traction of every layer and of the source is
//! computed from its radial profile: a field `f(r) T(x̂)` has traction
//! `μ(f' - f/r) T(x̂)` on the sphere of radius `r`. The conditions are
//! `c ∂u|₋ = (ε+iδ) ∂u|₊` on `r_i` and `(ε+iδ) ∂u|₋ = ∂u|₊` on `r_e`.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kelvin::LameParams;
use crate::transmission::{PlasmonicConfig, ShellGeometry};

type C64 = Complex64;

/// Traction coefficient of the profile `k r^p` at radius `r`.
fn profile_traction(mu: C64, k: C64, p: i32, r: f64) -> C64 {
    // f' - f/r = k (p - 1) r^{p-1}
    mu * k * ((p - 1) as f64 * r.powi(p - 1))
}

/// `(φ_i, φ_e)` for one `T_n` mode, from a dense 2x2 solve.
pub fn direct_mode_solve(n: u32, g_e: C64, geom: &ShellGeometry, cfg: &PlasmonicConfig, lame: &LameParams) -> Result<(C64, C64)> {
    let mu = lame.mu;
    let ni = n as i32;
    let nf = n as f64;
    let (ri, re) = (geom.r_i, geom.r_e);
    let d = -(mu * (2.0 * nf + 1.0)).inv();
    // Interior profile of S_r0[T] is d r0^{1-n} r^n, exterior d r0^{n+2} r^{-n-1}.
    let s_in = |r0: f64, r: f64| profile_traction(mu, d * r0.powi(1 - ni), ni, r);
    let s_out = |r0: f64, r: f64| profile_traction(mu, d * r0.powi(ni + 2), -ni - 1, r);
    // Source potential inside r_e has profile g_e r^n / (μ(n-1) r_e^{n-1}).
    let f_coef = g_e / (mu * ((nf - 1.0) * re.powi(ni - 1)));
    let f_at = |r: f64| profile_traction(mu, f_coef, ni, r);
    let c = C64::new(cfg.c_n, 0.0);
    let e = cfg.shell_factor();
    // Row 1, on r_i: c (inside traction) - e (outside traction) = 0.
    // Row 2, on r_e: e (inside traction) - (outside traction) = 0.
    let m = Matrix2::new(
        c * s_in(ri, ri) - e * s_out(ri, ri),
        (c - e) * s_in(re, ri),
        (e - 1.0) * s_out(ri, re),
        e * s_in(re, re) - s_out(re, re),
    );
    let rhs = Vector2::new(-(c - e) * f_at(ri), -(e - 1.0) * f_at(re));
    let sol = m.lu().solve(&rhs).ok_or(Error::ExactResonance { n })?;
    Ok((sol[0], sol[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_point() {
        let geom = ShellGeometry::new(1.0, 2.0).unwrap();
        let cfg = PlasmonicConfig::resonant(2, 0.0).unwrap();
        let lame = LameParams::new(1.0, 1.0).unwrap();
        let (pi, pe) = direct_mode_solve(2, C64::new(1.0, 0.0), &geom, &cfg, &lame).unwrap();
        assert!((pi + 20.0).norm() < 1e-10, "{pi}");
        assert!((pe - 5.0).norm() < 1e-10, "{pe}");
    }
}
