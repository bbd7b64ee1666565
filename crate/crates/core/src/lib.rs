//! Spectral theory of the elastostatic Neumann-Poincare operator on spheres,
//! and its use for simulating anomalous localized resonance (ALR) in a
//! core-shell-matrix structure with a plasmonic shell.
//!
//! The crate is organised bottom-up:
//!
//! * [`harmonics`]: scalar spherical harmonics and the vector families
//!   `T`, `M`, `N` in solid and trace form.
//! * [`kelvin`]: Lamé parameters, the Laplace and Kelvin fundamental
//!   solutions and the traction kernel.
//! * [`potentials`]: closed-form actions of the layer potentials and of the
//!   N-P operator on vector spherical harmonics.
//! * [`transmission`]: the mode-wise core-shell solve, energies and the
//!   CALR classification sweep.
//! * [`oracle`]: quadrature and finite-difference checks that are independent
//!   of the closed forms above.

pub mod error;
pub mod harmonics;
pub mod kelvin;
pub mod oracle;
pub mod potentials;
pub mod transmission;

pub use error::{Error, Result};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

/// Real 3-vector.
pub type RVec3 = Vector3<f64>;
/// Complex 3-vector (surface and volume fields are complex end to end).
pub type CVec3 = Vector3<Complex64>;
/// Complex 3x3 matrix.
pub type CMat3 = Matrix3<Complex64>;

pub(crate) fn complexify(v: &RVec3) -> CVec3 {
    v.map(|c| Complex64::new(c, 0.0))
}

/// Cross product of a complex vector with a real one.
pub(crate) fn cross_cr(a: &CVec3, b: &RVec3) -> CVec3 {
    a.cross(&complexify(b))
}
