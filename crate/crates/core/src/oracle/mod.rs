//! Independent checks of the closed forms: sphere quadrature of the layer
//! potentials and of the principal-value N-P operator, finite-difference
//! Lamé residuals and tractions, a direct transmission solve and a volume
//! quadrature of the shell energy.

pub mod energy;
pub mod fd;
pub mod interface;
pub mod layers;
pub mod quadrature;
pub mod record;
pub mod suites;

pub use energy::{quad_energy_shell, EnergyQuadrature};
pub use fd::{fd_jacobian, fd_lame_residual, fd_traction, FdOrder, FdStencil, LameResidual};
pub use interface::direct_mode_solve;
pub use layers::{
    project_field, quad_elastic_sl, quad_elastic_sl_multiplier, quad_np_apply, quad_np_apply_on, quad_np_at,
    quad_scalar_sl, quad_scalar_sl_multiplier, sample_directions, MultiplierFit,
};
pub use quadrature::{gauss_legendre, quad_surface_integral, CompensatedSum, PolarMapping, QuadratureRule};
pub use record::ValidationRecord;
pub use suites::{run_suite, Suite, SuiteConfig};
