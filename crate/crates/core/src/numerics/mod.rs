//! Numerical kernels: Lambert W₀, bracketed root finding, the radial
//! interference integral and a compensated alternating binomial sum.

mod binomial;
mod lambert;
mod quadrature;
mod root;

pub use binomial::{alternating_binomial_sum, binomial};
pub use lambert::lambert_w0;
pub use quadrature::{csma_spatial_integral, integrate_adaptive, QuadratureSpec};
pub use root::find_root_increasing;
