//! Euclidean phase space `R^2` (d = 1): Fourier transform, Weyl system,
//! twisted convolution, its trace, and the magnetic heat trace.

pub mod fourier;
pub mod grid;
pub mod heat;
pub mod weyl;

pub use fourier::{
    fourier_transform, fourier_transform_on, inverse_fourier_transform, inverse_fourier_transform_on, involution,
    phi_trace_euclidean, symplectic_form, transform_at_origin, twisted_convolve, twisted_convolve_hat, Transform,
};
pub use grid::{bump, gaussian, Grid, SampledFunction};
pub use heat::{magnetic_heat_trace, MagneticHeatParams, MagneticHeatTrace, KERNEL_SPACING};
pub use weyl::WeylOperator;
