//! Spectra, heat traces, Weyl asymptotics and Dixmier-trace estimators.

pub mod dixmier;
pub mod eigen;
pub mod heat;

pub use dixmier::{
    default_cutoffs, dixmier_volume_form, geometric_cutoffs, log_cesaro_estimate, volume_form_terms,
    volume_form_terms_many,
    DixmierEstimate, KERNEL_TOL,
};
pub use eigen::{hermitian_eigen, hermitian_eigen_matrix, operator_norm, EigenBlock, Spectrum};
pub use heat::{
    fit_weyl_asymptotics, fit_weyl_asymptotics_in, heat_trace, heat_trace_expm, heat_trace_series, invariance_report,
    linear_grid, t_min, AsymptoticFit, HeatTraceSeries, InvarianceReport, FIT_RESIDUAL_TOL, T_MAX,
};
