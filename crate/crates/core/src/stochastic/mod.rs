//! Brownian realizations of the flows, their vacuum expectations, and the
//! scalar-mode moment recursions.

pub mod brownian;
pub mod expectation;
pub mod flow;
pub mod moments;

pub use brownian::{sample_brownian, BrownianEnsemble, BrownianPath};
pub use expectation::{perturbed_expectation, HeatSemigroup};
pub use flow::{
    flow_homomorphic, flow_magnetic, flow_unperturbed, flow_with_rate, homomorphic_mean, magnetic_mean_closed_form,
    mean_stderr, simulate_flows, step_at, vacuum_expectation, Estimate, FlowEnsemble, FlowRecord, FlowSample,
    PhaseConvention,
};
pub use moments::{
    decomposition_m, moment_recursion, printed_variance, variance_decomposition, variance_report, MomentReport,
    VarianceReport, QUADRATURE_INTERVALS,
};
