use nctorus_core::euclidean::{gaussian, magnetic_heat_trace, Grid, MagneticHeatParams};
use nctorus_core::operators::{assemble_dirac, assemble_lm, curvature_two_form_check};
use nctorus_core::spectral::{fit_weyl_asymptotics, heat_trace_series, hermitian_eigen, linear_grid, t_min};
use nctorus_core::stochastic::{
    moment_recursion, perturbed_expectation, sample_brownian, simulate_flows, PhaseConvention,
};
use nctorus_core::gauge::l0m_symbol;
use nctorus_core::{GaugeConfig, LatticeWindow, Perturbation, TorusElement};
use num_complex::Complex64;

const THETA: f64 = 0.3;

fn perturbation() -> Perturbation {
    let x = TorusElement::x(THETA);
    Perturbation(x.add(&x.adjoint()).unwrap().scale(Complex64::new(0.3, 0.0)), TorusElement::zero(THETA))
}

#[test]
fn json_config_drives_a_heat_fit() {
    let cfg: GaugeConfig = serde_json::from_str(r#"{"theta": 0.3, "beta": [0.25, 0.5]}"#).unwrap();
    let r: Perturbation = serde_json::from_str(
        r#"[{"theta": 0.3, "coeffs": [[-1, 0, 0.3, 0.0], [1, 0, 0.3, 0.0]]}, {"theta": 0.3, "coeffs": []}]"#,
    )
    .unwrap();
    assert_eq!(r, perturbation());
    let w = LatticeWindow::new(24).unwrap();
    let spec = hermitian_eigen(&assemble_lm(&cfg, &r, &w).unwrap(), false).unwrap();
    let series = heat_trace_series(&spec, &linear_grid(t_min(24), 0.1, 8), 24).unwrap();
    let fit = fit_weyl_asymptotics(&series).unwrap();
    assert!((fit.volume - 2.0 * std::f64::consts::PI).abs() < 1e-3, "{fit:?}");
}

#[test]
fn invalid_gauge_json_is_rejected() {
    let err = serde_json::from_str::<GaugeConfig>(r#"{"theta": 1.5}"#).unwrap_err();
    assert!(err.to_string().contains("theta"), "{err}");
}

#[test]
fn dirac_and_curvature_on_a_shared_config() {
    let cfg = GaugeConfig::new(THETA).with_beta([0.1, 0.2]);
    let w = LatticeWindow::new(6).unwrap();
    let d = assemble_dirac(&cfg, None, &w).unwrap();
    assert_eq!(d.grading_anticommutator().max_abs(), 0.0);
    let lit = cfg.clone().with_mode(nctorus_core::SymbolMode::Literal);
    let rep = curvature_two_form_check(&lit, &perturbation(), &w).unwrap();
    assert!(rep.deviation < 1e-10);
}

#[test]
fn semigroup_and_monte_carlo_agree_on_a_mode() {
    let cfg = GaugeConfig::new(THETA).with_beta([0.25, 0.5]);
    let w = LatticeWindow::new(4).unwrap();
    let n = (1, 0);
    let t = 0.2;
    let x = TorusElement::monomial(THETA, n, Complex64::new(1.0, 0.0));
    let e = perturbed_expectation(&cfg, &Perturbation::zero(THETA), &x, &w, t).unwrap();
    let ens = sample_brownian(1e-3, 200, 20_000, 5).unwrap();
    let est = nctorus_core::stochastic::homomorphic_mean(&ens, n, l0m_symbol(&cfg, n), PhaseConvention::Natural, t)
        .unwrap();
    assert!(est.sigmas_from(e.coeff(n)) < 3.0, "{est:?} vs {}", e.coeff(n));
    let recs = simulate_flows(&ens, &[(n, Complex64::new(0.0, 0.0))], PhaseConvention::Natural, &[t]).unwrap();
    assert!(recs[0].records[0].unperturbed.sigmas_from(Complex64::new((-0.5 * t).exp(), 0.0)) < 3.0);
}

#[test]
fn moments_and_euclidean_trace() {
    let rep = moment_recursion(2, -1.0, &[0.5, 1.0]).unwrap();
    for (v, r) in rep.values.iter().zip(&rep.reference) {
        assert!((v - r).abs() < 1e-8);
    }
    let g = gaussian(Grid::with_extent(2, 16.0, 0.25).unwrap(), 1.0);
    let tr = magnetic_heat_trace(&MagneticHeatParams::new(0.1, 0.2, 0.5), &g).unwrap();
    assert!((tr.analytic - tr.quadrature).abs() < 1e-6);
}
