//! Heat traces and their small-`t` Weyl asymptotics.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::eigen::{hermitian_eigen, Spectrum};
use crate::error::{invalid, Error, Result};
use crate::gauge::{GaugeConfig, SymbolMode};
use crate::operators::{assemble_l0m, assemble_lm, LatticeWindow, MatrixOperator, Perturbation};

/// Upper end of the asymptotic fit window.
pub const T_MAX: f64 = 0.1;

/// Default largest relative fit residual before a fit is flagged unreliable.
pub const FIT_RESIDUAL_TOL: f64 = 1e-6;

/// Smallest `t` at which a half-width `N` truncation is trusted:
/// `exp(-t N^2 / 2) < 1e-10` gives `46 / N^2`.
pub fn t_min(half_width: usize) -> f64 {
    46.0 / (half_width * half_width) as f64
}

/// `sum_k exp(t lambda_k)`.
pub fn heat_trace(spec: &Spectrum, t: f64) -> f64 {
    spec.eigenvalues().iter().map(|&l| (t * l).exp()).sum()
}

/// Sampled `t -> Tr exp(tL)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeatTraceSeries {
    pub samples: Vec<(f64, f64)>,
    pub window_n: usize,
}

/// Heat traces over a strictly increasing grid of positive times.
pub fn heat_trace_series(spec: &Spectrum, t_grid: &[f64], window_n: usize) -> Result<HeatTraceSeries> {
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(invalid("heat-trace times must be positive"));
    }
    if t_grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(invalid("heat-trace times must be strictly increasing"));
    }
    let samples = t_grid.par_iter().map(|&t| (t, heat_trace(spec, t))).collect();
    Ok(HeatTraceSeries { samples, window_n })
}

/// `Tr exp(tM)` from a Pade matrix exponential of each connected block.
pub fn heat_trace_expm(op: &MatrixOperator, t: f64) -> Result<f64> {
    let m = op.matrix();
    let traces: Vec<Complex64> = m
        .components()
        .into_par_iter()
        .map(|idx| {
            let d = m.restrict(&idx).to_dense() * Complex64::new(t, 0.0);
            d.exp().trace()
        })
        .collect();
    Ok(traces.into_iter().map(|z| z.re).sum())
}

/// Least-squares fit `Tr exp(tL) ~ V / t + c` with `s = c / 6`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub volume: f64,
    pub curvature: f64,
    pub volume_stderr: f64,
    pub curvature_stderr: f64,
    pub fit_window: (f64, f64),
    /// Largest relative residual `|trace - model| / trace`.
    pub residual: f64,
    pub samples_used: usize,
    pub reliable: bool,
}

/// Fit over `[t_min(N), T_MAX]` with the default residual threshold.
pub fn fit_weyl_asymptotics(series: &HeatTraceSeries) -> Result<AsymptoticFit> {
    fit_weyl_asymptotics_in(series, (t_min(series.window_n), T_MAX), FIT_RESIDUAL_TOL)
}

pub fn fit_weyl_asymptotics_in(
    series: &HeatTraceSeries,
    window: (f64, f64),
    residual_tol: f64,
) -> Result<AsymptoticFit> {
    let slack = 1e-12;
    let pts: Vec<(f64, f64)> = series
        .samples
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 * (1.0 - slack) && t <= window.1 * (1.0 + slack))
        .collect();
    if pts.len() < 4 {
        return Err(Error::TooFewSamples { needed: 4, got: pts.len() });
    }
    // Normal equations for the basis (1/t, 1).
    let n = pts.len() as f64;
    let (mut sxx, mut sx, mut sxy, mut sy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, y) in &pts {
        let x = 1.0 / t;
        sxx += x * x;
        sx += x;
        sxy += x * y;
        sy += y;
    }
    let det = n * sxx - sx * sx;
    if det.abs() < f64::EPSILON * n * sxx {
        return Err(invalid("fit times are degenerate"));
    }
    let v = (n * sxy - sx * sy) / det;
    let c = (sxx * sy - sx * sxy) / det;
    let mut rss = 0.0;
    let mut residual: f64 = 0.0;
    for &(t, y) in &pts {
        let r = y - (v / t + c);
        rss += r * r;
        residual = residual.max(r.abs() / y.abs());
    }
    let sigma2 = rss / (n - 2.0);
    let volume_stderr = (sigma2 * n / det).sqrt();
    let c_stderr = (sigma2 * sxx / det).sqrt();
    Ok(AsymptoticFit {
        volume: v,
        curvature: c / 6.0,
        volume_stderr,
        curvature_stderr: c_stderr / 6.0,
        fit_window: window,
        residual,
        samples_used: pts.len(),
        reliable: residual <= residual_tol,
    })
}

/// `n` equally spaced times covering `[a, b]`.
pub fn linear_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Volume and curvature of `L^m_0` against `L^m` on one window and grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub unperturbed: AsymptoticFit,
    pub perturbed: AsymptoticFit,
    pub unperturbed_series: HeatTraceSeries,
    pub perturbed_series: HeatTraceSeries,
    /// `|V(L^m) - V(L^m_0)| / V(L^m_0)`.
    pub delta_volume_rel: f64,
    /// `s(L^m) - s(L^m_0)`.
    pub delta_curvature: f64,
    /// `sqrt(se_0^2 + se^2)` of the two curvature fits.
    pub delta_curvature_uncertainty: f64,
}

pub fn invariance_report(
    cfg: &GaugeConfig,
    r: &Perturbation,
    w: &LatticeWindow,
    t_grid: &[f64],
) -> Result<InvarianceReport> {
    if cfg.symbol_mode != SymbolMode::Hermitian {
        return Err(invalid("invariance report needs hermitian symbol mode"));
    }
    let l0m = assemble_l0m(cfg, w);
    let lm = assemble_lm(cfg, r, w)?;
    let (s0, s1) = rayon::join(|| hermitian_eigen(&l0m, false), || hermitian_eigen(&lm, false));
    let n = w.half_width();
    let series0 = heat_trace_series(&s0?, t_grid, n)?;
    let series1 = heat_trace_series(&s1?, t_grid, n)?;
    let f0 = fit_weyl_asymptotics(&series0)?;
    let f1 = fit_weyl_asymptotics(&series1)?;
    Ok(InvarianceReport {
        delta_volume_rel: (f1.volume - f0.volume).abs() / f0.volume.abs(),
        delta_curvature: f1.curvature - f0.curvature,
        delta_curvature_uncertainty: f0.curvature_stderr.hypot(f1.curvature_stderr),
        unperturbed: f0,
        perturbed: f1,
        unperturbed_series: series0,
        perturbed_series: series1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{assemble_l0m, SparseMatrix};
    use crate::spectral::eigen::hermitian_eigen_matrix;
    use std::f64::consts::PI;

    #[test]
    fn trace_of_zero_eigenvalue_is_one() {
        let s = Spectrum::from_values(vec![0.0], "zero");
        assert_eq!(heat_trace(&s, 0.7), 1.0);
    }

    #[test]
    fn synthetic_model_is_recovered() {
        let (a, b) = (6.1, -0.4);
        let grid = linear_grid(0.02, 0.1, 9);
        let series = HeatTraceSeries { samples: grid.iter().map(|&t| (t, a / t + b)).collect(), window_n: 64 };
        let fit = fit_weyl_asymptotics(&series).unwrap();
        assert!((fit.volume - a).abs() < 1e-10);
        assert!((fit.curvature - b / 6.0).abs() < 1e-10);
        assert!(fit.reliable);
    }

    #[test]
    fn too_few_samples() {
        let series = HeatTraceSeries { samples: vec![(0.05, 1.0), (0.06, 1.0), (0.07, 1.0)], window_n: 48 };
        assert!(matches!(fit_weyl_asymptotics(&series), Err(Error::TooFewSamples { got: 3, .. })));
    }

    #[test]
    fn poorly_modelled_series_is_flagged() {
        let grid = linear_grid(0.02, 0.1, 9);
        let series = HeatTraceSeries { samples: grid.iter().map(|&t| (t, 1.0 / t + 50.0 * t * t)).collect(), window_n: 64 };
        let fit = fit_weyl_asymptotics(&series).unwrap();
        assert!(!fit.reliable);
    }

    #[test]
    fn expm_route_matches_eigen_route_small() {
        let cfg = GaugeConfig::new(0.3).with_beta([0.1, 0.2]);
        let w = LatticeWindow::new(6).unwrap();
        let x = crate::TorusElement::x(0.3);
        let r = Perturbation(x.add(&x.adjoint()).unwrap().scale(Complex64::new(0.3, 0.0)), crate::TorusElement::zero(0.3));
        let lm = assemble_lm(&cfg, &r, &w).unwrap();
        let s = hermitian_eigen(&lm, false).unwrap();
        for t in [0.05, 0.2] {
            let a = heat_trace(&s, t);
            let b = heat_trace_expm(&lm, t).unwrap();
            assert!((a - b).abs() < 1e-8 * a, "{a} {b}");
        }
    }

    #[test]
    fn flat_torus_volume_at_moderate_window() {
        let cfg = GaugeConfig::new(0.3);
        let w = LatticeWindow::new(32).unwrap();
        let s = hermitian_eigen(&assemble_l0m(&cfg, &w), false).unwrap();
        let series = heat_trace_series(&s, &linear_grid(0.05, 0.1, 6), 32).unwrap();
        let fit = fit_weyl_asymptotics(&series).unwrap();
        assert!((fit.volume - 2.0 * PI).abs() < 1e-6);
        assert!(fit.curvature.abs() < 1e-6);
    }

    #[test]
    fn zero_perturbation_gives_identical_fits() {
        let cfg = GaugeConfig::new(0.3).with_beta([0.25, 0.5]);
        let w = LatticeWindow::new(24).unwrap();
        let rep = invariance_report(&cfg, &Perturbation::zero(0.3), &w, &linear_grid(0.08, 0.1, 5)).unwrap();
        assert_eq!(rep.delta_volume_rel, 0.0);
        assert_eq!(rep.delta_curvature, 0.0);
    }

    #[test]
    fn grid_validation() {
        let s = hermitian_eigen_matrix(&SparseMatrix::identity(2), false, "id").unwrap();
        assert!(heat_trace_series(&s, &[0.1, 0.05], 4).is_err());
        assert!(heat_trace_series(&s, &[0.0, 0.05], 4).is_err());
    }
}
