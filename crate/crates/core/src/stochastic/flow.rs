//! Unperturbed and magnetic flows on a single Fourier mode.
//!
//! On a monomial `U^n` the unperturbed flow acts by the phase
//! `exp(i kappa n.w(t))`, and `T^0` acts by its symbol `tau`, so the magnetic
//! flow `df = dj + f tau dt` becomes a scalar linear equation per path.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::brownian::{BrownianEnsemble, BrownianPath};
use crate::algebra::Mode;
use crate::error::{invalid, Error, Result};
use crate::gauge::{t0_symbol, GaugeConfig};

/// Scale `kappa` of the Brownian phase `exp(i kappa n.w)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `kappa = 1`, matching `L_0 = -|n|^2 / 2`.
    #[default]
    Natural,
    /// `kappa = 2 pi`, as in `alpha_{(exp 2 pi i w_1, exp 2 pi i w_2)}`.
    TwoPi,
}

impl PhaseConvention {
    pub fn kappa(self) -> f64 {
        match self {
            PhaseConvention::Natural => 1.0,
            PhaseConvention::TwoPi => 2.0 * PI,
        }
    }

    /// Generator eigenvalue `-kappa^2 |n|^2 / 2` of the unperturbed flow.
    pub fn unperturbed_rate(self, n: Mode) -> f64 {
        let k = self.kappa();
        -0.5 * k * k * (n.0 * n.0 + n.1 * n.1) as f64
    }
}

fn phase(n: Mode, w: [f64; 2], kappa: f64) -> Complex64 {
    Complex64::from_polar(1.0, kappa * (n.0 as f64 * w[0] + n.1 as f64 * w[1]))
}

/// `j_t(U^n) / U^n` at every step `k = 0..=steps`.
pub fn flow_unperturbed(n: Mode, path: &BrownianPath, conv: PhaseConvention) -> Vec<Complex64> {
    let kappa = conv.kappa();
    path.positions().into_iter().map(|w| phase(n, w, kappa)).collect()
}

/// One realization of the magnetic flow on a mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub mode: Mode,
    pub dt: f64,
    pub tau: Complex64,
    /// Unperturbed phases `j_k`.
    pub path_values: Vec<Complex64>,
    /// Running correction `F_k = sum_{i<k} f_i tau dt`.
    pub correction: Vec<Complex64>,
    /// Euler iterates `f_{k+1} = f_k + (j_{k+1} - j_k) + f_k tau dt`.
    pub magnetic: Vec<Complex64>,
}

impl FlowSample {
    pub fn steps(&self) -> usize {
        self.path_values.len() - 1
    }

    /// `max_k |f_k - j_k - F_k|`.
    pub fn telescoping_deviation(&self) -> f64 {
        self.magnetic
            .iter()
            .zip(&self.path_values)
            .zip(&self.correction)
            .map(|((f, j), c)| (f - j - c).norm())
            .fold(0.0, f64::max)
    }

    /// `max_k ||j_k| - 1|`.
    pub fn phase_deviation(&self) -> f64 {
        self.path_values.iter().map(|j| (j.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Euler integration of `df = dj + f tau dt` with `f_0 = j_0 = 1`.
pub fn flow_with_rate(n: Mode, tau: Complex64, path: &BrownianPath, conv: PhaseConvention) -> FlowSample {
    let j = flow_unperturbed(n, path, conv);
    let drift = tau * path.dt;
    let mut f = Vec::with_capacity(j.len());
    let mut corr = Vec::with_capacity(j.len());
    let (mut fk, mut ck) = (j[0], Complex64::new(0.0, 0.0));
    f.push(fk);
    corr.push(ck);
    for k in 0..path.steps {
        let step = fk * drift;
        fk += (j[k + 1] - j[k]) + step;
        ck += step;
        f.push(fk);
        corr.push(ck);
    }
    FlowSample { mode: n, dt: path.dt, tau, path_values: j, correction: corr, magnetic: f }
}

/// Magnetic flow with `tau = t0_symbol(cfg, n)`.
pub fn flow_magnetic(n: Mode, cfg: &GaugeConfig, path: &BrownianPath, conv: PhaseConvention) -> FlowSample {
    flow_with_rate(n, t0_symbol(cfg, n), path, conv)
}

/// Euler–Maruyama iterates of `df = f (i kappa n.dw + lambda dt)`, whose mean
/// is `exp(t lambda)` in the limit `dt -> 0`.
pub fn flow_homomorphic(n: Mode, lambda: Complex64, path: &BrownianPath, conv: PhaseConvention) -> Vec<Complex64> {
    let kappa = conv.kappa();
    let i = Complex64::i();
    let mut f = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(path.steps + 1);
    out.push(f);
    for d in &path.increments {
        let dn = kappa * (n.0 as f64 * d[0] + n.1 as f64 * d[1]);
        f += f * (i * dn + lambda * path.dt);
        out.push(f);
    }
    out
}

/// `exp(t lambda_0) + lambda_0 (exp(t lambda_0) - exp(t tau)) / (lambda_0 - tau)`,
/// the mean of `df = dj + f tau dt` when `E j_t = exp(t lambda_0)`.
pub fn magnetic_mean_closed_form(lambda0: Complex64, tau: Complex64, t: f64) -> Complex64 {
    let et = (tau * t).exp();
    let d = lambda0 - tau;
    if d.norm() < 1e-12 * (1.0 + lambda0.norm()) {
        et * (1.0 + lambda0 * t)
    } else {
        et + lambda0 * ((lambda0 * t).exp() - et) / d
    }
}

/// Sample mean and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: Complex64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    /// `|mean - reference|` in units of the standard error.
    pub fn sigmas_from(&self, reference: Complex64) -> f64 {
        let d = (self.mean - reference).norm();
        if self.stderr == 0.0 {
            if d == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            d / self.stderr
        }
    }
}

/// Ordered two-pass mean and standard error.
pub fn mean_stderr(values: &[Complex64]) -> Result<Estimate> {
    if values.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = values.len();
    let mean = values.iter().sum::<Complex64>() / n as f64;
    let stderr = if n > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean).norm_sqr()).sum();
        (ss / ((n - 1) as f64 * n as f64)).sqrt()
    } else {
        0.0
    };
    Ok(Estimate { mean, stderr, n })
}

/// Step index of time `t` on a grid of spacing `dt`.
pub fn step_at(dt: f64, steps: usize, t: f64) -> Result<usize> {
    let k = (t / dt).round();
    if !(t >= 0.0) || (k * dt - t).abs() > 1e-9 * t.max(1.0) {
        return Err(invalid(format!("time {t} is not on the grid of spacing {dt}")));
    }
    let k = k as usize;
    if k > steps {
        return Err(invalid(format!("time {t} is beyond the simulated horizon {}", dt * steps as f64)));
    }
    Ok(k)
}

/// Mean of the magnetic flow values at time `t`.
pub fn vacuum_expectation(samples: &[FlowSample], t: f64) -> Result<Estimate> {
    let first = samples.first().ok_or(Error::EmptyEnsemble)?;
    let k = step_at(first.dt, first.steps(), t)?;
    if samples.iter().any(|s| s.dt != first.dt || s.steps() != first.steps()) {
        return Err(invalid("samples use different time grids"));
    }
    let values: Vec<Complex64> = samples.iter().map(|s| s.magnetic[k]).collect();
    mean_stderr(&values)
}

/// Ensemble statistics of one mode at one record time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowRecord {
    pub t: f64,
    pub unperturbed: Estimate,
    pub magnetic: Estimate,
    pub correction: Estimate,
    /// `exp(t lambda_0)`.
    pub unperturbed_reference: Complex64,
    /// [`magnetic_mean_closed_form`] at `t`.
    pub magnetic_reference: Complex64,
    /// Largest per-path `|f - j - F|` at this time.
    pub telescoping: f64,
    /// Largest per-path `||j| - 1|` at this time.
    pub phase_deviation: f64,
}

/// Monte Carlo statistics of the flows on one mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowEnsemble {
    pub mode: Mode,
    pub tau: Complex64,
    pub lambda0: f64,
    pub n_paths: usize,
    pub dt: f64,
    pub records: Vec<FlowRecord>,
}

/// Runs every `(mode, tau)` pair on every path of `ens` and reduces at the
/// record times. Paths run in parallel; reductions are ordered.
pub fn simulate_flows(
    ens: &BrownianEnsemble,
    modes: &[(Mode, Complex64)],
    conv: PhaseConvention,
    times: &[f64],
) -> Result<Vec<FlowEnsemble>> {
    let ks: Vec<usize> = times.iter().map(|&t| step_at(ens.dt, ens.steps, t)).collect::<Result<_>>()?;
    // Per path: [mode][time] -> (j, f, F).
    let per_path: Vec<Vec<Vec<[Complex64; 3]>>> = ens.map(|p| {
        modes
            .iter()
            .map(|&(n, tau)| {
                let s = flow_with_rate(n, tau, p, conv);
                ks.iter().map(|&k| [s.path_values[k], s.magnetic[k], s.correction[k]]).collect()
            })
            .collect()
    });
    modes
        .iter()
        .enumerate()
        .map(|(mi, &(n, tau))| {
            let lambda0 = conv.unperturbed_rate(n);
            let records = times
                .iter()
                .enumerate()
                .map(|(ti, &t)| {
                    let col = |c: usize| per_path.iter().map(|p| p[mi][ti][c]).collect::<Vec<_>>();
                    let (j, f, corr) = (col(0), col(1), col(2));
                    let telescoping = per_path
                        .iter()
                        .map(|p| (p[mi][ti][1] - p[mi][ti][0] - p[mi][ti][2]).norm())
                        .fold(0.0, f64::max);
                    let phase_deviation = j.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
                    Ok(FlowRecord {
                        t,
                        unperturbed: mean_stderr(&j)?,
                        magnetic: mean_stderr(&f)?,
                        correction: mean_stderr(&corr)?,
                        unperturbed_reference: Complex64::new((t * lambda0).exp(), 0.0),
                        magnetic_reference: magnetic_mean_closed_form(Complex64::new(lambda0, 0.0), tau, t),
                        telescoping,
                        phase_deviation,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FlowEnsemble { mode: n, tau, lambda0, n_paths: ens.n_paths, dt: ens.dt, records })
        })
        .collect()
}

/// Ensemble mean of [`flow_homomorphic`] at time `t`.
pub fn homomorphic_mean(
    ens: &BrownianEnsemble,
    n: Mode,
    lambda: Complex64,
    conv: PhaseConvention,
    t: f64,
) -> Result<Estimate> {
    let k = step_at(ens.dt, ens.steps, t)?;
    let values = ens.map(|p| flow_homomorphic(n, lambda, p, conv)[k]);
    mean_stderr(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::brownian::sample_brownian;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_mode_is_constant() {
        let p = BrownianPath::generate(0.01, 30, 1, 0);
        assert!(flow_unperturbed((0, 0), &p, PhaseConvention::Natural).iter().all(|&z| z == c(1.0)));
    }

    #[test]
    fn zero_rate_reduces_to_unperturbed() {
        let p = BrownianPath::generate(0.01, 100, 2, 0);
        let s = flow_with_rate((1, 2), c(0.0), &p, PhaseConvention::Natural);
        let j = flow_unperturbed((1, 2), &p, PhaseConvention::Natural);
        assert!(s.correction.iter().all(|&z| z == c(0.0)));
        for (f, j) in s.magnetic.iter().zip(&j) {
            assert!((f - j).norm() < 1e-13);
        }
    }

    #[test]
    fn telescoping_and_unit_phase_per_path() {
        let cfg = GaugeConfig::new(0.3).with_beta([0.25, 0.5]);
        for i in 0..20 {
            let p = BrownianPath::generate(1e-3, 1000, 4, i);
            let s = flow_magnetic((2, 1), &cfg, &p, PhaseConvention::Natural);
            assert!(s.telescoping_deviation() < 1e-12);
            assert!(s.phase_deviation() < 1e-14);
        }
    }

    #[test]
    fn path_level_homomorphism() {
        let p = BrownianPath::generate(1e-2, 50, 9, 3);
        for conv in [PhaseConvention::Natural, PhaseConvention::TwoPi] {
            let a = flow_unperturbed((1, -2), &p, conv);
            let b = flow_unperturbed((3, 1), &p, conv);
            let ab = flow_unperturbed((4, -1), &p, conv);
            for k in 0..=p.steps {
                assert!((a[k] * b[k] - ab[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unperturbed_mean_matches_gaussian_oracle() {
        let ens = sample_brownian(0.1, 5, 100_000, 17).unwrap();
        let recs = simulate_flows(&ens, &[((1, 0), c(0.0)), ((1, 1), c(0.0))], PhaseConvention::Natural, &[0.5]).unwrap();
        assert!(recs[0].records[0].unperturbed.sigmas_from(c((-0.25f64).exp())) < 3.0);
        assert!(recs[1].records[0].unperturbed.sigmas_from(c((-0.5f64).exp())) < 3.0);
    }

    #[test]
    fn vacuum_expectation_examples() {
        let ones = vec![
            FlowSample {
                mode: (0, 0),
                dt: 0.1,
                tau: c(0.0),
                path_values: vec![c(1.0); 4],
                correction: vec![c(0.0); 4],
                magnetic: vec![c(1.0); 4],
            };
            5
        ];
        let e = vacuum_expectation(&ones, 0.2).unwrap();
        assert_eq!((e.mean, e.stderr), (c(1.0), 0.0));
        assert!(matches!(vacuum_expectation(&[], 0.1), Err(Error::EmptyEnsemble)));
        assert!(vacuum_expectation(&ones, 0.15).is_err());

        let ens = sample_brownian(0.1, 3, 100_000, 23).unwrap();
        let samples = ens.map(|p| flow_with_rate((2, 1), c(0.0), p, PhaseConvention::Natural));
        let e = vacuum_expectation(&samples, 0.3).unwrap();
        assert!(e.sigmas_from(c((-0.75f64).exp())) < 3.0, "{e:?}");
    }

    #[test]
    fn magnetic_mean_matches_closed_form() {
        let cfg = GaugeConfig::new(0.3).with_beta([0.25, 0.5]);
        let n = (1, 0);
        let tau = t0_symbol(&cfg, n);
        let ens = sample_brownian(1e-3, 500, 20_000, 29).unwrap();
        let recs = simulate_flows(&ens, &[(n, tau)], PhaseConvention::Natural, &[0.25, 0.5]).unwrap();
        for r in &recs[0].records {
            assert!(r.magnetic.sigmas_from(r.magnetic_reference) < 3.0, "{r:?}");
            let gap = r.magnetic.mean - r.unperturbed.mean - r.correction.mean;
            assert!(gap.norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_limits() {
        let l = c(-0.5);
        assert!((magnetic_mean_closed_form(l, c(0.0), 1.3) - (l * 1.3).exp()).norm() < 1e-15);
        let near = magnetic_mean_closed_form(l, l + 1e-7, 0.7);
        let at = magnetic_mean_closed_form(l, l, 0.7);
        assert!((near - at).norm() < 1e-6);
    }

    #[test]
    fn euler_mean_differences_halve_with_dt() {
        let (n, tau, t) = ((1, 0), c(-2.0), 0.8);
        let fine = sample_brownian(0.005, 160, 2000, 31).unwrap();
        let means: Vec<Complex64> = [4usize, 2, 1]
            .iter()
            .map(|&f| {
                let vals = fine.map(|p| {
                    let q = p.coarsen(f).unwrap();
                    flow_with_rate(n, tau, &q, PhaseConvention::Natural).magnetic[step_at(q.dt, q.steps, t).unwrap()]
                });
                mean_stderr(&vals).unwrap().mean
            })
            .collect();
        let ratio = (means[0] - means[1]).norm() / (means[1] - means[2]).norm();
        assert!((1.6..2.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn homomorphic_mean_is_exponential() {
        let ens = sample_brownian(1e-3, 500, 20_000, 37).unwrap();
        let lam = c(-1.7);
        let e = homomorphic_mean(&ens, (1, 1), lam, PhaseConvention::Natural, 0.5).unwrap();
        assert!(e.sigmas_from((lam * 0.5).exp()) < 3.0, "{e:?}");
    }

    #[test]
    fn two_pi_convention_rescales_time() {
        let ens = sample_brownian(0.01, 2, 100_000, 41).unwrap();
        let recs = simulate_flows(&ens, &[((1, 0), c(0.0))], PhaseConvention::TwoPi, &[0.02]).unwrap();
        let expect = (-2.0 * PI * PI * 0.02f64).exp();
        assert!(recs[0].records[0].unperturbed.sigmas_from(c(expect)) < 3.0);
    }
}
