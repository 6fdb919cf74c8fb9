//! Scalar-mode moments and variance of the perturbed flow.
//!
//! On a fixed eigenmode `L^m` acts as a number `lambda`, and the moment
//! recursion `E h^(r)_t = E h_0 + int_0^t E h^(r-1)_s(L^m x) ds` becomes
//! `h_r(t) = 1 + lambda int_0^t h_{r-1}(s) ds`. The first moment is the fixed
//! point of that map, i.e. the solution of `h' = lambda h`, integrated by RK4;
//! higher orders apply the map by cumulative Simpson quadrature.

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Subintervals of `[0, t]` used by the quadrature.
pub const QUADRATURE_INTERVALS: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub order: usize,
    pub lambda: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Closed form `exp(t lambda)`, the value of every order.
    pub reference: Vec<f64>,
    /// `|value(M) - value(M / 2)|`, an estimate of the quadrature error.
    pub quadrature_error: Vec<f64>,
    /// Standard errors when the values come from sampling.
    pub mc_stderr: Option<Vec<f64>>,
}

/// `int_0^{s_k} f` at every node of a uniform grid of spacing `h`. Even nodes
/// use composite Simpson; odd nodes add a three-point end correction.
fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let m = f.len() - 1;
    let mut out = vec![0.0; m + 1];
    for k in (2..=m).step_by(2) {
        out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    }
    for k in (1..=m).step_by(2) {
        let last = if k < m {
            h / 12.0 * (5.0 * f[k - 1] + 8.0 * f[k] - f[k + 1])
        } else {
            h / 12.0 * (-f[k - 2] + 8.0 * f[k - 1] + 5.0 * f[k])
        };
        out[k] = out[k - 1] + last;
    }
    out
}

fn recursion_step(prev: &[f64], lambda: f64, h: f64) -> Vec<f64> {
    cumulative_simpson(prev, h).into_iter().map(|i| 1.0 + lambda * i).collect()
}

fn first_moment(lambda: f64, t: f64, m: usize) -> Vec<f64> {
    let h = t / m as f64;
    let z = lambda * h;
    let growth = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
    let mut out = Vec::with_capacity(m + 1);
    let mut y = 1.0;
    out.push(y);
    for _ in 0..m {
        y *= growth;
        out.push(y);
    }
    out
}

/// Order-`order` moment on the nodes of `[0, t]` with `m` subintervals.
fn moment_on_grid(order: usize, lambda: f64, t: f64, m: usize) -> Vec<f64> {
    let h = t / m as f64;
    let mut cur = first_moment(lambda, t, m);
    for _ in 1..order {
        cur = recursion_step(&cur, lambda, h);
    }
    cur
}

fn check_times(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(invalid("t_grid is empty"));
    }
    if t_grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(invalid("moment times must be non-negative"));
    }
    Ok(())
}

fn moment_at(order: usize, lambda: f64, t: f64) -> Result<(f64, f64)> {
    if t == 0.0 {
        return Ok((1.0, 0.0));
    }
    let fine = *moment_on_grid(order, lambda, t, QUADRATURE_INTERVALS).last().unwrap();
    let coarse = *moment_on_grid(order, lambda, t, QUADRATURE_INTERVALS / 2).last().unwrap();
    Ok((fine, (fine - coarse).abs()))
}

pub fn moment_recursion(order: usize, lambda: f64, t_grid: &[f64]) -> Result<MomentReport> {
    if order < 1 {
        return Err(invalid("moment order must be at least 1"));
    }
    if !(lambda <= 0.0) {
        return Err(invalid("lambda must be a non-positive eigenvalue"));
    }
    check_times(t_grid)?;
    let mut values = Vec::with_capacity(t_grid.len());
    let mut quadrature_error = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (v, e) = moment_at(order, lambda, t)?;
        values.push(v);
        quadrature_error.push(e);
    }
    Ok(MomentReport {
        order,
        lambda,
        times: t_grid.to_vec(),
        values,
        reference: t_grid.iter().map(|&t| (t * lambda).exp()).collect(),
        quadrature_error,
        mc_stderr: None,
    })
}

/// Variance by two routes, side by side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceReport {
    pub lambda: f64,
    pub times: Vec<f64>,
    /// `E h^(2)_t - (E h^(1)_t)^2` from the quadrature recursion.
    pub recursion: Vec<f64>,
    /// Scalar reading `lambda^-1 e^{t lambda} lambda (1 - e^{-t lambda} - e^{t lambda})`
    /// of the printed variance formula.
    pub printed: Vec<f64>,
    /// `printed - recursion`.
    pub discrepancy: Vec<f64>,
}

pub fn printed_variance(lambda: f64, t: f64) -> f64 {
    let e = (t * lambda).exp();
    (1.0 / lambda) * e * lambda * (1.0 - (-t * lambda).exp() - e)
}

pub fn variance_report(lambda: f64, t_grid: &[f64]) -> Result<VarianceReport> {
    if lambda == 0.0 {
        return Err(Error::NotInvertible("L^m has eigenvalue 0 on this mode".into()));
    }
    let first = moment_recursion(1, lambda, t_grid)?;
    let second = moment_recursion(2, lambda, t_grid)?;
    let recursion: Vec<f64> = second.values.iter().zip(&first.values).map(|(h2, h1)| h2 - h1 * h1).collect();
    let printed: Vec<f64> = t_grid.iter().map(|&t| printed_variance(lambda, t)).collect();
    let discrepancy = printed.iter().zip(&recursion).map(|(p, r)| p - r).collect();
    Ok(VarianceReport { lambda, times: t_grid.to_vec(), recursion, printed, discrepancy })
}

/// `m(y) = y^2 + 2 y (E j_t + 1)`.
pub fn decomposition_m(y: f64, mean_j: f64) -> f64 {
    y * y + 2.0 * y * (mean_j + 1.0)
}

/// `Var h_t = Var j_t - m(G_t(T(x)))`.
pub fn variance_decomposition(var_j: f64, mean_j: f64, correction: f64) -> f64 {
    var_j - decomposition_m(correction, mean_j)
}
