//! Trace of `M_g T^m_t` on `R^2`: the closed form against grid quadrature
//! of the kernel diagonal.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fourier::transform_at_origin;
use super::grid::{Grid, SampledFunction};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagneticHeatParams {
    pub g1: f64,
    pub g2: f64,
    pub t: f64,
    #[serde(default = "one")]
    pub d: usize,
}

fn one() -> usize {
    1
}

impl MagneticHeatParams {
    pub fn new(g1: f64, g2: f64, t: f64) -> Self {
        MagneticHeatParams { g1, g2, t, d: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(invalid("t must be positive"));
        }
        if self.d != 1 {
            return Err(invalid("only d = 1 is implemented"));
        }
        if !(self.g1.is_finite() && self.g2.is_finite()) {
            return Err(invalid("G must be finite"));
        }
        Ok(())
    }

    /// `tau = pi i G_1 / 2 - pi i G_2`.
    pub fn tau(&self) -> Complex64 {
        Complex64::new(0.0, 0.5 * PI * self.g1 - PI * self.g2)
    }

    /// `sigma = pi i G_2 / 2 - pi i G_1`.
    pub fn sigma(&self) -> Complex64 {
        Complex64::new(0.0, 0.5 * PI * self.g2 - PI * self.g1)
    }

    /// `w(u) = (u_1 + tau)^2 + (u_2 + sigma)^2 - sigma^2 - tau^2 + 4 pi^2 G_1 G_2`,
    /// so that `K(u, u) = g^(0) exp(-(t/2) w(u))`.
    pub fn symbol(&self, u: [f64; 2]) -> Complex64 {
        let (s, ta) = (self.sigma(), self.tau());
        (u[0] + ta).powu(2) + (u[1] + s).powu(2) - s * s - ta * ta + 4.0 * PI * PI * self.g1 * self.g2
    }

    /// `f(G_1, G_2) = exp((t/2)(4 pi^2 G_1 G_2 + sigma^2 + tau^2))` as printed.
    pub fn printed_factor(&self) -> Complex64 {
        let (s, ta) = (self.sigma(), self.tau());
        ((4.0 * PI * PI * self.g1 * self.g2 + s * s + ta * ta) * (self.t / 2.0)).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MagneticHeatTrace {
    /// `g^(0) exp(-2 t pi^2 G_1 G_2) exp((t/2)(sigma^2 + tau^2)) (2 pi / t)`.
    pub analytic: f64,
    /// Grid integral of `K(u, u)`.
    pub quadrature: f64,
    /// `(2 pi)^d t^{-d} f(G_1, G_2)`, the stated closed form without `g^(0)`.
    pub printed: f64,
    pub ghat0: f64,
    /// Quadrature grid half extent and spacing.
    pub grid_extent: f64,
    pub grid_spacing: f64,
}

/// Quadrature spacing for the kernel diagonal.
pub const KERNEL_SPACING: f64 = 0.125;

fn real(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > 1e-12 * z.re.abs().max(1.0) {
        return Err(invalid(format!("{what} has imaginary part {}", z.im)));
    }
    Ok(z.re)
}

pub fn magnetic_heat_trace(params: &MagneticHeatParams, g: &SampledFunction) -> Result<MagneticHeatTrace> {
    params.validate()?;
    if g.grid.dim != 2 {
        return Err(invalid("g must be sampled on a 2-dimensional grid for d = 1"));
    }
    let t = params.t;
    let ghat0 = real(transform_at_origin(g), "g^(0)")?;
    let (s, ta) = (params.sigma(), params.tau());
    let gauss = 2.0 * PI / t;
    let exponent = real((s * s + ta * ta) * (t / 2.0), "exponent")? - 2.0 * t * PI * PI * params.g1 * params.g2;
    let analytic = ghat0 * exponent.exp() * gauss;
    let printed = real(params.printed_factor() * gauss, "printed factor")?;

    // exp(-(t/2) r^2) < 1e-17 beyond r^2 = 80 / t; shift by the imaginary offsets.
    let extent = (80.0 / t).sqrt() + 2.0 + s.im.abs() + ta.im.abs();
    let grid = Grid::new(2, (extent / KERNEL_SPACING).ceil() as usize, KERNEL_SPACING)?;
    let side = grid.side();
    let row_sums: Vec<Complex64> = (0..side)
        .into_par_iter()
        .map(|i| {
            (0..side)
                .map(|j| (-params.symbol(grid.point(grid.flat([i, j]))) * (t / 2.0)).exp())
                .sum::<Complex64>()
        })
        .collect();
    let integral = row_sums.into_iter().sum::<Complex64>() * grid.cell();
    let quadrature = real(integral * ghat0, "kernel integral")?;
    Ok(MagneticHeatTrace {
        analytic,
        quadrature,
        printed,
        ghat0,
        grid_extent: grid.half_points as f64 * grid.spacing,
        grid_spacing: grid.spacing,
    })
}
