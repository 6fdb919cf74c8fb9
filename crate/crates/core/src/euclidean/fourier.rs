//! Fourier transform `g^(e) = (2 pi)^{-n/2} int exp(i <e, u>) g(u) du` on an
//! `n`-dimensional grid, twisted convolution and the trace `phi`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{Grid, SampledFunction};
use crate::error::{invalid, Result};

/// A transform together with the decay check of its input.
#[derive(Clone, Debug, PartialEq)]
pub struct Transform {
    pub function: SampledFunction,
    /// Set when the input does not decay at the grid boundary.
    pub decay_warning: bool,
}

/// One-dimensional phase table `exp(i sign e_j u_l)`.
fn phase_table(from: &Grid, to: &Grid, sign: f64) -> Vec<Complex64> {
    let n = from.side();
    let mut t = Vec::with_capacity(to.side() * n);
    for j in 0..to.side() {
        let e = to.node(j);
        for l in 0..n {
            t.push(Complex64::from_polar(1.0, sign * e * from.node(l)));
        }
    }
    t
}

/// Separable trapezoid sum `sum_u exp(i sign <e, u>) g(u)` onto `to`.
fn separable_sum(g: &SampledFunction, to: &Grid, sign: f64) -> Vec<Complex64> {
    let from = &g.grid;
    let (n, m) = (from.side(), to.side());
    let table = phase_table(from, to, sign);
    let apply = |row: &[Complex64], j: usize| -> Complex64 {
        table[j * n..(j + 1) * n].iter().zip(row).map(|(p, v)| p * v).sum()
    };
    match from.dim {
        1 => (0..m).into_par_iter().map(|j| apply(&g.values, j)).collect(),
        _ => {
            // Last axis first, then the leading one.
            let partial: Vec<Vec<Complex64>> = g
                .values
                .par_chunks(n)
                .map(|row| (0..m).map(|j| apply(row, j)).collect())
                .collect();
            let columns: Vec<Vec<Complex64>> = (0..m)
                .into_par_iter()
                .map(|j2| {
                    let col: Vec<Complex64> = partial.iter().map(|r| r[j2]).collect();
                    (0..m).map(|j1| apply(&col, j1)).collect()
                })
                .collect();
            let mut out = vec![Complex64::new(0.0, 0.0); m * m];
            for (j2, col) in columns.into_iter().enumerate() {
                for (j1, v) in col.into_iter().enumerate() {
                    out[j1 * m + j2] = v;
                }
            }
            out
        }
    }
}

fn check_target(g: &SampledFunction, to: &Grid) -> Result<()> {
    if to.dim != g.grid.dim {
        return Err(invalid("transform target grid has a different dimension"));
    }
    Ok(())
}

/// Normalization `(2 pi)^{-dim/2}`.
fn norm(dim: usize) -> f64 {
    (2.0 * PI).powf(-(dim as f64) / 2.0)
}

/// Transform onto an explicit frequency grid.
pub fn fourier_transform_on(g: &SampledFunction, to: &Grid) -> Result<Transform> {
    check_target(g, to)?;
    let c = norm(g.grid.dim) * g.grid.cell();
    let values = separable_sum(g, to, 1.0).into_iter().map(|v| v * c).collect();
    Ok(Transform { function: SampledFunction { grid: *to, values }, decay_warning: !g.decays() })
}

/// Transform onto the reciprocal grid [`Grid::dual`].
pub fn fourier_transform(g: &SampledFunction) -> Transform {
    fourier_transform_on(g, &g.grid.dual()).expect("dual grid has the same dimension")
}

/// `g(u) = (2 pi)^{-n/2} int exp(-i <e, u>) g^(e) de`, onto `to`.
pub fn inverse_fourier_transform_on(ghat: &SampledFunction, to: &Grid) -> Result<SampledFunction> {
    check_target(ghat, to)?;
    let c = norm(ghat.grid.dim) * ghat.grid.cell();
    let values = separable_sum(ghat, to, -1.0).into_iter().map(|v| v * c).collect();
    Ok(SampledFunction { grid: *to, values })
}

pub fn inverse_fourier_transform(ghat: &SampledFunction) -> SampledFunction {
    inverse_fourier_transform_on(ghat, &ghat.grid.dual()).expect("dual grid has the same dimension")
}

/// Value of the transform at the origin, `(2 pi)^{-n/2} int g`.
pub fn transform_at_origin(g: &SampledFunction) -> Complex64 {
    g.integral() * norm(g.grid.dim)
}

/// `f(u, v) = u_1 v_2 - u_2 v_1`.
pub fn symplectic_form(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// `(a * b)(u) = int a(u - v) b(v) exp((i/2) f(u, v)) dv` on one grid of the
/// Fourier side; samples of `u - v` outside the grid count as zero.
pub fn twisted_convolve_hat(a: &SampledFunction, b: &SampledFunction) -> Result<SampledFunction> {
    a.check_grid(b)?;
    let grid = a.grid;
    if grid.dim != 2 {
        return Err(invalid("the twisted product lives on a 2-dimensional phase space"));
    }
    let side = grid.side() as isize;
    let m = grid.half_points as isize;
    let cell = grid.cell();
    let support: Vec<(usize, [isize; 2], [f64; 2], Complex64)> = (0..grid.len())
        .filter(|&k| b.values[k] != Complex64::new(0.0, 0.0))
        .map(|k| {
            let idx = grid.indices(k);
            (k, [idx[0] as isize, idx[1] as isize], grid.point(k), b.values[k])
        })
        .collect();
    let values = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let ui = grid.indices(k);
            let u = grid.point(k);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(_, vi, v, bv) in &support {
                let d0 = ui[0] as isize - vi[0];
                let d1 = ui[1] as isize - vi[1];
                // Index of u - v, shifted back to the grid origin.
                let (i0, i1) = (d0 + m, d1 + m);
                if i0 < 0 || i1 < 0 || i0 >= side || i1 >= side {
                    continue;
                }
                let av = a.values[grid.flat([i0 as usize, i1 as usize])];
                acc += av * bv * Complex64::from_polar(1.0, 0.5 * symplectic_form(u, v));
            }
            acc * cell
        })
        .collect();
    Ok(SampledFunction { grid, values })
}

/// `g (.) h` in position space: transform, twisted convolution of the
/// transforms, inverse transform back onto the grid of `g`.
pub fn twisted_convolve(g: &SampledFunction, h: &SampledFunction) -> Result<SampledFunction> {
    g.check_grid(h)?;
    let gh = twisted_convolve_hat(&fourier_transform(g).function, &fourier_transform(h).function)?;
    inverse_fourier_transform_on(&gh, &g.grid)
}

/// `g^N(u) = conj(g(-u))`, by index reversal.
pub fn involution(g: &SampledFunction) -> SampledFunction {
    let grid = g.grid;
    let last = grid.side() - 1;
    let values = (0..grid.len())
        .map(|k| {
            let idx = grid.indices(k);
            let mirrored = match grid.dim {
                1 => [last - idx[0], 0],
                _ => [last - idx[0], last - idx[1]],
            };
            g.values[grid.flat(mirrored)].conj()
        })
        .collect();
    SampledFunction { grid, values }
}

/// `phi(a(g)) = (2 pi)^{-d} int g` on `R^{2d}`, i.e. `(2 pi)^{-dim/2} int g`.
pub fn phi_trace_euclidean(g: &SampledFunction) -> Complex64 {
    transform_at_origin(g)
}
