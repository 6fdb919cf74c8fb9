//! Weyl system `Z_(a, m) g(x) = exp((i/2) a m) exp(i x m) g(x + a)` on
//! `L^2(R)`, built from `X_a g(x) = g(x + a)` and `Y_m g(x) = exp(i x m) g(x)`.

use num_complex::Complex64;

use super::grid::SampledFunction;
use super::fourier::symplectic_form;
use crate::error::{invalid, Result};

/// `Z_u` for `u = (a, m)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylOperator {
    pub shift: f64,
    pub modulation: f64,
}

impl WeylOperator {
    pub fn new(shift: f64, modulation: f64) -> Self {
        WeylOperator { shift, modulation }
    }

    pub fn translation(a: f64) -> Self {
        Self::new(a, 0.0)
    }

    pub fn modulation(m: f64) -> Self {
        Self::new(0.0, m)
    }

    pub fn as_vector(&self) -> [f64; 2] {
        [self.shift, self.modulation]
    }

    /// `Z_u Z_v = Z_{u+v} exp((i/2) f(u, v))`: returns `Z_{u+v}` and the phase.
    pub fn compose(&self, other: &Self) -> (Self, Complex64) {
        let phase = Complex64::from_polar(1.0, 0.5 * symplectic_form(self.as_vector(), other.as_vector()));
        (Self::new(self.shift + other.shift, self.modulation + other.modulation), phase)
    }

    /// `(Z_u g)(x)` for a function given in closed form.
    pub fn apply_fn(&self, g: impl Fn(f64) -> Complex64, x: f64) -> Complex64 {
        let (a, m) = (self.shift, self.modulation);
        Complex64::from_polar(1.0, 0.5 * a * m + x * m) * g(x + a)
    }

    /// `Z_u g` on a 1-dimensional grid; the shift must be a multiple of the
    /// spacing, and samples shifted in from outside the grid are zero.
    pub fn apply(&self, g: &SampledFunction) -> Result<SampledFunction> {
        let grid = g.grid;
        if grid.dim != 1 {
            return Err(invalid("Weyl operators act on 1-dimensional samples"));
        }
        let steps = self.shift / grid.spacing;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(invalid(format!("shift {} is not a multiple of the spacing {}", self.shift, grid.spacing)));
        }
        let s = steps.round() as isize;
        let n = grid.side() as isize;
        let values = (0..grid.side())
            .map(|i| {
                let j = i as isize + s;
                if (0..n).contains(&j) {
                    let x = grid.node(i);
                    Complex64::from_polar(1.0, 0.5 * self.shift * self.modulation + x * self.modulation)
                        * g.values[j as usize]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        SampledFunction::new(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euclidean::grid::{gaussian, Grid};

    fn g(x: f64) -> Complex64 {
        Complex64::new((-(x - 0.3) * (x - 0.3) / 2.0).exp(), 0.2 * x * (-x * x).exp())
    }

    #[test]
    fn weyl_relation_pointwise() {
        let u = WeylOperator::new(0.7, -1.3);
        let v = WeylOperator::new(-0.4, 2.1);
        let (uv, phase) = u.compose(&v);
        for k in -40..=40 {
            let x = k as f64 * 0.1;
            let lhs = u.apply_fn(|y| v.apply_fn(g, y), x);
            let rhs = phase * uv.apply_fn(g, x);
            assert!((lhs - rhs).norm() < 1e-8);
        }
    }

    #[test]
    fn canonical_commutation() {
        // X_a Y_m = exp(i a m) Y_m X_a.
        let (a, m) = (0.9, 1.7);
        let (x_op, y_op) = (WeylOperator::translation(a), WeylOperator::modulation(m));
        for k in -20..=20 {
            let x = k as f64 * 0.2;
            let xy = x_op.apply_fn(|t| y_op.apply_fn(g, t), x);
            let yx = y_op.apply_fn(|t| x_op.apply_fn(g, t), x);
            assert!((xy - Complex64::from_polar(1.0, a * m) * yx).norm() < 1e-12);
        }
    }

    #[test]
    fn weyl_relation_on_grid() {
        let grid = Grid::with_extent(1, 16.0, 1.0 / 32.0).unwrap();
        let f = gaussian(grid, 1.0);
        let u = WeylOperator::new(0.5, 0.8);
        let v = WeylOperator::new(-0.25, -1.1);
        let (uv, phase) = u.compose(&v);
        let lhs = u.apply(&v.apply(&f).unwrap()).unwrap();
        let rhs = uv.apply(&f).unwrap().scale(phase);
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-8);
        assert!(WeylOperator::new(0.01, 0.0).apply(&f).is_err());
    }
}
