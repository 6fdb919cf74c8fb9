//! Uniform symmetric grids and sampled functions on them.

use std::f64::consts::PI;
use std::io::{self, BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::format::fmt_real;

/// Nodes `(i - M) h` for `i = 0..=2M` along each of `dim` axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub half_points: usize,
    pub spacing: f64,
}

impl Grid {
    pub fn new(dim: usize, half_points: usize, spacing: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(invalid(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if half_points == 0 || !(spacing > 0.0 && spacing.is_finite()) {
            return Err(invalid("grid needs at least one half point and a positive spacing"));
        }
        Ok(Grid { dim, half_points, spacing })
    }

    /// Grid of total extent `extent` (from `-extent/2` to `extent/2`).
    pub fn with_extent(dim: usize, extent: f64, spacing: f64) -> Result<Self> {
        let m = (extent / (2.0 * spacing)).round();
        if !(m >= 1.0) {
            return Err(invalid("extent must cover at least one spacing"));
        }
        Self::new(dim, m as usize, spacing)
    }

    /// Points per axis.
    pub fn side(&self) -> usize {
        2 * self.half_points + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extent(&self) -> f64 {
        2.0 * self.half_points as f64 * self.spacing
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.half_points as f64) * self.spacing
    }

    /// Coordinates of flat index `k` (row-major, last axis fastest).
    pub fn point(&self, k: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.node(k), 0.0],
            _ => [self.node(k / self.side()), self.node(k % self.side())],
        }
    }

    /// Per-axis indices of flat index `k`.
    pub fn indices(&self, k: usize) -> [usize; 2] {
        match self.dim {
            1 => [k, 0],
            _ => [k / self.side(), k % self.side()],
        }
    }

    pub fn flat(&self, idx: [usize; 2]) -> usize {
        match self.dim {
            1 => idx[0],
            _ => idx[0] * self.side() + idx[1],
        }
    }

    /// Volume element `h^dim`.
    pub fn cell(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Reciprocal grid with spacing `2 pi / (side h)`, on which the
    /// trapezoid Fourier sums are exactly invertible.
    pub fn dual(&self) -> Self {
        Grid { spacing: 2.0 * PI / (self.side() as f64 * self.spacing), ..*self }
    }

    /// Whether flat index `k` lies in the outermost 5% of some axis.
    pub fn is_boundary(&self, k: usize) -> bool {
        let m = self.half_points as f64;
        let idx = self.indices(k);
        idx[..self.dim].iter().any(|&i| (i as f64 - m).abs() > 0.95 * m)
    }
}

/// Complex samples on a grid, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples for a grid of {} points", values.len(), grid.len())));
        }
        Ok(SampledFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.point(k))).collect();
        SampledFunction { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledFunction { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `|g| < 1e-8 max |g|` on the outermost 5% of the grid.
    pub fn decays(&self) -> bool {
        let bound = 1e-8 * self.max_abs();
        (0..self.grid.len()).filter(|&k| self.grid.is_boundary(k)).all(|k| self.values[k].norm() <= bound)
    }

    /// Trapezoid (here: plain Riemann) sum `h^dim sum g`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)))
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        SampledFunction { grid: self.grid, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(SampledFunction { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    /// CSV with a `# dim=..,half_points=..,spacing=..` header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let g = &self.grid;
        writeln!(out, "# dim={},half_points={},spacing={}", g.dim, g.half_points, fmt_real(g.spacing))?;
        if g.dim == 1 {
            writeln!(out, "u,re,im")?;
        } else {
            writeln!(out, "u1,u2,re,im")?;
        }
        for (k, v) in self.values.iter().enumerate() {
            let p = g.point(k);
            if g.dim == 1 {
                writeln!(out, "{},{},{}", fmt_real(p[0]), fmt_real(v.re), fmt_real(v.im))?;
            } else {
                writeln!(out, "{},{},{},{}", fmt_real(p[0]), fmt_real(p[1]), fmt_real(v.re), fmt_real(v.im))?;
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let mut next = || -> Result<String> {
            lines.next().ok_or_else(|| invalid("unexpected end of sampled-function CSV"))?.map_err(|e| invalid(e.to_string()))
        };
        let header = next()?;
        let fields = header.strip_prefix("# ").ok_or_else(|| invalid("missing grid header line"))?;
        let (mut dim, mut m, mut h) = (None, None, None);
        for kv in fields.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(|| invalid(format!("bad header field {kv:?}")))?;
            let bad = |_| invalid(format!("bad value in header field {kv:?}"));
            match k {
                "dim" => dim = Some(v.parse::<usize>().map_err(bad)?),
                "half_points" => m = Some(v.parse::<usize>().map_err(bad)?),
                "spacing" => h = Some(v.parse::<f64>().map_err(|_| invalid(format!("bad spacing {v:?}")))?),
                _ => return Err(invalid(format!("unknown header field {k:?}"))),
            }
        }
        let grid = Grid::new(
            dim.ok_or_else(|| invalid("header lacks dim"))?,
            m.ok_or_else(|| invalid("header lacks half_points"))?,
            h.ok_or_else(|| invalid("header lacks spacing"))?,
        )?;
        next()?;
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let line = next()?;
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| invalid(format!("bad number in {line:?}"))))
                .collect::<Result<_>>()?;
            if cols.len() != grid.dim + 2 {
                return Err(invalid(format!("expected {} columns in {line:?}", grid.dim + 2)));
            }
            values.push(Complex64::new(cols[grid.dim], cols[grid.dim + 1]));
        }
        SampledFunction::new(grid, values)
    }
}

/// `exp(-|u|^2 / (2 s^2))`.
pub fn gaussian(grid: Grid, width: f64) -> SampledFunction {
    SampledFunction::from_fn(grid, |u| Complex64::new((-(u[0] * u[0] + u[1] * u[1]) / (2.0 * width * width)).exp(), 0.0))
}

/// `exp(-1 / (1 - |u|^2 / R^2))` inside the ball of radius `R`, zero outside.
pub fn bump(grid: Grid, radius: f64) -> SampledFunction {
    SampledFunction::from_fn(grid, |u| {
        let r2 = (u[0] * u[0] + u[1] * u[1]) / (radius * radius);
        Complex64::new(if r2 < 1.0 { (-1.0 / (1.0 - r2)).exp() } else { 0.0 }, 0.0)
    })
}
