use std::io::{self, Write};

use num_complex::Complex64;

use super::sparse::SparseMatrix;
use super::window::LatticeWindow;
use crate::algebra::{Mode, TorusElement};
use crate::error::{invalid, Result};
use crate::format::fmt_real;

/// Largest `max |M - M^H|` for which an operator is flagged hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Truncation of an operator on `L^2(phi)` to a lattice window.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixOperator {
    matrix: SparseMatrix,
    hermitian: bool,
    window: LatticeWindow,
}

impl MatrixOperator {
    /// Wraps a matrix acting on one (scalar) or two (spinor) copies of the
    /// window; the hermitian flag is set when `max |M - M^H| <= 1e-12`.
    pub fn new(matrix: SparseMatrix, window: LatticeWindow) -> Result<Self> {
        if matrix.dim() != window.dim() && matrix.dim() != 2 * window.dim() {
            return Err(invalid(format!(
                "matrix dimension {} does not match window dimension {}",
                matrix.dim(),
                window.dim()
            )));
        }
        let hermitian = matrix.hermitian_deviation() <= HERMITIAN_TOL;
        Ok(MatrixOperator { matrix, hermitian, window })
    }

    /// Number of window copies: 1 for scalar, 2 for spinor operators.
    pub fn components(&self) -> usize {
        self.matrix.dim() / self.window.dim()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SparseMatrix {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn window(&self) -> LatticeWindow {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Matrix entry between two window modes of a scalar operator.
    pub fn entry(&self, row: Mode, col: Mode) -> Complex64 {
        match (self.window.index(row), self.window.index(col)) {
            (Some(i), Some(j)) => self.matrix.get(i, j),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Applies a scalar operator to the window part of `a`.
    pub fn apply_element(&self, a: &TorusElement) -> TorusElement {
        assert_eq!(self.components(), 1, "apply_element needs a scalar operator");
        let v = element_to_vector(a, &self.window);
        vector_to_element(a.theta(), &self.matrix.apply(&v), &self.window)
    }

    /// CSV dump of nonzero `(row, col, re, im)` triplets, lexicographic.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "row,col,re,im")?;
        for (i, j, v) in self.matrix.triplets() {
            writeln!(out, "{i},{j},{},{}", fmt_real(v.re), fmt_real(v.im))?;
        }
        Ok(())
    }

    /// Little-endian binary dump: `dim: u64`, `nnz: u64`, then
    /// `(row: u64, col: u64, re: f64, im: f64)` per nonzero entry.
    pub fn write_binary<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(&(self.dim() as u64).to_le_bytes())?;
        out.write_all(&(self.matrix.nnz() as u64).to_le_bytes())?;
        for (i, j, v) in self.matrix.triplets() {
            out.write_all(&(i as u64).to_le_bytes())?;
            out.write_all(&(j as u64).to_le_bytes())?;
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Coefficient vector of `a` on the window; modes outside are dropped.
pub fn element_to_vector(a: &TorusElement, w: &LatticeWindow) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); w.dim()];
    for (n, c) in a.terms() {
        if let Some(i) = w.index(n) {
            v[i] = c;
        }
    }
    v
}

pub fn vector_to_element(theta: f64, v: &[Complex64], w: &LatticeWindow) -> TorusElement {
    TorusElement::from_terms(theta, v.iter().enumerate().map(|(i, &c)| (w.mode(i), c)))
}
