//! Magnetic Dirac operators on spinors over the lattice window.
//!
//! Spinor vectors store the upper component on the first copy of the
//! window and the lower component on the second.

use num_complex::Complex64;

use super::laplacian::{derivation, inner_derivation, multiplication};
use super::matrix::MatrixOperator;
use super::sparse::SparseMatrix;
use super::window::LatticeWindow;
use crate::algebra::{Direction, TorusElement};
use crate::error::{invalid, Error, Result};
use crate::gauge::{gauge_shift, GaugeConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Off-diagonal block operator `[[0, A], [B, 0]]` with grading `diag(I, -I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracOperator {
    op: MatrixOperator,
    reach: usize,
}

impl DiracOperator {
    pub fn operator(&self) -> &MatrixOperator {
        &self.op
    }

    pub fn matrix(&self) -> &SparseMatrix {
        self.op.matrix()
    }

    pub fn window(&self) -> LatticeWindow {
        self.op.window()
    }

    pub fn is_hermitian(&self) -> bool {
        self.op.is_hermitian()
    }

    /// Largest mode shift of any block entry.
    pub fn reach(&self) -> usize {
        self.reach
    }

    /// Upper-right block `A`.
    pub fn upper(&self) -> SparseMatrix {
        self.matrix().block(2, 0, 1)
    }

    /// Lower-left block `B`.
    pub fn lower(&self) -> SparseMatrix {
        self.matrix().block(2, 1, 0)
    }

    pub fn grading(&self) -> SparseMatrix {
        grading(&self.window())
    }

    /// `Gamma D + D Gamma`, zero by construction.
    pub fn grading_anticommutator(&self) -> SparseMatrix {
        let g = self.grading();
        let d = self.matrix();
        g.mul(d).unwrap().add(&d.mul(&g).unwrap()).unwrap()
    }

    /// Matrix square `D^2` of the truncated operator.
    pub fn square(&self) -> SparseMatrix {
        self.matrix().mul(self.matrix()).unwrap()
    }
}

pub fn grading(w: &LatticeWindow) -> SparseMatrix {
    let n = w.dim();
    SparseMatrix::diagonal((0..2 * n).map(|i| Complex64::new(if i < n { 1.0 } else { -1.0 }, 0.0)))
}

fn spinor(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let z = SparseMatrix::zeros(a.dim());
    SparseMatrix::block2(&z, a, b, &z).unwrap()
}

/// `D^m_0 = [[0, d^m_1 + i d^m_2], [d^m_1 - i d^m_2, 0]]`, plus the blocks
/// `d_r` and `d_{r^*}` when `r` is given, with `d^m_j = d_j - c_j`.
pub fn assemble_dirac(cfg: &GaugeConfig, r: Option<&TorusElement>, w: &LatticeWindow) -> Result<DiracOperator> {
    cfg.validate()?;
    let n = w.dim();
    let dm = Direction::BOTH.map(|j| derivation(j, w).add(&SparseMatrix::scalar(n, -gauge_shift(cfg, j))).unwrap());
    let mut a = dm[0].add_scaled(&dm[1], I).unwrap();
    let mut b = dm[0].add_scaled(&dm[1], -I).unwrap();
    let mut reach = 0;
    if let Some(r) = r {
        if r.theta() != cfg.theta {
            return Err(Error::ThetaMismatch(cfg.theta, r.theta()));
        }
        a = a.add(&inner_derivation(r, w)).unwrap();
        b = b.add(&inner_derivation(&r.adjoint(), w)).unwrap();
        reach = r.support_radius() as usize;
    }
    let op = MatrixOperator::new(spinor(&a, &b), *w)?;
    Ok(DiracOperator { op, reach })
}

/// Constant block `D^m_0 - D_0 = -[[0, c_1 + i c_2], [c_1 - i c_2, 0]]`.
pub fn gauge_block(cfg: &GaugeConfig, w: &LatticeWindow) -> SparseMatrix {
    let n = w.dim();
    let (c1, c2) = (gauge_shift(cfg, Direction::One), gauge_shift(cfg, Direction::Two));
    spinor(&SparseMatrix::scalar(n, -(c1 + I * c2)), &SparseMatrix::scalar(n, -(c1 - I * c2)))
}

/// `x (x) I` on the spinor space of `w`.
pub fn element_on_spinors(x: &TorusElement, w: &LatticeWindow) -> SparseMatrix {
    let m = multiplication(x, w, true);
    let z = SparseMatrix::zeros(w.dim());
    SparseMatrix::block2(&m, &z, &z, &m).unwrap()
}

fn spinor_embedding(inner: &LatticeWindow, outer: &LatticeWindow) -> Result<Vec<usize>> {
    let e = inner.embedding_into(outer)?;
    let n = outer.dim();
    Ok(e.iter().copied().chain(e.iter().map(|i| i + n)).collect())
}

/// `[D, x (x) I]` restricted to `w`; `D` must live on a window at least
/// `reach(D) + radius(x)` wider than `w` so that every entry is exact.
pub fn commutator_with_element(d: &DiracOperator, x: &TorusElement, w: &LatticeWindow) -> Result<MatrixOperator> {
    let outer = d.window();
    let need = w.half_width() + d.reach() + x.support_radius() as usize;
    if outer.half_width() < need {
        return Err(invalid(format!(
            "operator window half-width {} is below the {} needed for an exact commutator",
            outer.half_width(),
            need
        )));
    }
    let xm = element_on_spinors(x, &outer);
    let comm = d.matrix().commutator(&xm)?;
    MatrixOperator::new(comm.restrict(&spinor_embedding(w, &outer)?), *w)
}

/// Represented one-form `[D, x] + G`: the commutator plus the constant gauge
/// block. The gauge block itself commutes with `x`, so `[D^m, x] = [D, x]`.
pub fn magnetic_one_form(
    cfg: &GaugeConfig,
    d: &DiracOperator,
    x: &TorusElement,
    w: &LatticeWindow,
) -> Result<MatrixOperator> {
    let c = commutator_with_element(d, x, w)?;
    MatrixOperator::new(c.matrix().add(&gauge_block(cfg, w))?, *w)
}
