//! Lattice matrices of multiplications, derivations and magnetic Laplacians.
//!
//! Products are composed on a padded window and then restricted, so every
//! row of the returned matrix is the exact compression of the infinite
//! operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::MatrixOperator;
use super::sparse::SparseMatrix;
use super::window::LatticeWindow;
use crate::algebra::{canonical_derivation, monomial_product_phase, Direction, TorusElement};
use crate::error::{invalid, Error, Result};
use crate::gauge::{
    gamma_constant, gauge_component, gauge_shift, l0_symbol, l0m_symbol, t0_symbol, GaugeConfig, SymbolMode,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Perturbation pair `(r1, r2)` of the canonical derivations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation(pub TorusElement, pub TorusElement);

impl Perturbation {
    pub fn zero(theta: f64) -> Self {
        Perturbation(TorusElement::zero(theta), TorusElement::zero(theta))
    }

    pub fn get(&self, j: Direction) -> &TorusElement {
        match j {
            Direction::One => &self.0,
            Direction::Two => &self.1,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero() && self.1.is_zero()
    }

    /// Padding needed for exact products: twice the largest mode magnitude.
    pub fn pad(&self) -> usize {
        2 * self.0.support_radius().max(self.1.support_radius()) as usize
    }

    fn check(&self, cfg: &GaugeConfig) -> Result<()> {
        for r in [&self.0, &self.1] {
            if r.theta() != cfg.theta {
                return Err(Error::ThetaMismatch(cfg.theta, r.theta()));
            }
        }
        if cfg.symbol_mode == SymbolMode::Hermitian {
            for (j, r) in [(1, &self.0), (2, &self.1)] {
                if !r.is_self_adjoint(1e-12) {
                    return Err(invalid(format!("perturbation r{j} must be self-adjoint in hermitian mode")));
                }
            }
        }
        Ok(())
    }
}

fn op(m: SparseMatrix, w: LatticeWindow) -> MatrixOperator {
    MatrixOperator::new(m, w).expect("dimension matches window")
}

pub(crate) fn multiplication(r: &TorusElement, w: &LatticeWindow, left: bool) -> SparseMatrix {
    let theta = r.theta();
    let mut t = Vec::with_capacity(w.dim() * r.len());
    for (col, m) in w.modes().enumerate() {
        for (s, c) in r.terms() {
            let target = (s.0 + m.0, s.1 + m.1);
            if let Some(row) = w.index(target) {
                let phase = if left { monomial_product_phase(theta, s, m) } else { monomial_product_phase(theta, m, s) };
                t.push((row, col, c * phase));
            }
        }
    }
    SparseMatrix::from_triplets(w.dim(), t)
}

/// Matrix of `a -> r a`.
pub fn matrix_of_left_mul(r: &TorusElement, w: &LatticeWindow) -> MatrixOperator {
    op(multiplication(r, w, true), *w)
}

/// Matrix of `a -> a r`.
pub fn matrix_of_right_mul(r: &TorusElement, w: &LatticeWindow) -> MatrixOperator {
    op(multiplication(r, w, false), *w)
}

pub(crate) fn derivation(j: Direction, w: &LatticeWindow) -> SparseMatrix {
    SparseMatrix::diagonal(w.modes().map(|n| Complex64::new(j.component(n) as f64, 0.0)))
}

pub(crate) fn inner_derivation(r: &TorusElement, w: &LatticeWindow) -> SparseMatrix {
    multiplication(r, w, true).sub(&multiplication(r, w, false)).expect("same window")
}

/// Diagonal matrix of `d_j`.
pub fn matrix_of_derivation(j: Direction, w: &LatticeWindow) -> MatrixOperator {
    op(derivation(j, w), *w)
}

/// Matrix of `d_r = [r, .]`.
pub fn matrix_of_inner_derivation(r: &TorusElement, w: &LatticeWindow) -> MatrixOperator {
    op(inner_derivation(r, w), *w)
}

fn diagonal_from(w: &LatticeWindow, f: impl Fn((i64, i64)) -> Complex64) -> SparseMatrix {
    SparseMatrix::diagonal(w.modes().map(f))
}

/// Diagonal `L^m_0` with entries `l0m_symbol`.
pub fn assemble_l0m(cfg: &GaugeConfig, w: &LatticeWindow) -> MatrixOperator {
    op(diagonal_from(w, |n| l0m_symbol(cfg, n)), *w)
}

/// Diagonal `L_0` with entries `l0_symbol`.
pub fn assemble_l0(cfg: &GaugeConfig, w: &LatticeWindow) -> MatrixOperator {
    op(diagonal_from(w, |n| l0_symbol(cfg, n)), *w)
}

/// Diagonal `T^0` with entries `t0_symbol`.
pub fn assemble_t0(cfg: &GaugeConfig, w: &LatticeWindow) -> MatrixOperator {
    op(diagonal_from(w, |n| t0_symbol(cfg, n)), *w)
}

/// Building blocks on one (padded) window.
struct Blocks {
    d: [SparseMatrix; 2],
    r: [SparseMatrix; 2],
    c: [Complex64; 2],
    dim: usize,
}

impl Blocks {
    fn new(cfg: &GaugeConfig, r: &Perturbation, w: &LatticeWindow) -> Self {
        Blocks {
            d: Direction::BOTH.map(|j| derivation(j, w)),
            r: Direction::BOTH.map(|j| inner_derivation(r.get(j), w)),
            c: Direction::BOTH.map(|j| gauge_shift(cfg, j)),
            dim: w.dim(),
        }
    }

    fn shift(&self, j: usize) -> SparseMatrix {
        SparseMatrix::scalar(self.dim, -self.c[j])
    }

    /// `d_j - c_j` or `d_j + d_{r_j} - c_j`.
    fn direction(&self, j: usize, perturbed: bool) -> SparseMatrix {
        let mut a = self.d[j].add(&self.shift(j)).unwrap();
        if perturbed {
            a = a.add(&self.r[j]).unwrap();
        }
        a
    }

    /// `sum_{jk} g^{jk} A_j A_k`.
    fn composition(&self, cfg: &GaugeConfig, perturbed: bool) -> SparseMatrix {
        let a = [self.direction(0, perturbed), self.direction(1, perturbed)];
        let mut out = SparseMatrix::zeros(self.dim);
        for j in Direction::BOTH {
            for k in Direction::BOTH {
                let prod = a[j.index()].mul(&a[k.index()]).unwrap();
                out = out.add_scaled(&prod, Complex64::new(cfg.g(j, k), 0.0)).unwrap();
            }
        }
        out
    }
}

pub(crate) fn restrict_to(m: &SparseMatrix, padded: &LatticeWindow, w: &LatticeWindow) -> SparseMatrix {
    m.restrict(&w.embedding_into(padded).expect("padded window contains target"))
}

/// `sum_{jk} g^{jk}(d_j - c_j)(d_k - c_k)` composed from derivation and
/// shift matrices (hermitian mode), or the literal-mode splitting
/// `(d_1^2 + d_2^2)/2 + sum_j(pi i G_j d_j + 2 pi^2 G_j^2)
///  + sum_{j != k} g^{jk}(d_j - c_j)(d_k - c_k) - Gamma`.
pub fn compose_unperturbed(cfg: &GaugeConfig, w: &LatticeWindow) -> MatrixOperator {
    let b = Blocks::new(cfg, &Perturbation::zero(cfg.theta), w);
    let m = match cfg.symbol_mode {
        SymbolMode::Hermitian => b.composition(cfg, false),
        SymbolMode::Literal => {
            let mut m = b.d[0].mul(&b.d[0]).unwrap().add(&b.d[1].mul(&b.d[1]).unwrap()).unwrap().scale(0.5 * ONE);
            for j in Direction::BOTH {
                let gj = gauge_component(cfg, j);
                m = m.add_scaled(&b.d[j.index()], Complex64::new(0.0, PI * gj)).unwrap();
                m = m.add(&SparseMatrix::scalar(b.dim, Complex64::new(2.0 * PI * PI * gj * gj, 0.0))).unwrap();
                let k = j.other();
                let prod = b.direction(j.index(), false).mul(&b.direction(k.index(), false)).unwrap();
                m = m.add_scaled(&prod, Complex64::new(cfg.g(j, k), 0.0)).unwrap();
            }
            m.sub(&SparseMatrix::scalar(b.dim, gamma_constant(cfg))).unwrap()
        }
    };
    op(m, *w)
}

/// Perturbed magnetic Laplacian `L^m = L^m_0 + [C(delta) - C(d)]`, where
/// `C(.) = sum g^{jk}(. - c_j)(. - c_k)` is composed on the padded window.
pub fn assemble_lm(cfg: &GaugeConfig, r: &Perturbation, w: &LatticeWindow) -> Result<MatrixOperator> {
    cfg.validate()?;
    r.check(cfg)?;
    let l0m = assemble_l0m(cfg, w).into_matrix();
    if r.is_zero() {
        return Ok(op(l0m, *w));
    }
    let padded = w.padded(r.pad());
    let b = Blocks::new(cfg, r, &padded);
    let diff = b.composition(cfg, true).sub(&b.composition(cfg, false)).unwrap();
    let mut m = l0m.add(&restrict_to(&diff, &padded, w)).unwrap();
    if cfg.symbol_mode == SymbolMode::Hermitian {
        m = m.add(&m.adjoint()).unwrap().scale(0.5 * ONE);
    }
    Ok(op(m, *w))
}

/// Correction terms of the splitting `L^m = L^m_0 + T^1 + T^2`.
#[derive(Clone, Debug)]
pub struct PerturbationTerms {
    /// `sum g^{jj}(d_{r_j}^2 - 2 c_j d_{r_j}) - sum_{j != k} g^{jk}(c_k d_{r_j} + c_j d_{r_k})`.
    pub t1: MatrixOperator,
    /// `sum g^{jj}(d_{r_j} d_j + d_j d_{r_j}) + sum_{j != k} g^{jk}(d_j d_{r_k} + d_{r_j} d_k + d_{r_j} d_{r_k})`.
    pub t2: MatrixOperator,
    /// `t1 + sum g^{jj} d_{d_j(r_j)}`.
    pub t1_alt: MatrixOperator,
    /// `2 sum g^{jj} d_{r_j} d_j + sum_{j != k} g^{jk}(...)`.
    pub t2_alt: MatrixOperator,
    /// `t1` with the diagonal gauge coefficient `c_j` instead of `2 c_j`.
    pub t1_printed: MatrixOperator,
}

pub fn perturbation_terms(cfg: &GaugeConfig, r: &Perturbation, w: &LatticeWindow) -> Result<PerturbationTerms> {
    cfg.validate()?;
    r.check(cfg)?;
    let padded = w.padded(r.pad());
    let b = Blocks::new(cfg, r, &padded);
    let n = b.dim;
    let g = |j: Direction, k: Direction| Complex64::new(cfg.g(j, k), 0.0);

    let mut t1 = SparseMatrix::zeros(n);
    let mut t1_printed = SparseMatrix::zeros(n);
    let mut t2 = SparseMatrix::zeros(n);
    let mut t2_alt = SparseMatrix::zeros(n);
    let mut dr_sum = SparseMatrix::zeros(n);
    for j in Direction::BOTH {
        let (ji, k) = (j.index(), j.other());
        let ki = k.index();
        let (rj, dj, cj) = (&b.r[ji], &b.d[ji], b.c[ji]);
        let rr = rj.mul(rj).unwrap();
        t1 = t1.add_scaled(&rr.add_scaled(rj, -2.0 * cj).unwrap(), g(j, j)).unwrap();
        t1_printed = t1_printed.add_scaled(&rr.add_scaled(rj, -cj).unwrap(), g(j, j)).unwrap();
        let off = rj.scale(b.c[ki]).add_scaled(&b.r[ki], cj).unwrap();
        t1 = t1.add_scaled(&off, -g(j, k)).unwrap();
        t1_printed = t1_printed.add_scaled(&off, -g(j, k)).unwrap();

        let rd = rj.mul(dj).unwrap();
        let dr = dj.mul(rj).unwrap();
        t2 = t2.add_scaled(&rd.add(&dr).unwrap(), g(j, j)).unwrap();
        t2_alt = t2_alt.add_scaled(&rd, 2.0 * g(j, j)).unwrap();
        let cross = dj
            .mul(&b.r[ki])
            .unwrap()
            .add(&rj.mul(&b.d[ki]).unwrap())
            .unwrap()
            .add(&rj.mul(&b.r[ki]).unwrap())
            .unwrap();
        t2 = t2.add_scaled(&cross, g(j, k)).unwrap();
        t2_alt = t2_alt.add_scaled(&cross, g(j, k)).unwrap();

        let djrj = canonical_derivation(j, r.get(j));
        dr_sum = dr_sum.add_scaled(&inner_derivation(&djrj, &padded), g(j, j)).unwrap();
    }
    let t1_alt = t1.add(&dr_sum).unwrap();
    let restrict = |m: &SparseMatrix| op(restrict_to(m, &padded, w), *w);
    Ok(PerturbationTerms {
        t1: restrict(&t1),
        t2: restrict(&t2),
        t1_alt: restrict(&t1_alt),
        t2_alt: restrict(&t2_alt),
        t1_printed: restrict(&t1_printed),
    })
}

/// `(T^1, T^2)` with `T^1 + T^2 = L^m - L^m_0`.
pub fn assemble_t1_t2(
    cfg: &GaugeConfig,
    r: &Perturbation,
    w: &LatticeWindow,
) -> Result<(MatrixOperator, MatrixOperator)> {
    let terms = perturbation_terms(cfg, r, w)?;
    Ok((terms.t1, terms.t2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{inner_derivation as alg_inner, random_self_adjoint};
    use crate::operators::matrix::vector_to_element;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const THETA: f64 = 0.3;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn x_plus_xstar(eps: f64) -> TorusElement {
        let x = TorusElement::x(THETA);
        x.add(&x.adjoint()).unwrap().scale(c(eps, 0.0))
    }

    fn basis(w: &LatticeWindow, i: usize) -> TorusElement {
        TorusElement::monomial(THETA, w.mode(i), c(1.0, 0.0))
    }

    #[test]
    fn left_mul_examples() {
        let w = LatticeWindow::new(3).unwrap();
        let id = matrix_of_left_mul(&TorusElement::one(THETA), &w);
        assert_eq!(id.matrix(), &SparseMatrix::identity(w.dim()));
        let x = TorusElement::x(THETA);
        let m = matrix_of_left_mul(&x, &w);
        for n in w.modes() {
            let target = (n.0 + 1, n.1);
            if w.contains(target) {
                assert_eq!(m.entry(target, n).norm(), 1.0);
            }
        }
    }

    #[test]
    fn oracle_equivalence_on_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = crate::algebra::random_element(THETA, 4, 2, &mut rng);
        let w = LatticeWindow::new(6).unwrap();
        let left = matrix_of_left_mul(&r, &w);
        let inner = matrix_of_inner_derivation(&r, &w);
        let d1 = matrix_of_derivation(Direction::One, &w);
        for i in 0..w.dim() {
            let n = w.mode(i);
            if !w.is_interior(n, 2) {
                continue;
            }
            let e = basis(&w, i);
            assert!(left.apply_element(&e).max_abs_diff(&r.mul(&e).unwrap()) == 0.0);
            assert!(inner.apply_element(&e).max_abs_diff(&alg_inner(&r, &e).unwrap()) < 1e-15);
            assert_eq!(d1.apply_element(&e), canonical_derivation(Direction::One, &e));
        }
    }

    #[test]
    fn derivation_matrices() {
        let w = LatticeWindow::new(4).unwrap();
        let d1 = matrix_of_derivation(Direction::One, &w);
        let d2 = matrix_of_derivation(Direction::Two, &w);
        assert_eq!(d1.entry((3, -2), (3, -2)), c(3.0, 0.0));
        assert!(d1.is_hermitian());
        assert_eq!(d1.matrix().commutator(d2.matrix()).unwrap().nnz(), 0);
    }

    #[test]
    fn inner_derivation_matrices() {
        let w = LatticeWindow::new(4).unwrap();
        assert_eq!(matrix_of_inner_derivation(&TorusElement::one(THETA), &w).matrix().nnz(), 0);
        let m = matrix_of_inner_derivation(&x_plus_xstar(0.5), &w);
        assert!(m.matrix().hermitian_deviation() <= 1e-12);
        assert!(m.is_hermitian());
    }

    #[test]
    fn l0m_examples() {
        let w = LatticeWindow::new(4).unwrap();
        let l = assemble_l0m(&GaugeConfig::new(THETA), &w);
        for n in w.modes() {
            assert_eq!(l.entry(n, n), c(-0.5 * (n.0 * n.0 + n.1 * n.1) as f64, 0.0));
        }
        let cfg = GaugeConfig::new(THETA).with_beta([0.25, 0.5]);
        let l = assemble_l0m(&cfg, &w);
        let expect = -0.5 * ((1.0 - PI / 2.0).powi(2) + (1.0 - 2.0 * PI * 0.5).powi(2));
        assert!((l.entry((1, 1), (1, 1)).re - expect).abs() < 1e-13);
        assert!(l.is_hermitian());
    }

    #[test]
    fn composition_matches_symbol_formula() {
        let w = LatticeWindow::new(8).unwrap();
        for mode in [SymbolMode::Hermitian, SymbolMode::Literal] {
            let cfg = GaugeConfig::new(THETA)
                .with_beta([0.25, 0.5])
                .with_field(1)
                .with_metric([[-0.5, 0.1], [0.1, -0.5]])
                .with_mode(mode);
            let d = compose_unperturbed(&cfg, &w).matrix().max_abs_diff(assemble_l0m(&cfg, &w).matrix());
            assert!(d < 1e-10, "{mode:?}: {d}");
        }
    }

    #[test]
    fn unperturbed_lm_is_exactly_l0m() {
        let w = LatticeWindow::new(5).unwrap();
        for mode in [SymbolMode::Hermitian, SymbolMode::Literal] {
            let cfg = GaugeConfig::new(THETA).with_beta([0.25, 0.5]).with_mode(mode);
            let lm = assemble_lm(&cfg, &Perturbation::zero(THETA), &w).unwrap();
            assert_eq!(lm, assemble_l0m(&cfg, &w));
            let (t1, t2) = assemble_t1_t2(&cfg, &Perturbation::zero(THETA), &w).unwrap();
            assert_eq!(t1.matrix().nnz() + t2.matrix().nnz(), 0);
        }
    }

    #[test]
    fn non_self_adjoint_perturbation_rejected_in_hermitian_mode() {
        let w = LatticeWindow::new(4).unwrap();
        let r = Perturbation(TorusElement::x(THETA), TorusElement::zero(THETA));
        let cfg = GaugeConfig::new(THETA);
        assert!(assemble_lm(&cfg, &r, &w).is_err());
        assert!(assemble_lm(&cfg.clone().with_mode(SymbolMode::Literal), &r, &w).is_ok());
    }

    #[test]
    fn splitting_and_alternate_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = LatticeWindow::new(6).unwrap();
        let cfg = GaugeConfig::new(THETA).with_beta([0.25, 0.5]).with_metric([[-0.5, 0.1], [0.1, -0.6]]);
        for _ in 0..3 {
            let r = Perturbation(
                random_self_adjoint(THETA, 3, 1, &mut rng),
                random_self_adjoint(THETA, 3, 1, &mut rng),
            );
            let lm = assemble_lm(&cfg, &r, &w).unwrap();
            assert!(lm.is_hermitian());
            let l0m = assemble_l0m(&cfg, &w);
            let terms = perturbation_terms(&cfg, &r, &w).unwrap();
            let split = l0m.matrix().add(terms.t1.matrix()).unwrap().add(terms.t2.matrix()).unwrap();
            assert!(lm.matrix().max_abs_diff(&split) < 1e-10);
            let alt = terms.t1_alt.matrix().add(terms.t2_alt.matrix()).unwrap();
            let first = terms.t1.matrix().add(terms.t2.matrix()).unwrap();
            assert!(alt.max_abs_diff(&first) < 1e-10);
            assert!(terms.t2.matrix().max_abs_diff(terms.t2_alt.matrix()) > 1e-3);
            assert!(terms.t1.matrix().max_abs_diff(terms.t1_printed.matrix()) > 1e-3);
        }
    }

    #[test]
    fn padding_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = LatticeWindow::new(5).unwrap();
        let cfg = GaugeConfig::new(THETA).with_beta([0.1, 0.2]);
        let r = Perturbation(random_self_adjoint(THETA, 3, 1, &mut rng), TorusElement::zero(THETA));
        let lm = assemble_lm(&cfg, &r, &w).unwrap();
        // Recompose on a window padded by two more and restrict twice.
        let bigger = w.padded(2);
        let lm_big = assemble_lm(&cfg, &r, &bigger).unwrap();
        let restricted = lm_big.matrix().restrict(&w.embedding_into(&bigger).unwrap());
        assert!(lm.matrix().max_abs_diff(&restricted) < 1e-12);
    }

    #[test]
    fn lm_oracle_equivalence_on_interior() {
        let cfg = GaugeConfig::new(THETA).with_beta([0.25, 0.5]).with_mode(SymbolMode::Literal);
        let r = Perturbation(TorusElement::y(THETA), x_plus_xstar(0.3));
        let w = LatticeWindow::new(6).unwrap();
        let lm = assemble_lm(&cfg, &r, &w).unwrap();
        let pad = r.pad();
        for i in 0..w.dim() {
            let n = w.mode(i);
            if !w.is_interior(n, pad) {
                continue;
            }
            let e = basis(&w, i);
            // Apply sum g^{jk}(delta_j - c_j)(delta_k - c_k) minus the
            // composition of the unperturbed directions, then add L^m_0.
            let dir = |j: Direction, a: &TorusElement, perturbed: bool| {
                let mut out = canonical_derivation(j, a).sub(&a.scale(gauge_shift(&cfg, j))).unwrap();
                if perturbed {
                    out = out.add(&alg_inner(r.get(j), a).unwrap()).unwrap();
                }
                out
            };
            let mut expect = e.scale(l0m_symbol(&cfg, n));
            for j in Direction::BOTH {
                for k in Direction::BOTH {
                    let p = dir(j, &dir(k, &e, true), true);
                    let q = dir(j, &dir(k, &e, false), false);
                    expect = expect.add(&p.sub(&q).unwrap().scale(c(cfg.g(j, k), 0.0))).unwrap();
                }
            }
            let col: Vec<Complex64> = (0..w.dim()).map(|row| lm.matrix().get(row, i)).collect();
            let got = vector_to_element(THETA, &col, &w);
            assert!(got.max_abs_diff(&expect) < 1e-12, "{n:?}");
        }
    }
}
