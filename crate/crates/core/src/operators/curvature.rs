//! Curvature of the magnetic connection on the free rank-one module, with
//! `nabla_j = d_j`, `nabla_r = d_r` and the literal shift `2 pi i G_j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::laplacian::{derivation, inner_derivation, restrict_to, Perturbation};
use super::sparse::SparseMatrix;
use super::window::LatticeWindow;
use crate::algebra::{canonical_derivation, inner_derivation as alg_inner_derivation, Direction, TorusElement};
use crate::error::{Error, Result};
use crate::gauge::{gauge_component, GaugeConfig};

/// Both sides of `R(delta^m) = R(d^m) + 2 pi i (G_2 nabla_{r1} - G_1 nabla_{r2})`.
#[derive(Clone, Debug)]
pub struct CurvatureForms {
    pub window: LatticeWindow,
    /// `R(delta^m_1, delta^m_2)`.
    pub perturbed: SparseMatrix,
    /// `R(d^m_1, d^m_2)`.
    pub unperturbed: SparseMatrix,
    /// `2 pi i (G_2 nabla_{r1} - G_1 nabla_{r2})`.
    pub shift: SparseMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    /// `max |R(delta^m) - R(d^m) - shift|`.
    pub deviation: f64,
    /// `max |shift|`, the non-invariance term.
    pub shift_norm: f64,
    /// `max |R(delta) - R(d)|` without gauge field.
    pub flat_deviation: f64,
}

/// `rho = d_1 r_2 - d_2 r_1 + [r_1, r_2]`, so that `[delta_1, delta_2] = d_rho`.
pub fn commutator_potential(r: &Perturbation) -> Result<TorusElement> {
    let (r1, r2) = (&r.0, &r.1);
    canonical_derivation(Direction::One, r2)
        .sub(&canonical_derivation(Direction::Two, r1))?
        .add(&alg_inner_derivation(r1, r2)?)
}

fn forms_on(cfg: &GaugeConfig, r: &Perturbation, padded: &LatticeWindow) -> Result<[SparseMatrix; 3]> {
    let n = padded.dim();
    let i = Complex64::i();
    let g = Direction::BOTH.map(|j| gauge_component(cfg, j));
    let c = g.map(|gj| Complex64::new(0.0, 2.0 * PI * gj));
    let d = Direction::BOTH.map(|j| derivation(j, padded));
    let rm = Direction::BOTH.map(|j| inner_derivation(r.get(j), padded));
    let a = [0, 1].map(|j| d[j].add(&rm[j]).unwrap().add(&SparseMatrix::scalar(n, -c[j])).unwrap());
    let am = [0, 1].map(|j| d[j].add(&SparseMatrix::scalar(n, -c[j])).unwrap());
    let two_pi_i = 2.0 * PI * i;

    let rho = inner_derivation(&commutator_potential(r)?, padded);
    let connection_shift = |m1: &SparseMatrix, m2: &SparseMatrix| {
        m1.scale(two_pi_i * g[1]).add_scaled(m2, -two_pi_i * g[0]).unwrap()
    };

    let delta = [0, 1].map(|j| d[j].add(&rm[j]).unwrap());
    let perturbed = rho
        .add(&connection_shift(&delta[0], &delta[1]))?
        .sub(&a[0].commutator(&a[1])?)?;
    let unperturbed = connection_shift(&d[0], &d[1]).sub(&am[0].commutator(&am[1])?)?;
    let shift = connection_shift(&rm[0], &rm[1]);
    Ok([perturbed, unperturbed, shift])
}

/// Assembles both sides on a padded window and restricts them to `w`.
pub fn curvature_forms(cfg: &GaugeConfig, r: &Perturbation, w: &LatticeWindow) -> Result<CurvatureForms> {
    for e in [&r.0, &r.1] {
        if e.theta() != cfg.theta {
            return Err(Error::ThetaMismatch(cfg.theta, e.theta()));
        }
    }
    let padded = w.padded(r.pad());
    let [p, u, s] = forms_on(cfg, r, &padded)?;
    Ok(CurvatureForms {
        window: *w,
        perturbed: restrict_to(&p, &padded, w),
        unperturbed: restrict_to(&u, &padded, w),
        shift: restrict_to(&s, &padded, w),
    })
}

pub fn curvature_two_form_check(cfg: &GaugeConfig, r: &Perturbation, w: &LatticeWindow) -> Result<CurvatureReport> {
    let f = curvature_forms(cfg, r, w)?;
    let deviation = f.perturbed.sub(&f.unperturbed)?.sub(&f.shift)?.max_abs();
    let flat_cfg = GaugeConfig { beta: [0.0, 0.0], ..cfg.clone() };
    let flat = curvature_forms(&flat_cfg, r, w)?;
    Ok(CurvatureReport {
        deviation,
        shift_norm: f.shift.max_abs(),
        flat_deviation: flat.perturbed.sub(&flat.unperturbed)?.max_abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_self_adjoint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const THETA: f64 = 0.3;

    #[test]
    fn zero_perturbation_is_exact() {
        let cfg = GaugeConfig::new(THETA).with_beta([0.25, 0.5]);
        let w = LatticeWindow::new(5).unwrap();
        let f = curvature_forms(&cfg, &Perturbation::zero(THETA), &w).unwrap();
        assert_eq!(f.perturbed, f.unperturbed);
        assert_eq!(f.shift.nnz(), 0);
        let rep = curvature_two_form_check(&cfg, &Perturbation::zero(THETA), &w).unwrap();
        assert_eq!(rep.deviation, 0.0);
    }

    #[test]
    fn gauge_off_has_no_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = GaugeConfig::new(THETA);
        let w = LatticeWindow::new(5).unwrap();
        let r = Perturbation(random_self_adjoint(THETA, 3, 1, &mut rng), random_self_adjoint(THETA, 3, 1, &mut rng));
        let rep = curvature_two_form_check(&cfg, &r, &w).unwrap();
        assert_eq!(rep.shift_norm, 0.0);
        assert!(rep.deviation < 1e-12);
    }

    #[test]
    fn shift_identity_holds_for_random_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = GaugeConfig::new(THETA).with_beta([0.25, 0.5]);
        let w = LatticeWindow::new(6).unwrap();
        for _ in 0..3 {
            let r = Perturbation(
                random_self_adjoint(THETA, 3, 1, &mut rng).scale(Complex64::new(0.3, 0.0)),
                random_self_adjoint(THETA, 3, 1, &mut rng).scale(Complex64::new(0.3, 0.0)),
            );
            let rep = curvature_two_form_check(&cfg, &r, &w).unwrap();
            assert!(rep.deviation < 1e-10, "{rep:?}");
            assert!(rep.shift_norm > 1e-3);
            assert!(rep.flat_deviation < 1e-10);
        }
    }
}
