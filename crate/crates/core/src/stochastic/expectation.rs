//! Vacuum expectation of the perturbed flow through the heat semigroup of
//! the assembled `L^m`.

use num_complex::Complex64;

use crate::algebra::TorusElement;
use crate::error::{invalid, Error, Result};
use crate::gauge::{GaugeConfig, SymbolMode};
use crate::operators::{assemble_lm, element_to_vector, vector_to_element, LatticeWindow, Perturbation};
use crate::spectral::{hermitian_eigen, Spectrum};

/// `t -> exp(t L^m)` on a lattice window, from one eigendecomposition.
#[derive(Clone, Debug)]
pub struct HeatSemigroup {
    spectrum: Spectrum,
    window: LatticeWindow,
    theta: f64,
}

impl HeatSemigroup {
    pub fn new(cfg: &GaugeConfig, r: &Perturbation, w: &LatticeWindow) -> Result<Self> {
        if cfg.symbol_mode != SymbolMode::Hermitian {
            return Err(invalid("the heat semigroup needs hermitian symbol mode"));
        }
        let lm = assemble_lm(cfg, r, w)?;
        Ok(HeatSemigroup { spectrum: hermitian_eigen(&lm, true)?, window: *w, theta: cfg.theta })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn apply(&self, x: &TorusElement, t: f64) -> Result<TorusElement> {
        if x.theta() != self.theta {
            return Err(Error::ThetaMismatch(self.theta, x.theta()));
        }
        if let Some((n, _)) = x.terms().find(|&(n, _)| !self.window.contains(n)) {
            return Err(invalid(format!("mode {n:?} lies outside the window")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(invalid("t must be a non-negative number"));
        }
        let v = element_to_vector(x, &self.window);
        let out = self.spectrum.apply_function(|l| Complex64::new((t * l).exp(), 0.0), &v)?;
        Ok(vector_to_element(self.theta, &out, &self.window))
    }
}

/// `E f_t(x) = exp(t L^m)(x)` on the window.
pub fn perturbed_expectation(
    cfg: &GaugeConfig,
    r: &Perturbation,
    x: &TorusElement,
    w: &LatticeWindow,
    t: f64,
) -> Result<TorusElement> {
    HeatSemigroup::new(cfg, r, w)?.apply(x, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::l0m_symbol;

    const THETA: f64 = 0.3;

    fn x_plus_adjoint(s: f64) -> TorusElement {
        let x = TorusElement::x(THETA);
        x.add(&x.adjoint()).unwrap().scale(Complex64::new(s, 0.0))
    }

    #[test]
    fn zero_time_is_identity() {
        let cfg = GaugeConfig::new(THETA).with_beta([0.25, 0.5]);
        let w = LatticeWindow::new(6).unwrap();
        let r = Perturbation(x_plus_adjoint(0.3), TorusElement::zero(THETA));
        let x = TorusElement::from_terms(THETA, [((1, 2), Complex64::new(0.5, -1.0)), ((0, -1), Complex64::new(2.0, 0.0))]);
        let got = perturbed_expectation(&cfg, &r, &x, &w, 0.0).unwrap();
        assert!(got.max_abs_diff(&x) < 1e-12);
    }

    #[test]
    fn unperturbed_scales_each_mode() {
        let cfg = GaugeConfig::new(THETA).with_beta([0.25, 0.5]);
        let w = LatticeWindow::new(4).unwrap();
        let x = TorusElement::from_terms(THETA, [((1, 0), Complex64::new(1.0, 0.0)), ((-2, 1), Complex64::new(0.0, 1.0))]);
        let t = 0.4;
        let got = perturbed_expectation(&cfg, &Perturbation::zero(THETA), &x, &w, t).unwrap();
        for (n, c) in x.terms() {
            let expect = c * (l0m_symbol(&cfg, n) * t).exp();
            assert!((got.coeff(n) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn semigroup_property() {
        let cfg = GaugeConfig::new(THETA).with_beta([0.1, 0.2]);
        let w = LatticeWindow::new(8).unwrap();
        let r = Perturbation(x_plus_adjoint(0.3), x_plus_adjoint(-0.1));
        let sg = HeatSemigroup::new(&cfg, &r, &w).unwrap();
        let x = TorusElement::from_terms(THETA, [((1, 1), Complex64::new(1.0, 0.5)), ((0, -2), Complex64::new(-0.3, 0.0))]);
        let a = sg.apply(&sg.apply(&x, 0.2).unwrap(), 0.15).unwrap();
        let b = sg.apply(&x, 0.35).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-9);
    }

    #[test]
    fn rejects_literal_mode_and_outside_modes() {
        let w = LatticeWindow::new(3).unwrap();
        let lit = GaugeConfig::new(THETA).with_mode(SymbolMode::Literal);
        let x = TorusElement::one(THETA);
        assert!(perturbed_expectation(&lit, &Perturbation::zero(THETA), &x, &w, 0.1).is_err());
        let far = TorusElement::monomial(THETA, (5, 0), Complex64::new(1.0, 0.0));
        let cfg = GaugeConfig::new(THETA);
        assert!(perturbed_expectation(&cfg, &Perturbation::zero(THETA), &far, &w, 0.1).is_err());
    }
}
