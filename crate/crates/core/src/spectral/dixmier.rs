//! Log-Cesaro estimation of Dixmier traces.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::eigen::hermitian_eigen_matrix;
use crate::algebra::TorusElement;
use crate::error::{invalid, Error, Result};
use crate::operators::{element_on_spinors, DiracOperator, LatticeWindow};

/// Relative threshold below which a Dirac eigenvalue is counted as kernel.
pub const KERNEL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DixmierEstimate {
    /// `(R, sum_{k <= R} mu_k / log R)`, increasing in `R`.
    pub partial_sums: Vec<(usize, f64)>,
    /// Intercept of the fit `S(R) = a + b / log R`.
    pub extrapolated: f64,
    /// Standard error of the intercept.
    pub uncertainty: f64,
}

/// Partial sums of `mu` at each cutoff, extrapolated linearly in `1 / log R`.
pub fn log_cesaro_estimate(mu: &[f64], cutoffs: &[usize]) -> Result<DixmierEstimate> {
    if cutoffs.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: cutoffs.len() });
    }
    if cutoffs.windows(2).any(|p| p[1] <= p[0]) || cutoffs[0] < 2 {
        return Err(invalid("cutoffs must be strictly increasing and at least 2"));
    }
    if *cutoffs.last().unwrap() > mu.len() {
        return Err(invalid(format!("cutoff {} exceeds the {} available terms", cutoffs.last().unwrap(), mu.len())));
    }
    let mut partial_sums = Vec::with_capacity(cutoffs.len());
    let mut acc = 0.0;
    let mut k = 0;
    for &r in cutoffs {
        while k < r {
            acc += mu[k];
            k += 1;
        }
        partial_sums.push((r, acc / (r as f64).ln()));
    }
    let (extrapolated, uncertainty) = intercept_fit(&partial_sums);
    Ok(DixmierEstimate { partial_sums, extrapolated, uncertainty })
}

fn intercept_fit(points: &[(usize, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(r, y) in points {
        let x = 1.0 / (r as f64).ln();
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    let det = n * sxx - sx * sx;
    let b = (n * sxy - sx * sy) / det;
    let a = (sxx * sy - sx * sxy) / det;
    let rss: f64 = points.iter().map(|&(r, y)| (y - a - b / (r as f64).ln()).powi(2)).sum();
    let se = if points.len() > 2 { (rss / (n - 2.0) * sxx / det).sqrt() } else { 0.0 };
    (a, se)
}

/// Geometric cutoffs with ratio `5/4` from `lo` up to `hi`.
pub fn geometric_cutoffs(lo: usize, hi: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut r = lo as f64;
    while (r as usize) <= hi {
        let k = r as usize;
        if out.last() != Some(&k) {
            out.push(k);
        }
        r *= 1.25;
    }
    out
}

/// Cutoffs that stay inside the disk of radius `0.8 N`, where the truncated
/// Dirac spectrum still counts every lattice eigenvalue.
pub fn default_cutoffs(w: &LatticeWindow) -> Vec<usize> {
    let rho = 0.8 * w.half_width() as f64;
    geometric_cutoffs(64, (2.0 * PI * rho * rho) as usize)
}

/// Terms `mu_k = <phi_k, (x (x) I) phi_k> / (2 lambda_k^2)` of `v(x)`, in
/// ascending `|lambda_k|` with the kernel removed.
pub fn volume_form_terms(d: &DiracOperator, x: &TorusElement) -> Result<Vec<f64>> {
    Ok(volume_form_terms_many(d, std::slice::from_ref(x))?.remove(0))
}

/// [`volume_form_terms`] for several elements from one eigendecomposition.
pub fn volume_form_terms_many(d: &DiracOperator, xs: &[TorusElement]) -> Result<Vec<Vec<f64>>> {
    if !d.is_hermitian() {
        return Err(Error::NotHermitian(d.matrix().hermitian_deviation()));
    }
    let spec = hermitian_eigen_matrix(d.matrix(), true, "Dirac operator")?;
    let scale = spec.eigenvalues().iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let xms: Vec<_> = xs.iter().map(|x| element_on_spinors(x, &d.window())).collect();
    let blocks = spec.blocks().expect("computed with eigenvectors");
    let mut terms: Vec<(f64, usize, usize, Vec<f64>)> = blocks
        .par_iter()
        .enumerate()
        .flat_map_iter(|(bi, b)| {
            let xvs: Vec<DMatrix<Complex64>> =
                xms.iter().map(|xm| xm.restrict(&b.indices).to_dense() * &b.vectors).collect();
            let mut out = Vec::new();
            for (k, &lam) in b.values.iter().enumerate() {
                if lam.abs() < KERNEL_TOL * scale {
                    continue;
                }
                let mu = xvs
                    .iter()
                    .map(|xv| b.vectors.column(k).dotc(&xv.column(k)).re / (2.0 * lam * lam))
                    .collect();
                out.push((lam.abs(), bi, k, mu));
            }
            out
        })
        .collect();
    terms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    Ok((0..xs.len()).map(|e| terms.iter().map(|t| t.3[e]).collect()).collect())
}

/// `v(x) = Tr_w(x |D|^-2 P) / 2` estimated from log-Cesaro partial sums.
pub fn dixmier_volume_form(
    d: &DiracOperator,
    x: &TorusElement,
    w: &LatticeWindow,
    cutoffs: &[usize],
) -> Result<DixmierEstimate> {
    if d.window() != *w {
        return Err(invalid("Dirac operator window differs from the requested window"));
    }
    let mu = volume_form_terms(d, x)?;
    log_cesaro_estimate(&mu, cutoffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::GaugeConfig;
    use crate::operators::assemble_dirac;

    #[test]
    fn harmonic_calibration() {
        let mu: Vec<f64> = (1..=1_000_000).map(|k| 1.0 / k as f64).collect();
        let est = log_cesaro_estimate(&mu, &geometric_cutoffs(100, 1_000_000)).unwrap();
        assert!((est.extrapolated - 1.0).abs() < 1e-3, "{est:?}");
        assert!(est.partial_sums.windows(2).all(|p| p[0].0 < p[1].0));
    }

    #[test]
    fn zero_element_gives_zero() {
        let w = LatticeWindow::new(8).unwrap();
        let d = assemble_dirac(&GaugeConfig::new(0.3), None, &w).unwrap();
        let est = dixmier_volume_form(&d, &TorusElement::zero(0.3), &w, &geometric_cutoffs(8, 100)).unwrap();
        assert!(est.partial_sums.iter().all(|&(_, s)| s == 0.0));
    }

    #[test]
    fn kernel_is_removed() {
        let w = LatticeWindow::new(4).unwrap();
        let d = assemble_dirac(&GaugeConfig::new(0.3), None, &w).unwrap();
        let mu = volume_form_terms(&d, &TorusElement::one(0.3)).unwrap();
        assert_eq!(mu.len(), 2 * w.dim() - 2);
        assert!((mu[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn shared_decomposition_matches_single() {
        let w = LatticeWindow::new(6).unwrap();
        let cfg = GaugeConfig::new(0.3).with_beta([0.1, 0.2]);
        let d = assemble_dirac(&cfg, Some(&TorusElement::x(0.3).scale(Complex64::new(0.2, 0.0))), &w).unwrap();
        let xs = [TorusElement::one(0.3), TorusElement::y(0.3)];
        let many = volume_form_terms_many(&d, &xs).unwrap();
        for (x, got) in xs.iter().zip(&many) {
            assert_eq!(got, &volume_form_terms(&d, x).unwrap());
        }
    }

    #[test]
    fn cutoff_validation() {
        assert!(log_cesaro_estimate(&[1.0; 10], &[2, 3]).is_err());
        assert!(log_cesaro_estimate(&[1.0; 10], &[2, 3, 11]).is_err());
        assert!(log_cesaro_estimate(&[1.0; 10], &[3, 2, 5]).is_err());
    }
}
