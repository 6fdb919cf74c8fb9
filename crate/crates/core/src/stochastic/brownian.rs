//! Reproducible two-dimensional Brownian paths.
//!
//! Path `i` of an ensemble is drawn from ChaCha8 stream `i` of the ensemble
//! seed, so it does not depend on the ensemble size or on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One sampled path `(w_1, w_2)` on a uniform time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrownianPath {
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    pub index: u64,
    /// Increments `(dw_1, dw_2)` per step, each `N(0, dt)`.
    pub increments: Vec<[f64; 2]>,
}

impl BrownianPath {
    pub fn generate(dt: f64, steps: usize, seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let s = dt.sqrt();
        let increments = (0..steps)
            .map(|_| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                [s * a, s * b]
            })
            .collect();
        BrownianPath { dt, steps, seed, index, increments }
    }

    /// Positions `w(k dt)` for `k = 0..=steps`, starting at the origin.
    pub fn positions(&self) -> Vec<[f64; 2]> {
        let mut w = [0.0, 0.0];
        let mut out = Vec::with_capacity(self.steps + 1);
        out.push(w);
        for d in &self.increments {
            w = [w[0] + d[0], w[1] + d[1]];
            out.push(w);
        }
        out
    }

    /// The same path sampled every `factor` steps.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.steps.is_multiple_of(factor) {
            return Err(invalid(format!("cannot coarsen {} steps by {factor}", self.steps)));
        }
        let increments = self
            .increments
            .chunks(factor)
            .map(|c| c.iter().fold([0.0, 0.0], |a, d| [a[0] + d[0], a[1] + d[1]]))
            .collect();
        Ok(BrownianPath { dt: self.dt * factor as f64, steps: self.steps / factor, increments, ..*self })
    }
}

/// Lazily generated ensemble of independent paths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrownianEnsemble {
    pub dt: f64,
    pub steps: usize,
    pub n_paths: usize,
    pub seed: u64,
}

impl BrownianEnsemble {
    pub fn path(&self, i: usize) -> BrownianPath {
        BrownianPath::generate(self.dt, self.steps, self.seed, i as u64)
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }

    /// `f` applied to every path in parallel, results in path order.
    pub fn map<T: Send>(&self, f: impl Fn(&BrownianPath) -> T + Sync) -> Vec<T> {
        (0..self.n_paths).into_par_iter().map(|i| f(&self.path(i))).collect()
    }
}

pub fn sample_brownian(dt: f64, steps: usize, n_paths: usize, seed: u64) -> Result<BrownianEnsemble> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt must be positive"));
    }
    if steps == 0 {
        return Err(invalid("steps must be at least 1"));
    }
    if n_paths == 0 {
        return Err(invalid("n_paths must be at least 1"));
    }
    Ok(BrownianEnsemble { dt, steps, n_paths, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_are_reproducible_and_distinct() {
        let e = sample_brownian(1e-2, 50, 4, 7).unwrap();
        assert_eq!(e.path(2), e.path(2));
        assert_ne!(e.path(1).increments, e.path(2).increments);
        let bigger = sample_brownian(1e-2, 50, 400, 7).unwrap();
        assert_eq!(e.path(3), bigger.path(3));
    }

    #[test]
    fn increment_variance_matches_dt() {
        let dt = 1e-3;
        let p = BrownianPath::generate(dt, 20_000, 3, 0);
        let n = p.steps as f64;
        for c in 0..2 {
            let var = p.increments.iter().map(|d| d[c] * d[c]).sum::<f64>() / n;
            // Sample variance of N(0, dt) has standard deviation dt sqrt(2/n).
            assert!((var - dt).abs() < 5.0 * dt * (2.0 / n).sqrt(), "{var}");
        }
    }

    #[test]
    fn endpoint_statistics() {
        let t = 0.5;
        let e = sample_brownian(t / 10.0, 10, 100_000, 11).unwrap();
        let ends: Vec<[f64; 2]> = e.map(|p| *p.positions().last().unwrap());
        let n = ends.len() as f64;
        for c in 0..2 {
            let mean = ends.iter().map(|w| w[c]).sum::<f64>() / n;
            let var = ends.iter().map(|w| (w[c] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            assert!(mean.abs() < 3.0 * (t / n).sqrt(), "{mean}");
            assert!((var - t).abs() < 3.0 * t * (2.0 / n).sqrt(), "{var}");
        }
    }

    #[test]
    fn coarsening_preserves_endpoints() {
        let p = BrownianPath::generate(1e-2, 40, 1, 5);
        let q = p.coarsen(4).unwrap();
        assert_eq!(q.steps, 10);
        let (a, b) = (p.positions()[40], q.positions()[10]);
        assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        assert!(p.coarsen(3).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(sample_brownian(0.0, 10, 1, 0).is_err());
        assert!(sample_brownian(0.1, 0, 1, 0).is_err());
    }
}
