//! Finite Fourier series on the smooth noncommutative 2-torus.
//!
//! A monomial `(n1, n2)` stands for `X^n1 Y^n2` (X-power first) with
//! `XY = e^{2 pi i theta} YX`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Lattice mode `(n1, n2)`.
pub type Mode = (i64, i64);

/// Coordinate direction of the torus action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    One,
    Two,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::One, Direction::Two];

    /// Zero-based index, convenient for array lookups.
    pub fn index(self) -> usize {
        match self {
            Direction::One => 0,
            Direction::Two => 1,
        }
    }

    /// Component `n_j` of a mode.
    pub fn component(self, n: Mode) -> i64 {
        match self {
            Direction::One => n.0,
            Direction::Two => n.1,
        }
    }

    pub fn other(self) -> Direction {
        match self {
            Direction::One => Direction::Two,
            Direction::Two => Direction::One,
        }
    }
}

impl TryFrom<usize> for Direction {
    type Error = Error;

    fn try_from(j: usize) -> Result<Self> {
        match j {
            1 => Ok(Direction::One),
            2 => Ok(Direction::Two),
            other => Err(Error::InvalidDirection(other)),
        }
    }
}

/// `e^{-2 pi i theta k}` with the argument reduced mod 1 before exponentiation.
pub fn theta_phase(theta: f64, k: i64) -> Complex64 {
    let frac = (theta * k as f64).rem_euclid(1.0);
    Complex64::cis(-2.0 * PI * frac)
}

/// Phase of the monomial product `(m1,m2)(n1,n2) = phase * (m+n)`.
pub fn monomial_product_phase(theta: f64, m: Mode, n: Mode) -> Complex64 {
    theta_phase(theta, m.1 * n.0)
}

/// Element of the algebra: a finite map from modes to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TorusElementRepr", into = "TorusElementRepr")]
pub struct TorusElement {
    theta: f64,
    coeffs: BTreeMap<Mode, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct TorusElementRepr {
    theta: f64,
    coeffs: Vec<(i64, i64, f64, f64)>,
}

impl TryFrom<TorusElementRepr> for TorusElement {
    type Error = Error;

    fn try_from(repr: TorusElementRepr) -> Result<Self> {
        if !(0.0..1.0).contains(&repr.theta) {
            return Err(invalid(format!("theta must lie in [0, 1), got {}", repr.theta)));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(n1, n2, re, im) in &repr.coeffs {
            if !seen.insert((n1, n2)) {
                return Err(invalid(format!("duplicate mode ({n1}, {n2})")));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(invalid(format!("non-finite coefficient at ({n1}, {n2})")));
            }
        }
        Ok(TorusElement::from_terms(
            repr.theta,
            repr.coeffs.into_iter().map(|(a, b, re, im)| ((a, b), Complex64::new(re, im))),
        ))
    }
}

impl From<TorusElement> for TorusElementRepr {
    fn from(a: TorusElement) -> Self {
        TorusElementRepr {
            theta: a.theta,
            coeffs: a.coeffs.into_iter().map(|((a, b), c)| (a, b, c.re, c.im)).collect(),
        }
    }
}

impl TorusElement {
    pub fn zero(theta: f64) -> Self {
        TorusElement { theta, coeffs: BTreeMap::new() }
    }

    pub fn one(theta: f64) -> Self {
        Self::monomial(theta, (0, 0), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(theta: f64, mode: Mode, c: Complex64) -> Self {
        Self::from_terms(theta, [(mode, c)])
    }

    /// The generator `X`.
    pub fn x(theta: f64) -> Self {
        Self::monomial(theta, (1, 0), Complex64::new(1.0, 0.0))
    }

    /// The generator `Y`.
    pub fn y(theta: f64) -> Self {
        Self::monomial(theta, (0, 1), Complex64::new(1.0, 0.0))
    }

    /// Builds an element from terms; repeated modes are summed.
    pub fn from_terms(theta: f64, terms: impl IntoIterator<Item = (Mode, Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (mode, c) in terms {
            *coeffs.entry(mode).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut a = TorusElement { theta, coeffs };
        a.canonicalize();
        a
    }

    fn canonicalize(&mut self) {
        self.coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn coeff(&self, mode: Mode) -> Complex64 {
        self.coeffs.get(&mode).copied().unwrap_or_default()
    }

    /// Nonzero terms in lexicographic mode order.
    pub fn terms(&self) -> impl Iterator<Item = (Mode, Complex64)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `max(|n1|, |n2|)` over the support, 0 for the zero element.
    pub fn support_radius(&self) -> i64 {
        self.coeffs.keys().map(|&(a, b)| a.abs().max(b.abs())).max().unwrap_or(0)
    }

    fn check_theta(&self, other: &Self) -> Result<()> {
        if self.theta == other.theta {
            Ok(())
        } else {
            Err(Error::ThetaMismatch(self.theta, other.theta))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_theta(other)?;
        Ok(Self::from_terms(self.theta, self.terms().chain(other.terms())))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_theta(other)?;
        Ok(Self::from_terms(self.theta, self.terms().chain(other.terms().map(|(m, c)| (m, -c)))))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.theta, self.terms().map(|(m, c)| (m, c * s)))
    }

    /// Twisted product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_theta(other)?;
        let mut out: BTreeMap<Mode, Complex64> = BTreeMap::new();
        for (m, a) in self.terms() {
            for (n, b) in other.terms() {
                let phase = monomial_product_phase(self.theta, m, n);
                *out.entry((m.0 + n.0, m.1 + n.1)).or_default() += a * b * phase;
            }
        }
        let mut r = TorusElement { theta: self.theta, coeffs: out };
        r.canonicalize();
        Ok(r)
    }

    /// Involution: `(X^n1 Y^n2)^* = e^{-2 pi i theta n1 n2} X^-n1 Y^-n2`.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(
            self.theta,
            self.terms().map(|(n, c)| ((-n.0, -n.1), c.conj() * theta_phase(self.theta, n.0 * n.1))),
        )
    }

    /// Trace `phi(a) = a_00`.
    pub fn trace(&self) -> Complex64 {
        self.coeff((0, 0))
    }

    /// `<self, other> = phi(other^* self)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        Ok(other.adjoint().mul(self)?.trace())
    }

    /// Max coefficient distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let modes: std::collections::BTreeSet<Mode> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        modes.into_iter().map(|m| (self.coeff(m) - other.coeff(m)).norm()).fold(0.0, f64::max)
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Squared coefficient norm `sum |a_n|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }
}

pub fn weyl_mul(a: &TorusElement, b: &TorusElement) -> Result<TorusElement> {
    a.mul(b)
}

pub fn adjoint(a: &TorusElement) -> TorusElement {
    a.adjoint()
}

pub fn trace_phi(a: &TorusElement) -> Complex64 {
    a.trace()
}

pub fn inner_product(u: &TorusElement, v: &TorusElement) -> Result<Complex64> {
    u.inner(v)
}

/// `d_j`: scales the monomial `n` by `n_j`.
pub fn canonical_derivation(j: Direction, a: &TorusElement) -> TorusElement {
    TorusElement::from_terms(a.theta, a.terms().map(|(n, c)| (n, c * j.component(n) as f64)))
}

/// `d_r(a) = ra - ar`.
pub fn inner_derivation(r: &TorusElement, a: &TorusElement) -> Result<TorusElement> {
    r.mul(a)?.sub(&a.mul(r)?)
}

/// `delta_j(a) = d_j(a) + d_{r_j}(a)`.
pub fn perturbed_derivation(j: Direction, r_j: &TorusElement, a: &TorusElement) -> Result<TorusElement> {
    canonical_derivation(j, a).add(&inner_derivation(r_j, a)?)
}

/// Random element with `terms` distinct modes in `[-radius, radius]^2`
/// and coefficients uniform in the unit square.
pub fn random_element<R: Rng + ?Sized>(theta: f64, terms: usize, radius: i64, rng: &mut R) -> TorusElement {
    let side = (2 * radius + 1) as usize;
    let terms = terms.min(side * side);
    let mut coeffs = BTreeMap::new();
    while coeffs.len() < terms {
        let mode = (rng.random_range(-radius..=radius), rng.random_range(-radius..=radius));
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        coeffs.insert(mode, c);
    }
    TorusElement::from_terms(theta, coeffs)
}

/// Random self-adjoint element `(a + a^*)/2`.
pub fn random_self_adjoint<R: Rng + ?Sized>(theta: f64, terms: usize, radius: i64, rng: &mut R) -> TorusElement {
    let a = random_element(theta, terms, radius, rng);
    a.add(&a.adjoint()).expect("same theta").scale(Complex64::new(0.5, 0.0))
}
