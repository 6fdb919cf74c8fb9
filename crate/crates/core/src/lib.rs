//! Numerical laboratory for the noncommutative 2-torus with a uniform
//! magnetic field.

pub mod algebra;
pub mod error;
pub mod euclidean;
pub mod format;
pub mod gauge;
pub mod operators;
pub mod spectral;
pub mod stochastic;

pub use algebra::{Direction, Mode, TorusElement};
pub use error::{Error, Result};
pub use gauge::{GaugeConfig, MagneticSymbol, SymbolMode};
pub use operators::{DiracOperator, LatticeWindow, MatrixOperator, Perturbation, SparseMatrix};
