//! Truncated operators on a finite lattice window of the monomial basis.

pub mod curvature;
pub mod dirac;
pub mod laplacian;
pub mod matrix;
pub mod sparse;
pub mod window;

pub use curvature::{commutator_potential, curvature_forms, curvature_two_form_check, CurvatureForms, CurvatureReport};
pub use dirac::{
    assemble_dirac, commutator_with_element, element_on_spinors, gauge_block, grading, magnetic_one_form,
    DiracOperator,
};
pub use laplacian::{
    assemble_l0, assemble_l0m, assemble_lm, assemble_t0, assemble_t1_t2, compose_unperturbed,
    matrix_of_derivation, matrix_of_inner_derivation, matrix_of_left_mul, matrix_of_right_mul, perturbation_terms,
    Perturbation, PerturbationTerms,
};
pub use matrix::{element_to_vector, vector_to_element, MatrixOperator, HERMITIAN_TOL};
pub use sparse::SparseMatrix;
pub use window::LatticeWindow;
