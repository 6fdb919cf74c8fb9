//! Hermitian eigendecomposition by exact block splitting.
//!
//! The sparsity graph of a banded lattice operator usually falls apart into
//! many connected components; each is diagonalized densely.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operators::{MatrixOperator, SparseMatrix, HERMITIAN_TOL};

/// Eigenpairs of one connected component.
#[derive(Clone, Debug)]
pub struct EigenBlock {
    /// Global indices of the component, ascending.
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// Columns are orthonormal eigenvectors in component coordinates.
    pub vectors: DMatrix<Complex64>,
}

/// Sorted real spectrum with an optional block eigenbasis.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    blocks: Option<Vec<EigenBlock>>,
    dim: usize,
    source: String,
}

impl Spectrum {
    /// Spectrum from explicit values, without eigenvectors.
    pub fn from_values(mut values: Vec<f64>, source: impl Into<String>) -> Self {
        values.sort_by(f64::total_cmp);
        Spectrum { dim: values.len(), eigenvalues: values, blocks: None, source: source.into() }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn blocks(&self) -> Option<&[EigenBlock]> {
        self.blocks.as_deref()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    fn require_blocks(&self) -> Result<&[EigenBlock]> {
        self.blocks
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("spectrum was computed without eigenvectors".into()))
    }

    /// `f(M) v` through the eigenbasis.
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64 + Sync, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let blocks = self.require_blocks()?;
        if v.len() != self.dim {
            return Err(Error::InvalidInput(format!("vector length {} != dimension {}", v.len(), self.dim)));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for b in blocks {
            let local = DMatrix::from_iterator(b.indices.len(), 1, b.indices.iter().map(|&i| v[i]));
            let coeffs = b.vectors.adjoint() * local;
            let scaled = DMatrix::from_iterator(
                b.values.len(),
                1,
                b.values.iter().zip(coeffs.iter()).map(|(&l, &c)| f(l) * c),
            );
            let back = &b.vectors * scaled;
            for (k, &i) in b.indices.iter().enumerate() {
                out[i] = back[k];
            }
        }
        Ok(out)
    }

    /// `max |M - Q diag(lambda) Q^H|` over all entries.
    pub fn reconstruction_error(&self, m: &SparseMatrix) -> Result<f64> {
        let blocks = self.require_blocks()?;
        let mut err: f64 = 0.0;
        let mut covered = 0;
        for b in blocks {
            let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                b.values.len(),
                b.values.iter().map(|&l| Complex64::new(l, 0.0)),
            ));
            let rec = &b.vectors * lam * b.vectors.adjoint();
            let orig = m.restrict(&b.indices).to_dense();
            err = err.max((rec - orig).iter().map(|z| z.norm()).fold(0.0, f64::max));
            covered += m.restrict(&b.indices).nnz();
        }
        if covered != m.nnz() {
            return Err(Error::InvalidInput("matrix has entries outside the spectral blocks".into()));
        }
        Ok(err)
    }
}

fn dense_block(m: &SparseMatrix, indices: &[usize]) -> DMatrix<Complex64> {
    let d = m.restrict(indices).to_dense();
    (&d + d.adjoint()).scale(0.5)
}

/// Eigendecomposition of a hermitian matrix (`max |M - M^H| <= 1e-12`).
pub fn hermitian_eigen_matrix(m: &SparseMatrix, with_vectors: bool, source: impl Into<String>) -> Result<Spectrum> {
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let components = m.components();
    let solved: Vec<(Vec<f64>, Option<EigenBlock>)> = components
        .into_par_iter()
        .map(|indices| {
            let d = dense_block(m, &indices);
            if with_vectors {
                let eig = d.symmetric_eigen();
                let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
                (values.clone(), Some(EigenBlock { indices, values, vectors: eig.eigenvectors }))
            } else {
                (d.symmetric_eigenvalues().iter().copied().collect(), None)
            }
        })
        .collect();
    let mut eigenvalues = Vec::with_capacity(m.dim());
    let mut blocks = Vec::new();
    for (vals, block) in solved {
        eigenvalues.extend(vals);
        blocks.extend(block);
    }
    eigenvalues.sort_by(f64::total_cmp);
    Ok(Spectrum { eigenvalues, blocks: with_vectors.then_some(blocks), dim: m.dim(), source: source.into() })
}

/// Eigendecomposition of an operator flagged hermitian.
pub fn hermitian_eigen(op: &MatrixOperator, with_vectors: bool) -> Result<Spectrum> {
    if !op.is_hermitian() {
        return Err(Error::NotHermitian(op.matrix().hermitian_deviation()));
    }
    hermitian_eigen_matrix(op.matrix(), with_vectors, format!("lattice operator, N = {}", op.window().half_width()))
}

/// Largest singular value, from the spectrum of `M^H M`.
pub fn operator_norm(m: &SparseMatrix) -> Result<f64> {
    let mm = m.adjoint().mul(m)?;
    let mm = mm.add(&mm.adjoint())?.scale(Complex64::new(0.5, 0.0));
    let spec = hermitian_eigen_matrix(&mm, false, "M^H M")?;
    Ok(spec.eigenvalues().last().copied().unwrap_or(0.0).max(0.0).sqrt())
}
