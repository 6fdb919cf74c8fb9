//! Row-compressed complex matrices.
//!
//! Every operator in this crate is banded in the monomial basis, so rows are
//! stored as sorted `(column, value)` lists with exact zeros removed.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

fn is_zero(c: Complex64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| Complex64::new(1.0, 0.0)))
    }

    pub fn scalar(dim: usize, c: Complex64) -> Self {
        Self::diagonal((0..dim).map(|_| c))
    }

    pub fn diagonal(values: impl IntoIterator<Item = Complex64>) -> Self {
        let rows: Vec<_> = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| if is_zero(v) { Vec::new() } else { vec![(i, v)] })
            .collect();
        SparseMatrix { dim: rows.len(), rows }
    }

    /// Duplicate entries are summed; exact zeros are dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for (i, j, v) in triplets {
            assert!(i < dim && j < dim, "triplet ({i}, {j}) outside dimension {dim}");
            rows[i].push((j, v));
        }
        for row in &mut rows {
            row.sort_by_key(|&(j, _)| j);
            let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
            for &(j, v) in row.iter() {
                match merged.last_mut() {
                    Some((lj, lv)) if *lj == j => *lv += v,
                    _ => merged.push((j, v)),
                }
            }
            merged.retain(|&(_, v)| !is_zero(v));
            *row = merged;
        }
        SparseMatrix { dim, rows }
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        Self::from_triplets(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j, m[(i, j)]))))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Nonzero entries in lexicographic `(row, col)` order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(invalid(format!("dimension mismatch: {} vs {}", self.dim, other.dim)))
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (i, j, v * c)))
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Self, c: Complex64) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_triplets(
            self.dim,
            self.triplets().chain(other.triplets().map(|(i, j, v)| (i, j, v * c))),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, Complex64::new(-1.0, 0.0))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut touched = vec![false; n];
        let mut cols: Vec<usize> = Vec::new();
        let mut rows = Vec::with_capacity(n);
        for row in &self.rows {
            for &(k, a) in row {
                for &(j, b) in &other.rows[k] {
                    if !touched[j] {
                        touched[j] = true;
                        cols.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            cols.sort_unstable();
            let mut out = Vec::with_capacity(cols.len());
            for &j in &cols {
                if !is_zero(acc[j]) {
                    out.push((j, acc[j]));
                }
                acc[j] = Complex64::new(0.0, 0.0);
                touched[j] = false;
            }
            cols.clear();
            rows.push(out);
        }
        Ok(SparseMatrix { dim: n, rows })
    }

    /// Commutator `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        self.rows.iter().map(|r| r.iter().map(|&(j, a)| a * v[j]).sum()).collect()
    }

    /// Principal submatrix on the given indices, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.dim];
        for (new, &old) in indices.iter().enumerate() {
            pos[old] = new;
        }
        let rows = indices
            .iter()
            .map(|&old| {
                let mut r: Vec<_> = self.rows[old]
                    .iter()
                    .filter(|&&(j, _)| pos[j] != usize::MAX)
                    .map(|&(j, v)| (pos[j], v))
                    .collect();
                r.sort_by_key(|&(j, _)| j);
                r
            })
            .collect();
        SparseMatrix { dim: indices.len(), rows }
    }

    /// Block matrix `[[a, b], [c, d]]` from four equally sized blocks.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        a.check_dim(b)?;
        a.check_dim(c)?;
        a.check_dim(d)?;
        let n = a.dim;
        let shift = |m: &Self, di: usize, dj: usize| {
            m.triplets().map(move |(i, j, v)| (i + di, j + dj, v)).collect::<Vec<_>>()
        };
        let mut t = shift(a, 0, 0);
        t.extend(shift(b, 0, n));
        t.extend(shift(c, n, 0));
        t.extend(shift(d, n, n));
        Ok(Self::from_triplets(2 * n, t))
    }

    /// Block `(bi, bj)` of a matrix viewed as `k x k` blocks of size `dim/k`.
    pub fn block(&self, k: usize, bi: usize, bj: usize) -> Self {
        let n = self.dim / k;
        Self::from_triplets(
            n,
            self.triplets()
                .filter(|&(i, j, _)| i / n == bi && j / n == bj)
                .map(|(i, j, v)| (i - bi * n, j - bj * n, v)),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).expect("equal dimensions").max_abs()
    }

    /// `max |M - M^H|`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Connected components of the symmetrized sparsity graph, each sorted,
    /// ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, j, _) in self.triplets() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..self.dim {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }
}
