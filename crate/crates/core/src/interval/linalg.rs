//! Interval vectors, interval matrices, and the midpoint-preconditioned
//! linear solve that backs the Krawczyk operator.

use nalgebra::{DMatrix, DVector};

use super::Interval;
use crate::{Error, Result};

/// Fixed-length vector of intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalVector {
    data: Vec<Interval>,
}

impl IntervalVector {
    pub fn zeros(n: usize) -> Self {
        IntervalVector { data: vec![Interval::ZERO; n] }
    }

    pub fn from_vec(data: Vec<Interval>) -> Self {
        IntervalVector { data }
    }

    pub fn from_points(p: &[f64]) -> Self {
        IntervalVector { data: p.iter().map(|&x| Interval::point(x)).collect() }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.data.iter()
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.data
    }

    pub fn mid(&self) -> Vec<f64> {
        self.data.iter().map(|x| x.mid()).collect()
    }

    /// Largest component width.
    pub fn max_width(&self) -> f64 {
        self.data.iter().map(|x| x.width()).fold(0.0, f64::max)
    }

    pub fn contains_zero(&self) -> bool {
        self.data.iter().all(|x| x.contains_zero())
    }

    pub fn subset_of(&self, other: &IntervalVector) -> bool {
        self.len() == other.len()
            && self.iter().zip(other.iter()).all(|(a, b)| a.subset_of(b))
    }

    pub fn interior_of(&self, other: &IntervalVector) -> bool {
        self.len() == other.len()
            && self.iter().zip(other.iter()).all(|(a, b)| a.interior_of(b))
    }

    pub fn intersects(&self, other: &IntervalVector) -> bool {
        self.len() == other.len()
            && self.iter().zip(other.iter()).all(|(a, b)| a.intersects(b))
    }

    pub fn intersection(&self, other: &IntervalVector) -> Option<IntervalVector> {
        debug_assert_eq!(self.len(), other.len());
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| a.intersection(b))
            .collect::<Option<Vec<_>>>()
            .map(IntervalVector::from_vec)
    }
}

impl std::ops::Index<usize> for IntervalVector {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.data[i]
    }
}

impl std::ops::IndexMut<usize> for IntervalVector {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.data[i]
    }
}

impl std::ops::Add for &IntervalVector {
    type Output = IntervalVector;
    fn add(self, rhs: &IntervalVector) -> IntervalVector {
        debug_assert_eq!(self.len(), rhs.len());
        IntervalVector::from_vec(
            self.iter().zip(rhs.iter()).map(|(a, b)| *a + *b).collect(),
        )
    }
}

impl std::ops::Sub for &IntervalVector {
    type Output = IntervalVector;
    fn sub(self, rhs: &IntervalVector) -> IntervalVector {
        debug_assert_eq!(self.len(), rhs.len());
        IntervalVector::from_vec(
            self.iter().zip(rhs.iter()).map(|(a, b)| *a - *b).collect(),
        )
    }
}

/// Row-major interval matrix with immutable dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntervalMatrix { rows, cols, data: vec![Interval::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntervalMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Interval::ONE;
        }
        m
    }

    pub fn from_point_matrix(p: &DMatrix<f64>) -> Self {
        let mut m = IntervalMatrix::zeros(p.nrows(), p.ncols());
        for i in 0..p.nrows() {
            for j in 0..p.ncols() {
                m[(i, j)] = Interval::point(p[(i, j)]);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Point matrix of midpoints.
    pub fn mid(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].mid())
    }

    pub fn mul_vec(&self, v: &IntervalVector) -> IntervalVector {
        debug_assert_eq!(self.cols, v.len());
        let mut out = IntervalVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = Interval::ZERO;
            for j in 0..self.cols {
                acc = acc + self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn mul_mat(&self, rhs: &IntervalMatrix) -> IntervalMatrix {
        debug_assert_eq!(self.cols, rhs.rows);
        let mut out = IntervalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Interval::ZERO;
                for k in 0..self.cols {
                    acc = acc + self[(i, k)] * rhs[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn sub(&self, rhs: &IntervalMatrix) -> IntervalMatrix {
        debug_assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        let mut out = IntervalMatrix::zeros(self.rows, self.cols);
        for k in 0..self.data.len() {
            out.data[k] = self.data[k] - rhs.data[k];
        }
        out
    }

    /// Elementwise interval intersection test (used by block-structure checks).
    pub fn overlaps(&self, rhs: &IntervalMatrix) -> bool {
        self.rows == rhs.rows
            && self.cols == rhs.cols
            && self
                .data
                .iter()
                .zip(rhs.data.iter())
                .all(|(a, b)| a.intersects(b))
    }
}

impl std::ops::Index<(usize, usize)> for IntervalMatrix {
    type Output = Interval;
    fn index(&self, (i, j): (usize, usize)) -> &Interval {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntervalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Interval {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Output of the midpoint-preconditioned solve: an enclosure of `C·b` and
/// the preconditioned matrix enclosure `C·A`, where `C` is the floating
/// point inverse of `mid(A)`. No claim of an exact solution is made; the
/// Krawczyk certifier consumes both parts.
pub struct PrecondSolve {
    pub c_b: IntervalVector,
    pub c_a: IntervalMatrix,
    pub c: DMatrix<f64>,
}

/// Midpoint-preconditioned linear solve.
pub fn precond_solve(a: &IntervalMatrix, b: &IntervalVector) -> Result<PrecondSolve> {
    if a.rows() != a.cols() || a.rows() != b.len() {
        return Err(Error::Precondition("precond_solve needs a square system"));
    }
    let c = invert_midpoint(a)?;
    let ci = IntervalMatrix::from_point_matrix(&c);
    Ok(PrecondSolve { c_b: ci.mul_vec(b), c_a: ci.mul_mat(a), c })
}

/// Floating-point inverse of the midpoint matrix.
pub(crate) fn invert_midpoint(a: &IntervalMatrix) -> Result<DMatrix<f64>> {
    let mid = a.mid();
    let inv = mid.try_inverse().ok_or(Error::SingularMidpoint)?;
    if !inv.iter().all(|x| x.is_finite()) {
        return Err(Error::SingularMidpoint);
    }
    Ok(inv)
}

/// Rank of a point matrix by singular-value thresholding at
/// `tol × σ_max` (default tol 1e-8).
pub fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Eigenvalues of a symmetric point matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    let mut ev = m.clone().symmetric_eigenvalues();
    ev.as_mut_slice().sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}
