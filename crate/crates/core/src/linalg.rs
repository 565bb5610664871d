//! Dense matrices over a [`Scalar`] field: rank, kernels, solves and
//! determinant signs.
//!
//! Determinants use Bareiss' fraction-free elimination, so over the rationals
//! intermediate entries stay minors of the input and never need reducing.

use std::fmt;
use std::ops::{Mul, Neg};

use crate::scalar::Scalar;

/// An orientation sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `(-1)^exponent`.
    pub fn parity(exponent: usize) -> Sign {
        if exponent.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(rows: Vec<Vec<S>>, cols: usize) -> Option<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return None;
            }
            data.extend(row);
        }
        Some(Matrix { rows: n, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(columns: &[Vec<S>], rows: usize) -> Option<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return None;
            }
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Some(m)
    }

    pub fn from_i64_rows(rows: &[Vec<i64>], cols: usize) -> Option<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| S::from_int(v)).collect())
                .collect(),
            cols,
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, factor: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * factor.clone()).collect(),
        }
    }

    /// Matrix product, `None` on a shape mismatch.
    pub fn matmul(&self, rhs: &Matrix<S>) -> Option<Matrix<S>> {
        if self.cols != rhs.rows {
            return None;
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        Some(out)
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix<S>) -> Option<Matrix<S>> {
        if self.rows != rhs.rows {
            return None;
        }
        let mut out = Self::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                out[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        Some(out)
    }

    /// Block diagonal `diag(self, rhs)`.
    pub fn block_diag(&self, rhs: &Matrix<S>) -> Matrix<S> {
        let mut out = Self::zeros(self.rows + rhs.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                out[(self.rows + i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix<S>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // largest magnitude pivot; for exact types any nonzero would do
            let mut best: Option<usize> = None;
            for i in r..m.rows {
                if m[(i, c)].is_negligible() {
                    continue;
                }
                match best {
                    Some(b) if m[(b, c)].abs() >= m[(i, c)].abs() => {}
                    _ => best = Some(i),
                }
            }
            let Some(p) = best else { continue };
            m.swap_rows(p, r);
            let inv = S::one() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let sub = f.clone() * m[(r, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - sub;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Columns spanning the kernel, one per free variable, in the order of
    /// the free columns.
    pub fn kernel_basis(&self) -> Matrix<S> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis[(f, k)] = S::one();
            for (row, &p) in pivots.iter().enumerate() {
                basis[(p, k)] = -r[(row, f)].clone();
            }
        }
        basis
    }

    /// Solves `self * X = rhs` when a solution exists.
    ///
    /// Free variables are set to zero; `None` means the system is
    /// inconsistent or the shapes disagree.
    pub fn solve(&self, rhs: &Matrix<S>) -> Option<Matrix<S>> {
        if rhs.rows != self.rows {
            return None;
        }
        let aug = self.hstack(rhs)?;
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(p, j)] = r[(row, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    /// Determinant by Bareiss elimination. `None` for non-square input.
    pub fn determinant(&self) -> Option<S> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(S::one());
        }
        let mut m = self.clone();
        let mut negate = false;
        let mut prev = S::one();
        for k in 0..n {
            if m[(k, k)].is_negligible() {
                let swap = (k + 1..n).find(|&i| !m[(i, k)].is_negligible());
                match swap {
                    Some(i) => {
                        m.swap_rows(i, k);
                        negate = !negate;
                    }
                    None => return Some(S::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m[(i, j)].clone() * m[(k, k)].clone()
                        - m[(i, k)].clone() * m[(k, j)].clone())
                        / prev.clone();
                    m[(i, j)] = v;
                }
                m[(i, k)] = S::zero();
            }
            prev = m[(k, k)].clone();
        }
        let det = m[(n - 1, n - 1)].clone();
        Some(if negate { -det } else { det })
    }

    /// Sign of the determinant; `None` if singular or non-square.
    pub fn det_sign(&self) -> Option<Sign> {
        let d = self.determinant()?;
        if d.is_negligible() {
            None
        } else if d.is_positive() {
            Some(Sign::Plus)
        } else {
            Some(Sign::Minus)
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<S> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Extends the independent columns of `partial` (an `n × d` matrix) by
/// standard basis vectors to a basis of the ambient space, returning only the
/// added columns. `None` if `partial` is rank deficient.
pub fn complete_basis<S: Scalar>(partial: &Matrix<S>) -> Option<Matrix<S>> {
    let n = partial.nrows();
    if partial.rank() != partial.ncols() {
        return None;
    }
    let mut current = partial.clone();
    let mut added: Vec<Vec<S>> = Vec::new();
    for e in 0..n {
        if current.ncols() == n {
            break;
        }
        let mut v = vec![S::zero(); n];
        v[e] = S::one();
        let col = Matrix::from_columns(std::slice::from_ref(&v), n)?;
        let candidate = current.hstack(&col)?;
        if candidate.rank() == candidate.ncols() {
            current = candidate;
            added.push(v);
        }
    }
    Matrix::from_columns(&added, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(rows: &[Vec<i64>]) -> Matrix<Q> {
        let cols = rows.first().map_or(0, Vec::len);
        Matrix::from_i64_rows(rows, cols).unwrap()
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(q(&[vec![0, 1], vec![1, 0]]).det_sign(), Some(Sign::Minus));
        assert_eq!(q(&[vec![2, 1], vec![1, 1]]).determinant(), Some(Q::from_int(1)));
        assert_eq!(q(&[vec![1, 2], vec![2, 4]]).det_sign(), None);
        let m = q(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        assert_eq!(m.determinant(), Some(Q::from_int(4)));
        assert_eq!(Matrix::<Q>::zeros(0, 0).determinant(), Some(Q::from_int(1)));
    }

    #[test]
    fn bareiss_matches_float_det_with_pivoting() {
        let rows = vec![vec![0, 3, 1, 2], vec![1, 0, 0, 5], vec![4, 1, 0, 0], vec![2, 2, 7, 1]];
        let exact = q(&rows).determinant().unwrap();
        let float = Matrix::<f64>::from_i64_rows(&rows, 4).unwrap().determinant().unwrap();
        assert!((exact.to_f64_lossy() - float).abs() < 1e-9);
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = q(&[vec![1, -1, 0], vec![0, 1, -1]]);
        let k = m.kernel_basis();
        assert_eq!(k.ncols(), 1);
        let prod = m.matmul(&k).unwrap();
        assert!(prod.columns().iter().flatten().all(|v| v.is_negligible()));
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = q(&[vec![1, 0], vec![0, 0]]);
        assert!(a.solve(&q(&[vec![1], vec![1]])).is_none());
        let x = a.solve(&q(&[vec![3], vec![0]])).unwrap();
        assert_eq!(x[(0, 0)], Q::from_int(3));
    }

    #[test]
    fn completion_spans() {
        let v = q(&[vec![0], vec![1], vec![0]]);
        let c = complete_basis(&v).unwrap();
        assert_eq!(c.ncols(), 2);
        assert_eq!(v.hstack(&c).unwrap().rank(), 3);
    }

    #[test]
    fn sign_algebra() {
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(-Sign::Plus, Sign::Minus);
        assert_eq!(Sign::parity(3), Sign::Minus);
        assert_eq!(Sign::from_i64(2), None);
    }
}
