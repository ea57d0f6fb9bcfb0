//! Dense exact linear algebra.
//!
//! Elimination is fraction-free (Bareiss): the entries after step `k` are
//! `k+1`-minors of the input, so integer inputs stay integral and the
//! division by the previous pivot is exact. Rows are normalized only when a
//! reduced echelon form is requested. Pivots are the first nonzero entry
//! scanning top to bottom.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols,
            data,
        })
    }

    pub fn from_columns(columns: &[Vec<T>], rows: usize) -> Result<Self> {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::ShapeMismatch(format!(
                    "column of length {} in a matrix with {rows} rows",
                    c.len()
                )));
            }
            for (i, v) in c.iter().enumerate() {
                m.data[i * cols + j] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn from_i64(rows: usize, cols: usize, values: &[i64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&v| T::from_i64(v)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// Submatrix on the given row and column indices, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(rows, &cols)
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch("hcat row count".into()));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Matrix {
            rows: self.rows,
            cols,
            data,
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Result of fraction-free forward elimination.
struct Echelon<T> {
    m: Matrix<T>,
    pivots: Vec<usize>,
    swaps: usize,
}

fn bareiss<T: Scalar>(input: &Matrix<T>) -> Echelon<T> {
    let mut m = input.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut prev = T::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.data.swap(p * cols + j, r * cols + j);
            }
            swaps += 1;
        }
        let pivot = m.get(r, c).clone();
        for i in r + 1..rows {
            let lead = m.get(i, c).clone();
            for j in c + 1..cols {
                let a = m.get(i, j).clone();
                let b = m.get(r, j).clone();
                let updated = if lead.is_zero() {
                    if a.is_zero() {
                        continue;
                    }
                    pivot.clone() * a
                } else {
                    pivot.clone() * a - lead.clone() * b
                };
                m.set(i, j, updated / prev.clone());
            }
            m.set(i, c, T::zero());
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    Echelon { m, pivots, swaps }
}

pub fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
    bareiss(m).pivots.len()
}

pub fn determinant<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    if m.rows != m.cols {
        return Err(Error::ShapeMismatch(
            "determinant of a non-square matrix".into(),
        ));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(T::one());
    }
    let e = bareiss(m);
    if e.pivots.len() < n {
        return Ok(T::zero());
    }
    let det = e.m.get(n - 1, n - 1).clone();
    Ok(if e.swaps % 2 == 1 { -det } else { det })
}

fn rref_with_pivots<T: Scalar>(m: &Matrix<T>) -> (Matrix<T>, Vec<usize>) {
    let Echelon { mut m, pivots, .. } = bareiss(m);
    let cols = m.cols;
    for (k, &pc) in pivots.iter().enumerate().rev() {
        let lead = m.get(k, pc).clone();
        for j in pc..cols {
            let v = m.get(k, j).clone();
            if !v.is_zero() {
                m.set(k, j, v / lead.clone());
            }
        }
        for i in 0..k {
            let factor = m.get(i, pc).clone();
            if factor.is_zero() {
                continue;
            }
            for j in pc..cols {
                let b = m.get(k, j).clone();
                if !b.is_zero() {
                    let a = m.get(i, j).clone();
                    m.set(i, j, a - factor.clone() * b);
                }
            }
        }
    }
    (m, pivots)
}

pub fn rref<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    rref_with_pivots(m).0
}

/// Pivot columns of the reduced row echelon form.
pub fn pivot_columns<T: Scalar>(m: &Matrix<T>) -> Vec<usize> {
    bareiss(m).pivots
}

/// Nonzero rows of the RREF: the canonical basis of the row space.
pub fn row_space_basis<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    let (r, pivots) = rref_with_pivots(m);
    (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
}

/// Basis of the right kernel, one vector per free column of the RREF.
pub fn kernel_basis<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    let (r, pivots) = rref_with_pivots(m);
    let cols = m.cols;
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![T::zero(); cols];
            v[f] = T::one();
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(k, f).clone();
            }
            v
        })
        .collect()
}

pub fn inverse<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    if m.rows != m.cols {
        return Err(Error::ShapeMismatch(
            "inverse of a non-square matrix".into(),
        ));
    }
    let n = m.rows;
    let (r, pivots) = rref_with_pivots(&m.hcat(&Matrix::identity(n))?);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::NotInjective {
            rank: pivots.iter().filter(|&&p| p < n).count(),
            cols: n,
        });
    }
    let right: Vec<usize> = (n..2 * n).collect();
    let rows: Vec<usize> = (0..n).collect();
    Ok(r.select(&rows, &right))
}

/// Unique reduced column echelon form of a full-column-rank matrix.
///
/// Two injective matrices have the same output iff their column spaces agree.
pub fn column_echelon_canonical<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    Ok(column_echelon_with_pivots(m)?.0)
}

/// Like [`column_echelon_canonical`], also returning the pivot rows, where
/// the output restricts to the identity.
pub fn column_echelon_with_pivots<T: Scalar>(m: &Matrix<T>) -> Result<(Matrix<T>, Vec<usize>)> {
    let (r, pivots) = rref_with_pivots(&m.transpose());
    if pivots.len() != m.cols {
        return Err(Error::NotInjective {
            rank: pivots.len(),
            cols: m.cols,
        });
    }
    Ok((r.transpose(), pivots))
}

/// Incrementally built subspace of `T^dim`, kept as an RREF basis.
#[derive(Clone, Debug)]
pub struct RowSpace<T> {
    dim: usize,
    // Sorted by pivot; each row has a 1 at its pivot and zeros at other pivots.
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Scalar> RowSpace<T> {
    pub fn new(dim: usize) -> Self {
        RowSpace {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    fn reduce(&self, v: &mut [T]) {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = x.clone() - f.clone() * r.clone();
                }
            }
        }
    }

    pub fn contains(&self, v: &[T]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        if self.is_full() {
            return false;
        }
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let lead = w[p].clone();
        for x in w.iter_mut().skip(p) {
            if !x.is_zero() {
                *x = x.clone() / lead.clone();
            }
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, r) in row.iter_mut().zip(&w) {
                if !r.is_zero() {
                    *x = x.clone() - f.clone() * r.clone();
                }
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, w));
        true
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    pub fn basis(&self) -> Vec<Vec<T>> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }
}
