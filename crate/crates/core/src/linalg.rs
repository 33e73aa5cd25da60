//! Dense matrices over `Q(q)` with exact Gaussian elimination.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{CycField, CycScalar};

pub type Vector = Vec<CycScalar>;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Arc<CycField>,
    rows: usize,
    cols: usize,
    data: Vec<CycScalar>,
}

/// Reduced row echelon form and its pivot columns.
struct Echelon {
    reduced: Matrix,
    pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: &Arc<CycField>, rows: usize, cols: usize) -> Matrix {
        Matrix { field: Arc::clone(field), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &Arc<CycField>, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn diagonal(field: &Arc<CycField>, entries: &[CycScalar]) -> Matrix {
        let mut m = Matrix::zeros(field, entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn from_rows(field: &Arc<CycField>, rows: Vec<Vec<CycScalar>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(Matrix { field: Arc::clone(field), rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: &Arc<CycField>, rows: usize, columns: &[Vector]) -> Matrix {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &Arc<CycField> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[CycScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CycScalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j { v.is_one() } else { v.is_zero() }
                })
            })
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).expect("matrix dimensions must agree")
    }

    pub fn apply(&self, v: &[CycScalar]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&CycScalar, &CycScalar) -> CycScalar) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shapes");
        Matrix {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &CycScalar) -> Matrix {
        Matrix {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(&self.field, self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Kronecker product; the basis of `V ⊗ W` is ordered `v_a ⊗ w_b` at `a * dim W + b`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            out.set(i * other.rows + k, j * other.cols + l, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(field: &Arc<CycField>, blocks: &[Matrix]) -> Matrix {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn trace(&self) -> CycScalar {
        let mut acc = self.field.zero();
        for i in 0..self.rows.min(self.cols) {
            acc += self.get(i, i);
        }
        acc
    }

    fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = m.get(row, col).inv().expect("pivot is nonzero");
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let pv = m.get(row, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(r, j) - &(&factor * pv);
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Indices of a maximal linearly independent set of columns, chosen greedily left to right.
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.echelon().pivots
    }

    /// Basis of the column space, drawn from the columns themselves.
    pub fn column_basis(&self) -> Vec<Vector> {
        self.pivot_columns().into_iter().map(|j| self.column(j)).collect()
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<Vector> {
        let Echelon { reduced, pivots } = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -reduced.get(r, f);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let Echelon { reduced, pivots } = aug.echelon();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut inv = Matrix::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, reduced.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Solves `self * x = b`; errors when no solution exists.
    pub fn solve(&self, b: &[CycScalar]) -> Result<Vector> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let mut aug = Matrix::zeros(&self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let Echelon { reduced, pivots } = aug.echelon();
        if pivots.last() == Some(&self.cols) {
            return Err(Error::Singular);
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = reduced.get(r, self.cols).clone();
        }
        Ok(x)
    }

    pub fn rows_as_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect()
    }
}

/// Rank of a family of vectors of equal length.
pub fn rank_of(field: &Arc<CycField>, len: usize, vectors: &[Vector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_columns(field, len, vectors).rank()
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.rows_as_strings() {
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Serialized as rows of JSON scalars.
impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[CycScalar]> = (0..self.rows).map(|i| self.row(i)).collect();
        rows.serialize(serializer)
    }
}
