//! Dense row-major matrices and the little linear algebra the engine needs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense real matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row-major data; `data.len()` must be `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                from: 0,
                to: 0,
                expected: (rows, cols),
                found: (data.len() / cols.max(1), cols),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "matrix" });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Ragged input is reported as a shape mismatch.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::ShapeMismatch {
                    from: 0,
                    to: 0,
                    expected: (r, c),
                    found: (r, row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Matrix::from_vec(r, c, data)
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

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn scaled(&self, k: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    /// `out += self * x`.
    #[inline]
    pub fn mul_vec_add(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            *o += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_add(x, &mut out);
        out
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.rows)
            .map(|r| x[r] * self.row(r).iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|M[a][b] + M[b][a]|`; zero for antisymmetric matrices.
    pub fn antisymmetry_violation(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for a in 0..self.rows {
            for b in a..self.cols {
                worst = worst.max((self.get(a, b) + self.get(b, a)).abs());
            }
        }
        worst
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        self.is_square() && self.antisymmetry_violation() <= tol
    }

    /// Sub-matrix on the given row and column index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.set(i, j, self.get(r, c));
            }
        }
        m
    }
}

/// Reduced row echelon form with partial (row) pivoting over each column,
/// returning pivot columns. Entries below `tol` are treated as zero.
fn rref(m: &mut Matrix, tol: f64) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, m.get(i, c).abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol {
            for i in r..rows {
                m.set(i, c, 0.0);
            }
            continue;
        }
        if best != r {
            for k in 0..cols {
                let tmp = m.get(r, k);
                m.set(r, k, m.get(best, k));
                m.set(best, k, tmp);
            }
        }
        let p = m.get(r, c);
        for k in 0..cols {
            m.set(r, k, m.get(r, k) / p);
        }
        for i in 0..rows {
            if i != r {
                let f = m.get(i, c);
                if f != 0.0 {
                    for k in 0..cols {
                        let v = m.get(i, k) - f * m.get(r, k);
                        m.set(i, k, v);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Gauss-Jordan elimination with complete (row and column) pivoting.
/// Row `r` of the result pivots on the `r`-th returned column; elimination
/// stops once the largest remaining entry falls to `tol`.
fn gauss_jordan_full_pivot(m: &mut Matrix, tol: f64) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut used = vec![false; cols];
    let mut pivots = Vec::new();
    for r in 0..rows.min(cols) {
        let mut best = (r, 0, -1.0);
        for i in r..rows {
            for c in (0..cols).filter(|&c| !used[c]) {
                let v = m.get(i, c).abs();
                if v > best.2 {
                    best = (i, c, v);
                }
            }
        }
        let (pr, pc, val) = best;
        if val <= tol {
            break;
        }
        if pr != r {
            for k in 0..cols {
                let tmp = m.get(r, k);
                m.set(r, k, m.get(pr, k));
                m.set(pr, k, tmp);
            }
        }
        let p = m.get(r, pc);
        for k in 0..cols {
            m.set(r, k, m.get(r, k) / p);
        }
        for i in (0..rows).filter(|&i| i != r) {
            let f = m.get(i, pc);
            if f != 0.0 {
                for k in 0..cols {
                    let v = m.get(i, k) - f * m.get(r, k);
                    m.set(i, k, v);
                }
            }
        }
        used[pc] = true;
        pivots.push(pc);
    }
    pivots
}

/// Basis of the null space of `m`, returned as a list of vectors. Rank
/// decisions use `rel_tol` times the largest absolute entry.
pub fn null_space(m: &Matrix, rel_tol: f64) -> Vec<Vec<f64>> {
    let scale = m.max_abs();
    let mut work = m.clone();
    let pivots = if scale == 0.0 {
        Vec::new()
    } else {
        gauss_jordan_full_pivot(&mut work, rel_tol * scale)
    };
    (0..m.cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![0.0; m.cols];
            v[f] = 1.0;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -work.get(r, f);
            }
            v
        })
        .collect()
}

/// Solves the square system `m x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `tol`.
pub fn solve(m: &Matrix, b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = m.rows;
    assert!(m.is_square() && b.len() == n);
    let mut aug = Matrix::zeros(n, n + 1);
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, m.get(r, c));
        }
        aug.set(r, n, b[r]);
    }
    let pivots = rref(&mut aug, tol);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some((0..n).map(|r| aug.get(r, n)).collect())
}

/// Serialized as a list of rows.
#[cfg(feature = "serde")]
impl serde::Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for r in 0..self.rows {
            seq.serialize_element(self.row(r))?;
        }
        seq.end()
    }
}
