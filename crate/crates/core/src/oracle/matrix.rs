//! Small dense integer matrices with exact, fraction-free elimination.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: i64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn mul(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(r, k);
                if x == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += x * other.get(k, c);
                }
            }
        }
        out
    }

    /// `A·Aᵀ`.
    pub fn gram(&self) -> Self {
        self.mul(&self.transpose())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// Principal submatrix on the given (ordered) index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(idx.len(), idx.len());
        for (i, &r) in idx.iter().enumerate() {
            for (j, &c) in idx.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    /// Strict diagonal dominance, row by row.
    pub fn is_diagonally_dominant(&self) -> bool {
        (0..self.rows).all(|r| {
            let off: i64 = (0..self.cols).filter(|&c| c != r).map(|c| self.get(r, c).abs()).sum();
            self.get(r, r).abs() > off
        })
    }

    fn to_big(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    /// Leading principal minors `Δ_1, …, Δ_n` via Bareiss elimination without pivoting.
    ///
    /// Elimination stops at the first zero minor; the returned vector is then shorter
    /// than `n` and ends with that zero.
    pub fn leading_minors(&self) -> Vec<BigInt> {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        let mut a = self.to_big();
        let mut minors = Vec::with_capacity(n);
        let mut prev = BigInt::from(1);
        for k in 0..n {
            let pivot = a[k][k].clone();
            minors.push(pivot.clone());
            if pivot.is_zero() {
                break;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &pivot - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = pivot;
        }
        minors
    }

    /// Exact determinant of a square matrix.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        if n == 0 {
            return BigInt::from(1);
        }
        let mut a = self.to_big();
        let mut prev = BigInt::from(1);
        let mut sign = 1;
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Exact rank by fraction-free row reduction.
    pub fn rank(&self) -> usize {
        let mut a = self.to_big();
        let mut rank = 0;
        let mut prev = BigInt::from(1);
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let pivot = a[rank][col].clone();
            for r in rank + 1..self.rows {
                for c in col + 1..self.cols {
                    let num = &a[r][c] * &pivot - &a[r][col] * &a[rank][c];
                    a[r][c] = num / &prev;
                }
                a[r][col] = BigInt::zero();
            }
            prev = pivot;
            rank += 1;
        }
        rank
    }
}

/// Positive definiteness by Sylvester's criterion: every leading principal minor is positive.
pub fn pd_check(m: &IntMatrix) -> Result<bool> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let minors = m.leading_minors();
    Ok(minors.len() == m.rows() && minors.iter().all(|d| d.is_positive()))
}
