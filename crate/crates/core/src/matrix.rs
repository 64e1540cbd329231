//! Dense row-major matrix.
//!
//! Small and predictable on purpose: every operation walks the data in a
//! fixed order, so results are bitwise reproducible regardless of thread
//! count. Matrix products parallelize over output rows (each row is an
//! independent serial computation).

use rayon::prelude::*;

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Matrix products with at least this many output rows use the rayon pool.
const PAR_ROW_THRESHOLD: usize = 64;

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Builds a matrix from row vectors. Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * cols);
        for row in &rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: n, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
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

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    /// New matrix whose rows are the given rows of `self`, in order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(indices.len(), self.cols);
        for (r, &i) in indices.iter().enumerate() {
            out.row_mut(r).copy_from_slice(self.row(i));
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(S) -> S + Sync) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        let cols = self.cols;
        let ocols = other.cols;
        let compute_row = |i: usize, out_row: &mut [S]| {
            let a_row = self.row(i);
            for (k, &aik) in a_row.iter().enumerate().take(cols) {
                if aik == S::zero() {
                    continue;
                }
                let b_row = other.row(k);
                for j in 0..ocols {
                    out_row[j] += aik * b_row[j];
                }
            }
        };
        if self.rows >= PAR_ROW_THRESHOLD {
            out.data
                .par_chunks_mut(ocols)
                .enumerate()
                .for_each(|(i, row)| compute_row(i, row));
        } else {
            for i in 0..self.rows {
                compute_row(i, &mut out.data[i * ocols..(i + 1) * ocols]);
            }
        }
        out
    }

    /// `self * other^T`; both operands are walked row-wise.
    pub fn matmul_bt(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.rows);
        let orows = other.rows;
        let compute_row = |i: usize, out_row: &mut [S]| {
            let a_row = self.row(i);
            for (j, val) in out_row.iter_mut().enumerate().take(orows) {
                let b_row = other.row(j);
                let mut acc = S::zero();
                for (&a, &b) in a_row.iter().zip(b_row.iter()) {
                    acc += a * b;
                }
                *val = acc;
            }
        };
        if self.rows >= PAR_ROW_THRESHOLD {
            out.data
                .par_chunks_mut(orows)
                .enumerate()
                .for_each(|(i, row)| compute_row(i, row));
        } else {
            for i in 0..self.rows {
                compute_row(i, &mut out.data[i * orows..(i + 1) * orows]);
            }
        }
        out
    }

    /// Largest absolute entry, or zero for an empty matrix.
    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |m, &x| m.max(x.abs()))
    }

    /// Largest absolute entrywise difference. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> S {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(S::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Row-major dense matrix of booleans (label assignments, predictions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl BoolMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BoolMatrix { rows, cols, data: vec![false; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
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

    pub fn row(&self, i: usize) -> &[bool] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn count_true(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(indices.len(), self.cols);
        for (r, &i) in indices.iter().enumerate() {
            let src = i * self.cols;
            out.data[r * self.cols..(r + 1) * self.cols]
                .copy_from_slice(&self.data[src..src + self.cols]);
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for BoolMatrix {
    type Output = bool;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &bool {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for BoolMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut bool {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> std::ops::Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_hand_example() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = Matrix::from_rows(vec![vec![5.0, 6.0], vec![7.0, 8.0]]);
        let c = a.matmul(&b);
        assert_eq!(c, Matrix::from_rows(vec![vec![19.0, 22.0], vec![43.0, 50.0]]));
    }

    #[test]
    fn matmul_bt_matches_explicit_transpose() {
        let a = Matrix::from_fn(5, 3, |i, j| (i * 3 + j) as f64 * 0.25 - 1.0);
        let b = Matrix::from_fn(4, 3, |i, j| (i + j) as f64 * 0.5);
        let direct = a.matmul_bt(&b);
        let via_transpose = a.matmul(&b.transpose());
        assert_eq!(direct, via_transpose);
    }

    #[test]
    fn parallel_and_serial_products_agree_bitwise() {
        // 100 rows crosses the parallel threshold; a 10-row slice of the
        // same data does not. Rows are computed identically either way.
        let a = Matrix::from_fn(100, 40, |i, j| ((i * 7 + j * 13) % 17) as f64 / 17.0);
        let b = Matrix::from_fn(40, 30, |i, j| ((i * 5 + j * 3) % 11) as f64 / 11.0 - 0.4);
        let big = a.matmul(&b);
        let small = a.select_rows(&(0..10).collect::<Vec<_>>()).matmul(&b);
        for i in 0..10 {
            assert_eq!(big.row(i), small.row(i));
        }
    }

    #[test]
    fn transpose_roundtrip() {
        let a = Matrix::from_fn(3, 7, |i, j| (i as f32) - (j as f32) * 0.5);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn select_rows_picks_in_order() {
        let a = Matrix::from_fn(4, 2, |i, j| (10 * i + j) as f64);
        let s = a.select_rows(&[2, 0]);
        assert_eq!(s.row(0), &[20.0, 21.0]);
        assert_eq!(s.row(1), &[0.0, 1.0]);
    }
}
