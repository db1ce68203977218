//! Minimal dense linear algebra for small system matrices.
//!
//! Everything here targets the matrix sizes produced by order reductions
//! (rarely more than a few hundred rows), so the implementations are plain
//! textbook algorithms: row-major storage, partial-pivot Gaussian
//! elimination, and least squares through the normal equations. The complex
//! routines exist because eigenvectors of a real system matrix are in
//! general complex.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square real matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a square matrix from rows, rejecting ragged or empty input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::MatrixShape("matrix must have at least one row".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MatrixShape(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::MatrixShape(format!("row {i} contains a non-finite entry")));
                }
                data.push(v);
            }
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "vector length must match matrix dimension");
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "matrix dimensions must match");
        let mut out = Matrix::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    out.data[i * self.n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `self + c * I`.
    pub fn add_scaled_identity(&self, c: f64) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.set(i, i, out.get(i, i) + c);
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Solves a square complex system by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot degenerates to (near) zero.
pub fn solve_complex(a: &[Vec<Complex64>], b: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = a.len();
    if n == 0 || b.len() != n || a.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    let mut rhs = b.to_vec();
    let scale = m.iter().flat_map(|r| r.iter()).map(|v| v.norm()).fold(0.0f64, f64::max).max(1.0);
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[pivot_row][col].norm() <= 1e-14 * scale {
            return None;
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col..n {
                let sub = factor * m[col][j];
                m[row][j] -= sub;
            }
            let sub = factor * rhs[col];
            rhs[row] -= sub;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in row + 1..n {
            acc -= m[row][j] * x[j];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Orthonormal-ish basis of the null space of a complex matrix (rows x cols),
/// found by row echelon reduction; columns without a pivot generate one basis
/// vector each. Entries below `tol` relative to the matrix scale count as
/// zero.
pub fn null_space_complex(a: &[Vec<Complex64>], tol: f64) -> Vec<Vec<Complex64>> {
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    let scale = m.iter().flat_map(|r| r.iter()).map(|v| v.norm()).fold(0.0f64, f64::max).max(1.0);
    let cutoff = tol * scale;
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let pivot_row = (r..rows).max_by(|&i, &j| m[i][c].norm().total_cmp(&m[j][c].norm()));
        let pivot_row = match pivot_row {
            Some(p) if m[p][c].norm() > cutoff => p,
            _ => continue,
        };
        m.swap(r, pivot_row);
        let inv = Complex64::new(1.0, 0.0) / m[r][c];
        for j in c..cols {
            m[r][j] *= inv;
        }
        for i in 0..rows {
            if i != r && m[i][c].norm() > 0.0 {
                let factor = m[i][c];
                for j in c..cols {
                    let sub = factor * m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); cols];
        v[free] = Complex64::new(1.0, 0.0);
        for (row, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[row][free];
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= norm;
        }
        basis.push(v);
    }
    basis
}

/// Least squares solution of an overdetermined complex system through the
/// normal equations, returning the coefficients and the Euclidean residual
/// of the fit. `a` is given as `rows` rows of `k` columns.
pub fn lstsq_complex(a: &[Vec<Complex64>], b: &[Complex64]) -> Option<(Vec<Complex64>, f64)> {
    let rows = a.len();
    if rows == 0 || b.len() != rows {
        return None;
    }
    let k = a[0].len();
    if k == 0 || a.iter().any(|r| r.len() != k) {
        return None;
    }
    let mut ata = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    let mut atb = vec![Complex64::new(0.0, 0.0); k];
    for i in 0..k {
        for j in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..rows {
                acc += a[r][i].conj() * a[r][j];
            }
            ata[i][j] = acc;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..rows {
            acc += a[r][i].conj() * b[r];
        }
        atb[i] = acc;
    }
    let x = solve_complex(&ata, &atb)?;
    let mut res = 0.0;
    for r in 0..rows {
        let mut acc = -b[r];
        for i in 0..k {
            acc += a[r][i] * x[i];
        }
        res += acc.norm_sqr();
    }
    Some((x, res.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matrix_basics() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(a.matvec(&[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(a.trace(), 5.0);
        let b = a.matmul(&Matrix::identity(2));
        assert_eq!(a, b);
        let sq = a.matmul(&a);
        assert_eq!(sq.to_rows(), vec![vec![7.0, 10.0], vec![15.0, 22.0]]);
        assert_eq!(a.add_scaled_identity(1.0).trace(), 7.0);
        assert!((a.frobenius_norm() - 30.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn from_rows_rejects_bad_shapes() {
        assert!(Matrix::from_rows(&[]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0], vec![2.0]]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0, f64::NAN], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn complex_solve_round_trips() {
        let a = vec![vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(3.0, 0.0)]];
        let x_true = vec![c(1.0, 1.0), c(-2.0, 0.5)];
        let b: Vec<Complex64> = (0..2).map(|i| a[i][0] * x_true[0] + a[i][1] * x_true[1]).collect();
        let x = solve_complex(&a, &b).unwrap();
        for (got, want) in x.iter().zip(&x_true) {
            assert!((got - want).norm() < 1e-12);
        }
        let singular = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(solve_complex(&singular, &b).is_none());
    }

    #[test]
    fn null_space_of_rank_deficient_matrix() {
        let a = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        ];
        let basis = null_space_complex(&a, 1e-12);
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert!((v[1].norm() - 1.0).abs() < 1e-12);
        assert!(v[0].norm() < 1e-12 && v[2].norm() < 1e-12);
    }

    #[test]
    fn least_squares_recovers_exact_solutions() {
        // Overdetermined but consistent: residual should vanish.
        let a = vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(-1.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ];
        let coeffs = vec![c(0.5, 0.0), c(1.5, 0.0)];
        let b: Vec<Complex64> = (0..3).map(|i| a[i][0] * coeffs[0] + a[i][1] * coeffs[1]).collect();
        let (x, res) = lstsq_complex(&a, &b).unwrap();
        assert!(res < 1e-12);
        for (got, want) in x.iter().zip(&coeffs) {
            assert!((got - want).norm() < 1e-12);
        }
        // Inconsistent system keeps a nonzero residual.
        let b_bad = vec![c(1.0, 0.0), c(1.0, 0.0), c(10.0, 0.0)];
        let (_, res) = lstsq_complex(&a, &b_bad).unwrap();
        assert!(res > 1.0);
    }
}
