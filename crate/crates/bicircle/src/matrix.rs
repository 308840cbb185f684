//! Dense complex matrices and the structural constant matrices used throughout the crate.
//!
//! Sizes in this crate are tiny (a few dozen rows at most), so everything is a plain
//! row-major `Vec` with straightforward O(n^3) algorithms.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::LinalgError;

pub type C64 = Complex64;

pub const TOL_HERMITIAN: f64 = 1e-10;
pub const TOL_FACTOR: f64 = 1e-10;
pub const PIVOT_TOL: f64 = 1e-12;
pub const CONTRACTION_MARGIN: f64 = 1e-10;

const JACOBI_SWEEPS: usize = 500;
const JACOBI_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:>11.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entries must fill a {rows}x{cols} matrix");
        ComplexMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from nested rows of real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        Self::from_fn(nr, nc, |r, c| C64::new(rows[r][c], 0.0))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        Self::from_fn(nr, nc, |r, c| rows[r][c])
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| if r == c { values[r] } else { C64::new(0.0, 0.0) })
    }

    pub fn scalar(z: C64) -> Self {
        Self::from_vec(1, 1, vec![z])
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

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise distance between two matrices of equal shape.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in max_diff");
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn row(&self, r: usize) -> Self {
        self.submatrix(r, 0, 1, self.cols)
    }

    pub fn col(&self, c: usize) -> Self {
        self.submatrix(0, c, self.rows, 1)
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "submatrix out of range");
        Self::from_fn(nr, nc, |r, c| self[(r0 + r, c0 + c)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)];
            }
        }
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack needs equal row counts");
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        out
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack needs equal column counts");
        let mut out = Self::zeros(self.rows + other.rows, self.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, 0, other);
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(1.0);
        (0..self.rows).all(|r| (0..=r).all(|c| (self[(r, c)] - self[(c, r)].conj()).norm() <= tol * scale))
    }

    /// LU factorization with partial pivoting; returns (lu, permutation, sign).
    fn lu(&self) -> Result<(Self, Vec<usize>, f64), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = self.max_abs();
        for k in 0..n {
            let (p, pivot) = (k..n).map(|r| (r, a[(r, k)].norm())).fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= f64::EPSILON * scale * (n as f64) || pivot == 0.0 {
                return Err(LinalgError::Singular);
            }
            if p != k {
                for c in 0..n {
                    a.data.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let akk = a[(k, k)];
            for r in (k + 1)..n {
                let f = a[(r, k)] / akk;
                a[(r, k)] = f;
                for c in (k + 1)..n {
                    let t = a[(k, c)];
                    a[(r, c)] -= f * t;
                }
            }
        }
        Ok((a, perm, sign))
    }

    pub fn determinant(&self) -> Result<C64, LinalgError> {
        if self.rows == 0 && self.cols == 0 {
            return Ok(C64::new(1.0, 0.0));
        }
        match self.lu() {
            Ok((lu, _, sign)) => Ok((0..self.rows).map(|i| lu[(i, i)]).product::<C64>() * sign),
            Err(LinalgError::Singular) => Ok(C64::new(0.0, 0.0)),
            Err(e) => Err(e),
        }
    }

    /// Solves `self * X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.rows != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!("solve: {} rows vs {} rhs rows", self.rows, rhs.rows)));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, rhs.cols));
        }
        let (lu, perm, _) = self.lu()?;
        let mut x = Self::from_fn(n, rhs.cols, |r, c| rhs[(perm[r], c)]);
        for c in 0..rhs.cols {
            for r in 0..n {
                let mut s = x[(r, c)];
                for k in 0..r {
                    s -= lu[(r, k)] * x[(k, c)];
                }
                x[(r, c)] = s;
            }
            for r in (0..n).rev() {
                let mut s = x[(r, c)];
                for k in (r + 1)..n {
                    s -= lu[(r, k)] * x[(k, c)];
                }
                x[(r, c)] = s / lu[(r, r)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        self.solve(&Self::identity(self.rows))
    }

    /// Lower Cholesky factor `A` with `A A^dagger = self` and positive real diagonal.
    pub fn lower_cholesky(&self, pivot_tol: f64) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch(format!("{}x{} is not square", self.rows, self.cols)));
        }
        if !self.is_hermitian(TOL_HERMITIAN) {
            return Err(LinalgError::NotHermitian);
        }
        let n = self.rows;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if d <= pivot_tol * scale {
                return Err(LinalgError::NotPositiveDefinite { index: j, pivot: d });
            }
            let ljj = d.sqrt();
            l[(j, j)] = C64::new(ljj, 0.0);
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(l)
    }

    /// Upper Cholesky factor `B` with `B B^dagger = self`, via the order-reversed lower factor.
    pub fn upper_cholesky(&self, pivot_tol: f64) -> Result<Self, LinalgError> {
        let j = reversal(self.rows);
        let low = (&j * self * &j).lower_cholesky(pivot_tol)?;
        Ok(&j * &low * &j)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order (cyclic Jacobi on the real embedding).
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.rows;
        if n == 0 {
            return Vec::new();
        }
        let m = 2 * n;
        let mut a = vec![0.0; m * m];
        for r in 0..n {
            for c in 0..n {
                let z = (self[(r, c)] + self[(c, r)].conj()) * 0.5;
                a[r * m + c] = z.re;
                a[(r + n) * m + (c + n)] = z.re;
                a[(r + n) * m + c] = z.im;
                a[r * m + (c + n)] = -z.im;
            }
        }
        jacobi_symmetric(&mut a, m);
        let mut ev: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
        ev.sort_by(|x, y| x.total_cmp(y));
        ev.into_iter().step_by(2).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues().first().copied().unwrap_or(f64::INFINITY)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let g = if self.rows <= self.cols { self * &self.adjoint() } else { &self.adjoint() * self };
        g.hermitian_eigenvalues().last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    pub fn is_strict_contraction(&self, margin: f64) -> bool {
        self.spectral_norm() <= 1.0 - margin
    }
}

fn jacobi_symmetric(a: &mut [f64], m: usize) {
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if total == 0.0 {
        return;
    }
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..m).flat_map(|r| (0..m).filter(move |&c| c != r).map(move |c| (r, c))).map(|(r, c)| a[r * m + c].powi(2)).sum::<f64>().sqrt();
        if off <= JACOBI_TOL * total * 1e-4 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.cols, b.rows, "matmul shape mismatch: {}x{} * {}x{}", a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for r in 0..a.rows {
        for k in 0..a.cols {
            let x = a[(r, k)];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..b.cols {
                out.data[r * b.cols + c] += x * b[(k, c)];
            }
        }
    }
    out
}

fn zip_with(a: &ComplexMatrix, b: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> ComplexMatrix {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "elementwise shape mismatch");
    ComplexMatrix { rows: a.rows, cols: a.cols, data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect() }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $f:expr) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                $f(self, rhs)
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                $f(&self, &rhs)
            }
        }
        impl $tr<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                $f(&self, rhs)
            }
        }
        impl $tr<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                $f(self, &rhs)
            }
        }
    };
}

binop!(Mul, mul, matmul);
binop!(Add, add, |a, b| zip_with(a, b, |x, y| x + y));
binop!(Sub, sub, |a, b| zip_with(a, b, |x, y| x - y));

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        *self = &*self - rhs;
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// `[0, I_m]`, the m x (m+1) selector dropping the first coordinate.
pub fn shift_selector(m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m + 1, |r, c| if c == r + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// `[I_m, 0]`, the m x (m+1) selector dropping the last coordinate.
pub fn lead_selector(m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m + 1, |r, c| if c == r { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// First standard basis vector of length k as a column.
pub fn e1(k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k, 1, |r, _| if r == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Antidiagonal reversal matrix.
pub fn reversal(k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k, k, |r, c| if r + c + 1 == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

/// Monomials of bidegree (n, m) in descending lexicographic order: z^n w^m, z^n w^{m-1}, ..., 1.
pub fn lex_monomials(n: usize, m: usize) -> Vec<(usize, usize)> {
    (0..=n).rev().flat_map(|i| (0..=m).rev().map(move |j| (i, j))).collect()
}

/// Monomials in descending reverse-lexicographic order: w^m z^n, w^m z^{n-1}, ..., 1.
pub fn revlex_monomials(n: usize, m: usize) -> Vec<(usize, usize)> {
    (0..=m).rev().flat_map(|j| (0..=n).rev().map(move |i| (i, j))).collect()
}

/// Permutation taking lexicographic coordinates to reverse-lexicographic ones.
pub fn ordering_permutation(n: usize, m: usize) -> ComplexMatrix {
    let lex = lex_monomials(n, m);
    let rl = revlex_monomials(n, m);
    let k = lex.len();
    let mut p = ComplexMatrix::zeros(k, k);
    for (r, mono) in rl.iter().enumerate() {
        let c = lex.iter().position(|x| x == mono).expect("same monomial set");
        p[(r, c)] = C64::new(1.0, 0.0);
    }
    p
}

/// `J M J = M^T` within `tol` (relative to the max-norm of `M`).
pub fn centro_transpose_symmetric(m: &ComplexMatrix, tol: f64) -> Result<bool, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch(format!("{}x{} is not square", m.rows, m.cols)));
    }
    let j = reversal(m.rows);
    let scale = m.max_abs().max(1.0);
    Ok((&j * m * &j).max_diff(&m.transpose()) <= tol * scale)
}

/// Toeplitz test by centro-transpose symmetry of the matrix and its leading principal truncation.
pub fn is_toeplitz(m: &ComplexMatrix, tol: f64) -> Result<bool, LinalgError> {
    if !centro_transpose_symmetric(m, tol)? {
        return Ok(false);
    }
    if m.rows <= 1 {
        return Ok(true);
    }
    centro_transpose_symmetric(&m.submatrix(0, 0, m.rows - 1, m.cols - 1), tol)
}

/// Doubly Toeplitz test for a square matrix made of `block` x `block` blocks.
pub fn is_doubly_toeplitz(a: &ComplexMatrix, block: usize, tol: f64) -> Result<bool, LinalgError> {
    if block == 0 || !a.is_square() || !a.rows.is_multiple_of(block) {
        return Err(LinalgError::DimensionMismatch(format!("{}x{} is not made of {}x{} blocks", a.rows, a.cols, block, block)));
    }
    let k = a.rows / block;
    if !centro_transpose_symmetric(a, tol)? {
        return Ok(false);
    }
    if k > 1 {
        let a1 = a.submatrix(0, 0, (k - 1) * block, (k - 1) * block);
        if !centro_transpose_symmetric(&a1, tol)? {
            return Ok(false);
        }
    }
    if block > 1 {
        let b = block - 1;
        let a2 = ComplexMatrix::from_fn(k * b, k * b, |r, c| a[((r / b) * block + r % b, (c / b) * block + c % b)]);
        if !centro_transpose_symmetric(&a2, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed;
        ComplexMatrix::from_fn(n, n, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            c(a, b)
        })
    }

    #[test]
    fn cholesky_identity() {
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(i3.lower_cholesky(PIVOT_TOL).unwrap(), i3);
        assert_eq!(ComplexMatrix::identity(2).upper_cholesky(PIVOT_TOL).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn cholesky_two_by_two() {
        let h = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let l = h.lower_cholesky(PIVOT_TOL).unwrap();
        assert!((&l * &l.adjoint()).max_diff(&h) < 1e-14);
        assert_eq!(l[(0, 1)], c(0.0, 0.0));
        let u = h.upper_cholesky(PIVOT_TOL).unwrap();
        assert!((&u * &u.adjoint()).max_diff(&h) < 1e-14);
        assert_eq!(u[(1, 0)], c(0.0, 0.0));
        assert!(u[(0, 0)].re > 0.0 && u[(1, 1)].re > 0.0);
    }

    #[test]
    fn cholesky_diag_upper() {
        let h = ComplexMatrix::from_real_rows(&[&[4.0, 0.0], &[0.0, 9.0]]);
        let u = h.upper_cholesky(PIVOT_TOL).unwrap();
        assert!(u.max_diff(&ComplexMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 3.0]])) < 1e-15);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(h.lower_cholesky(PIVOT_TOL), Err(LinalgError::NotPositiveDefinite { index: 0, .. })));
    }

    #[test]
    fn cholesky_complex_hermitian() {
        let g = sample(5, 7);
        let h = &(&g * &g.adjoint()) + &ComplexMatrix::identity(5);
        let l = h.lower_cholesky(PIVOT_TOL).unwrap();
        assert!((&l * &l.adjoint()).max_diff(&h) < 1e-12);
        for r in 0..5 {
            assert!(l[(r, r)].im == 0.0 && l[(r, r)].re > 0.0);
            for cc in (r + 1)..5 {
                assert_eq!(l[(r, cc)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn norms() {
        let z = ComplexMatrix::zeros(2, 3);
        assert_eq!(z.spectral_norm(), 0.0);
        assert!(z.is_strict_contraction(1e-10));
        assert!(!ComplexMatrix::identity(2).is_strict_contraction(1e-9));
        let h = ComplexMatrix::identity(2).scale_re(0.5);
        assert!((h.spectral_norm() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_rectangular() {
        let m = ComplexMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 4.0, 0.0]]);
        assert!((m.spectral_norm() - 4.0).abs() < 1e-12);
        assert!((m.transpose().spectral_norm() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_and_det() {
        let a = sample(4, 3);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).max_diff(&ComplexMatrix::identity(4)) < 1e-12);
        let d = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]).determinant().unwrap();
        assert!((d - c(5.0, 0.0)).norm() < 1e-14);
        assert!(ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).inverse().is_err());
    }

    #[test]
    fn selectors() {
        assert_eq!(shift_selector(1), ComplexMatrix::from_real_rows(&[&[0.0, 1.0]]));
        assert_eq!(e1(3), ComplexMatrix::from_real_rows(&[&[1.0], &[0.0], &[0.0]]));
        for m in 1..4 {
            assert_eq!(&shift_selector(m) * &shift_selector(m).transpose(), ComplexMatrix::identity(m));
            assert_eq!(&lead_selector(m) * &lead_selector(m).transpose(), ComplexMatrix::identity(m));
        }
        let p = ordering_permutation(1, 1);
        // lex (zw, z, w, 1) -> revlex (wz, w, z, 1)
        let expected = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
        assert_eq!(p, expected);
        for (n, m) in [(2, 1), (1, 3), (3, 3)] {
            let p = ordering_permutation(n, m);
            assert_eq!(&p * &p.transpose(), ComplexMatrix::identity((n + 1) * (m + 1)));
        }
    }

    #[test]
    fn toeplitz_tests() {
        let t = ComplexMatrix::from_rows(&[vec![c(1.0, 0.5), c(2.0, 0.0)], vec![c(-3.0, 1.0), c(1.0, 0.5)]]);
        assert!(centro_transpose_symmetric(&t, 1e-12).unwrap());
        assert!(is_toeplitz(&t, 1e-12).unwrap());
        let nt = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!(!is_toeplitz(&nt, 1e-12).unwrap());
        assert!(is_doubly_toeplitz(&ComplexMatrix::identity(4), 2, 1e-12).unwrap());
        assert!(centro_transpose_symmetric(&ComplexMatrix::zeros(2, 3), 1e-12).is_err());
    }

    #[test]
    fn toeplitz_agrees_with_diagonal_scan() {
        let mut seed = 11u64;
        for trial in 0..200 {
            seed += 1;
            let base = sample(6, seed);
            // half the trials are genuinely Toeplitz
            let m = if trial % 2 == 0 {
                ComplexMatrix::from_fn(6, 6, |r, cc| if r >= cc { base[(r - cc, 0)] } else { base[(0, cc - r)] })
            } else {
                base
            };
            let scan = (1..6).all(|r| (1..6).all(|cc| (m[(r, cc)] - m[(r - 1, cc - 1)]).norm() <= 1e-12));
            assert_eq!(is_toeplitz(&m, 1e-12).unwrap(), scan);
        }
    }

    #[test]
    fn hermitian_eigenvalues_known() {
        let h = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]);
        let ev = h.hermitian_eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }
}
