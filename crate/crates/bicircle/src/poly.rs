//! Dense bivariate polynomials, stacks of them, and sparse Laurent polynomials.

use std::ops::{Add, Sub};

use crate::matrix::{ComplexMatrix, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Polynomial in z and w with nonnegative exponents, stored as a dense grid
/// `coeffs[i * (deg_w + 1) + j]` for the coefficient of z^i w^j.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePolynomial {
    deg_z: usize,
    deg_w: usize,
    coeffs: Vec<C64>,
}

impl BivariatePolynomial {
    pub fn zero(deg_z: usize, deg_w: usize) -> Self {
        BivariatePolynomial { deg_z, deg_w, coeffs: vec![ZERO; (deg_z + 1) * (deg_w + 1)] }
    }

    pub fn monomial(i: usize, j: usize, c: C64) -> Self {
        let mut p = Self::zero(i, j);
        p.set(i, j, c);
        p
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, 0, c)
    }

    /// Builds from `(i, j, coefficient)` triples; repeated exponents accumulate.
    pub fn from_terms(terms: &[(usize, usize, C64)]) -> Self {
        let dz = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let dw = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut p = Self::zero(dz, dw);
        for &(i, j, c) in terms {
            let cur = p.coeff(i, j);
            p.set(i, j, cur + c);
        }
        p
    }

    pub fn deg_z(&self) -> usize {
        self.deg_z
    }

    pub fn deg_w(&self) -> usize {
        self.deg_w
    }

    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        if i <= self.deg_z && j <= self.deg_w {
            self.coeffs[i * (self.deg_w + 1) + j]
        } else {
            ZERO
        }
    }

    pub fn set(&mut self, i: usize, j: usize, c: C64) {
        if i > self.deg_z || j > self.deg_w {
            *self = self.resized(self.deg_z.max(i), self.deg_w.max(j));
        }
        let dw = self.deg_w;
        self.coeffs[i * (dw + 1) + j] = c;
    }

    /// Nonzero terms as `(i, j, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        let dw = self.deg_w;
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != ZERO).map(move |(k, &c)| (k / (dw + 1), k % (dw + 1), c))
    }

    pub fn resized(&self, deg_z: usize, deg_w: usize) -> Self {
        let mut out = Self::zero(deg_z, deg_w);
        for (i, j, c) in self.terms() {
            assert!(i <= deg_z && j <= deg_w, "resizing would drop a nonzero coefficient");
            out.coeffs[i * (deg_w + 1) + j] = c;
        }
        out
    }

    /// Horner in w nested inside Horner in z.
    pub fn eval(&self, z: C64, w: C64) -> C64 {
        let mut acc = ZERO;
        for i in (0..=self.deg_z).rev() {
            let mut inner = ZERO;
            for j in (0..=self.deg_w).rev() {
                inner = inner * w + self.coeffs[i * (self.deg_w + 1) + j];
            }
            acc = acc * z + inner;
        }
        acc
    }

    /// `z^n w^m conj(p(1/conj z, 1/conj w))` at bidegree (n, m).
    pub fn reverse(&self, n: usize, m: usize) -> Self {
        let mut out = Self::zero(n, m);
        for (i, j, c) in self.terms() {
            assert!(i <= n && j <= m, "reverse bidegree ({n},{m}) below actual degree");
            out.set(n - i, m - j, c.conj());
        }
        out
    }

    /// Multiplication by z^a w^b.
    pub fn shift(&self, a: usize, b: usize) -> Self {
        let mut out = Self::zero(self.deg_z + a, self.deg_w + b);
        for (i, j, c) in self.terms() {
            out.set(i + a, j + b, c);
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        BivariatePolynomial { deg_z: self.deg_z, deg_w: self.deg_w, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn conj_coeffs(&self) -> Self {
        BivariatePolynomial { deg_z: self.deg_z, deg_w: self.deg_w, coeffs: self.coeffs.iter().map(|c| c.conj()).collect() }
    }

    /// Exact degrees of the nonzero part, `None` for the zero polynomial.
    pub fn true_degree(&self) -> Option<(usize, usize)> {
        self.terms().fold(None, |acc, (i, j, _)| match acc {
            None => Some((i, j)),
            Some((a, b)) => Some((a.max(i), b.max(j))),
        })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let dz = self.deg_z.max(other.deg_z);
        let dw = self.deg_w.max(other.deg_w);
        let mut m: f64 = 0.0;
        for i in 0..=dz {
            for j in 0..=dw {
                m = m.max((self.coeff(i, j) - other.coeff(i, j)).norm());
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.deg_z + other.deg_z, self.deg_w + other.deg_w);
        for (i, j, a) in self.terms() {
            for (k, l, b) in other.terms() {
                let cur = out.coeff(i + k, j + l);
                out.set(i + k, j + l, cur + a * b);
            }
        }
        out
    }
}

fn combine(a: &BivariatePolynomial, b: &BivariatePolynomial, sign: f64) -> BivariatePolynomial {
    let dz = a.deg_z.max(b.deg_z);
    let dw = a.deg_w.max(b.deg_w);
    let mut out = a.resized(dz, dw);
    for (i, j, c) in b.terms() {
        let cur = out.coeff(i, j);
        out.set(i, j, cur + c * sign);
    }
    out
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;
    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        combine(self, rhs, -1.0)
    }
}

/// Column of bivariate polynomials, e.g. the stacked orthonormal family at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorPolynomial {
    pub rows: Vec<BivariatePolynomial>,
}

impl VectorPolynomial {
    pub fn new(rows: Vec<BivariatePolynomial>) -> Self {
        VectorPolynomial { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Matrix times column of polynomials.
    pub fn apply(a: &ComplexMatrix, v: &VectorPolynomial) -> VectorPolynomial {
        assert_eq!(a.cols(), v.len(), "matrix/vector polynomial shape mismatch");
        let dz = v.rows.iter().map(|p| p.deg_z).max().unwrap_or(0);
        let dw = v.rows.iter().map(|p| p.deg_w).max().unwrap_or(0);
        let rows = (0..a.rows())
            .map(|r| {
                let mut acc = BivariatePolynomial::zero(dz, dw);
                for (k, p) in v.rows.iter().enumerate() {
                    let s = a[(r, k)];
                    if s != ZERO {
                        acc = &acc + &p.scale(s);
                    }
                }
                acc
            })
            .collect();
        VectorPolynomial { rows }
    }

    pub fn reverse(&self, n: usize, m: usize) -> Self {
        VectorPolynomial { rows: self.rows.iter().map(|p| p.reverse(n, m)).collect() }
    }

    pub fn shift(&self, a: usize, b: usize) -> Self {
        VectorPolynomial { rows: self.rows.iter().map(|p| p.shift(a, b)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "vector polynomial length mismatch");
        VectorPolynomial { rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "vector polynomial length mismatch");
        VectorPolynomial { rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a + b).collect() }
    }

    pub fn concat(&self, other: &Self) -> Self {
        VectorPolynomial { rows: self.rows.iter().chain(&other.rows).cloned().collect() }
    }

    pub fn row(&self, r: usize) -> Self {
        VectorPolynomial { rows: vec![self.rows[r].clone()] }
    }

    /// Values at a point as a column matrix.
    pub fn eval(&self, z: C64, w: C64) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.len(), 1, |r, _| self.rows[r].eval(z, w))
    }

    /// Coefficient matrix of z^n against (w^m, ..., 1): the z-leading coefficient at bidegree (n, m).
    pub fn z_leading(&self, n: usize, m: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.len(), m + 1, |r, k| self.rows[r].coeff(n, m - k))
    }

    /// Coefficient matrix of w^m against (z^n, ..., 1): the w-leading coefficient at bidegree (n, m).
    pub fn w_leading(&self, n: usize, m: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.len(), n + 1, |r, k| self.rows[r].coeff(n - k, m))
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "vector polynomial length mismatch");
        self.rows.iter().zip(&other.rows).fold(0.0, |m, (a, b)| m.max(a.max_coeff_diff(b)))
    }
}

/// Finitely supported Laurent polynomial in z, w.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPolynomial {
    pub terms: Vec<(i64, i64, C64)>,
}

impl LaurentPolynomial {
    pub fn new(terms: Vec<(i64, i64, C64)>) -> Self {
        LaurentPolynomial { terms }
    }

    pub fn from_polynomial(p: &BivariatePolynomial) -> Self {
        LaurentPolynomial { terms: p.terms().map(|(i, j, c)| (i as i64, j as i64, c)).collect() }
    }

    /// `p * conj(q)` on the torus, i.e. p(z, w) q^dagger(z, w).
    pub fn times_adjoint(p: &BivariatePolynomial, q: &BivariatePolynomial) -> Self {
        let mut terms = Vec::new();
        for (i, j, a) in p.terms() {
            for (k, l, b) in q.terms() {
                terms.push((i as i64 - k as i64, j as i64 - l as i64, a * b.conj()));
            }
        }
        LaurentPolynomial { terms }
    }

    pub fn eval(&self, z: C64, w: C64) -> C64 {
        self.terms.iter().map(|&(i, j, c)| c * z.powi(i as i32) * w.powi(j as i32)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn reverse_examples() {
        let one = BivariatePolynomial::constant(c(1.0, 0.0));
        assert_eq!(one.reverse(1, 1), BivariatePolynomial::monomial(1, 1, c(1.0, 0.0)));
        let p = BivariatePolynomial::from_terms(&[(1, 0, c(1.0, 0.0)), (0, 1, c(0.0, 2.0))]);
        let expected = BivariatePolynomial::from_terms(&[(0, 1, c(1.0, 0.0)), (1, 0, c(0.0, -2.0))]);
        assert!(p.reverse(1, 1).max_coeff_diff(&expected) == 0.0);
        assert!(p.reverse(1, 1).reverse(1, 1).max_coeff_diff(&p) == 0.0);
    }

    #[test]
    fn reverse_matches_pointwise_definition() {
        let p = BivariatePolynomial::from_terms(&[(2, 1, c(0.3, -1.0)), (0, 1, c(2.0, 0.5)), (1, 0, c(-0.7, 0.2))]);
        let (z, w) = (c(0.4, 0.9), c(-1.3, 0.2));
        let direct = z.powi(3) * w.powi(2) * p.eval((1.0 / z).conj(), (1.0 / w).conj()).conj();
        assert!((p.reverse(3, 2).eval(z, w) - direct).norm() < 1e-13);
    }

    #[test]
    fn horner_matches_terms() {
        let p = BivariatePolynomial::from_terms(&[(2, 1, c(0.3, -1.0)), (0, 2, c(2.0, 0.5)), (1, 0, c(-0.7, 0.2))]);
        let (z, w) = (c(0.4, 0.9), c(-1.3, 0.2));
        let direct: C64 = p.terms().map(|(i, j, a)| a * z.powi(i as i32) * w.powi(j as i32)).sum();
        assert!((p.eval(z, w) - direct).norm() < 1e-14);
    }

    #[test]
    fn leading_coefficients() {
        let v = VectorPolynomial::new(vec![
            BivariatePolynomial::from_terms(&[(1, 1, c(2.0, 0.0)), (1, 0, c(3.0, 0.0)), (0, 1, c(5.0, 0.0))]),
            BivariatePolynomial::from_terms(&[(1, 0, c(7.0, 0.0))]),
        ]);
        let lz = v.z_leading(1, 1);
        assert_eq!(lz, ComplexMatrix::from_real_rows(&[&[2.0, 3.0], &[0.0, 7.0]]));
        let lw = v.w_leading(1, 1);
        assert_eq!(lw, ComplexMatrix::from_real_rows(&[&[2.0, 5.0], &[0.0, 0.0]]));
    }

    #[test]
    fn laurent_product_on_torus() {
        let p = BivariatePolynomial::from_terms(&[(1, 0, c(1.0, 1.0)), (0, 1, c(0.5, 0.0))]);
        let q = BivariatePolynomial::from_terms(&[(1, 1, c(2.0, -1.0)), (0, 0, c(1.0, 0.0))]);
        let (z, w) = (C64::from_polar(1.0, 0.7), C64::from_polar(1.0, -2.1));
        let lp = LaurentPolynomial::times_adjoint(&p, &q);
        assert!((lp.eval(z, w) - p.eval(z, w) * q.eval(z, w).conj()).norm() < 1e-14);
    }
}
