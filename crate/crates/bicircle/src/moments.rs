//! Moment tables c[i,j] = L(z^-i w^-j), the doubly Toeplitz matrices built from them, and
//! the associated functional and inner product.

use std::f64::consts::PI;

use crate::error::{LinalgError, MomentError};
use crate::matrix::{lex_monomials, revlex_monomials, ComplexMatrix, C64, PIVOT_TOL};
use crate::poly::{BivariatePolynomial, LaurentPolynomial, VectorPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ordering {
    Lex,
    RevLex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    n_max: usize,
    m_max: usize,
    values: Vec<Option<C64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdReport {
    pub positive_definite: bool,
    /// Smallest Cholesky pivot (the failing one when not positive definite).
    pub min_pivot: f64,
}

impl MomentTable {
    pub fn empty(n_max: usize, m_max: usize) -> Self {
        MomentTable { n_max, m_max, values: vec![None; (2 * n_max + 1) * (2 * m_max + 1)] }
    }

    /// Moments of the normalized Lebesgue measure: c[0,0] = 1, all others 0.
    pub fn delta(n_max: usize, m_max: usize) -> Self {
        let mut t = MomentTable { n_max, m_max, values: vec![Some(C64::new(0.0, 0.0)); (2 * n_max + 1) * (2 * m_max + 1)] };
        let s = t.slot(0, 0).expect("center slot");
        t.values[s] = Some(C64::new(1.0, 0.0));
        t
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    fn slot(&self, i: i64, j: i64) -> Option<usize> {
        let (n, m) = (self.n_max as i64, self.m_max as i64);
        if i.abs() > n || j.abs() > m {
            return None;
        }
        Some(((i + n) * (2 * m + 1) + (j + m)) as usize)
    }

    /// Stores c[i,j] and its mirror c[-i,-j] = conj(c[i,j]).
    pub fn insert(&mut self, i: i64, j: i64, value: C64) -> Result<(), MomentError> {
        let a = self.slot(i, j).ok_or(MomentError::MissingMoment(i, j))?;
        let b = self.slot(-i, -j).ok_or(MomentError::MissingMoment(-i, -j))?;
        if i == 0 && j == 0 {
            if value.im.abs() > 1e-12 * value.re.abs().max(1.0) {
                return Err(MomentError::NonRealCenter(value.im));
            }
            self.values[a] = Some(C64::new(value.re, 0.0));
        } else {
            self.values[a] = Some(value);
            self.values[b] = Some(value.conj());
        }
        Ok(())
    }

    pub fn get(&self, i: i64, j: i64) -> Result<C64, MomentError> {
        self.slot(i, j).and_then(|s| self.values[s]).ok_or(MomentError::MissingMoment(i, j))
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        self.slot(i, j).and_then(|s| self.values[s]).is_some()
    }

    /// True when every moment of the window |i| <= n, |j| <= m is present.
    pub fn covers(&self, n: usize, m: usize) -> bool {
        let (n, m) = (n as i64, m as i64);
        (-n..=n).all(|i| (-m..=m).all(|j| self.contains(i, j)))
    }

    /// Copy restricted to a smaller window.
    pub fn restrict(&self, n: usize, m: usize) -> Result<Self, MomentError> {
        let mut out = Self::empty(n, m);
        for i in -(n as i64)..=(n as i64) {
            for j in -(m as i64)..=(m as i64) {
                if let Some(s) = self.slot(i, j).and_then(|s| self.values[s]) {
                    let t = out.slot(i, j).expect("inside window");
                    out.values[t] = Some(s);
                } else {
                    return Err(MomentError::MissingMoment(i, j));
                }
            }
        }
        Ok(out)
    }

    /// Largest difference over the common index range; entries present in only one table count as infinite.
    pub fn max_diff(&self, other: &MomentTable) -> f64 {
        let (n, m) = (self.n_max.min(other.n_max) as i64, self.m_max.min(other.m_max) as i64);
        let mut worst: f64 = 0.0;
        for i in -n..=n {
            for j in -m..=m {
                worst = match (self.get(i, j), other.get(i, j)) {
                    (Ok(a), Ok(b)) => worst.max((a - b).norm()),
                    (Err(_), Err(_)) => worst,
                    _ => f64::INFINITY,
                };
            }
        }
        worst
    }

    /// Stored half-plane entries (i > 0, or i = 0 and j >= 0) in increasing order.
    pub fn half_plane(&self) -> Vec<(i64, i64, C64)> {
        let (n, m) = (self.n_max as i64, self.m_max as i64);
        let mut out = Vec::new();
        for i in 0..=n {
            for j in -m..=m {
                if i == 0 && j < 0 {
                    continue;
                }
                if let Ok(v) = self.get(i, j) {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// L(z^a w^b) = c[-a,-b].
    pub fn functional(&self, a: i64, b: i64) -> Result<C64, MomentError> {
        self.get(-a, -b)
    }

    pub fn evaluate(&self, p: &LaurentPolynomial) -> Result<C64, MomentError> {
        let mut acc = C64::new(0.0, 0.0);
        for &(i, j, c) in &p.terms {
            acc += c * self.functional(i, j)?;
        }
        Ok(acc)
    }

    /// <p, q> = L(p q^dagger).
    pub fn inner_product(&self, p: &BivariatePolynomial, q: &BivariatePolynomial) -> Result<C64, MomentError> {
        let mut acc = C64::new(0.0, 0.0);
        for (i, j, a) in p.terms() {
            for (k, l, b) in q.terms() {
                acc += a * b.conj() * self.functional(i as i64 - k as i64, j as i64 - l as i64)?;
            }
        }
        Ok(acc)
    }

    /// Matrix of inner products <X_r, Y_s>.
    pub fn inner_matrix(&self, x: &VectorPolynomial, y: &VectorPolynomial) -> Result<ComplexMatrix, MomentError> {
        let mut out = ComplexMatrix::zeros(x.len(), y.len());
        for (r, p) in x.rows.iter().enumerate() {
            for (s, q) in y.rows.iter().enumerate() {
                out[(r, s)] = self.inner_product(p, q)?;
            }
        }
        Ok(out)
    }

    /// Gram matrix of an arbitrary list of monomials.
    pub fn gram(&self, monomials: &[(usize, usize)]) -> Result<ComplexMatrix, MomentError> {
        let k = monomials.len();
        let mut g = ComplexMatrix::zeros(k, k);
        for (r, &(a, b)) in monomials.iter().enumerate() {
            for (s, &(c, d)) in monomials.iter().enumerate() {
                g[(r, s)] = self.get(c as i64 - a as i64, d as i64 - b as i64)?;
            }
        }
        Ok(g)
    }

    /// C[n,m] (lex) or its reverse-lexicographic counterpart.
    pub fn assemble(&self, n: usize, m: usize, ordering: Ordering) -> Result<ComplexMatrix, MomentError> {
        match ordering {
            Ordering::Lex => self.gram(&lex_monomials(n, m)),
            Ordering::RevLex => self.gram(&revlex_monomials(n, m)),
        }
    }

    /// Toeplitz blocks C_i, i = -n..=n, with (C_i)[p][q] = c[i, p-q]; index `i + n` in the result.
    pub fn blocks(&self, n: usize, m: usize) -> Result<Vec<ComplexMatrix>, MomentError> {
        let mut out = Vec::with_capacity(2 * n + 1);
        for i in -(n as i64)..=(n as i64) {
            let mut b = ComplexMatrix::zeros(m + 1, m + 1);
            for p in 0..=m {
                for q in 0..=m {
                    b[(p, q)] = self.get(i, p as i64 - q as i64)?;
                }
            }
            out.push(b);
        }
        Ok(out)
    }

    pub fn is_positive_definite(&self, n: usize, m: usize) -> Result<PdReport, MomentError> {
        let c = self.assemble(n, m, Ordering::Lex)?;
        Ok(pd_report(&c))
    }
}

/// Cholesky-based positive definiteness test with the smallest pivot as a diagnostic.
pub fn pd_report(c: &ComplexMatrix) -> PdReport {
    match c.lower_cholesky(PIVOT_TOL) {
        Ok(l) => PdReport { positive_definite: true, min_pivot: (0..l.rows()).map(|k| l[(k, k)].re.powi(2)).fold(f64::INFINITY, f64::min) },
        Err(LinalgError::NotPositiveDefinite { pivot, .. }) => PdReport { positive_definite: false, min_pivot: pivot },
        Err(_) => PdReport { positive_definite: false, min_pivot: f64::NAN },
    }
}

/// Tensor trapezoid moments (1/2pi)^2 of z^-i w^-j f over a `gz` x `gw` grid.
pub fn moments_from_density(density: impl Fn(C64, C64) -> f64, n: usize, m: usize, gz: usize, gw: usize) -> Result<MomentTable, MomentError> {
    let mut samples = vec![0.0; gz * gw];
    for a in 0..gz {
        for b in 0..gw {
            let z = C64::from_polar(1.0, 2.0 * PI * a as f64 / gz as f64);
            let w = C64::from_polar(1.0, 2.0 * PI * b as f64 / gw as f64);
            let v = density(z, w);
            if !(v > 0.0) {
                return Err(MomentError::NonPositiveDensitySample { i: a, j: b, value: v });
            }
            samples[a * gw + b] = v;
        }
    }
    let mut t = MomentTable::empty(n, m);
    let scale = 1.0 / (gz * gw) as f64;
    for i in 0..=(n as i64) {
        for j in -(m as i64)..=(m as i64) {
            if i == 0 && j < 0 {
                continue;
            }
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..gz {
                let zi = C64::from_polar(1.0, -2.0 * PI * ((i * a as i64).rem_euclid(gz as i64)) as f64 / gz as f64);
                for b in 0..gw {
                    let wj = C64::from_polar(1.0, -2.0 * PI * ((j * b as i64).rem_euclid(gw as i64)) as f64 / gw as f64);
                    acc += zi * wj * samples[a * gw + b];
                }
            }
            t.insert(i, j, acc * scale)?;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ordering_permutation;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn stable_density(z: C64, w: C64) -> f64 {
        1.0 / (c(4.0, 0.0) + z + w).norm_sqr()
    }

    #[test]
    fn delta_assembles_identity() {
        let t = MomentTable::delta(1, 1);
        assert_eq!(t.assemble(1, 1, Ordering::Lex).unwrap(), ComplexMatrix::identity(4));
        assert!(t.is_positive_definite(1, 1).unwrap().positive_definite);
    }

    #[test]
    fn single_reflection_matrix() {
        let a = c(0.3, -0.4);
        let mut t = MomentTable::empty(1, 0);
        t.insert(0, 0, c(1.0, 0.0)).unwrap();
        t.insert(1, 0, a).unwrap();
        let cm = t.assemble(1, 0, Ordering::Lex).unwrap();
        let expected = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), a.conj()], vec![a, c(1.0, 0.0)]]);
        assert_eq!(cm, expected);
    }

    #[test]
    fn unit_reflection_not_pd() {
        let mut t = MomentTable::empty(1, 0);
        t.insert(0, 0, c(1.0, 0.0)).unwrap();
        t.insert(1, 0, c(1.0, 0.0)).unwrap();
        assert!(!t.is_positive_definite(1, 0).unwrap().positive_definite);
    }

    #[test]
    fn missing_moment_reported() {
        let t = MomentTable::empty(1, 1);
        assert_eq!(t.assemble(1, 1, Ordering::Lex), Err(MomentError::MissingMoment(0, 0)));
    }

    #[test]
    fn inner_products_delta() {
        let t = MomentTable::delta(1, 1);
        let one = BivariatePolynomial::constant(c(1.0, 0.0));
        let zw = BivariatePolynomial::monomial(1, 1, c(1.0, 0.0));
        assert_eq!(t.inner_product(&one, &one).unwrap(), c(1.0, 0.0));
        assert_eq!(t.inner_product(&zw, &zw).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn inner_product_z_w_is_cross_moment() {
        let t = moments_from_density(stable_density, 1, 1, 64, 64).unwrap();
        let z = BivariatePolynomial::monomial(1, 0, c(1.0, 0.0));
        let w = BivariatePolynomial::monomial(0, 1, c(1.0, 0.0));
        assert_eq!(t.inner_product(&z, &w).unwrap(), t.get(-1, 1).unwrap());
        assert!((t.get(1, -1).unwrap() - t.inner_product(&w, &z).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn density_moments_exact_cases() {
        let t = moments_from_density(|_, _| 1.0, 2, 2, 8, 8).unwrap();
        assert!(t.assemble(2, 2, Ordering::Lex).unwrap().max_diff(&ComplexMatrix::identity(9)) < 1e-15);
        let t = moments_from_density(|z, _| (c(1.0, 0.0) + z * 0.5).norm_sqr(), 1, 1, 8, 8).unwrap();
        assert!((t.get(1, 0).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert!(t.get(0, 1).unwrap().norm() < 1e-15);
        assert!((t.get(0, 0).unwrap() - c(1.25, 0.0)).norm() < 1e-15);
        assert!(matches!(moments_from_density(|_, _| -1.0, 1, 1, 4, 4), Err(MomentError::NonPositiveDensitySample { .. })));
    }

    #[test]
    fn stable_fixture_is_pd_and_doubly_toeplitz() {
        let t = moments_from_density(stable_density, 2, 2, 128, 128).unwrap();
        let cm = t.assemble(2, 2, Ordering::Lex).unwrap();
        assert!(cm.is_hermitian(1e-14));
        assert!(t.is_positive_definite(2, 2).unwrap().positive_definite);
        assert!(crate::matrix::is_doubly_toeplitz(&cm, 3, 1e-12).unwrap());
        assert!(cm.min_eigenvalue() > 0.0);
    }

    #[test]
    fn orderings_related_by_permutation() {
        let t = moments_from_density(stable_density, 2, 1, 64, 64).unwrap();
        let lex = t.assemble(2, 1, Ordering::Lex).unwrap();
        let rl = t.assemble(2, 1, Ordering::RevLex).unwrap();
        let p = ordering_permutation(2, 1);
        assert!((&p * &lex * &p.transpose()).max_diff(&rl) < 1e-15);
    }

    #[test]
    fn quadratic_form_identity() {
        let t = moments_from_density(stable_density, 1, 2, 64, 64).unwrap();
        let p = BivariatePolynomial::from_terms(&[(1, 2, c(0.3, 1.0)), (0, 1, c(-2.0, 0.1)), (1, 0, c(0.5, 0.5)), (0, 0, c(1.0, 0.0))]);
        let v = ComplexMatrix::from_fn(6, 1, |r, _| {
            let (i, j) = lex_monomials(1, 2)[r];
            p.coeff(i, j)
        });
        let cm = t.assemble(1, 2, Ordering::Lex).unwrap();
        // <p,p> = sum p_a conj(p_b) C[a][b], the quadratic form in the conjugated coefficient vector
        let u = v.conj();
        let quad = (&u.adjoint() * &cm * &u)[(0, 0)];
        let via_functional = t.evaluate(&LaurentPolynomial::times_adjoint(&p, &p)).unwrap();
        assert!((quad - via_functional).norm() < 1e-13);
        assert!(via_functional.im.abs() < 1e-14 && via_functional.re > 0.0);
    }

    #[test]
    fn conjugate_symmetry_enforced() {
        let mut t = MomentTable::empty(2, 2);
        t.insert(1, -2, c(0.2, 0.7)).unwrap();
        assert_eq!(t.get(-1, 2).unwrap(), c(0.2, -0.7));
        assert!(t.insert(0, 0, c(1.0, 0.5)).is_err());
        assert!(t.insert(3, 0, c(1.0, 0.0)).is_err());
    }
}
