//! Bivariate orthonormal polynomial families and their recurrence coefficients.
//!
//! `Φ_{n,m}` is the column of `m+1` orthonormal polynomials obtained by Gram–Schmidt on the
//! lexicographically ordered monomials of bidegree `(n, m)`; `Φ̃_{n,m}` is its `n+1`-row
//! counterpart for the reverse lexicographic order. Both are computed directly from the
//! moment matrix, and serve as the oracle for the recurrence-driven synthesis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, LinalgError, MomentError, Result};
use crate::matrix::{lead_selector, ordering_permutation, shift_selector, ComplexMatrix, C64, PIVOT_TOL};
use crate::moments::{MomentTable, Ordering};
use crate::poly::{BivariatePolynomial, VectorPolynomial};

pub const POINT_SEED: u64 = 0x5EED;

/// Orthonormal families at every level `(n, m)` up to `(n_max, m_max)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Families {
    n_max: usize,
    m_max: usize,
    lex: Vec<VectorPolynomial>,
    revlex: Vec<VectorPolynomial>,
}

impl Families {
    /// Families from per-level lists indexed by `n * (m_max + 1) + m`.
    pub fn new(n_max: usize, m_max: usize, lex: Vec<VectorPolynomial>, revlex: Vec<VectorPolynomial>) -> Self {
        assert_eq!(lex.len(), (n_max + 1) * (m_max + 1));
        assert_eq!(revlex.len(), lex.len());
        Families { n_max, m_max, lex, revlex }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// `Φ_{n,m}`, rows of bidegree `(n, m-r)` leading terms.
    pub fn phi(&self, n: usize, m: usize) -> &VectorPolynomial {
        &self.lex[n * (self.m_max + 1) + m]
    }

    /// `Φ̃_{n,m}`, reverse lexicographic family.
    pub fn phi_t(&self, n: usize, m: usize) -> &VectorPolynomial {
        &self.revlex[n * (self.m_max + 1) + m]
    }

    /// `Φ_{n,m}` or the empty column when a level index is negative.
    pub fn phi_or_empty(&self, n: Option<usize>, m: Option<usize>) -> VectorPolynomial {
        match (n, m) {
            (Some(n), Some(m)) => self.phi(n, m).clone(),
            _ => VectorPolynomial::new(Vec::new()),
        }
    }

    pub fn phi_t_or_empty(&self, n: Option<usize>, m: Option<usize>) -> VectorPolynomial {
        match (n, m) {
            (Some(n), Some(m)) => self.phi_t(n, m).clone(),
            _ => VectorPolynomial::new(Vec::new()),
        }
    }

    /// Largest coefficient difference over all levels and both orderings.
    pub fn max_coeff_diff(&self, other: &Families) -> f64 {
        assert_eq!((self.n_max, self.m_max), (other.n_max, other.m_max));
        self.lex
            .iter()
            .zip(&other.lex)
            .chain(self.revlex.iter().zip(&other.revlex))
            .fold(0.0, |acc, (a, b)| acc.max(a.max_coeff_diff(b)))
    }
}

/// Orthonormal family at a single level by Cholesky of the moment matrix.
///
/// With `C = B B^dagger` (`B` upper triangular) the rows of `B^{-1}` against the monomial vector
/// are orthonormal and each row has a positive coefficient on its own leading monomial.
pub fn gram_schmidt_level(moments: &MomentTable, n: usize, m: usize, ordering: Ordering) -> Result<VectorPolynomial> {
    let c = moments.assemble(n, m, ordering)?;
    let b = c.upper_cholesky(PIVOT_TOL).map_err(|e| match e {
        LinalgError::NotPositiveDefinite { .. } => Error::NotPositiveDefinite { n, m },
        other => Error::Linalg(other),
    })?;
    let u = b.inverse()?;
    let monomials = match ordering {
        Ordering::Lex => crate::matrix::lex_monomials(n, m),
        Ordering::RevLex => crate::matrix::revlex_monomials(n, m),
    };
    let count = match ordering {
        Ordering::Lex => m + 1,
        Ordering::RevLex => n + 1,
    };
    let rows = (0..count)
        .map(|r| {
            let mut p = BivariatePolynomial::zero(n, m);
            for (s, &(i, j)) in monomials.iter().enumerate() {
                p.set(i, j, u[(r, s)]);
            }
            p
        })
        .collect();
    Ok(VectorPolynomial::new(rows))
}

/// Both families at every level up to `(n_max, m_max)`.
pub fn gram_schmidt_levels(moments: &MomentTable, n_max: usize, m_max: usize) -> Result<Families> {
    if !moments.covers(n_max, m_max) {
        return Err(MomentError::MissingMoment(n_max as i64, m_max as i64).into());
    }
    let mut lex = Vec::new();
    let mut revlex = Vec::new();
    for n in 0..=n_max {
        for m in 0..=m_max {
            lex.push(gram_schmidt_level(moments, n, m, Ordering::Lex)?);
            revlex.push(gram_schmidt_level(moments, n, m, Ordering::RevLex)?);
        }
    }
    Ok(Families::new(n_max, m_max, lex, revlex))
}

/// Recurrence coefficients at one level.
///
/// Shapes: `e_hat`, `a` are `(m+1)x(m+1)` (present for `n > 0`); `e_hat_t`, `a_t` are
/// `(n+1)x(n+1)` (present for `m > 0`); `k`, `k1` are `m x n`; `gamma`, `gamma1` are
/// `m x (m+1)`; `gamma_t`, `gamma1_t` are `n x (n+1)`; `i`, `i1` are `(m+1)x(n+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelCoefficients {
    pub n: usize,
    pub m: usize,
    pub e_hat: Option<ComplexMatrix>,
    pub a: Option<ComplexMatrix>,
    pub e_hat_t: Option<ComplexMatrix>,
    pub a_t: Option<ComplexMatrix>,
    pub k: ComplexMatrix,
    pub k1: ComplexMatrix,
    pub k_t: ComplexMatrix,
    pub k1_t: ComplexMatrix,
    pub gamma: ComplexMatrix,
    pub gamma1: ComplexMatrix,
    pub gamma_t: ComplexMatrix,
    pub gamma1_t: ComplexMatrix,
    pub i: ComplexMatrix,
    pub i1: ComplexMatrix,
    pub i_t: ComplexMatrix,
    pub i1_t: ComplexMatrix,
}

impl LevelCoefficients {
    /// Largest entrywise difference over every coefficient present in both.
    pub fn max_diff(&self, other: &LevelCoefficients) -> f64 {
        let opt = |a: &Option<ComplexMatrix>, b: &Option<ComplexMatrix>| match (a, b) {
            (Some(x), Some(y)) => x.max_diff(y),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        [
            opt(&self.e_hat, &other.e_hat),
            opt(&self.a, &other.a),
            opt(&self.e_hat_t, &other.e_hat_t),
            opt(&self.a_t, &other.a_t),
            self.k.max_diff(&other.k),
            self.k1.max_diff(&other.k1),
            self.k_t.max_diff(&other.k_t),
            self.k1_t.max_diff(&other.k1_t),
            self.gamma.max_diff(&other.gamma),
            self.gamma1.max_diff(&other.gamma1),
            self.gamma_t.max_diff(&other.gamma_t),
            self.gamma1_t.max_diff(&other.gamma1_t),
            self.i.max_diff(&other.i),
            self.i1.max_diff(&other.i1),
            self.i_t.max_diff(&other.i_t),
            self.i1_t.max_diff(&other.i1_t),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Coefficients computed as inner products of the families.
pub fn coefficients_by_inner_product(
    moments: &MomentTable,
    fam: &Families,
    n: usize,
    m: usize,
) -> std::result::Result<LevelCoefficients, MomentError> {
    let ip = |x: &VectorPolynomial, y: &VectorPolynomial| moments.inner_matrix(x, y);
    let p = fam.phi(n, m);
    let pt = fam.phi_t(n, m);
    let (e_hat, a) = if n > 0 {
        let prev = fam.phi(n - 1, m);
        let zp = prev.shift(1, 0);
        (Some(ip(&zp, &prev.reverse(n - 1, m))?), Some(ip(&zp, p)?))
    } else {
        (None, None)
    };
    let (e_hat_t, a_t) = if m > 0 {
        let prev = fam.phi_t(n, m - 1);
        let wp = prev.shift(0, 1);
        (Some(ip(&wp, &prev.reverse(n, m - 1))?), Some(ip(&wp, pt)?))
    } else {
        (None, None)
    };
    let (k, k1, k_t, k1_t) = if n > 0 && m > 0 {
        let dm = fam.phi(n, m - 1);
        let dn = fam.phi_t(n - 1, m);
        (
            ip(dm, dn)?,
            ip(&dm.shift(0, 1), &dn.reverse(n - 1, m))?,
            ip(dn, dm)?,
            ip(&dn.shift(1, 0), &dm.reverse(n, m - 1))?,
        )
    } else {
        (ComplexMatrix::zeros(m, n), ComplexMatrix::zeros(m, n), ComplexMatrix::zeros(n, m), ComplexMatrix::zeros(n, m))
    };
    let (gamma, gamma1) = if m > 0 {
        let dm = fam.phi(n, m - 1);
        (ip(dm, p)?, ip(&dm.shift(0, 1), p)?)
    } else {
        (ComplexMatrix::zeros(0, 1), ComplexMatrix::zeros(0, 1))
    };
    let (gamma_t, gamma1_t) = if n > 0 {
        let dn = fam.phi_t(n - 1, m);
        (ip(dn, pt)?, ip(&dn.shift(1, 0), pt)?)
    } else {
        (ComplexMatrix::zeros(0, 1), ComplexMatrix::zeros(0, 1))
    };
    Ok(LevelCoefficients {
        n,
        m,
        e_hat,
        a,
        e_hat_t,
        a_t,
        k,
        k1,
        k_t,
        k1_t,
        gamma,
        gamma1,
        gamma_t,
        gamma1_t,
        i: ip(p, pt)?,
        i1: ip(&p.reverse(n, m), pt)?,
        i_t: ip(pt, p)?,
        i1_t: ip(&pt.reverse(n, m), p)?,
    })
}

/// Named residuals, each a max-norm.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualReport {
    pub entries: Vec<(String, f64)>,
}

impl ResidualReport {
    pub fn push(&mut self, name: &str, value: f64) {
        match self.entries.iter_mut().find(|(k, _)| k == name) {
            Some(e) => e.1 = e.1.max(value),
            None => self.entries.push((name.to_string(), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == name).map(|e| e.1)
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.1))
    }

    pub fn merge(&mut self, other: &ResidualReport) {
        for (k, v) in &other.entries {
            self.push(k, *v);
        }
    }
}

/// Seeded sample of point pairs with `|z| = rz`, `|w| = rw`.
pub fn seeded_points(count: usize, rz: f64, rw: f64) -> Vec<(C64, C64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(POINT_SEED);
    let tau = std::f64::consts::TAU;
    (0..count)
        .map(|_| (C64::from_polar(rz, rng.gen::<f64>() * tau), C64::from_polar(rw, rng.gen::<f64>() * tau)))
        .collect()
}

fn dec(k: usize) -> Option<usize> {
    k.checked_sub(1)
}

/// Pointwise residuals of the lexicographic and reverse lexicographic recurrences at level `(n, m)`.
pub fn verify_recurrences(
    fam: &Families,
    c: &LevelCoefficients,
    points: &[(C64, C64)],
) -> std::result::Result<ResidualReport, LinalgError> {
    let (n, m) = (c.n, c.m);
    let p = fam.phi(n, m);
    let pt = fam.phi_t(n, m);
    let p_dm = fam.phi_or_empty(Some(n), dec(m));
    let pt_dn = fam.phi_t_or_empty(dec(n), Some(m));
    let rev_p = p.reverse(n, m);
    let rev_pt = pt.reverse(n, m);
    let rev_p_dm = p_dm.reverse(n, m.saturating_sub(1));
    let rev_pt_dn = pt_dn.reverse(n.saturating_sub(1), m);

    let mut report = ResidualReport::default();
    for &(z, w) in points {
        let zc = ComplexMatrix::scalar(z);
        let wc = ComplexMatrix::scalar(w);
        let f = p.eval(z, w);
        let ft = pt.eval(z, w);
        let f_dm = p_dm.eval(z, w);
        let ft_dn = pt_dn.eval(z, w);
        let rf = rev_p.eval(z, w);
        let rft = rev_pt.eval(z, w);
        let rf_dm = rev_p_dm.eval(z, w);
        let rft_dn = rev_pt_dn.eval(z, w);

        if let (Some(a), Some(e)) = (&c.a, &c.e_hat) {
            let prev = fam.phi(n - 1, m);
            let g = prev.eval(z, w);
            let rg = prev.reverse(n - 1, m).eval(z, w);
            let zg = &g * &zc;
            report.push("forward", (a * &f - (&zg - e * &rg)).max_abs());
            let lhs = &f + &(a.adjoint() * e * a.transpose().inverse()? * &rf);
            report.push("forward_reversed", (lhs - a.adjoint() * &zg).max_abs());
        }
        if let (Some(a), Some(e)) = (&c.a_t, &c.e_hat_t) {
            let prev = fam.phi_t(n, m - 1);
            let g = prev.eval(z, w);
            let rg = prev.reverse(n, m - 1).eval(z, w);
            let wg = &g * &wc;
            report.push("forward_t", (a * &ft - (&wg - e * &rg)).max_abs());
            let lhs = &ft + &(a.adjoint() * e * a.transpose().inverse()? * &rft);
            report.push("forward_reversed_t", (lhs - a.adjoint() * &wg).max_abs());
        }
        report.push("gamma", (&c.gamma * &f - (&f_dm - &c.k * &ft_dn)).max_abs());
        report.push("gamma1", (&c.gamma1 * &f - (&f_dm * &wc - &c.k1 * &rft_dn)).max_abs());
        report.push("transfer", (&f - &c.i * &ft - c.gamma.adjoint() * &f_dm).max_abs());
        report.push("transfer_reversed", (&rf - &c.i1 * &ft - c.gamma1.transpose() * &rf_dm).max_abs());
        report.push("gamma_t", (&c.gamma_t * &ft - (&ft_dn - &c.k_t * &f_dm)).max_abs());
        report.push("gamma1_t", (&c.gamma1_t * &ft - (&ft_dn * &zc - &c.k1_t * &rf_dm)).max_abs());
        report.push("transfer_t", (&ft - &c.i_t * &f - c.gamma_t.adjoint() * &ft_dn).max_abs());
        report.push("transfer_reversed_t", (&rft - &c.i1_t * &f - c.gamma1_t.transpose() * &rft_dn).max_abs());
    }
    Ok(report)
}

/// Algebraic identities holding within one level: duality between the two orderings,
/// the unitarity-type relations and the structural zero patterns.
pub fn verify_level_identities(c: &LevelCoefficients) -> ResidualReport {
    let (n, m) = (c.n, c.m);
    let id = ComplexMatrix::identity;
    let mut r = ResidualReport::default();
    r.push("dual_k", c.k_t.max_diff(&c.k.adjoint()));
    r.push("dual_k1", c.k1_t.max_diff(&c.k1.transpose()));
    r.push("dual_i", c.i_t.max_diff(&c.i.adjoint()));
    r.push("dual_i1", c.i1_t.max_diff(&c.i1.transpose()));
    if let (Some(a), Some(e)) = (&c.a, &c.e_hat) {
        r.push("a_defect", (a * &a.adjoint()).max_diff(&(id(m + 1) - e * &e.adjoint())));
        r.push("e_symmetric", e.max_diff(&e.transpose()));
    }
    if let (Some(a), Some(e)) = (&c.a_t, &c.e_hat_t) {
        r.push("a_defect_t", (a * &a.adjoint()).max_diff(&(id(n + 1) - e * &e.adjoint())));
        r.push("e_symmetric_t", e.max_diff(&e.transpose()));
    }
    r.push("gamma_defect", (&c.gamma * &c.gamma.adjoint()).max_diff(&(id(m) - &c.k * &c.k.adjoint())));
    r.push("gamma1_defect", (&c.gamma1 * &c.gamma1.adjoint()).max_diff(&(id(m) - &c.k1 * &c.k1.adjoint())));
    r.push("gamma_defect_t", (&c.gamma_t * &c.gamma_t.adjoint()).max_diff(&(id(n) - c.k.adjoint() * &c.k)));
    r.push("gamma1_defect_t", (&c.gamma1_t * &c.gamma1_t.adjoint()).max_diff(&(id(n) - c.k1.transpose() * &c.k1.conj())));
    r.push("transfer_isometry", (&c.i * &c.i.adjoint() + c.gamma.adjoint() * &c.gamma).max_diff(&id(m + 1)));
    r.push("transfer_reversed_isometry", (&c.i1 * &c.i1.adjoint() + c.gamma1.transpose() * c.gamma1.conj()).max_diff(&id(m + 1)));
    r.push("transfer_isometry_t", (c.i.adjoint() * &c.i + c.gamma_t.adjoint() * &c.gamma_t).max_diff(&id(n + 1)));

    let mut pattern: f64 = 0.0;
    for row in 0..m {
        for col in 0..=m {
            if col <= row {
                pattern = pattern.max(c.gamma[(row, col)].norm());
            }
            if col < row {
                pattern = pattern.max(c.gamma1[(row, col)].norm());
            }
        }
        pattern = pattern.max(c.gamma[(row, row + 1)].im.abs()).max(c.gamma1[(row, row)].im.abs());
        if c.gamma[(row, row + 1)].re <= 0.0 || c.gamma1[(row, row)].re <= 0.0 {
            pattern = f64::INFINITY;
        }
    }
    for row in 0..n {
        for col in 0..=row {
            pattern = pattern.max(c.gamma_t[(row, col)].norm());
        }
        if c.gamma_t[(row, row + 1)].re <= 0.0 {
            pattern = f64::INFINITY;
        }
    }
    for row in 0..=m {
        let expect = if row == 0 { 1.0 } else { 0.0 };
        pattern = pattern.max((c.i[(row, 0)] - expect).norm());
    }
    for col in 1..=n {
        pattern = pattern.max(c.i[(0, col)].norm());
    }
    r.push("zero_pattern", pattern);
    r
}

/// Closed forms of the coefficients in terms of leading coefficients and the inverse
/// moment matrix, valid for `n, m >= 1`.
pub fn verify_leading_coefficient_formulas(
    moments: &MomentTable,
    fam: &Families,
    c: &LevelCoefficients,
) -> Result<ResidualReport> {
    let (n, m) = (c.n, c.m);
    assert!(n >= 1 && m >= 1, "leading-coefficient formulas need n, m >= 1");
    let lm = fam.phi(n, m).z_leading(n, m);
    let lm1 = fam.phi(n, m - 1).z_leading(n, m - 1);
    let ltn = fam.phi_t(n, m).w_leading(n, m);
    let ltn1 = fam.phi_t(n - 1, m).w_leading(n - 1, m);
    let lm_inv = lm.inverse()?;
    let ltn1_inv = ltn1.inverse()?;

    let gamma = &lm1 * shift_selector(m) * &lm_inv;
    let gamma1 = &lm1 * lead_selector(m) * &lm_inv;
    let ft = &ltn * shift_selector(n).transpose() * &ltn1_inv;
    let ft1 = &ltn * lead_selector(n).transpose() * &ltn1_inv;

    let mut r = ResidualReport::default();
    r.push("gamma_leading", gamma.max_diff(&c.gamma));
    r.push("gamma1_leading", gamma1.max_diff(&c.gamma1));
    r.push("k_leading", (-(&c.gamma * &c.i * &ft)).max_diff(&c.k));
    r.push("k1_leading", (-(&c.gamma1 * c.i1.conj() * ft1.conj())).max_diff(&c.k1));

    let cinv = moments.assemble(n, m, Ordering::Lex)?.inverse()?;
    let total = (n + 1) * (m + 1);
    let sel = ComplexMatrix::from_fn(m + 1, total, |r, s| if r == s { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let sel_rev =
        ComplexMatrix::from_fn(m + 1, total, |r, s| if s + 1 + r == total { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let sel_t = ComplexMatrix::from_fn(total, n + 1, |r, s| if r == s { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let tail = &cinv * ordering_permutation(n, m).transpose() * &sel_t * ltn.inverse()?;
    r.push("i_leading", (lm.adjoint().inverse()? * &sel * &tail).max_diff(&c.i));
    r.push("i1_leading", (lm.transpose().inverse()? * &sel_rev * &tail).max_diff(&c.i1));
    Ok(r)
}

/// Relations tying level `(n, m)` to the neighbouring levels `dn = (n-1, m)` and `dm = (n, m-1)`.
pub fn verify_cross_level(
    c: &LevelCoefficients,
    dn: &LevelCoefficients,
    dm: &LevelCoefficients,
) -> std::result::Result<ResidualReport, LinalgError> {
    let (n, m) = (c.n, c.m);
    assert!(n >= 1 && m >= 1);
    let mut r = ResidualReport::default();
    let e = c.e_hat.as_ref().expect("n >= 1");
    let a = c.a.as_ref().expect("n >= 1");
    let dm_e = dm.e_hat.as_ref().expect("n >= 1");
    let dm_a = dm.a.as_ref().expect("n >= 1");
    let dn_et = dn.e_hat_t.as_ref().expect("m >= 1");
    let dn_at = dn.a_t.as_ref().expect("m >= 1");
    let dn_at_inv = dn_at.inverse()?;

    if m > 1 {
        let lhs = &dm.gamma1 * &c.k;
        let rhs = (&dm.k - &dm.k1 * dn_et.adjoint()) * dn_at_inv.adjoint();
        r.push("k_from_left", lhs.max_diff(&rhs));
        let lhs = &dm.gamma * &c.k1;
        let rhs = (&dm.k1 - &dm.k * dn_et) * dn_at_inv.transpose();
        r.push("k1_from_left", lhs.max_diff(&rhs));
    }
    if n > 1 {
        let dm_a_inv = dm_a.inverse()?;
        let lhs = &c.k * dn.gamma1_t.adjoint();
        let rhs = &dm_a_inv * (&dn.k - dm_e * dn.k1.conj());
        r.push("k_from_right", lhs.max_diff(&rhs));
        let lhs = &c.k1 * dn.gamma_t.transpose();
        let rhs = &dm_a_inv * (&dn.k1 - dm_e * dn.k.conj());
        r.push("k1_from_right", lhs.max_diff(&rhs));
    }
    let lhs = &dn.gamma * e;
    let rhs = dm_a * &c.k * dn.i1.adjoint() + dm_e * dn.gamma1.conj();
    r.push("e_from_gamma", lhs.max_diff(&rhs));
    let lhs = e * dn.gamma1.transpose();
    let rhs = &dn.i * c.k1.transpose() * dm_a.transpose() + dn.gamma.adjoint() * dm_e;
    r.push("e_from_gamma1", lhs.max_diff(&rhs));
    let et = c.e_hat_t.as_ref().expect("m >= 1");
    let lhs = &c.gamma1 * c.gamma.adjoint();
    let rhs = &dm.i * et * dm.i1.transpose()
        + dm.gamma.adjoint() * &dm.gamma1
        + &c.k1 * dn_at.conj().inverse()? * dn_et.adjoint() * dn_at * c.k.adjoint();
    r.push("gamma1_from_gamma", lhs.max_diff(&rhs));
    let lhs = &c.i * c.gamma_t.adjoint() + c.gamma.adjoint() * &c.k;
    r.push("transfer_orthogonality", lhs.max_abs());
    let rhs = -(a.conj().inverse()? * e.adjoint() * a * &c.i) + a.transpose() * &dn.i1 * &c.gamma_t;
    r.push("i1_from_below", c.i1.max_diff(&rhs));
    Ok(r)
}

fn kernel(x: &VectorPolynomial, z: C64, w: C64, z1: C64, w1: C64) -> C64 {
    let a = x.eval(z, w);
    let b = x.eval(z1, w1);
    (0..x.len()).map(|r| a[(r, 0)] * b[(r, 0)].conj()).sum()
}

/// Max deviation among the Christoffel–Darboux-type identities at level `(n, m)` for the pair of points.
///
/// The level must have `n, m >= 1`; the families must contain every level below it.
pub fn christoffel_darboux_residual(fam: &Families, n: usize, m: usize, z: C64, w: C64, z1: C64, w1: C64) -> f64 {
    assert!(n >= 1 && m >= 1);
    let kern = |x: &VectorPolynomial| kernel(x, z, w, z1, w1);
    let one = C64::new(1.0, 0.0);
    let sz = z1.conj() * z;
    let sw = w1.conj() * w;
    let p = fam.phi(n, m);
    let pt = fam.phi_t(n, m);

    let lhs = kern(&p.reverse(n, m)) - sz * kern(p);
    let via_dn = (one - sz) * kern(p) + kern(&fam.phi(n - 1, m).reverse(n - 1, m)) - sz * kern(fam.phi(n - 1, m));
    let via_dm = (one - sz) * kern(pt) + kern(&fam.phi(n, m - 1).reverse(n, m - 1)) - sz * kern(fam.phi(n, m - 1));
    let mut worst = (lhs - via_dn).norm().max((lhs - via_dm).norm());

    if (one - sz).norm() > 1e-6 {
        let sum_k: C64 = (0..=n).map(|k| kern(fam.phi(k, m))).sum();
        let sum_j: C64 = (0..=m).map(|j| kern(fam.phi_t(n, j))).sum();
        worst = worst.max((lhs / (one - sz) - sum_k).norm()).max((sum_k - sum_j).norm());
    }
    if (one - sw).norm() > 1e-6 {
        let lhs_t = kern(&pt.reverse(n, m)) - sw * kern(pt);
        let sum_j: C64 = (0..=m).map(|j| kern(fam.phi_t(n, j))).sum();
        let sum_k: C64 = (0..=n).map(|k| kern(fam.phi(k, m))).sum();
        worst = worst.max((lhs_t / (one - sw) - sum_k).norm()).max((lhs_t / (one - sw) - sum_j).norm());
    }
    let mixed = kern(p) - kern(fam.phi(n, m - 1)) - kern(pt) + kern(fam.phi_t(n - 1, m));
    worst.max(mixed.norm())
}

/// `<Φ, Φ> = I`, `<Φ̃, Φ̃> = I` and orthogonality against lower monomials, max residual.
pub fn orthonormality_residual(moments: &MomentTable, fam: &Families, n: usize, m: usize) -> std::result::Result<f64, MomentError> {
    let p = fam.phi(n, m);
    let pt = fam.phi_t(n, m);
    let mut worst = moments.inner_matrix(p, p)?.max_diff(&ComplexMatrix::identity(m + 1));
    worst = worst.max(moments.inner_matrix(pt, pt)?.max_diff(&ComplexMatrix::identity(n + 1)));
    for i in 0..=n {
        for j in 0..=m {
            let mono = VectorPolynomial::new(vec![BivariatePolynomial::monomial(i, j, C64::new(1.0, 0.0))]);
            if i < n {
                worst = worst.max(moments.inner_matrix(p, &mono)?.max_abs());
            }
            if j < m {
                worst = worst.max(moments.inner_matrix(pt, &mono)?.max_abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> MomentTable {
        crate::moments::moments_from_density(
            |z, w| {
                let d = C64::new(4.0, 0.0) + z + w * 0.5 + z * w * C64::new(0.3, 0.2);
                1.0 / d.norm_sqr()
            },
            3,
            3,
            64,
            64,
        )
        .unwrap()
    }

    #[test]
    fn delta_functional_gives_monomials() {
        let fam = gram_schmidt_levels(&MomentTable::delta(2, 2), 2, 2).unwrap();
        let p = fam.phi(1, 1);
        assert_eq!(p.len(), 2);
        assert!((p.rows[0].coeff(1, 1) - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((p.rows[1].coeff(1, 0) - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(p.rows[0].max_abs_coeff() <= 1.0 + 1e-14);
    }

    #[test]
    fn families_are_orthonormal() {
        let mom = fixture();
        let fam = gram_schmidt_levels(&mom, 3, 3).unwrap();
        for n in 0..=3 {
            for m in 0..=3 {
                assert!(orthonormality_residual(&mom, &fam, n, m).unwrap() < 1e-10, "({n},{m})");
            }
        }
    }

    #[test]
    fn recurrences_and_identities_hold() {
        let mom = fixture();
        let fam = gram_schmidt_levels(&mom, 3, 3).unwrap();
        let pts = seeded_points(6, 1.0, 1.0);
        let off = seeded_points(4, 0.6, 1.3);
        for n in 0..=3 {
            for m in 0..=3 {
                let c = coefficients_by_inner_product(&mom, &fam, n, m).unwrap();
                let rec = verify_recurrences(&fam, &c, &pts).unwrap();
                assert!(rec.max() < 1e-10, "({n},{m}) {rec:?}");
                let rec = verify_recurrences(&fam, &c, &off).unwrap();
                assert!(rec.max() < 1e-9, "({n},{m}) {rec:?}");
                let ids = verify_level_identities(&c);
                assert!(ids.max() < 1e-10, "({n},{m}) {ids:?}");
            }
        }
    }

    #[test]
    fn leading_and_cross_level_formulas_hold() {
        let mom = fixture();
        let fam = gram_schmidt_levels(&mom, 3, 3).unwrap();
        for n in 1..=3 {
            for m in 1..=3 {
                let c = coefficients_by_inner_product(&mom, &fam, n, m).unwrap();
                let dn = coefficients_by_inner_product(&mom, &fam, n - 1, m).unwrap();
                let dm = coefficients_by_inner_product(&mom, &fam, n, m - 1).unwrap();
                let lead = verify_leading_coefficient_formulas(&mom, &fam, &c).unwrap();
                assert!(lead.max() < 1e-10, "({n},{m}) {lead:?}");
                let cross = verify_cross_level(&c, &dn, &dm).unwrap();
                assert!(cross.max() < 1e-10, "({n},{m}) {cross:?}");
            }
        }
    }

    #[test]
    fn christoffel_darboux_on_and_off_torus() {
        let mom = fixture();
        let fam = gram_schmidt_levels(&mom, 3, 3).unwrap();
        let on = seeded_points(10, 1.0, 1.0);
        let off = seeded_points(10, 0.6, 1.3);
        for k in 0..on.len() - 1 {
            let (z, w) = on[k];
            let (z1, w1) = on[k + 1];
            assert!(christoffel_darboux_residual(&fam, 2, 3, z, w, z1, w1) < 1e-9);
            let (z, w) = off[k];
            let (z1, w1) = off[k + 1];
            assert!(christoffel_darboux_residual(&fam, 3, 2, z, w, z1, w1) < 1e-9);
        }
    }

    #[test]
    fn non_positive_moments_are_rejected() {
        let mut mom = MomentTable::delta(1, 1);
        mom.insert(1, 0, C64::new(1.5, 0.0)).unwrap();
        assert_eq!(gram_schmidt_levels(&mom, 1, 1), Err(Error::NotPositiveDefinite { n: 1, m: 0 }));
    }
}
