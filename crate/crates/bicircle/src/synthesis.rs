//! Level-by-level construction of a positive definite functional from free parameters.
//!
//! Every level `(n, m)` with `n, m >= 1` contributes two free complex numbers, `u[-n,m]`
//! (fixing `K_{n,m}`) and `u[n,m]` (fixing the corner of `K¹_{n,m}`); the axes contribute
//! the one-variable reflection coefficients `u[i,0]`, `u[0,j]`, and `u[0,0] > 0` fixes the mass.
//! A grid is admissible exactly when every `K`, `K¹` is a strict contraction, the axis
//! parameters lie in the open unit disk and the corner defect `h3` stays below one.

use std::collections::BTreeMap;

use crate::error::{Condition, Error, Inadmissible, MomentError};
use crate::matrix::{e1, lead_selector, lex_monomials, shift_selector, ComplexMatrix, C64, CONTRACTION_MARGIN, PIVOT_TOL};
use crate::moments::MomentTable;
use crate::orthopoly::{coefficients_by_inner_product, gram_schmidt_levels, Families, LevelCoefficients};
use crate::poly::{BivariatePolynomial, VectorPolynomial};

const DIVIDE_GUARD: f64 = 1e-14;

/// Free parameters `u[i,j]` of a functional at level `(n, m)`.
///
/// Stored under canonical indices: `(0,0)`, `(i,0)` with `i > 0`, and `(i,j)` with `j > 0`;
/// every other index is read through `u[-i,-j] = conj(u[i,j])`. Unset entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterGrid {
    n: usize,
    m: usize,
    values: BTreeMap<(i64, i64), C64>,
}

fn canonical(i: i64, j: i64) -> ((i64, i64), bool) {
    if j < 0 || (j == 0 && i < 0) {
        ((-i, -j), true)
    } else {
        ((i, j), false)
    }
}

impl ParameterGrid {
    pub fn new(n: usize, m: usize, u00: f64) -> Self {
        let mut values = BTreeMap::new();
        values.insert((0, 0), C64::new(u00, 0.0));
        ParameterGrid { n, m, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Whether `(i, j)` is one of the free parameters at this level.
    pub fn is_free(&self, i: i64, j: i64) -> bool {
        let ((i, j), _) = canonical(i, j);
        let (n, m) = (self.n as i64, self.m as i64);
        if j == 0 {
            i <= n
        } else {
            j <= m && (i == 0 || (i.abs() <= n))
        }
    }

    pub fn set(&mut self, i: i64, j: i64, value: C64) {
        assert!(self.is_free(i, j), "u[{i},{j}] is not a parameter at level ({},{})", self.n, self.m);
        let (key, flip) = canonical(i, j);
        self.values.insert(key, if flip { value.conj() } else { value });
    }

    pub fn get(&self, i: i64, j: i64) -> C64 {
        let (key, flip) = canonical(i, j);
        let v = self.values.get(&key).copied().unwrap_or(C64::new(0.0, 0.0));
        if flip {
            v.conj()
        } else {
            v
        }
    }

    /// The free indices in schedule order: center, z-axis, w-axis, then `(-n,m)`, `(n,m)` per interior level.
    pub fn free_indices(&self) -> Vec<(i64, i64)> {
        let (n, m) = (self.n as i64, self.m as i64);
        let mut out = vec![(0, 0)];
        out.extend((1..=n).map(|i| (i, 0)));
        out.extend((1..=m).map(|j| (0, j)));
        for a in 1..=n {
            for b in 1..=m {
                out.push((-a, b));
                out.push((a, b));
            }
        }
        out
    }

    pub fn max_diff(&self, other: &ParameterGrid) -> f64 {
        self.free_indices().iter().fold(0.0, |acc, &(i, j)| acc.max((self.get(i, j) - other.get(i, j)).norm()))
    }
}

/// Quantities checked at one level.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelRecord {
    pub n: usize,
    pub m: usize,
    pub axis_reflection: Option<f64>,
    pub k_norm: Option<f64>,
    pub k1_norm: Option<f64>,
    pub h3: Option<f64>,
    /// Residual of the rows of the reflection-coefficient system not used by the stacked solve.
    pub e_consistency: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdmissibilityReport {
    pub levels: Vec<LevelRecord>,
    pub failure: Option<Inadmissible>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.failure.is_none()
    }
}

/// Result of an unsuccessful synthesis: the failing condition, all checks made up to it, and the
/// moments determined so far including the one fixed by the failing quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisFailure {
    pub inadmissible: Inadmissible,
    pub report: AdmissibilityReport,
    pub attempted: MomentTable,
}

impl SynthesisFailure {
    /// Monomials whose Gram matrix under the attempted moments fails to be positive definite.
    ///
    /// A failing `K` leaves `c[n,m]` undetermined, so its top monomial `z^n w^m` is dropped.
    pub fn witness_monomials(&self) -> Vec<(usize, usize)> {
        let Inadmissible { n, m, condition, .. } = self.inadmissible;
        let mut mons = lex_monomials(n, m);
        if condition == Condition::KContraction {
            mons.remove(0);
        }
        mons
    }
}

impl std::fmt::Display for SynthesisFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.inadmissible.fmt(f)
    }
}

impl std::error::Error for SynthesisFailure {}

impl From<SynthesisFailure> for Error {
    fn from(f: SynthesisFailure) -> Self {
        Error::Inadmissible(f.inadmissible)
    }
}

/// A completed synthesis up to `(n_max, m_max)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisState {
    n_max: usize,
    m_max: usize,
    coefficients: Vec<LevelCoefficients>,
    families: Families,
    moments: MomentTable,
    report: AdmissibilityReport,
}

impl SynthesisState {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn level(&self, n: usize, m: usize) -> &LevelCoefficients {
        &self.coefficients[n * (self.m_max + 1) + m]
    }

    pub fn families(&self) -> &Families {
        &self.families
    }

    pub fn moments(&self) -> &MomentTable {
        &self.moments
    }

    pub fn report(&self) -> &AdmissibilityReport {
        &self.report
    }
}

#[derive(Clone, Debug)]
struct LevelState {
    c: LevelCoefficients,
    p: VectorPolynomial,
    pt: VectorPolynomial,
}

/// Incremental synthesizer; levels must be added so that `(n-1,m)` and `(n,m-1)` already exist.
#[derive(Clone, Debug)]
pub struct Synthesizer {
    n_max: usize,
    m_max: usize,
    margin: f64,
    moments: MomentTable,
    levels: BTreeMap<(usize, usize), LevelState>,
    report: AdmissibilityReport,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn with_duals(mut c: LevelCoefficients) -> LevelCoefficients {
    c.k_t = c.k.adjoint();
    c.k1_t = c.k1.transpose();
    c.i_t = c.i.adjoint();
    c.i1_t = c.i1.transpose();
    c
}

fn fit(v: VectorPolynomial, n: usize, m: usize) -> VectorPolynomial {
    VectorPolynomial::new(v.rows.into_iter().map(|p| p.resized(n, m)).collect())
}

impl Synthesizer {
    /// Starts at level `(0,0)` with moment table capacity `(n_max, m_max)`.
    pub fn new(n_max: usize, m_max: usize, u00: C64, margin: f64) -> Result<Self, SynthesisFailure> {
        let mut moments = MomentTable::empty(n_max, m_max);
        for i in -(n_max as i64)..=(n_max as i64) {
            for j in 0..=(m_max as i64) {
                moments.insert(i, j, C64::new(0.0, 0.0)).expect("index within table");
            }
        }
        let mut report = AdmissibilityReport::default();
        if !(u00.re > 0.0) || u00.im != 0.0 || !u00.re.is_finite() {
            let inad = Inadmissible { n: 0, m: 0, condition: Condition::CenterNotPositive, value: u00.re };
            report.failure = Some(inad.clone());
            return Err(SynthesisFailure { inadmissible: inad, report, attempted: moments });
        }
        moments.insert(0, 0, u00).expect("real center");
        let s = C64::new(1.0 / u00.re.sqrt(), 0.0);
        let p = VectorPolynomial::new(vec![BivariatePolynomial::constant(s)]);
        let empty = ComplexMatrix::zeros(0, 1);
        let c = with_duals(LevelCoefficients {
            n: 0,
            m: 0,
            e_hat: None,
            a: None,
            e_hat_t: None,
            a_t: None,
            k: ComplexMatrix::zeros(0, 0),
            k1: ComplexMatrix::zeros(0, 0),
            k_t: ComplexMatrix::zeros(0, 0),
            k1_t: ComplexMatrix::zeros(0, 0),
            gamma: empty.clone(),
            gamma1: empty.clone(),
            gamma_t: empty.clone(),
            gamma1_t: empty,
            i: ComplexMatrix::identity(1),
            i1: ComplexMatrix::identity(1),
            i_t: ComplexMatrix::identity(1),
            i1_t: ComplexMatrix::identity(1),
        });
        let mut levels = BTreeMap::new();
        levels.insert((0, 0), LevelState { c, p: p.clone(), pt: p });
        report.levels.push(LevelRecord { n: 0, m: 0, ..Default::default() });
        Ok(Synthesizer { n_max, m_max, margin, moments, levels, report })
    }

    pub fn moments(&self) -> &MomentTable {
        &self.moments
    }

    pub fn report(&self) -> &AdmissibilityReport {
        &self.report
    }

    pub fn coefficients(&self, n: usize, m: usize) -> Option<&LevelCoefficients> {
        self.levels.get(&(n, m)).map(|s| &s.c)
    }

    fn state(&self, n: usize, m: usize) -> &LevelState {
        self.levels.get(&(n, m)).unwrap_or_else(|| panic!("level ({n},{m}) has not been synthesized"))
    }

    fn fail(&mut self, n: usize, m: usize, condition: Condition, value: f64, record: LevelRecord) -> SynthesisFailure {
        let inad = Inadmissible { n, m, condition, value };
        self.report.levels.push(record);
        self.report.failure = Some(inad.clone());
        SynthesisFailure { inadmissible: inad, report: self.report.clone(), attempted: self.moments.clone() }
    }

    fn set_moment(&mut self, i: i64, j: i64, v: C64) {
        self.moments.insert(i, j, v).expect("moment index within table");
    }

    fn inner(&self, a: &BivariatePolynomial, b: &BivariatePolynomial) -> C64 {
        self.moments.inner_product(a, b).expect("moment table covers the level")
    }

    /// Adds level `(i, 0)` from the reflection coefficient `u[i,0]`.
    pub fn extend_z_axis(&mut self, i: usize, u: C64) -> Result<(), SynthesisFailure> {
        assert!(i >= 1 && i <= self.n_max);
        let prev = self.state(i - 1, 0).clone();
        let row = &prev.p.rows[0];
        let k = row.coeff(i - 1, 0).re;
        let zp = row.shift(1, 0);
        let rp = row.reverse(i - 1, 0);
        self.set_moment(-(i as i64), 0, C64::new(0.0, 0.0));
        let rest = self.inner(&zp, &rp);
        self.set_moment(-(i as i64), 0, (u - rest) / (k * k));
        let mut record = LevelRecord { n: i, m: 0, axis_reflection: Some(u.norm()), ..Default::default() };
        if u.norm() >= 1.0 - self.margin {
            return Err(self.fail(i, 0, Condition::AxisReflection, u.norm(), record));
        }
        let a = (1.0 - u.norm_sqr()).sqrt();
        let new_row = (&zp - &rp.scale(u)).scale(C64::new(1.0 / a, 0.0));
        let p = fit(VectorPolynomial::new(vec![new_row]), i, 0);
        let pt = fit(p.concat(&prev.pt), i, 0);
        let i1 = ComplexMatrix::scalar(-u.conj()).hstack(&prev.c.i1.scale_re(a));
        let gamma1_t = prev.pt.w_leading(i - 1, 0) * lead_selector(i) * pt.w_leading(i, 0).inverse().expect("triangular leading block");
        let c = with_duals(LevelCoefficients {
            n: i,
            m: 0,
            e_hat: Some(ComplexMatrix::scalar(u)),
            a: Some(ComplexMatrix::scalar(C64::new(a, 0.0))),
            e_hat_t: None,
            a_t: None,
            k: ComplexMatrix::zeros(0, i),
            k1: ComplexMatrix::zeros(0, i),
            k_t: ComplexMatrix::zeros(0, 0),
            k1_t: ComplexMatrix::zeros(0, 0),
            gamma: ComplexMatrix::zeros(0, 1),
            gamma1: ComplexMatrix::zeros(0, 1),
            gamma_t: shift_selector(i),
            gamma1_t,
            i: e1(i + 1).transpose(),
            i1,
            i_t: ComplexMatrix::zeros(0, 0),
            i1_t: ComplexMatrix::zeros(0, 0),
        });
        record.e_consistency = None;
        self.report.levels.push(record);
        self.levels.insert((i, 0), LevelState { c, p, pt });
        Ok(())
    }

    /// Adds level `(0, j)` from the reflection coefficient `u[0,j]`.
    pub fn extend_w_axis(&mut self, j: usize, u: C64) -> Result<(), SynthesisFailure> {
        assert!(j >= 1 && j <= self.m_max);
        let prev = self.state(0, j - 1).clone();
        let row = &prev.pt.rows[0];
        let k = row.coeff(0, j - 1).re;
        let wp = row.shift(0, 1);
        let rp = row.reverse(0, j - 1);
        self.set_moment(0, -(j as i64), C64::new(0.0, 0.0));
        let rest = self.inner(&wp, &rp);
        self.set_moment(0, -(j as i64), (u - rest) / (k * k));
        let record = LevelRecord { n: 0, m: j, axis_reflection: Some(u.norm()), ..Default::default() };
        if u.norm() >= 1.0 - self.margin {
            return Err(self.fail(0, j, Condition::AxisReflectionT, u.norm(), record));
        }
        let a = (1.0 - u.norm_sqr()).sqrt();
        let new_row = (&wp - &rp.scale(u)).scale(C64::new(1.0 / a, 0.0));
        let pt = fit(VectorPolynomial::new(vec![new_row]), 0, j);
        let p = fit(pt.concat(&prev.p), 0, j);
        let i1 = ComplexMatrix::scalar(-u.conj()).hstack(&prev.c.i1.transpose().scale_re(a)).transpose();
        let gamma1 = prev.p.z_leading(0, j - 1) * lead_selector(j) * p.z_leading(0, j).inverse().expect("triangular leading block");
        let c = with_duals(LevelCoefficients {
            n: 0,
            m: j,
            e_hat: None,
            a: None,
            e_hat_t: Some(ComplexMatrix::scalar(u)),
            a_t: Some(ComplexMatrix::scalar(C64::new(a, 0.0))),
            k: ComplexMatrix::zeros(j, 0),
            k1: ComplexMatrix::zeros(j, 0),
            k_t: ComplexMatrix::zeros(0, 0),
            k1_t: ComplexMatrix::zeros(0, 0),
            gamma: shift_selector(j),
            gamma1,
            gamma_t: ComplexMatrix::zeros(0, 1),
            gamma1_t: ComplexMatrix::zeros(0, 1),
            i: e1(j + 1),
            i1,
            i_t: ComplexMatrix::zeros(0, 0),
            i1_t: ComplexMatrix::zeros(0, 0),
        });
        self.report.levels.push(record);
        self.levels.insert((0, j), LevelState { c, p, pt });
        Ok(())
    }

    /// Adds interior level `(n, m)` from `u[n,m]` and `u[-n,m]`; needs `(n-1,m)` and `(n,m-1)`
    /// (and `(n,m-2)`, `(n-1,m-1)`, `(n-2,m)` where those exist).
    pub fn one_step_extension(&mut self, n: usize, m: usize, u_nm: C64, u_minus_nm: C64) -> Result<(), SynthesisFailure> {
        assert!(n >= 1 && m >= 1 && n <= self.n_max && m <= self.m_max);
        let dn = self.state(n - 1, m).clone();
        let dm = self.state(n, m - 1).clone();
        let margin = self.margin;
        let mut record = LevelRecord { n, m, ..Default::default() };
        let fact = |this: &mut Self, record: LevelRecord| this.fail(n, m, Condition::Factorization, f64::NAN, record);

        let dm_e = dm.c.e_hat.clone().expect("n >= 1");
        let dm_a = dm.c.a.clone().expect("n >= 1");
        let dn_et = dn.c.e_hat_t.clone().expect("m >= 1");
        let dn_at = dn.c.a_t.clone().expect("m >= 1");

        let k = if (n, m) == (1, 1) {
            ComplexMatrix::scalar(u_minus_nm)
        } else {
            let mut t = ComplexMatrix::zeros(m, n);
            t[(m - 1, n - 1)] = u_minus_nm;
            if m > 1 {
                let left = self.state(n, m - 2).p.z_leading(n, m - 2).inverse().expect("leading block");
                let right = self.state(n - 1, m - 1).pt.w_leading(n - 1, m - 1).adjoint().inverse().expect("leading block");
                let h = left * (&dm.c.k - &dm.c.k1 * dn_et.adjoint()) * right;
                t.set_block(0, 0, &h);
            }
            if n > 1 {
                let left = self.state(n - 1, m - 1).p.z_leading(n - 1, m - 1).inverse().expect("leading block");
                let right = self.state(n - 2, m).pt.w_leading(n - 2, m).adjoint().inverse().expect("leading block");
                let ht = left * (&dn.c.k - &dm_e * dn.c.k1.conj()) * right;
                t.set_block(m - 1, 0, &ht.submatrix(m - 1, 0, 1, n - 1));
            }
            dm.p.z_leading(n, m - 1) * t * dn.pt.w_leading(n - 1, m).adjoint()
        };

        let a = &dm.p.rows[m - 1];
        let b = &dn.pt.rows[n - 1];
        self.set_moment(-(n as i64), m as i64, C64::new(0.0, 0.0));
        let rest = self.inner(a, b);
        let denom = a.coeff(n, 0) * b.coeff(0, m).conj();
        if denom.norm() < DIVIDE_GUARD {
            return Err(fact(self, record));
        }
        self.set_moment(-(n as i64), m as i64, (k[(m - 1, n - 1)] - rest) / denom);
        let k_norm = k.spectral_norm();
        record.k_norm = Some(k_norm);
        if k_norm >= 1.0 - margin {
            return Err(self.fail(n, m, Condition::KContraction, k_norm, record));
        }

        let chol = |h: ComplexMatrix| h.upper_cholesky(PIVOT_TOL);
        let (gamma, gamma_t) = match (
            chol(ComplexMatrix::identity(m) - &k * k.adjoint()),
            chol(ComplexMatrix::identity(n) - k.adjoint() * &k),
        ) {
            (Ok(g), Ok(gt)) => (ComplexMatrix::zeros(m, 1).hstack(&g), ComplexMatrix::zeros(n, 1).hstack(&gt)),
            _ => return Err(fact(self, record)),
        };

        let mut k1 = ComplexMatrix::zeros(m, n);
        let dn_at_inv_t = dn_at.inverse().expect("triangular").transpose();
        if m > 1 {
            let lhs = (&dm.c.gamma * shift_selector(m - 1).transpose()).inverse().expect("triangular");
            let block = lhs * (&dm.c.k1 * &dn_at_inv_t - &dm.c.k * dn_et.transpose() * &dn_at_inv_t);
            k1.set_block(1, 0, &block);
        }
        if n > 1 {
            let rhs = (shift_selector(n - 1) * dn.c.gamma_t.transpose()).inverse().expect("triangular");
            let block = dm_a.inverse().expect("triangular") * (&dn.c.k1 - &dm_e * dn.c.k.conj()) * rhs;
            k1.set_block(0, 1, &block);
        }
        k1[(0, 0)] = u_nm.conj();

        let a = dm.p.rows[0].shift(0, 1);
        let b = dn.pt.rows[0].reverse(n - 1, m);
        self.set_moment(-(n as i64), -(m as i64), C64::new(0.0, 0.0));
        let rest = self.inner(&a, &b);
        let denom = a.coeff(n, m) * b.coeff(0, 0).conj();
        if denom.norm() < DIVIDE_GUARD {
            return Err(fact(self, record));
        }
        self.set_moment(-(n as i64), -(m as i64), (k1[(0, 0)] - rest) / denom);
        let k1_norm = k1.spectral_norm();
        record.k1_norm = Some(k1_norm);
        if k1_norm >= 1.0 - margin {
            return Err(self.fail(n, m, Condition::K1Contraction, k1_norm, record));
        }

        let stacked = dn.c.gamma1.row(0).vstack(&dn.c.gamma);
        let rhs_top = &dm_a * &k * dn.c.i1.adjoint() + &dm_e * dn.c.gamma1.conj();
        let rhs_corner = &dm_a * &k1 * dn.c.i.transpose() + &dm_e * dn.c.gamma.conj();
        let r = shift_selector(m).transpose() * &rhs_top + e1(m + 1) * e1(m).transpose() * &rhs_corner;
        let e = stacked.solve(&r).expect("triangular stacked system");
        let consistency = (&dn.c.gamma * &e - &rhs_top)
            .max_abs()
            .max((&e * dn.c.gamma1.transpose() - (&dn.c.i * k1.transpose() * dm_a.transpose() + dn.c.gamma.adjoint() * &dm_e)).max_abs());
        record.e_consistency = Some(consistency);

        let stacked_t = dm.c.gamma1_t.row(0).vstack(&dm.c.gamma_t);
        let rt = shift_selector(n).transpose() * (&dn_at * k.adjoint() * dm.c.i1.conj() + &dn_et * dm.c.gamma1_t.conj())
            + e1(n + 1) * e1(n).transpose() * (&dn_at * k1.transpose() * dm.c.i.conj() + &dn_et * dm.c.gamma_t.conj());
        let et = stacked_t.solve(&rt).expect("triangular stacked system");

        let rg = &dm.c.i * &et * dm.c.i1.transpose()
            + dm.c.gamma.adjoint() * &dm.c.gamma1
            + &k1 * dn_at.conj().inverse().expect("triangular") * dn_et.adjoint() * &dn_at * k.adjoint();
        let g1u = rg * (shift_selector(m) * gamma.adjoint()).inverse().expect("triangular");
        let h3 = g1u.row(0).frobenius().powi(2) + k1.row(0).frobenius().powi(2);
        record.h3 = Some(h3);
        if h3 >= 1.0 - margin {
            return Err(self.fail(n, m, Condition::CornerDefect, h3, record));
        }
        let mut gamma1 = ComplexMatrix::zeros(m, 1).hstack(&g1u);
        gamma1[(0, 0)] = C64::new((1.0 - h3).sqrt(), 0.0);

        let rgt = dn.c.i.adjoint() * &e * &dn.c.i1
            + dn.c.gamma_t.adjoint() * &dn.c.gamma1_t
            + k1.transpose() * dm_a.conj().inverse().expect("triangular") * dm_e.adjoint() * &dm_a * &k;
        let g1tu = rgt * (shift_selector(n) * gamma_t.adjoint()).inverse().expect("triangular");
        let h3t = g1tu.row(0).frobenius().powi(2) + k1.transpose().row(0).frobenius().powi(2);
        if h3t >= 1.0 {
            return Err(fact(self, record));
        }
        let mut gamma1_t = ComplexMatrix::zeros(n, 1).hstack(&g1tu);
        gamma1_t[(0, 0)] = C64::new((1.0 - h3t).sqrt(), 0.0);

        let (a_mat, a_t) = match (
            chol(ComplexMatrix::identity(m + 1) - &e * e.adjoint()),
            chol(ComplexMatrix::identity(n + 1) - &et * et.adjoint()),
        ) {
            (Ok(a), Ok(at)) => (a, at),
            _ => return Err(fact(self, record)),
        };

        let top = VectorPolynomial::new(vec![dm.p.rows[0].shift(0, 1)]).sub(&VectorPolynomial::apply(&k1.row(0), &dn.pt.reverse(n - 1, m)));
        let body = dm.p.sub(&VectorPolynomial::apply(&k, &dn.pt));
        let lead = gamma1.row(0).vstack(&gamma).inverse().expect("triangular");
        let p = fit(VectorPolynomial::apply(&lead, &top.concat(&body)), n, m);

        let top_t = VectorPolynomial::new(vec![dn.pt.rows[0].shift(1, 0)])
            .sub(&VectorPolynomial::apply(&k1.transpose().row(0), &dm.p.reverse(n, m - 1)));
        let body_t = dn.pt.sub(&VectorPolynomial::apply(&k.adjoint(), &dm.p));
        let lead_t = gamma1_t.row(0).vstack(&gamma_t).inverse().expect("triangular");
        let pt = fit(VectorPolynomial::apply(&lead_t, &top_t.concat(&body_t)), n, m);

        let mut i_mat = ComplexMatrix::zeros(m + 1, n + 1);
        i_mat[(0, 0)] = one();
        let tail = -(gamma.adjoint() * &k * gamma_t.submatrix(0, 1, n, n).adjoint().inverse().expect("triangular"));
        i_mat.set_block(0, 1, &tail);
        let i1 = -(a_mat.conj().inverse().expect("triangular") * e.adjoint() * &a_mat * &i_mat) + a_mat.transpose() * &dn.c.i1 * &gamma_t;

        let c = with_duals(LevelCoefficients {
            n,
            m,
            e_hat: Some(e),
            a: Some(a_mat),
            e_hat_t: Some(et),
            a_t: Some(a_t),
            k,
            k1,
            k_t: ComplexMatrix::zeros(0, 0),
            k1_t: ComplexMatrix::zeros(0, 0),
            gamma,
            gamma1,
            gamma_t,
            gamma1_t,
            i: i_mat,
            i1,
            i_t: ComplexMatrix::zeros(0, 0),
            i1_t: ComplexMatrix::zeros(0, 0),
        });
        self.report.levels.push(record);
        self.levels.insert((n, m), LevelState { c, p, pt });
        Ok(())
    }

    /// Snapshot of a synthesizer that holds every level up to its capacity.
    pub fn finish(self) -> SynthesisState {
        let (n_max, m_max) = (self.n_max, self.m_max);
        let mut coefficients = Vec::new();
        let mut lex = Vec::new();
        let mut revlex = Vec::new();
        for n in 0..=n_max {
            for m in 0..=m_max {
                let s = self.levels.get(&(n, m)).unwrap_or_else(|| panic!("level ({n},{m}) missing"));
                coefficients.push(s.c.clone());
                lex.push(s.p.clone());
                revlex.push(s.pt.clone());
            }
        }
        SynthesisState {
            n_max,
            m_max,
            coefficients,
            families: Families::new(n_max, m_max, lex, revlex),
            moments: self.moments,
            report: self.report,
        }
    }
}

/// Runs the full schedule with the default strictness margin.
pub fn synthesize(params: &ParameterGrid) -> Result<SynthesisState, SynthesisFailure> {
    synthesize_with_margin(params, CONTRACTION_MARGIN)
}

/// Axes first, then interior levels in lexicographic order.
pub fn synthesize_with_margin(params: &ParameterGrid, margin: f64) -> Result<SynthesisState, SynthesisFailure> {
    let (nn, mm) = (params.n(), params.m());
    let mut s = Synthesizer::new(nn, mm, params.get(0, 0), margin)?;
    for i in 1..=nn {
        s.extend_z_axis(i, params.get(i as i64, 0))?;
    }
    for j in 1..=mm {
        s.extend_w_axis(j, params.get(0, j as i64))?;
    }
    for n in 1..=nn {
        for m in 1..=mm {
            s.one_step_extension(n, m, params.get(n as i64, m as i64), params.get(-(n as i64), m as i64))?;
        }
    }
    Ok(s.finish())
}

/// Parameters of a positive definite moment table, the inverse of [`synthesize`].
pub fn extract_parameters(moments: &MomentTable, n_max: usize, m_max: usize) -> Result<ParameterGrid, Error> {
    let fam = gram_schmidt_levels(moments, n_max, m_max)?;
    extract_from_families(moments, &fam)
}

pub fn extract_from_families(moments: &MomentTable, fam: &Families) -> Result<ParameterGrid, Error> {
    let (n_max, m_max) = (fam.n_max(), fam.m_max());
    let coeff = |n, m| -> Result<LevelCoefficients, MomentError> { coefficients_by_inner_product(moments, fam, n, m) };
    let mut grid = ParameterGrid::new(n_max, m_max, moments.get(0, 0)?.re);
    for i in 1..=n_max {
        grid.set(i as i64, 0, coeff(i, 0)?.e_hat.expect("n >= 1")[(0, 0)]);
    }
    for j in 1..=m_max {
        grid.set(0, j as i64, coeff(0, j)?.e_hat_t.expect("m >= 1")[(0, 0)]);
    }
    for n in 1..=n_max {
        for m in 1..=m_max {
            let c = coeff(n, m)?;
            let u = if (n, m) == (1, 1) {
                c.k[(0, 0)]
            } else {
                let left = fam.phi(n, m - 1).z_leading(n, m - 1).inverse()?;
                let right = fam.phi_t(n - 1, m).w_leading(n - 1, m).adjoint().inverse()?;
                (left * &c.k * right)[(m - 1, n - 1)]
            };
            grid.set(-(n as i64), m as i64, u);
            grid.set(n as i64, m as i64, c.k1[(0, 0)].conj());
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{moments_from_density, pd_report};

    fn fixture() -> MomentTable {
        moments_from_density(
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
    fn delta_grid_gives_delta_moments() {
        let s = synthesize(&ParameterGrid::new(2, 2, 1.0)).unwrap();
        assert_eq!(s.moments().max_diff(&MomentTable::delta(2, 2)), 0.0);
        assert_eq!(s.level(1, 1).k.max_abs(), 0.0);
        assert!(s.report().admissible());
    }

    #[test]
    fn synthesis_reproduces_gram_schmidt() {
        let mom = fixture();
        let grid = extract_parameters(&mom, 3, 3).unwrap();
        let s = synthesize(&grid).unwrap();
        assert!(s.moments().max_diff(&mom) < 1e-10);
        let fam = gram_schmidt_levels(&mom, 3, 3).unwrap();
        assert!(s.families().max_coeff_diff(&fam) < 1e-9);
        for n in 0..=3 {
            for m in 0..=3 {
                let c = coefficients_by_inner_product(&mom, &fam, n, m).unwrap();
                assert!(s.level(n, m).max_diff(&c) < 1e-9, "({n},{m})");
            }
        }
        for r in &s.report().levels {
            if let Some(x) = r.e_consistency {
                assert!(x < 1e-9);
            }
        }
    }

    #[test]
    fn parameter_symmetry() {
        let mut g = ParameterGrid::new(2, 2, 1.0);
        g.set(-1, 2, C64::new(0.1, 0.2));
        g.set(2, 0, C64::new(0.3, -0.1));
        assert_eq!(g.get(1, -2), C64::new(0.1, -0.2));
        assert_eq!(g.get(-2, 0), C64::new(0.3, 0.1));
        assert!(!g.is_free(3, 1));
    }

    #[test]
    fn large_k_parameter_is_rejected() {
        let mut g = ParameterGrid::new(1, 1, 1.0);
        g.set(-1, 1, C64::new(1.2, 0.0));
        let f = synthesize(&g).unwrap_err();
        assert_eq!(f.inadmissible.condition, Condition::KContraction);
        let gram = f.attempted.gram(&f.witness_monomials()).unwrap();
        assert!(!pd_report(&gram).positive_definite);
    }

    #[test]
    fn non_positive_center_is_rejected() {
        let f = synthesize(&ParameterGrid::new(1, 1, -1.0)).unwrap_err();
        assert_eq!(f.inadmissible.condition, Condition::CenterNotPositive);
    }
}
