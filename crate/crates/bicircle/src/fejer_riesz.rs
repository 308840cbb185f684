//! Stable factors, spectral matching and two-variable Fejér–Riesz factorization.
//!
//! A functional whose coefficient `K_{n,m}` vanishes is represented by the density `1/|φ|²`,
//! with `φ` the top row of the lexicographic family at `(n,m)` and `rev φ` stable on the closed
//! bidisk. A positive trigonometric polynomial `f` factors as `|p|²` with `p` of degree `(n,m)`
//! and `rev p` stable exactly when the moments of `1/f` have `K_{n,m} = 0`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::{Error, MomentError, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::moments::{moments_from_density, MomentTable};
use crate::orthopoly::{coefficients_by_inner_product, gram_schmidt_levels, Families, LevelCoefficients};
use crate::poly::BivariatePolynomial;
use crate::synthesis::{synthesize, ParameterGrid, SynthesisFailure, SynthesisState};

/// Default threshold for treating `‖K_{n,m}‖` as zero.
pub const ZERO_TOL: f64 = 1e-8;
/// Default tolerance for spectral matching by quadrature.
pub const MATCH_TOL: f64 = 1e-7;

/// Quadrature grid per axis for a density of trigonometric bidegree `(n,m)`.
pub fn quadrature_grid(n: usize, m: usize) -> (usize, usize) {
    ((8 * n).max(128), (8 * m).max(128))
}

/// Hermitian-symmetric trigonometric polynomial `f(θ,φ) = Σ f_{k,l} e^{ikθ} e^{ilφ}`, `|k| <= n`, `|l| <= m`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    n: usize,
    m: usize,
    coeffs: BTreeMap<(i64, i64), C64>,
}

impl TrigPolynomial {
    pub fn new(n: usize, m: usize) -> Self {
        TrigPolynomial { n, m, coeffs: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Sets `f_{k,l}` and its mirror `f_{-k,-l} = conj f_{k,l}`; the center keeps only its real part.
    pub fn set(&mut self, k: i64, l: i64, value: C64) {
        assert!(k.unsigned_abs() as usize <= self.n && l.unsigned_abs() as usize <= self.m, "index outside bidegree");
        if k == 0 && l == 0 {
            self.coeffs.insert((0, 0), C64::new(value.re, 0.0));
        } else {
            self.coeffs.insert((k, l), value);
            self.coeffs.insert((-k, -l), value.conj());
        }
    }

    pub fn get(&self, k: i64, l: i64) -> C64 {
        self.coeffs.get(&(k, l)).copied().unwrap_or_default()
    }

    /// `|p|²` on the torus.
    pub fn modulus_squared(p: &BivariatePolynomial) -> Self {
        let mut f = TrigPolynomial::new(p.deg_z(), p.deg_w());
        let mut acc: BTreeMap<(i64, i64), C64> = BTreeMap::new();
        for (a, b, x) in p.terms() {
            for (c, d, y) in p.terms() {
                *acc.entry((a as i64 - c as i64, b as i64 - d as i64)).or_default() += x * y.conj();
            }
        }
        f.coeffs = acc.into_iter().filter(|(_, v)| *v != C64::default()).collect();
        f
    }

    /// Coefficients in the half plane `k > 0`, or `k = 0` and `l >= 0`.
    pub fn half_plane(&self) -> Vec<(i64, i64, C64)> {
        self.coeffs.iter().filter(|((k, l), _)| *k > 0 || (*k == 0 && *l >= 0)).map(|(&(k, l), &v)| (k, l, v)).collect()
    }

    /// Value at a torus point, given as unimodular `z`, `w`.
    pub fn eval(&self, z: C64, w: C64) -> f64 {
        self.coeffs.iter().map(|(&(k, l), &c)| c * z.powi(k as i32) * w.powi(l as i32)).sum::<C64>().re
    }

    pub fn eval_angles(&self, theta: f64, phi: f64) -> f64 {
        self.eval(C64::from_polar(1.0, theta), C64::from_polar(1.0, phi))
    }

    /// Minimum over a uniform `gz` x `gw` torus grid.
    pub fn min_on_grid(&self, gz: usize, gw: usize) -> f64 {
        let mut min = f64::INFINITY;
        for a in 0..gz {
            for b in 0..gw {
                min = min.min(self.eval_angles(TAU * a as f64 / gz as f64, TAU * b as f64 / gw as f64));
            }
        }
        min
    }
}

/// Sampled evidence that `rev p` has no zeros in the closed bidisk.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityCertificate {
    pub radial: usize,
    pub angular: usize,
    /// Smallest `|rev p|` over the polar grid of the closed bidisk.
    pub min_modulus: f64,
    /// `|rev p(0,0)|`, the leading coefficient of `p` in modulus.
    pub leading: f64,
    /// Largest absolute winding number of `rev p` along a torus slice through a sampled disk point.
    pub max_winding: i64,
}

impl StabilityCertificate {
    pub fn holds(&self) -> bool {
        self.min_modulus > 1e-8 * self.leading && self.max_winding == 0
    }
}

fn polar_points(radial: usize, angular: usize) -> Vec<C64> {
    let mut pts = vec![C64::new(0.0, 0.0)];
    for r in 1..=radial {
        for a in 0..angular {
            pts.push(C64::from_polar(r as f64 / radial as f64, TAU * a as f64 / angular as f64));
        }
    }
    pts
}

fn winding(f: impl Fn(C64) -> C64, steps: usize) -> i64 {
    let mut turn = 0.0;
    let mut prev = f(C64::new(1.0, 0.0));
    for s in 1..=steps {
        let cur = f(C64::from_polar(1.0, TAU * s as f64 / steps as f64));
        turn += (cur / prev).arg();
        prev = cur;
    }
    (turn / TAU).round() as i64
}

/// Certificate for `rev p` on a `radial` x `angular` polar grid in each variable.
pub fn certify_stability(p: &BivariatePolynomial, radial: usize, angular: usize) -> StabilityCertificate {
    let (n, m) = (p.deg_z(), p.deg_w());
    let rev = p.reverse(n, m);
    let pts = polar_points(radial, angular);
    let wpow: Vec<Vec<C64>> = pts.iter().map(|w| (0..=m).map(|j| w.powi(j as i32)).collect()).collect();
    let mut min = f64::INFINITY;
    for z in &pts {
        let row: Vec<C64> = (0..=m).map(|j| (0..=n).rev().fold(C64::default(), |acc, i| acc * z + rev.coeff(i, j))).collect();
        for wp in &wpow {
            let v: C64 = row.iter().zip(wp).map(|(a, b)| a * b).sum();
            min = min.min(v.norm());
        }
    }
    let steps = 4 * angular.max(8 * (n + m + 1));
    let mut max_winding = 0;
    for q in &pts {
        max_winding = max_winding.max(winding(|z| rev.eval(z, *q), steps).abs());
        max_winding = max_winding.max(winding(|w| rev.eval(*q, w), steps).abs());
    }
    StabilityCertificate { radial, angular, min_modulus: min, leading: rev.coeff(0, 0).norm(), max_winding }
}

/// Polynomial `p` of bidegree `(n,m)` whose reverse is stable.
#[derive(Clone, Debug, PartialEq)]
pub struct StablePolynomial {
    pub poly: BivariatePolynomial,
    pub certificate: StabilityCertificate,
}

impl StablePolynomial {
    pub fn reverse(&self) -> BivariatePolynomial {
        self.poly.reverse(self.poly.deg_z(), self.poly.deg_w())
    }
}

/// Largest `|c_{k,l} - mean(z^-k w^-l / |p|²)|` for `|k| <= n`, `|l| <= m` on a `gz` x `gw` grid.
pub fn spectral_match_error(moments: &MomentTable, p: &BivariatePolynomial, n: usize, m: usize, gz: usize, gw: usize) -> Result<f64> {
    let quad = moments_from_density(|z, w| 1.0 / p.eval(z, w).norm_sqr(), n, m, gz, gw)?;
    let mut err: f64 = 0.0;
    for (i, j, v) in quad.half_plane() {
        err = err.max((moments.get(i, j)? - v).norm());
    }
    Ok(err)
}

#[derive(Clone, Debug, PartialEq)]
pub enum StableOutcome {
    Stable { factor: StablePolynomial, k_norm: f64, match_error: f64 },
    NotApplicable { k_norm: f64 },
}

fn k_at(moments: &MomentTable, fam: &Families, n: usize, m: usize) -> Result<LevelCoefficients> {
    Ok(coefficients_by_inner_product(moments, fam, n, m)?)
}

fn norm_or_zero(k: &ComplexMatrix) -> f64 {
    if k.rows() == 0 || k.cols() == 0 {
        0.0
    } else {
        k.spectral_norm()
    }
}

/// Top row of the lexicographic family at `(n,m)` when `‖K_{n,m}‖ <= zero_tol`.
pub fn stable_from_functional(moments: &MomentTable, n: usize, m: usize, zero_tol: f64) -> Result<StableOutcome> {
    let fam = gram_schmidt_levels(moments, n, m)?;
    let k_norm = norm_or_zero(&k_at(moments, &fam, n, m)?.k);
    if k_norm > zero_tol {
        return Ok(StableOutcome::NotApplicable { k_norm });
    }
    let phi = fam.phi(n, m).rows[0].clone();
    let (gz, gw) = quadrature_grid(2 * n, 2 * m);
    let match_error = spectral_match_error(moments, &phi, n, m, gz, gw)?;
    let certificate = certify_stability(&phi, 8, 32);
    Ok(StableOutcome::Stable { factor: StablePolynomial { poly: phi, certificate }, k_norm, match_error })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Factored,
    NotFactorable,
    NotPositive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationResult {
    pub verdict: Verdict,
    pub factor: Option<StablePolynomial>,
    /// `‖K_{n,m}‖` for the moments of `1/f`; absent when `f` is not positive.
    pub k_norm: Option<f64>,
    /// Sup of `|f - |p|²|` on an offset torus grid, when factored.
    pub reconstruction_error: Option<f64>,
    /// Smallest sample of `f` on the quadrature grid.
    pub min_value: f64,
}

/// Factors `f = |p|²` with `rev p` stable, or refuses.
pub fn fejer_riesz_factor(f: &TrigPolynomial, zero_tol: f64) -> Result<FactorizationResult> {
    let (n, m) = (f.n(), f.m());
    let (gz, gw) = quadrature_grid(n, m);
    let min_value = f.min_on_grid(gz, gw);
    let refused = |verdict, k_norm| FactorizationResult { verdict, factor: None, k_norm, reconstruction_error: None, min_value };
    if !(min_value > 0.0) {
        return Ok(refused(Verdict::NotPositive, None));
    }
    let moments = match moments_from_density(|z, w| 1.0 / f.eval(z, w), n, m, gz, gw) {
        Ok(t) => t,
        Err(MomentError::NonPositiveDensitySample { .. }) => return Ok(refused(Verdict::NotPositive, None)),
        Err(e) => return Err(e.into()),
    };
    match stable_from_functional(&moments, n, m, zero_tol) {
        Ok(StableOutcome::NotApplicable { k_norm }) => Ok(refused(Verdict::NotFactorable, Some(k_norm))),
        Ok(StableOutcome::Stable { factor, k_norm, .. }) => {
            let err = reconstruction_error(f, &factor.poly, 2 * gz.min(256), 2 * gw.min(256));
            Ok(FactorizationResult {
                verdict: Verdict::Factored,
                factor: Some(factor),
                k_norm: Some(k_norm),
                reconstruction_error: Some(err),
                min_value,
            })
        }
        Err(Error::NotPositiveDefinite { .. }) => Ok(refused(Verdict::NotPositive, None)),
        Err(e) => Err(e),
    }
}

/// Sup of `|f - |p|²|` over a half-step offset `gz` x `gw` torus grid.
pub fn reconstruction_error(f: &TrigPolynomial, p: &BivariatePolynomial, gz: usize, gw: usize) -> f64 {
    let mut err: f64 = 0.0;
    for a in 0..gz {
        for b in 0..gw {
            let z = C64::from_polar(1.0, TAU * (a as f64 + 0.5) / gz as f64);
            let w = C64::from_polar(1.0, TAU * (b as f64 + 0.5) / gw as f64);
            err = err.max((f.eval(z, w) - p.eval(z, w).norm_sqr()).abs());
        }
    }
    err
}

/// Largest `|<Φ_{n,m-1}, z^i w^m>|`, `i < n`, scaled by `sqrt(c_{0,0})`; zero exactly when `K_{n,m} = 0`.
pub fn geometric_defect(moments: &MomentTable, fam: &Families, n: usize, m: usize) -> Result<f64> {
    if n == 0 || m == 0 {
        return Ok(0.0);
    }
    let prev = fam.phi(n, m - 1);
    let scale = moments.get(0, 0)?.re.sqrt();
    let mut defect: f64 = 0.0;
    for i in 0..n {
        let mono = BivariatePolynomial::monomial(i, m, C64::new(1.0, 0.0));
        for row in &prev.rows {
            defect = defect.max(moments.inner_product(row, &mono)?.norm() / scale);
        }
    }
    Ok(defect)
}

pub fn geometric_test(moments: &MomentTable, n: usize, m: usize, zero_tol: f64) -> Result<bool> {
    let fam = gram_schmidt_levels(moments, n, m)?;
    Ok(geometric_defect(moments, &fam, n, m)? <= zero_tol)
}

/// Residual of the two-term reproducing identity for `rev φ`, valid when `K_{n,m} = 0`.
pub fn chlike_residual(fam: &Families, n: usize, m: usize, z: C64, w: C64, z1: C64, w1: C64) -> f64 {
    let phi = &fam.phi(n, m).rows[0];
    let rphi = phi.reverse(n, m);
    let lhs = rphi.eval(z, w) * rphi.eval(z1, w1).conj() - phi.eval(z, w) * phi.eval(z1, w1).conj();
    let gram = |a: &ComplexMatrix, b: &ComplexMatrix| -> C64 { (0..a.rows()).map(|r| a[(r, 0)] * b[(r, 0)].conj()).sum() };
    let mut rhs = C64::default();
    if m > 0 {
        let a = fam.phi(n, m - 1).reverse(n, m - 1);
        rhs += (C64::new(1.0, 0.0) - w * w1.conj()) * gram(&a.eval(z, w), &a.eval(z1, w1));
    }
    if n > 0 {
        let b = fam.phi_t(n - 1, m);
        rhs += (C64::new(1.0, 0.0) - z * z1.conj()) * gram(&b.eval(z, w), &b.eval(z1, w1));
    }
    (lhs - rhs).norm()
}

/// Conditions characterizing densities `1/|p|²` with `rev p` stable of degree `(n,m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureCondition {
    /// `K_{n,j}`, `Ẽ_{n-1,j+1}` and `u_{n,j+1}` vanish for `j >= m`.
    A,
    /// `K_{i,m}`, `Ê_{i,m-1}` and `u_{i,m}` vanish for `i > n`.
    B,
    /// `u_{±i,j}` vanish for `i > n`, `j > m`.
    C,
}

impl std::fmt::Display for MeasureCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MeasureCondition::A => "a",
            MeasureCondition::B => "b",
            MeasureCondition::C => "c",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub condition: MeasureCondition,
    pub level: (i64, i64),
    pub quantity: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacterizationReport {
    pub n: usize,
    pub m: usize,
    pub violation: Option<Violation>,
    /// On pass: largest deviation from `K_{i,j} = 0`, `Ê_{i+1,j} = 0`, `Ẽ_{n,j+1} = 0` and
    /// `K¹_{i,j} = [0, K¹_{i-1,j}]` over the window.
    pub propagation_residual: Option<f64>,
}

impl CharacterizationReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn opt_norm(x: &Option<ComplexMatrix>) -> f64 {
    x.as_ref().map_or(0.0, |e| if e.rows() == 0 { 0.0 } else { e.max_abs() })
}

/// Checks the full-measure conditions for `(n,m)` on the window of `params`.
pub fn full_measure_characterization(
    params: &ParameterGrid,
    n: usize,
    m: usize,
    tol: f64,
) -> std::result::Result<CharacterizationReport, Box<SynthesisFailure>> {
    let state = synthesize(params).map_err(Box::new)?;
    Ok(characterize_state(&state, params, n, m, tol))
}

pub fn characterize_state(state: &SynthesisState, params: &ParameterGrid, n: usize, m: usize, tol: f64) -> CharacterizationReport {
    let (nn, mm) = (params.n(), params.m());
    assert!(n <= nn && m <= mm, "window must contain the level");
    let lv = |i: usize, j: usize| state.level(i, j);
    let mut checks: Vec<Violation> = Vec::new();
    let mut push = |condition, level: (usize, usize), quantity, value: f64| {
        checks.push(Violation { condition, level: (level.0 as i64, level.1 as i64), quantity, value })
    };
    for j in m..=mm {
        push(MeasureCondition::A, (n, j), "K", lv(n, j).k.max_abs());
        if j < mm {
            if n > 0 {
                push(MeasureCondition::A, (n - 1, j + 1), "E_hat_t", opt_norm(&lv(n - 1, j + 1).e_hat_t));
            }
            push(MeasureCondition::A, (n, j + 1), "u", params.get(n as i64, j as i64 + 1).norm());
        }
    }
    for i in n + 1..=nn {
        push(MeasureCondition::B, (i, m), "K", lv(i, m).k.max_abs());
        if m > 0 {
            push(MeasureCondition::B, (i, m - 1), "E_hat", opt_norm(&lv(i, m - 1).e_hat));
        }
        push(MeasureCondition::B, (i, m), "u", params.get(i as i64, m as i64).norm());
    }
    for i in n + 1..=nn {
        for j in m + 1..=mm {
            for s in [i as i64, -(i as i64)] {
                checks.push(Violation { condition: MeasureCondition::C, level: (s, j as i64), quantity: "u", value: params.get(s, j as i64).norm() });
            }
        }
    }
    let mut report = CharacterizationReport { n, m, violation: checks.into_iter().find(|v| v.value > tol), propagation_residual: None };
    if report.violation.is_some() {
        return report;
    }
    let mut res: f64 = 0.0;
    for i in n..=nn {
        for j in m..=mm {
            res = res.max(lv(i, j).k.max_abs());
            if i < nn {
                res = res.max(opt_norm(&lv(i + 1, j).e_hat));
            }
            if i > n {
                let cur = &lv(i, j).k1;
                let prev = &lv(i - 1, j).k1;
                let shifted = ComplexMatrix::zeros(cur.rows(), 1).hstack(prev);
                res = res.max(cur.max_diff(&shifted));
            }
        }
    }
    for j in m..mm {
        res = res.max(opt_norm(&lv(n, j + 1).e_hat_t));
    }
    report.propagation_residual = Some(res);
    report
}

/// `params` at `(n,m)` extended by zeros to `(n + window, m + window)`.
pub fn zero_extension(params: &ParameterGrid, window: usize) -> ParameterGrid {
    let mut out = ParameterGrid::new(params.n() + window, params.m() + window, params.get(0, 0).re);
    for (i, j) in params.free_indices() {
        out.set(i, j, params.get(i, j));
    }
    out
}
