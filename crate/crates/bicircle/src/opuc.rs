//! Matrix orthogonal polynomials on the unit circle for a block Toeplitz functional.
//!
//! The functional pairs matrix polynomials `P(z) = Σ P_i z^i`, `Q(z) = Σ Q_j z^j` as
//! `L(P, Q) = Σ_{i,j} P_i C_{j-i} Q_j^dagger`, with `C_k` the `(m+1)x(m+1)` blocks of a moment
//! table. Left polynomials `L_i` satisfy `L(L_i, L_j) = δ_ij I`; right polynomials `R_i` satisfy
//! the transposed relation `Σ R_i[k]^dagger C_{k-l} R_j[l] = δ_ij I`. Both have upper triangular
//! leading coefficients with positive diagonal.

use crate::error::{Error, LinalgError, Result};
use crate::matrix::{ComplexMatrix, C64, PIVOT_TOL};
use crate::moments::MomentTable;

/// Matrix polynomial in z with square coefficients, index = power of z.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial {
    coeffs: Vec<ComplexMatrix>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<ComplexMatrix>) -> Self {
        assert!(!coeffs.is_empty(), "matrix polynomial needs at least one coefficient");
        let d = coeffs[0].rows();
        assert!(coeffs.iter().all(|c| c.rows() == d && c.cols() == d), "coefficients must be square of equal size");
        MatrixPolynomial { coeffs }
    }

    pub fn constant(c: ComplexMatrix) -> Self {
        Self::new(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].rows()
    }

    pub fn coeffs(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ComplexMatrix {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ComplexMatrix::zeros(self.dim(), self.dim()))
    }

    pub fn leading(&self) -> &ComplexMatrix {
        self.coeffs.last().expect("non-empty")
    }

    pub fn eval(&self, z: C64) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(z) + c;
        }
        acc
    }

    /// `z^deg B(1/conj z)^dagger`: coefficient `k` is `B_{deg-k}^dagger`.
    pub fn reverse(&self) -> Self {
        Self::new(self.coeffs.iter().rev().map(|c| c.adjoint()).collect())
    }

    pub fn shift(&self) -> Self {
        let mut coeffs = vec![ComplexMatrix::zeros(self.dim(), self.dim())];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    pub fn left_mul(&self, a: &ComplexMatrix) -> Self {
        Self::new(self.coeffs.iter().map(|c| a * c).collect())
    }

    pub fn right_mul(&self, a: &ComplexMatrix) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * a).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..k).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let k = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..k).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn adjoint_coeffs(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.adjoint()).collect())
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        let k = self.coeffs.len().max(other.coeffs.len());
        (0..k).fold(0.0, |m, i| m.max(self.coeff(i).max_diff(&other.coeff(i))))
    }

    /// Drops a (numerically) vanishing constant term, dividing by z.
    fn divide_by_z(&self) -> Self {
        Self::new(self.coeffs[1..].to_vec())
    }
}

/// Moment blocks `C_k`, `|k| <= n`, of size `(m+1)x(m+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMoments {
    n: usize,
    blocks: Vec<ComplexMatrix>,
}

impl BlockMoments {
    /// Blocks indexed `k + n` for `k = -n..=n`; requires `C_{-k} = C_k^dagger`.
    pub fn new(n: usize, blocks: Vec<ComplexMatrix>) -> Self {
        assert_eq!(blocks.len(), 2 * n + 1);
        BlockMoments { n, blocks }
    }

    pub fn from_moments(moments: &MomentTable, n: usize, m: usize) -> Result<Self> {
        Ok(Self::new(n, moments.blocks(n, m).map_err(Error::from)?))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].rows()
    }

    pub fn get(&self, k: i64) -> &ComplexMatrix {
        &self.blocks[(k + self.n as i64) as usize]
    }

    /// `Σ P_i C_{j-i} Q_j^dagger`.
    pub fn pair(&self, p: &MatrixPolynomial, q: &MatrixPolynomial) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for (i, pi) in p.coeffs().iter().enumerate() {
            for (j, qj) in q.coeffs().iter().enumerate() {
                acc += &(pi * self.get(j as i64 - i as i64) * qj.adjoint());
            }
        }
        acc
    }

    /// `Σ P_k^dagger C_{k-l} Q_l`, the pairing under which right polynomials are orthonormal.
    pub fn pair_right(&self, p: &MatrixPolynomial, q: &MatrixPolynomial) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for (k, pk) in p.coeffs().iter().enumerate() {
            for (l, ql) in q.coeffs().iter().enumerate() {
                acc += &(pk.adjoint() * self.get(k as i64 - l as i64) * ql);
            }
        }
        acc
    }

    /// Full block Toeplitz matrix with block `(r, s) = C_{r-s}`, rows ordered by descending power of z.
    pub fn toeplitz(&self) -> ComplexMatrix {
        let k = self.dim();
        let n = self.n;
        let mut out = ComplexMatrix::zeros((n + 1) * k, (n + 1) * k);
        for r in 0..=n {
            for s in 0..=n {
                out.set_block(r * k, s * k, self.get(r as i64 - s as i64));
            }
        }
        out
    }
}

/// One step of the recursion: polynomials of degree `i`, and for `i >= 1` the coefficients producing them.
#[derive(Clone, Debug, PartialEq)]
pub struct OpucLevel {
    pub l: MatrixPolynomial,
    pub r: MatrixPolynomial,
    pub e: Option<ComplexMatrix>,
    pub a: Option<ComplexMatrix>,
    pub a_hat: Option<ComplexMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpucSequence {
    pub levels: Vec<OpucLevel>,
}

impl OpucSequence {
    pub fn degree(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn l(&self, i: usize) -> &MatrixPolynomial {
        &self.levels[i].l
    }

    pub fn r(&self, i: usize) -> &MatrixPolynomial {
        &self.levels[i].r
    }

    pub fn e(&self, i: usize) -> &ComplexMatrix {
        self.levels[i].e.as_ref().expect("reflection coefficients start at level 1")
    }
}

fn not_pd(i: usize, dim: usize) -> impl Fn(LinalgError) -> Error {
    move |e| match e {
        LinalgError::NotPositiveDefinite { .. } => Error::NotPositiveDefinite { n: i, m: dim - 1 },
        other => Error::Linalg(other),
    }
}

/// Block Levinson recursion up to degree `n`.
pub fn levinson(blocks: &BlockMoments, n: usize) -> Result<OpucSequence> {
    assert!(n <= blocks.n(), "not enough moment blocks");
    let d = blocks.dim();
    let id = ComplexMatrix::identity(d);
    let c0 = blocks.get(0);
    let l0 = c0.upper_cholesky(PIVOT_TOL).map_err(not_pd(0, d))?.inverse()?;
    let r0 = c0.inverse()?.upper_cholesky(PIVOT_TOL).map_err(not_pd(0, d))?;
    let mut levels = vec![OpucLevel {
        l: MatrixPolynomial::constant(l0),
        r: MatrixPolynomial::constant(r0),
        e: None,
        a: None,
        a_hat: None,
    }];
    for i in 0..n {
        let prev = &levels[i];
        let zl = prev.l.shift();
        let zr = prev.r.shift();
        let rev_r = prev.r.reverse();
        let rev_l = prev.l.reverse();
        let e = blocks.pair(&zl, &rev_r);
        let a = (&id - &e * e.adjoint()).upper_cholesky(PIVOT_TOL).map_err(not_pd(i + 1, d))?;
        let a_hat = (&id - e.adjoint() * &e).lower_cholesky(PIVOT_TOL).map_err(not_pd(i + 1, d))?.adjoint();
        let l = zl.sub(&rev_r.left_mul(&e)).left_mul(&a.inverse()?);
        let r = zr.sub(&rev_l.right_mul(&e)).right_mul(&a_hat.inverse()?);
        levels.push(OpucLevel { l, r, e: Some(e), a: Some(a), a_hat: Some(a_hat) });
    }
    Ok(OpucSequence { levels })
}

/// Recovers `(L_i, R_i)` from the level `i+1` data.
pub fn inverse_step(
    l_next: &MatrixPolynomial,
    r_next: &MatrixPolynomial,
    e: &ComplexMatrix,
    a: &ComplexMatrix,
    a_hat: &ComplexMatrix,
) -> Result<(MatrixPolynomial, MatrixPolynomial)> {
    let a_inv = a.inverse()?;
    let a_hat_inv = a_hat.inverse()?;
    let zl = l_next.left_mul(&a.adjoint().inverse()?).add(&r_next.reverse().left_mul(&(e * &a_hat_inv)));
    let zr = r_next.right_mul(&a_hat.adjoint().inverse()?).add(&l_next.reverse().right_mul(&(&a_inv * e)));
    Ok((zl.divide_by_z(), zr.divide_by_z()))
}

/// `E = -(A^dagger)^{-1} L(0) (rev R(0))^{-1} Â`.
pub fn reflection_from_boundary(
    l_next: &MatrixPolynomial,
    r_next: &MatrixPolynomial,
    a: &ComplexMatrix,
    a_hat: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let rev_r0 = r_next.reverse().coeff(0);
    Ok(-(a.adjoint().inverse()? * l_next.coeff(0) * rev_r0.inverse()? * a_hat))
}

/// `E = -A (rev L(0))^{-1} R(0) (Â^dagger)^{-1}`.
pub fn reflection_from_boundary_right(
    l_next: &MatrixPolynomial,
    r_next: &MatrixPolynomial,
    a: &ComplexMatrix,
    a_hat: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let rev_l0 = l_next.reverse().coeff(0);
    Ok(-(a * rev_l0.inverse()? * r_next.coeff(0) * a_hat.adjoint().inverse()?))
}

/// Max residual of the two Christoffel–Darboux identities at degree `k`.
pub fn cd_residual(seq: &OpucSequence, k: usize, z: C64, z1: C64) -> f64 {
    let s = z.conj() * z1;
    let one = C64::new(1.0, 0.0);
    let rr = seq.r(k).reverse();
    let rl = seq.l(k).reverse();
    let lhs = rr.eval(z).adjoint() * rr.eval(z1) - (seq.l(k).eval(z).adjoint() * seq.l(k).eval(z1)).scale(s);
    let mut sum = ComplexMatrix::zeros(lhs.rows(), lhs.cols());
    for i in 0..=k {
        sum += &(seq.l(i).eval(z).adjoint() * seq.l(i).eval(z1));
    }
    let first = lhs.max_diff(&sum.scale(one - s));
    let lhs2 = rl.eval(z1) * rl.eval(z).adjoint() - (seq.r(k).eval(z1) * seq.r(k).eval(z).adjoint()).scale(s);
    let mut sum2 = ComplexMatrix::zeros(lhs.rows(), lhs.cols());
    for i in 0..=k {
        sum2 += &(seq.r(i).eval(z1) * seq.r(i).eval(z).adjoint());
    }
    first.max(lhs2.max_diff(&sum2.scale(one - s)))
}

/// Spectral weight `W_k = (rev L_k rev L_k^dagger)^{-1}` on the unit circle.
pub fn spectral_weight(seq: &OpucSequence, k: usize, theta: f64) -> Result<ComplexMatrix> {
    let v = seq.l(k).reverse().eval(C64::from_polar(1.0, theta));
    Ok((&v * v.adjoint()).inverse()?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMatch {
    /// Max over `|j| <= k` of the deviation of the Fourier coefficients of `W_k` from `C_j`.
    pub moment_error: f64,
    /// Max pointwise deviation between the left and right expressions of `W_k`.
    pub weight_agreement: f64,
}

pub fn spectral_matching_check(seq: &OpucSequence, k: usize, blocks: &BlockMoments, grid: usize) -> Result<SpectralMatch> {
    let d = blocks.dim();
    let rr = seq.r(k).reverse();
    let mut fourier = vec![ComplexMatrix::zeros(d, d); 2 * k + 1];
    let mut agreement: f64 = 0.0;
    for g in 0..grid {
        let theta = std::f64::consts::TAU * g as f64 / grid as f64;
        let w = spectral_weight(seq, k, theta)?;
        let v = rr.eval(C64::from_polar(1.0, theta));
        agreement = agreement.max(w.max_diff(&(v.adjoint() * &v).inverse()?));
        for (idx, f) in fourier.iter_mut().enumerate() {
            let j = idx as f64 - k as f64;
            *f += &w.scale(C64::from_polar(1.0 / grid as f64, -j * theta));
        }
    }
    let moment_error =
        fourier.iter().enumerate().fold(0.0, |m: f64, (idx, f)| m.max(f.max_diff(blocks.get(idx as i64 - k as i64))));
    Ok(SpectralMatch { moment_error, weight_agreement: agreement })
}

/// Relative error of `1/det(L_ii^dagger L_ii) = det(C_0) Π det(I - E_j E_j^dagger)`.
pub fn determinant_identity_error(seq: &OpucSequence, blocks: &BlockMoments, i: usize) -> Result<f64> {
    let lead = seq.l(i).leading();
    let lhs = 1.0 / (lead.adjoint() * lead).determinant()?.re;
    let id = ComplexMatrix::identity(blocks.dim());
    let mut rhs = blocks.get(0).determinant()?.re;
    for j in 1..=i {
        let e = seq.e(j);
        rhs *= (&id - e * e.adjoint()).determinant()?.re;
    }
    Ok((lhs / rhs - 1.0).abs())
}

/// Absolute error of `log(1/det(L_kk^dagger L_kk)) = mean log det W_k` on a uniform grid.
pub fn entropy_identity_error(seq: &OpucSequence, k: usize, grid: usize) -> Result<f64> {
    let lead = seq.l(k).leading();
    let lhs = -(lead.adjoint() * lead).determinant()?.re.ln();
    let mut acc = 0.0;
    for g in 0..grid {
        let w = spectral_weight(seq, k, std::f64::consts::TAU * g as f64 / grid as f64)?;
        acc += w.determinant()?.re.ln();
    }
    Ok((lhs - acc / grid as f64).abs())
}

/// Smallest eigenvalue of `L_{k+1,k+1}^dagger L_{k+1,k+1} - L_kk^dagger L_kk`, nonnegative for a positive functional.
pub fn monotonicity_margin(seq: &OpucSequence, k: usize) -> f64 {
    let a = seq.l(k).leading();
    let b = seq.l(k + 1).leading();
    (b.adjoint() * b - a.adjoint() * a).min_eigenvalue()
}

/// Max of `|L_i(z)^T - J R_i(z) J|` over the levels, at one point.
pub fn centro_residual(seq: &OpucSequence, z: C64) -> f64 {
    let j = crate::matrix::reversal(seq.l(0).dim());
    seq.levels.iter().fold(0.0, |m, lv| m.max(lv.l.eval(z).transpose().max_diff(&(&j * lv.r.eval(z) * &j))))
}

/// Block matrices `Lb`, `Rb` with `Lb C Lb^dagger = I` and `Rb Rb^dagger = C^{-1}`, `C` the block Toeplitz matrix of
/// the first `n+1` block rows in descending powers of z.
pub fn cholesky_identification(seq: &OpucSequence, n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let k = seq.l(0).dim();
    let mut lb = ComplexMatrix::zeros((n + 1) * k, (n + 1) * k);
    let mut rb = ComplexMatrix::zeros((n + 1) * k, (n + 1) * k);
    for r in 0..=n {
        for s in 0..=n {
            if s >= r {
                lb.set_block(r * k, s * k, &seq.l(n - r).coeff(n - s));
                rb.set_block(r * k, s * k, &seq.r(s).coeff(r));
            }
        }
    }
    (lb, rb)
}

/// `L(X, X) - X(0) - X(0)^dagger`.
pub fn quadratic_functional(blocks: &BlockMoments, x: &MatrixPolynomial) -> ComplexMatrix {
    let x0 = x.coeff(0);
    blocks.pair(x, x) - &x0 - x0.adjoint()
}

/// Minimizer of [`quadratic_functional`] over degree `k`: `R_kk rev R_k`, with value `-R_kk R_kk^dagger`.
pub fn functional_minimizer(seq: &OpucSequence, k: usize) -> MatrixPolynomial {
    seq.r(k).reverse().left_mul(seq.r(k).leading())
}

/// Smallest `|det rev L_k|` over a polar grid of the closed unit disk, and the winding number of
/// `det rev L_k` along the unit circle.
pub fn stability_certificate(seq: &OpucSequence, k: usize, radial: usize, angular: usize) -> Result<(f64, i64)> {
    let p = seq.l(k).reverse();
    let mut min = f64::INFINITY;
    for a in 0..angular {
        let th = std::f64::consts::TAU * a as f64 / angular as f64;
        for r in 0..=radial {
            let z = C64::from_polar(r as f64 / radial as f64, th);
            min = min.min(p.eval(z).determinant()?.norm());
        }
    }
    let mut turn = 0.0;
    let mut prev = p.eval(C64::new(1.0, 0.0)).determinant()?;
    for a in 1..=angular {
        let cur = p.eval(C64::from_polar(1.0, std::f64::consts::TAU * a as f64 / angular as f64)).determinant()?;
        turn += (cur / prev).arg();
        prev = cur;
    }
    Ok((min, (turn / std::f64::consts::TAU).round() as i64))
}

/// Hermitian matrix trigonometric polynomial `Q(θ) = Σ_{|k|<=n} Q_k e^{ikθ}` with `Q_{-k} = Q_k^dagger`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTrigPolynomial {
    n: usize,
    coeffs: Vec<ComplexMatrix>,
}

impl MatrixTrigPolynomial {
    /// Coefficients `Q_0, ..., Q_n`; the negative ones follow by symmetry.
    pub fn new(nonnegative: Vec<ComplexMatrix>) -> Self {
        let n = nonnegative.len() - 1;
        let mut coeffs: Vec<ComplexMatrix> = nonnegative[1..].iter().rev().map(|c| c.adjoint()).collect();
        coeffs.extend(nonnegative);
        MatrixTrigPolynomial { n, coeffs }
    }

    /// `G(z) G(z)^dagger` on the circle for a matrix polynomial `G`.
    pub fn from_factor(g: &MatrixPolynomial) -> Self {
        let n = g.degree();
        let d = g.dim();
        let nonneg = (0..=n)
            .map(|k| {
                let mut acc = ComplexMatrix::zeros(d, d);
                for i in k..=n {
                    acc += &(g.coeff(i) * g.coeff(i - k).adjoint());
                }
                acc
            })
            .collect();
        Self::new(nonneg)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].rows()
    }

    pub fn coeff(&self, k: i64) -> &ComplexMatrix {
        &self.coeffs[(k + self.n as i64) as usize]
    }

    pub fn eval(&self, theta: f64) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for k in -(self.n as i64)..=(self.n as i64) {
            acc += &self.coeff(k).scale(C64::from_polar(1.0, k as f64 * theta));
        }
        acc
    }

    pub fn shifted(&self, eps: f64) -> Self {
        let mut out = self.clone();
        let n = self.n;
        out.coeffs[n] = &out.coeffs[n] + &ComplexMatrix::identity(self.dim()).scale_re(eps);
        out
    }

    /// Largest coefficient max-norm.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }
}

/// Stable factor `F = rev L_n` with `F F^dagger = Q` on the circle.
///
/// The Fourier coefficients of `Q^{-1}` are computed on a `grid`-point rule; the recursion then
/// produces the factor of the maximum entropy weight, which is `Q^{-1}` itself.
pub fn matrix_fejer_riesz(q: &MatrixTrigPolynomial, grid: usize) -> Result<MatrixPolynomial> {
    let n = q.degree();
    let d = q.dim();
    let mut fourier = vec![ComplexMatrix::zeros(d, d); 2 * n + 1];
    for g in 0..grid {
        let theta = std::f64::consts::TAU * g as f64 / grid as f64;
        let qv = q.eval(theta);
        let min = qv.min_eigenvalue();
        if !(min > 0.0) {
            return Err(Error::NotStrictlyPositive { min_value: min });
        }
        let inv = qv.inverse()?;
        for (idx, f) in fourier.iter_mut().enumerate() {
            let j = idx as f64 - n as f64;
            *f += &inv.scale(C64::from_polar(1.0 / grid as f64, -j * theta));
        }
    }
    let blocks = BlockMoments::new(n, fourier);
    let seq = levinson(&blocks, n)?;
    Ok(seq.l(n).reverse())
}

/// Factor of `Q + εI`, `ε = 1e-8 · |Q|`, for positive semidefinite `Q`; returns the factor and `ε`.
pub fn matrix_fejer_riesz_regularized(q: &MatrixTrigPolynomial, grid: usize) -> Result<(MatrixPolynomial, f64)> {
    let eps = 1e-8 * q.norm().max(f64::MIN_POSITIVE);
    Ok((matrix_fejer_riesz(&q.shifted(eps), grid)?, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moments_from_density;

    fn fixture_blocks(n: usize, m: usize) -> BlockMoments {
        let mom = moments_from_density(
            |z, w| {
                let d = C64::new(4.0, 0.0) + z + w * 0.5 + z * w * C64::new(0.3, 0.2);
                1.0 / d.norm_sqr()
            },
            n,
            m,
            64,
            64,
        )
        .unwrap();
        BlockMoments::from_moments(&mom, n, m).unwrap()
    }

    #[test]
    fn delta_blocks_give_monomials() {
        let b = BlockMoments::from_moments(&MomentTable::delta(3, 1), 3, 1).unwrap();
        let seq = levinson(&b, 3).unwrap();
        for i in 1..=3 {
            assert_eq!(seq.e(i).max_abs(), 0.0);
            assert_eq!(seq.l(i).leading().max_diff(&ComplexMatrix::identity(2)), 0.0);
            assert!(seq.l(i).coeffs()[..i].iter().all(|c| c.max_abs() == 0.0));
        }
    }

    #[test]
    fn scalar_reflection_coefficient() {
        let a = C64::new(0.3, -0.4);
        let mut t = MomentTable::delta(1, 0);
        t.insert(1, 0, a).unwrap();
        let seq = levinson(&BlockMoments::from_moments(&t, 1, 0).unwrap(), 1).unwrap();
        let e = seq.e(1)[(0, 0)];
        assert!((e.norm() - a.norm()).abs() < 1e-15);
        assert!((e - a.conj()).norm() < 1e-15);
    }

    #[test]
    fn orthonormality_and_identities() {
        let b = fixture_blocks(3, 2);
        let seq = levinson(&b, 3).unwrap();
        let id = ComplexMatrix::identity(3);
        for i in 0..=3 {
            for j in 0..=3 {
                let expect = if i == j { id.clone() } else { ComplexMatrix::zeros(3, 3) };
                assert!(b.pair(seq.l(i), seq.l(j)).max_diff(&expect) < 1e-12);
                assert!(b.pair_right(seq.r(i), seq.r(j)).max_diff(&expect) < 1e-12);
            }
        }
        let (lb, rb) = cholesky_identification(&seq, 3);
        let c = b.toeplitz();
        assert!((&lb * &c * lb.adjoint()).max_diff(&ComplexMatrix::identity(12)) < 1e-12);
        assert!((&rb * rb.adjoint()).max_diff(&c.inverse().unwrap()) < 1e-12);
        for i in 1..=3 {
            let lv = &seq.levels[i];
            let (a, ah) = (lv.a.as_ref().unwrap(), lv.a_hat.as_ref().unwrap());
            assert!(reflection_from_boundary(&lv.l, &lv.r, a, ah).unwrap().max_diff(seq.e(i)) < 1e-12);
            assert!(reflection_from_boundary_right(&lv.l, &lv.r, a, ah).unwrap().max_diff(seq.e(i)) < 1e-12);
            let (l, r) = inverse_step(&lv.l, &lv.r, seq.e(i), a, ah).unwrap();
            assert!(l.max_diff(seq.l(i - 1)) < 1e-12 && r.max_diff(seq.r(i - 1)) < 1e-12);
            assert!(determinant_identity_error(&seq, &b, i).unwrap() < 1e-10);
            assert!(monotonicity_margin(&seq, i - 1) > -1e-12);
        }
        assert!(cd_residual(&seq, 3, C64::new(0.3, 0.9), C64::new(-0.7, 0.2)) < 1e-12);
        assert!(centro_residual(&seq, C64::new(0.4, 0.7)) < 1e-12);
    }

    #[test]
    fn spectral_matching_and_entropy() {
        let b = fixture_blocks(2, 1);
        let seq = levinson(&b, 2).unwrap();
        let sm = spectral_matching_check(&seq, 2, &b, 512).unwrap();
        assert!(sm.moment_error < 1e-10 && sm.weight_agreement < 1e-10, "{sm:?}");
        assert!(entropy_identity_error(&seq, 2, 512).unwrap() < 1e-8);
        let (min, wind) = stability_certificate(&seq, 2, 32, 64).unwrap();
        assert!(min > 0.0 && wind == 0);
    }

    #[test]
    fn minimizer_property() {
        let b = fixture_blocks(2, 2);
        let seq = levinson(&b, 2).unwrap();
        let x = functional_minimizer(&seq, 2);
        let lead = seq.r(2).leading();
        assert!(quadratic_functional(&b, &x).max_diff(&-(lead * lead.adjoint())) < 1e-12);
    }

    #[test]
    fn scalar_fejer_riesz() {
        let q = MatrixTrigPolynomial::new(vec![ComplexMatrix::scalar(C64::new(1.25, 0.0)), ComplexMatrix::scalar(C64::new(0.5, 0.0))]);
        let f = matrix_fejer_riesz(&q, 256).unwrap();
        assert!((f.coeff(0)[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((f.coeff(1)[(0, 0)].norm() - 0.5).abs() < 1e-12);
        let id = MatrixTrigPolynomial::new(vec![ComplexMatrix::identity(2)]);
        assert!(matrix_fejer_riesz(&id, 16).unwrap().max_diff(&MatrixPolynomial::constant(ComplexMatrix::identity(2))) < 1e-14);
    }
}
