#![allow(dead_code)]

use bicircle::matrix::C64;
use bicircle::moments::{moments_from_density, MomentTable};
use bicircle::poly::BivariatePolynomial;
use bicircle::synthesis::ParameterGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn disk(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>())
}

/// Moments of `1/|4 + z + w|²`.
pub fn stable_fixture(n: usize, m: usize) -> MomentTable {
    moments_from_density(|z, w| 1.0 / (c(4.0, 0.0) + z + w).norm_sqr(), n, m, 128, 128).unwrap()
}

/// Moments of `1/|4 + z + w/2 + (0.3+0.2i) zw|²`.
pub fn skew_fixture(n: usize, m: usize) -> MomentTable {
    moments_from_density(|z, w| 1.0 / (c(4.0, 0.0) + z + w * 0.5 + z * w * c(0.3, 0.2)).norm_sqr(), n, m, 128, 128).unwrap()
}

/// Exact moments of the positive trigonometric density `|p|² + 0.2`, `p` random of bidegree (2,2).
pub fn random_density(rng: &mut ChaCha8Rng, n: usize, m: usize) -> MomentTable {
    let mut p = BivariatePolynomial::zero(2, 2);
    for i in 0..=2 {
        for j in 0..=2 {
            p.set(i, j, disk(rng, 1.0));
        }
    }
    moments_from_density(|z, w| p.eval(z, w).norm_sqr() + 0.2, n, m, 16, 16).unwrap()
}

/// Grid with `u[0,0] = 1` and every free parameter uniform in the disk of radius `r`.
pub fn random_grid(rng: &mut ChaCha8Rng, n: usize, m: usize, r: f64) -> ParameterGrid {
    let mut g = ParameterGrid::new(n, m, 1.0);
    for (i, j) in g.free_indices().into_iter().skip(1) {
        g.set(i, j, disk(rng, r));
    }
    g
}

/// Random `p` of bidegree `(n,m)` whose reverse `1 + Σ a_ij z^i w^j` is stable on the closed bidisk.
pub fn random_stable(rng: &mut ChaCha8Rng, n: usize, m: usize) -> BivariatePolynomial {
    let mut rev = BivariatePolynomial::zero(n, m);
    let terms = ((n + 1) * (m + 1) - 1) as f64;
    rev.set(0, 0, c(1.0, 0.0));
    for i in 0..=n {
        for j in 0..=m {
            if i + j > 0 {
                rev.set(i, j, disk(rng, 0.8 / terms));
            }
        }
    }
    rev.reverse(n, m)
}

pub fn density_of(p: &BivariatePolynomial, n: usize, m: usize) -> MomentTable {
    moments_from_density(|z, w| 1.0 / p.eval(z, w).norm_sqr(), n, m, 128, 128).unwrap()
}
