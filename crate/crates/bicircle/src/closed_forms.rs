//! Closed-form admissibility regions for small parameter grids.
//!
//! Three families at level (1,1) or (1,2) where the synthesis conditions reduce to explicit
//! inequalities: the degree-(1,1) grid with `u[-1,1] = 0`, the contractive Toeplitz grid with
//! `u[0,1] = 0`, and the blocked extension to (1,2) with vanishing axis parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Condition;
use crate::matrix::{ComplexMatrix, C64};
use crate::synthesis::{synthesize, ParameterGrid};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Grid at level (1,1) with `u[0,0] = 1`.
pub fn level11_grid(u10: C64, u01: C64, u_m11: C64, u11: C64) -> ParameterGrid {
    let mut g = ParameterGrid::new(1, 1, 1.0);
    g.set(1, 0, u10);
    g.set(0, 1, u01);
    g.set(-1, 1, u_m11);
    g.set(1, 1, u11);
    g
}

/// Scaled corner parameter of the degree-(1,1) grid with `u[-1,1] = 0`; admissible iff its modulus is below one.
pub fn deg11_u_hat(u10: C64, u01: C64, u11: C64) -> C64 {
    let alpha = (1.0 - (u01 * u10).norm_sqr()) / ((1.0 - u01.norm_sqr()).sqrt() * (1.0 - u10.norm_sqr()).sqrt());
    u11 * alpha - (u01 * u10).conj()
}

/// The same quantity with the cross term `+u01 conj(u10)`.
pub fn deg11_u_hat_alternative(u10: C64, u01: C64, u11: C64) -> C64 {
    let alpha = (1.0 - (u01 * u10).norm_sqr()) / ((1.0 - u01.norm_sqr()).sqrt() * (1.0 - u10.norm_sqr()).sqrt());
    u11 * alpha + u01 * u10.conj()
}

pub fn deg11_admissible(u10: C64, u01: C64, u11: C64) -> bool {
    u10.norm() < 1.0 && u01.norm() < 1.0 && deg11_u_hat(u10, u01, u11).norm() < 1.0
}

/// Distance of the predicate from its boundary; small values are numerically ambiguous.
pub fn deg11_boundary_distance(u10: C64, u01: C64, u11: C64) -> f64 {
    let d = (1.0 - u10.norm()).abs().min((1.0 - u01.norm()).abs());
    if u10.norm() >= 1.0 || u01.norm() >= 1.0 {
        return d;
    }
    d.min((deg11_u_hat(u10, u01, u11).norm() - 1.0).abs())
}

/// Scaled corner parameter of the contractive Toeplitz grid (`u[0,1] = 0`).
pub fn contractive_toeplitz_u_hat(u10: C64, u_m11: C64, u11: C64) -> C64 {
    let a = u10.norm_sqr();
    let b = u_m11.norm_sqr();
    let d = a / ((1.0 - a) * (1.0 - b));
    let d1 = a / ((1.0 - b) * (1.0 - a).sqrt());
    let phase = if a > 0.0 { u10.conj() * u10.conj() / a } else { c(0.0) };
    u11 * ((1.0 + d) * (1.0 - a).sqrt()) + u_m11 * phase * d1
}

/// The same quantity with the second term written as `d1 conj(u[-1,1])`.
pub fn contractive_toeplitz_u_hat_alternative(u10: C64, u_m11: C64, u11: C64) -> C64 {
    let a = u10.norm_sqr();
    let b = u_m11.norm_sqr();
    let d = a / ((1.0 - a) * (1.0 - b));
    let d1 = a / ((1.0 - b) * (1.0 - a).sqrt());
    u11 * ((1.0 + d) * (1.0 - a).sqrt()) + u_m11.conj() * d1
}

pub fn contractive_toeplitz_admissible(u10: C64, u_m11: C64, u11: C64) -> bool {
    u10.norm() < 1.0 && u_m11.norm() < 1.0 && contractive_toeplitz_u_hat(u10, u_m11, u11).norm() < 1.0
}

pub fn contractive_toeplitz_boundary_distance(u10: C64, u_m11: C64, u11: C64) -> f64 {
    let d = (1.0 - u10.norm()).abs().min((1.0 - u_m11.norm()).abs());
    if u10.norm() >= 1.0 || u_m11.norm() >= 1.0 {
        return d;
    }
    d.min((contractive_toeplitz_u_hat(u10, u_m11, u11).norm() - 1.0).abs())
}

/// Grid at level (1,2) with `u[1,0] = u[0,1] = u[0,2] = 0`.
pub fn blocked_extension_grid(u11: C64, u_m11: C64, u12: C64, u_m12: C64) -> ParameterGrid {
    let mut g = ParameterGrid::new(1, 2, 1.0);
    g.set(1, 1, u11);
    g.set(-1, 1, u_m11);
    g.set(1, 2, u12);
    g.set(-1, 2, u_m12);
    g
}

/// Reflection coefficient at (1,1) and `K` at (1,2) of the blocked extension.
pub fn blocked_extension_coefficients(u11: C64, u_m11: C64, u_m12: C64) -> (ComplexMatrix, ComplexMatrix) {
    let e = ComplexMatrix::diagonal(&[u11.conj(), u_m11]);
    let k = ComplexMatrix::from_rows(&[
        vec![u_m11 / (1.0 - u11.norm_sqr()).sqrt()],
        vec![u_m12 / (1.0 - u_m11.norm_sqr()).sqrt()],
    ]);
    (e, k)
}

/// Whether `K` at (1,2) is a strict contraction, assuming level (1,1) is admissible.
pub fn blocked_extension_k_admissible(u11: C64, u_m11: C64, u_m12: C64) -> bool {
    blocked_extension_coefficients(u11, u_m11, u_m12).1.frobenius() < 1.0
}

pub fn blocked_extension_boundary_distance(u11: C64, u_m11: C64, u_m12: C64) -> f64 {
    (blocked_extension_coefficients(u11, u_m11, u_m12).1.frobenius() - 1.0).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    Deg11,
    ContractiveToeplitz,
    BlockedExtension,
}

/// One sample of a sweep comparing a closed-form region with the synthesis verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub params: Vec<(&'static str, C64)>,
    pub closed_form: bool,
    /// Verdict of the alternative written form, where one exists.
    pub alternative_form: Option<bool>,
    pub algorithmic: bool,
    pub boundary_distance: f64,
}

impl SweepPoint {
    pub fn in_band(&self, band: f64) -> bool {
        self.boundary_distance <= band
    }

    pub fn agrees(&self) -> bool {
        self.closed_form == self.algorithmic
    }
}

fn disk(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>())
}

fn deg11_point(u10: C64, u01: C64, u11: C64) -> SweepPoint {
    let ok = |h: C64| u10.norm() < 1.0 && u01.norm() < 1.0 && h.norm() < 1.0;
    SweepPoint {
        params: vec![("u10", u10), ("u01", u01), ("u11", u11)],
        closed_form: deg11_admissible(u10, u01, u11),
        alternative_form: Some(ok(deg11_u_hat_alternative(u10, u01, u11))),
        algorithmic: synthesize(&level11_grid(u10, u01, c(0.0), u11)).is_ok(),
        boundary_distance: deg11_boundary_distance(u10, u01, u11),
    }
}

fn contractive_toeplitz_point(u10: C64, u_m11: C64, u11: C64) -> SweepPoint {
    let ok = |h: C64| u10.norm() < 1.0 && u_m11.norm() < 1.0 && h.norm() < 1.0;
    SweepPoint {
        params: vec![("u10", u10), ("u-11", u_m11), ("u11", u11)],
        closed_form: contractive_toeplitz_admissible(u10, u_m11, u11),
        alternative_form: Some(ok(contractive_toeplitz_u_hat_alternative(u10, u_m11, u11))),
        algorithmic: synthesize(&level11_grid(u10, c(0.0), u_m11, u11)).is_ok(),
        boundary_distance: contractive_toeplitz_boundary_distance(u10, u_m11, u11),
    }
}

/// The algorithmic side only asks whether `K` at (1,2) passes.
fn blocked_extension_point(u11: C64, u_m11: C64, u_m12: C64) -> SweepPoint {
    let refused = match synthesize(&blocked_extension_grid(u11, u_m11, c(0.0), u_m12)) {
        Ok(_) => false,
        Err(f) => (f.inadmissible.n, f.inadmissible.m, f.inadmissible.condition) == (1, 2, Condition::KContraction),
    };
    SweepPoint {
        params: vec![("u11", u11), ("u-11", u_m11), ("u-12", u_m12)],
        closed_form: blocked_extension_k_admissible(u11, u_m11, u_m12),
        alternative_form: None,
        algorithmic: !refused,
        boundary_distance: blocked_extension_boundary_distance(u11, u_m11, u_m12),
    }
}

/// Deterministic sweep of `count` points; the first points are fixed landmarks, the rest seeded random.
pub fn sweep(example: Example, count: usize, seed: u64) -> Vec<SweepPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    match example {
        Example::Deg11 => {
            for r in [0.5, 0.99, 1.01] {
                out.push(deg11_point(c(0.0), c(0.0), C64::from_polar(r, 0.7)));
            }
        }
        Example::ContractiveToeplitz => out.push(contractive_toeplitz_point(c(0.0), c(0.0), C64::from_polar(0.5, 0.7))),
        Example::BlockedExtension => {
            out.push(blocked_extension_point(c(0.8), c(0.7), c(0.0)));
            out.push(blocked_extension_point(c(0.3), c(0.2), c(0.0)));
        }
    }
    out.truncate(count);
    while out.len() < count {
        let p = match example {
            Example::Deg11 => {
                let (a, b, u) = (disk(&mut rng, 0.95), disk(&mut rng, 0.95), disk(&mut rng, 1.6));
                deg11_point(a, b, u)
            }
            Example::ContractiveToeplitz => {
                let (a, b, u) = (disk(&mut rng, 0.95), disk(&mut rng, 0.95), disk(&mut rng, 1.2));
                contractive_toeplitz_point(a, b, u)
            }
            Example::BlockedExtension => {
                let (a, b, u) = (disk(&mut rng, 0.95), disk(&mut rng, 0.95), disk(&mut rng, 1.0));
                blocked_extension_point(a, b, u)
            }
        };
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Condition;
    use crate::synthesis::synthesize;

    #[test]
    fn deg11_reduces_to_unit_disk() {
        for (r, ok) in [(0.5, true), (0.99, true), (1.01, false)] {
            let u11 = C64::from_polar(r, 0.7);
            assert_eq!(deg11_admissible(c(0.0), c(0.0), u11), ok);
            let alg = synthesize(&level11_grid(c(0.0), c(0.0), c(0.0), u11)).is_ok();
            assert_eq!(alg, ok);
        }
    }

    #[test]
    fn deg11_matches_synthesis_off_axis() {
        let (u10, u01) = (C64::new(0.3, 0.4), C64::new(0.6, -0.2));
        for k in 0..24 {
            let u11 = C64::from_polar(0.2 + 0.05 * k as f64, 0.3 * k as f64);
            if deg11_boundary_distance(u10, u01, u11) < 1e-6 {
                continue;
            }
            let alg = synthesize(&level11_grid(u10, u01, c(0.0), u11)).is_ok();
            assert_eq!(alg, deg11_admissible(u10, u01, u11), "u11 = {u11}");
        }
    }

    #[test]
    fn contractive_toeplitz_matches_synthesis() {
        let (u10, um11) = (C64::new(-0.5, 0.3), C64::new(0.2, 0.5));
        for k in 0..24 {
            let u11 = C64::from_polar(0.1 + 0.06 * k as f64, 1.1 * k as f64);
            if contractive_toeplitz_boundary_distance(u10, um11, u11) < 1e-6 {
                continue;
            }
            let alg = synthesize(&level11_grid(u10, c(0.0), um11, u11)).is_ok();
            assert_eq!(alg, contractive_toeplitz_admissible(u10, um11, u11));
        }
    }

    #[test]
    fn blocked_extension_coefficients_match() {
        let (u11, um11, um12) = (C64::new(0.3, 0.1), C64::new(-0.2, 0.4), C64::new(0.1, 0.3));
        let s = synthesize(&blocked_extension_grid(u11, um11, c(0.0), um12)).unwrap();
        let (e, k) = blocked_extension_coefficients(u11, um11, um12);
        assert!(s.level(1, 1).e_hat.as_ref().unwrap().max_diff(&e) < 1e-14);
        assert!(s.level(1, 2).k.max_diff(&k) < 1e-14);
    }

    #[test]
    fn blocked_extension_refused() {
        let (u11, um11, um12) = (C64::new(0.8, 0.0), C64::new(0.7, 0.0), c(0.0));
        assert!(!blocked_extension_k_admissible(u11, um11, um12));
        let f = synthesize(&blocked_extension_grid(u11, um11, c(0.0), um12)).unwrap_err();
        assert_eq!((f.inadmissible.n, f.inadmissible.m, f.inadmissible.condition), (1, 2, Condition::KContraction));
    }

    #[test]
    fn sweeps_agree_off_boundary() {
        for ex in [Example::Deg11, Example::ContractiveToeplitz, Example::BlockedExtension] {
            let pts = sweep(ex, 120, 7);
            assert_eq!(pts.len(), 120);
            assert!(pts.iter().filter(|p| !p.in_band(1e-6)).all(SweepPoint::agrees), "{ex:?}");
            assert!(pts.iter().any(|p| p.algorithmic) && pts.iter().any(|p| !p.algorithmic), "{ex:?}");
        }
        let landmarks: Vec<bool> = sweep(Example::Deg11, 3, 0).iter().map(|p| p.algorithmic).collect();
        assert_eq!(landmarks, [true, true, false]);
    }
}
