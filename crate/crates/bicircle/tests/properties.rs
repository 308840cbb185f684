mod common;

use bicircle::fejer_riesz::TrigPolynomial;
use bicircle::io::{parse_moments, parse_params, parse_trigpoly, write_moments, write_params, write_trigpoly};
use bicircle::matrix::ComplexMatrix;
use bicircle::opuc::{cholesky_identification, levinson, monotonicity_margin, BlockMoments};
use bicircle::orthopoly::{gram_schmidt_levels, orthonormality_residual};
use bicircle::poly::BivariatePolynomial;
use bicircle::synthesis::{extract_parameters, synthesize};
use common::*;
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = (usize, usize, u64)> {
    (0usize..=2, 0usize..=2, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn synthesis_round_trips((n, m, seed) in grid_strategy()) {
        let scale = 0.4 / (((n * m).max(1)) as f64).sqrt();
        let g = random_grid(&mut rng(seed), n, m, scale);
        if let Ok(state) = synthesize(&g) {
            let back = extract_parameters(state.moments(), n, m).unwrap();
            prop_assert!(back.max_diff(&g) < 1e-9);
            prop_assert!(state.moments().is_positive_definite(n, m).unwrap().positive_definite);
        }
    }

    #[test]
    fn orthonormal_families((n, m, seed) in grid_strategy()) {
        let t = random_density(&mut rng(seed), n, m);
        let fam = gram_schmidt_levels(&t, n, m).unwrap();
        prop_assert!(orthonormality_residual(&t, &fam, n, m).unwrap() < 1e-9);
    }

    #[test]
    fn cholesky_reproduces_matrix(k in 1usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = ComplexMatrix::from_fn(k, k, |_, _| disk(&mut r, 1.0));
        let a = &(&b * &b.adjoint()) + &ComplexMatrix::identity(k).scale_re(0.5);
        let l = a.lower_cholesky(1e-12).unwrap();
        let u = a.upper_cholesky(1e-12).unwrap();
        prop_assert!((&l * &l.adjoint()).max_diff(&a) < 1e-10);
        prop_assert!((&u * &u.adjoint()).max_diff(&a) < 1e-10);
        for i in 0..k {
            for j in i + 1..k {
                prop_assert_eq!(l[(i, j)], c(0.0, 0.0));
                prop_assert_eq!(u[(j, i)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn levinson_reflections_are_contractions(n in 1usize..4, m in 0usize..3, seed in any::<u64>()) {
        let t = random_density(&mut rng(seed), n, m);
        let blocks = BlockMoments::from_moments(&t, n, m).unwrap();
        let seq = levinson(&blocks, n).unwrap();
        for i in 1..=n {
            prop_assert!(seq.e(i).spectral_norm() < 1.0);
        }
        for k in 0..n {
            prop_assert!(monotonicity_margin(&seq, k) > -1e-10);
        }
        let c = blocks.toeplitz();
        let (lb, _) = cholesky_identification(&seq, n);
        let id = ComplexMatrix::identity(c.rows());
        prop_assert!((&(&lb * &c) * &lb.adjoint()).max_diff(&id) < 1e-8);
    }

    #[test]
    fn modulus_squared_is_hermitian(n in 0usize..3, m in 0usize..3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut p = BivariatePolynomial::zero(n, m);
        for i in 0..=n {
            for j in 0..=m {
                p.set(i, j, disk(&mut r, 1.0));
            }
        }
        let f = TrigPolynomial::modulus_squared(&p);
        for (k, l, v) in f.half_plane() {
            prop_assert!((f.get(-k, -l) - v.conj()).norm() < 1e-12);
        }
        let (z, w) = (disk(&mut r, 1.0), disk(&mut r, 1.0));
        let (z, w) = (z / z.norm(), w / w.norm());
        prop_assert!((f.eval(z, w) - p.eval(z, w).norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn text_formats_round_trip((n, m, seed) in grid_strategy()) {
        let mut r = rng(seed);
        let t = random_density(&mut r, n, m);
        prop_assert!(parse_moments(&write_moments(&t)).unwrap().max_diff(&t) == 0.0);
        let g = random_grid(&mut r, n, m, 0.5);
        prop_assert!(parse_params(&write_params(&g)).unwrap().max_diff(&g) == 0.0);
        let mut p = BivariatePolynomial::zero(n, m);
        p.set(0, 0, disk(&mut r, 1.0));
        p.set(n, m, disk(&mut r, 1.0));
        let f = TrigPolynomial::modulus_squared(&p);
        prop_assert_eq!(parse_trigpoly(&write_trigpoly(&f)).unwrap(), f);
    }
}
