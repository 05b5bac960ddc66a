mod common;

use common::*;
use integrable_core::algebra::linalg::vec_max_norm;
use integrable_core::algebra::solver::DEDUP_THRESHOLD;
use integrable_core::algebra::SolverConfig;
use integrable_core::qq::*;
use integrable_core::Complex64;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

const TWIST: Twist = Twist {
    xi: Complex64::new(1.7, 0.4),
    xi_tilde: Complex64::new(-0.3, 0.9),
};

#[test]
fn solution_counts_match_binomials() {
    let roots = [c(1.0, 0.3), c(-0.8, 0.7), c(0.2, -1.4)];
    let hbar = c(0.6, 0.9);
    let cfg = SolverConfig::default();
    let mut r = rng(2024);
    for (n, k) in [(1, 0), (1, 1), (2, 1), (3, 1)] {
        let data = DrinfeldData::new(roots[..n].to_vec(), hbar, k).unwrap();
        let seeds: Vec<Vec<Complex64>> = (0..200)
            .map(|_| (0..k).map(|_| annulus(&mut r, 0.0, 4.0)).collect())
            .collect();
        let sols = solve_qq_multistart(&data, &TWIST, &seeds, &cfg, DEDUP_THRESHOLD).unwrap();
        assert_eq!(sols.len(), binomial(n, k), "(N, k) = ({n}, {k})");
        for sol in &sols {
            assert!(qq_residual(sol, &data).unwrap().max_abs_coeff() <= 1e-10);
            let bethe = bethe_residual(&sol.bethe_roots().unwrap(), &data, &TWIST).unwrap();
            assert!(vec_max_norm(&bethe) <= 1e-10);

            let swapped = backlund_swap(sol).unwrap();
            assert!(qq_residual(&swapped, &data).unwrap().max_abs_coeff() <= 1e-10);
            assert_eq!(&backlund_swap(&swapped).unwrap(), sol);
        }
    }
}

#[test]
fn distinct_bethe_roots_per_solution() {
    let data = DrinfeldData::new(vec![c(1.0, 0.3), c(-0.8, 0.7)], c(0.6, 0.9), 1).unwrap();
    let cfg = SolverConfig::default();
    let seeds: Vec<Vec<Complex64>> = data.lambda_roots().iter().map(|&a| vec![a]).collect();
    let sols = solve_qq_multistart(&data, &TWIST, &seeds, &cfg, DEDUP_THRESHOLD).unwrap();
    let roots: Vec<Complex64> = sols.iter().map(|s| s.bethe_roots().unwrap()[0]).collect();
    assert_eq!(roots.len(), 2);
    assert!(min_gap(&roots) > 1e-6);
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #[test]
    fn orbifolded_symmetry_exact(
        roots in proptest::collection::vec((1i64..50, 1i64..20), 1..=4),
        q in (1i64..30, 1i64..30),
        z in (1i64..40, 1i64..40),
    ) {
        let roots: Vec<BigRational> = roots.into_iter().map(|(n, d)| rational(n, d)).collect();
        let q = rational(q.0, q.1);
        let z = rational(z.0, z.1);
        let flipped = &q / &z;
        prop_assert_eq!(orbifolded_eval(&roots, &q, &flipped), orbifolded_eval(&roots, &q, &z));
    }

    #[test]
    fn orbifolded_symmetry_float(k in 1usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let roots: Vec<Complex64> = (0..k).map(|_| annulus(&mut r, 0.3, 2.0)).collect();
        let q = orbifolded_qplus(&roots, annulus(&mut r, 0.3, 2.0)).unwrap();
        for _ in 0..20 {
            let z = annulus(&mut r, 0.5, 1.5);
            let scale = q.eval(z).unwrap().norm().max(1.0);
            prop_assert!(q.symmetry_defect(z).unwrap() <= 1e-12 * scale);
        }
    }
}

#[test]
fn random_roots_are_not_bethe() {
    let data = DrinfeldData::new(vec![c(1.0, 0.3), c(-0.8, 0.7)], c(0.6, 0.9), 1).unwrap();
    let mut r = rng(5);
    for _ in 0..10 {
        let s = annulus(&mut r, 0.5, 2.0);
        let res = bethe_residual(&[s], &data, &TWIST).unwrap();
        assert!(vec_max_norm(&res) > 1e-6);
    }
}
