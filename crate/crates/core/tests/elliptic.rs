mod common;

use common::*;
use integrable_core::algebra::linalg::{multiset_distance, vec_max_norm};
use integrable_core::algebra::SolverConfig;
use integrable_core::elliptic::*;
use integrable_core::trs::subset_coefficient;
use integrable_core::Complex64;
use proptest::prelude::*;

fn theta_at(x: Complex64, p: Complex64, m: usize) -> Complex64 {
    theta_trunc(x, &ThetaParams::new(p, m).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // 1e-12 is reachable from M = 16 only while |p|^17 stays well below it.
    #[test]
    fn theta_truncation_converges(p in complex_in(0.0, 0.15), x in complex_in(0.5, 2.0)) {
        let diff = (theta_at(x, p, 16) - theta_at(x, p, 32)).norm();
        prop_assert!(diff <= 1e-12, "diff {diff:e}");
    }

    // Past that, the change tracks the first dropped factors.
    #[test]
    fn theta_truncation_rate(p in complex_in(0.15, 0.3), x in complex_in(0.5, 2.0)) {
        let diff = (theta_at(x, p, 16) - theta_at(x, p, 32)).norm();
        let bound = 4.0 * p.norm().powi(17) * x.norm().max(x.norm().recip()) * theta_at(x, p, 32).norm().max(1.0);
        prop_assert!(diff <= bound, "diff {diff:e} bound {bound:e}");
    }

    #[test]
    fn quasi_periodicity(phase in 0.0..std::f64::consts::TAU, x in complex_in(0.5, 2.0)) {
        let params = ThetaParams::new(Complex64::from_polar(0.1, phase), 16).unwrap();
        let lhs = theta_trunc(params.p_ell() * x, &params).unwrap();
        let rhs = theta_trunc(x, &params).unwrap() / x;
        prop_assert!((lhs + rhs).norm() <= 1e-12);
    }

    #[test]
    fn trigonometric_limit(n in 1usize..=5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = separated(&mut r, n, 0.5, 2.0, 0.3);
        let hbar = annulus(&mut r, 0.5, 1.5);
        let theta = ThetaParams::new(c(0.0, 0.0), 16).unwrap();
        for mask in 0u64..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let req = ErsCoefficientRequest { subset, x: x.clone(), hbar, theta };
            let ell = ers_hamiltonian_coefficient(&req).unwrap();
            let trig = subset_coefficient(&x, hbar, mask);
            prop_assert!((ell - trig).norm() <= 1e-12 * trig.norm().max(1.0));
        }
    }

    #[test]
    fn derivative_matches_central_difference(n in 2usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = separated(&mut r, n, 0.7, 1.5, 0.3);
        let hbar = annulus(&mut r, 0.7, 1.3);
        let p0 = annulus(&mut r, 0.0, 0.2);
        let req = |p| ErsCoefficientRequest {
            subset: vec![0],
            x: x.clone(),
            hbar,
            theta: ThetaParams::new(p, 32).unwrap(),
        };
        let h = 1e-5;
        let fd = (ers_hamiltonian_coefficient(&req(p0 + h)).unwrap() - ers_hamiltonian_coefficient(&req(p0 - h)).unwrap()) / (2.0 * h);
        let exact = ers_coefficient_p_derivative(&req(p0)).unwrap();
        prop_assert!((fd - exact).norm() <= 1e-6 * exact.norm().max(1.0), "{fd} vs {exact}");
    }
}

#[test]
fn hbar_one_coefficients_are_one() {
    let mut r = rng(3);
    for _ in 0..20 {
        let x = separated(&mut r, 4, 0.5, 2.0, 0.3);
        let req = ErsCoefficientRequest {
            subset: vec![1, 3],
            x,
            hbar: c(1.0, 0.0),
            theta: ThetaParams::new(annulus(&mut r, 0.0, 0.3), 32).unwrap(),
        };
        assert!((ers_hamiltonian_coefficient(&req).unwrap() - 1.0).norm() < 1e-12);
    }
}

fn generic_problem(k: usize, n: usize, coupling: Complex64) -> AdhmBetheProblem {
    let a = [c(1.0, 0.2), c(-0.9, 0.8), c(0.3, -1.5)];
    AdhmBetheProblem::new(a[..n].to_vec(), k, c(0.55, 0.75), coupling).unwrap()
}

#[test]
fn adhm_endpoint_and_continuity() {
    let cfg = SolverConfig::default();
    for (k, n) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 2), (2, 3)] {
        let prob = generic_problem(k, n, c(0.12, -0.05));
        for comp in compositions(k, n) {
            let trace = adhm_bethe_trace(&prob, &comp, &cfg).unwrap();
            let (_, end) = trace.last().unwrap();
            assert!(vec_max_norm(&adhm_residual(&prob, end).unwrap()) <= 1e-10);
            for w in trace.windows(2) {
                let dt = (w[1].0 - w[0].0).norm();
                let ds = w[1].1.iter().zip(&w[0].1).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(ds <= 10.0 * dt, "composition {comp:?}: step {ds:e} for dt {dt:e}");
            }
        }
    }
}

#[test]
fn distinct_seeds_stay_distinct() {
    let cfg = SolverConfig::default();
    for (k, n) in [(2, 2), (2, 3), (3, 2)] {
        let prob = generic_problem(k, n, c(1e-3, 0.0));
        let sols: Vec<Vec<Complex64>> = compositions(k, n)
            .iter()
            .map(|comp| adhm_bethe_solve(&prob, comp, &cfg).unwrap())
            .collect();
        for (i, a) in sols.iter().enumerate() {
            for b in &sols[i + 1..] {
                assert!(multiset_distance(a, b) > 1e-6);
            }
        }
    }
}

#[test]
fn closed_form_single_root() {
    let cfg = SolverConfig::default();
    let mut r = rng(9);
    for _ in 0..10 {
        let a = annulus(&mut r, 0.5, 2.0);
        let coupling = annulus(&mut r, 0.0, 0.5);
        let prob = AdhmBetheProblem::new(vec![a], 1, c(0.4, 1.2), coupling).unwrap();
        let s = adhm_bethe_solve(&prob, &[1], &cfg).unwrap();
        assert!((s[0] - (a + coupling)).norm() <= 1e-12);
    }
}

#[test]
fn bundle_eigenvalue_compact_limit() {
    let mut r = rng(4);
    for _ in 0..10 {
        let roots: Vec<Complex64> = (0..3).map(|_| annulus(&mut r, 0.2, 2.0)).collect();
        let q = annulus(&mut r, 0.5, 1.5);
        let full = universal_bundle_eigenvalue(&roots, q, Some(c(1e6, 0.0))).unwrap();
        let compact = universal_bundle_eigenvalue(&roots, q, None).unwrap();
        assert!((full - compact).norm() <= 1e-5 * compact.norm());
    }
}
