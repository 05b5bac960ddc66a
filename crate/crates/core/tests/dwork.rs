use integrable_core::dwork::*;
use num_bigint::BigInt;
use proptest::prelude::*;

#[test]
fn central_binomial_congruences() {
    let cb = CoefficientSeries::central_binomial();
    for (p, s) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1)] {
        assert!(dwork_congruence_residual(&cb, p, s).unwrap().is_zero(), "p = {p}, s = {s}");
    }
}

#[test]
fn control_series_fails() {
    let control = CoefficientSeries::factorial_control();
    let res = dwork_congruence_residual(&control, 3, 1).unwrap();
    assert!(!res.is_zero());
    assert!(res.coeffs().iter().all(|c| *c >= BigInt::from(0) && *c < BigInt::from(3)));
}

#[test]
fn level_one_uses_trivial_lower_truncation() {
    // T_2(z) = T_1(z) T_1(z^p) mod p, checked by hand-assembling both sides.
    let cb = CoefficientSeries::central_binomial();
    let p = 3u64;
    let t2 = truncation_poly(&cb, p, 2).unwrap().poly;
    let t1 = truncation_poly(&cb, p, 1).unwrap().poly;
    let rhs = &t1 * &t1.substitute_power(p as usize);
    for d in 0..9 {
        let diff = t2.coeff(d) - rhs.coeff(d);
        assert_eq!(diff % BigInt::from(p), BigInt::from(0), "degree {d}");
    }
}

#[test]
fn file_series_round_trip() {
    let path = std::env::temp_dir().join(format!("dwork-series-{}.txt", std::process::id()));
    let coeffs: Vec<String> = (0..27).map(|d| CoefficientSeries::central_binomial().coefficient(d).unwrap().to_string()).collect();
    std::fs::write(&path, coeffs.join("\n") + "\n").unwrap();
    let series = CoefficientSeries::from_file(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(dwork_congruence_residual(&series, 3, 2).unwrap().is_zero());
    assert!(dwork_congruence_residual(&series, 3, 3).is_err());
}

proptest! {
    #[test]
    fn prefix_consistent(p in prop::sample::select(vec![2u64, 3, 5, 7]), s in 0u32..3) {
        let cb = CoefficientSeries::central_binomial();
        let lo = truncation_poly(&cb, p, s).unwrap().poly;
        let hi = truncation_poly(&cb, p, s + 1).unwrap().poly;
        let len = p.pow(s) as usize;
        prop_assert_eq!(lo.degree(), Some(len - 1));
        for d in 0..len {
            prop_assert_eq!(lo.coeff(d), hi.coeff(d));
        }
    }

    #[test]
    fn valuation_is_additive(
        a in any::<i64>().prop_filter("nonzero", |v| *v != 0),
        b in any::<i64>().prop_filter("nonzero", |v| *v != 0),
        p in prop::sample::select(vec![2u64, 3, 5, 7, 11]),
    ) {
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let va = padic_valuation(&a, p).unwrap().finite().unwrap();
        let vb = padic_valuation(&b, p).unwrap().finite().unwrap();
        prop_assert_eq!(padic_valuation(&(a * b), p).unwrap(), Valuation::Finite(va + vb));
    }
}
