use integrable_core::dwork::*;
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use super::err;
use crate::report::Battery;
use crate::scenario::{Scenario, SeriesRef};

/// Nonzero residual coefficients listed per failing check.
const MAX_LISTED: usize = 16;

fn load(series: &SeriesRef) -> Result<CoefficientSeries, String> {
    match series {
        SeriesRef::CentralBinomial => Ok(CoefficientSeries::central_binomial()),
        SeriesRef::FactorialControl => Ok(CoefficientSeries::factorial_control()),
        SeriesRef::File(path) => CoefficientSeries::from_file(path).map_err(err),
    }
}

fn small(values: Result<Vec<BigInt>, String>, what: &str) -> Result<Vec<u64>, String> {
    values?
        .into_iter()
        .map(|v| u64::try_from(v).map_err(|_| format!("{what} must be small nonnegative integers")))
        .collect()
}

pub(super) fn run(s: &Scenario, b: &mut Battery) {
    let params = s.params();
    let series = params.series("series").and_then(|r| load(&r));
    let primes = small(params.integer_vec("primes"), "primes").unwrap_or_default();
    let levels = small(params.integer_vec("levels"), "levels").unwrap_or_default();
    let expect_congruent = match params.text_opt("expect") {
        Ok(None) | Ok(Some("congruent")) => Ok(true),
        Ok(Some("not_congruent")) => Ok(false),
        Ok(Some(other)) => Err(format!("expect must be \"congruent\" or \"not_congruent\", got {other:?}")),
        Err(e) => Err(e),
    };
    let base = json!({"series": params.raw("series")});

    for &p in &primes {
        b.run(format!("prefix_consistency[p={p}]"), json!({"inputs": base, "prime": p.to_string(), "levels": levels}), |c| {
            let series = series.clone()?;
            let mut ok = true;
            for &s in &levels {
                let s = u32::try_from(s).map_err(|_| "level out of range")?;
                let lo = truncation_poly(&series, p, s).map_err(err)?.poly;
                let hi = truncation_poly(&series, p, s + 1).map_err(err)?.poly;
                ok &= lo.coeffs().iter().enumerate().all(|(d, x)| *x == hi.coeff(d));
            }
            c.expect(ok);
            Ok(())
        });
        for &s in &levels {
            let name = format!("congruence[p={p},s={s}]");
            let inputs = json!({"inputs": base, "prime": p.to_string(), "level": s.to_string()});
            b.run(name, inputs, |c| {
                let series = series.clone()?;
                let expect = expect_congruent.clone()?;
                let level = u32::try_from(s).map_err(|_| "level out of range")?;
                let res = dwork_congruence_residual(&series, p, level).map_err(err)?;
                let nonzero: Vec<(usize, &BigInt)> =
                    res.coeffs().iter().enumerate().filter(|(_, x)| **x != BigInt::from(0)).collect();
                let mut listed = Map::new();
                for (d, x) in nonzero.iter().take(MAX_LISTED) {
                    listed.insert(d.to_string(), Value::String(x.to_string()));
                }
                c.value("modulus", BigInt::from(p).pow(level).to_string());
                c.value("nonzero_count", nonzero.len());
                c.value("nonzero_coefficients", Value::Object(listed));
                c.value("expected_congruent", expect);
                c.expect(nonzero.is_empty() == expect);
                Ok(())
            });
        }
    }
    if primes.is_empty() || levels.is_empty() {
        b.run("grid", json!({"inputs": base}), |_| {
            Err("primes and levels must be nonempty lists of small integers".into())
        });
    }
}
