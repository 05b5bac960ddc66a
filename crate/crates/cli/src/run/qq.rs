use integrable_core::algebra::solver::DEDUP_THRESHOLD;
use integrable_core::algebra::{linalg::vec_max_norm, scaled_difference};
use integrable_core::qq::*;
use integrable_core::Complex64;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{annulus, err};
use crate::report::{cjson, cvec_json, Battery};
use crate::scenario::Scenario;

const RESIDUAL_TOL: f64 = 1e-10;
const INVOLUTION_TOL: f64 = 1e-12;
const CLOSED_FORM_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;
const DEFAULT_SEEDS: usize = 200;
const DEFAULT_SAMPLES: usize = 20;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn poly_distance(a: &integrable_core::algebra::Polynomial, b: &integrable_core::algebra::Polynomial) -> f64 {
    (a - b).max_abs_coeff()
}

pub(super) fn run(s: &Scenario, rng: &mut ChaCha8Rng, b: &mut Battery) {
    let params = s.params();
    let config = s.tolerances.solver_config();
    let inputs = json!({
        "lambda_roots": params.raw("lambda_roots"),
        "hbar": params.raw("hbar"),
        "magnon_count": params.raw("magnon_count"),
        "xi": params.raw("xi"),
        "xi_tilde": params.raw("xi_tilde"),
        "tolerances": s.tolerances,
    });
    let load = || -> Result<(DrinfeldData, Twist), String> {
        let data = DrinfeldData::new(
            params.complex_vec("lambda_roots")?,
            params.complex("hbar")?,
            params.count("magnon_count", 0)?,
        )
        .map_err(err)?;
        let twist = Twist {
            xi: params.complex("xi")?,
            xi_tilde: params.complex("xi_tilde")?,
        };
        Ok((data, twist))
    };

    let n_seeds = params.count("seeds", DEFAULT_SEEDS).unwrap_or(DEFAULT_SEEDS);
    let k = params.count("magnon_count", 0).unwrap_or(0);
    let roots = params.complex_vec("lambda_roots").unwrap_or_default();
    let radius = 1.0 + 2.0 * roots.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let seeds: Vec<Vec<Complex64>> = (0..n_seeds)
        .map(|_| (0..k).map(|_| annulus(rng, 0.0, radius)).collect())
        .collect();
    let sampled = json!({"inputs": inputs, "seed": s.seed, "seeds": n_seeds});

    let solutions = (|| -> Result<(DrinfeldData, Twist, Vec<QqSolution>), String> {
        let (data, twist) = load()?;
        let sols = solve_qq_multistart(&data, &twist, &seeds, &config, DEDUP_THRESHOLD).map_err(err)?;
        Ok((data, twist, sols))
    })();

    b.run("multistart_solution_count", sampled.clone(), |c| {
        let (data, _, sols) = solutions.clone()?;
        let expected = binomial(data.degree(), data.magnon_count());
        let listing: Vec<Value> = sols
            .iter()
            .map(|sol| {
                json!({
                    "q_plus": cvec_json(sol.q_plus.coeffs()),
                    "q_minus": cvec_json(sol.q_minus.coeffs()),
                    "normalization": cjson(sol.normalization),
                })
            })
            .collect();
        c.value("expected", expected);
        c.value("found", sols.len());
        c.value("solutions", Value::Array(listing));
        c.expect(sols.len() == expected);
        Ok(())
    });
    b.run("qq_residual", sampled.clone(), |c| {
        let (data, _, sols) = solutions.clone()?;
        let mut worst: f64 = 0.0;
        for sol in &sols {
            worst = worst.max(qq_residual(sol, &data).map_err(err)?.max_abs_coeff());
        }
        c.measure(worst, RESIDUAL_TOL);
        Ok(())
    });
    b.run("bethe_residual", sampled.clone(), |c| {
        let (data, twist, sols) = solutions.clone()?;
        let mut worst: f64 = 0.0;
        let mut all_roots = Vec::new();
        for sol in &sols {
            let roots = sol.bethe_roots().map_err(err)?;
            worst = worst.max(vec_max_norm(&bethe_residual(&roots, &data, &twist).map_err(err)?));
            all_roots.push(cvec_json(&roots));
        }
        c.value("bethe_roots", Value::Array(all_roots));
        c.measure(worst, RESIDUAL_TOL);
        Ok(())
    });
    b.run("backlund_involution", sampled.clone(), |c| {
        let (_, _, sols) = solutions.clone()?;
        let mut worst: f64 = 0.0;
        for sol in &sols {
            let back = backlund_swap(&backlund_swap(sol).map_err(err)?).map_err(err)?;
            worst = worst
                .max(poly_distance(&back.q_plus, &sol.q_plus))
                .max(poly_distance(&back.q_minus, &sol.q_minus))
                .max((back.normalization - sol.normalization).norm());
        }
        c.measure(worst, INVOLUTION_TOL);
        Ok(())
    });
    b.run("backlund_residual", sampled.clone(), |c| {
        let (data, _, sols) = solutions.clone()?;
        let mut worst: f64 = 0.0;
        for sol in &sols {
            let swapped = backlund_swap(sol).map_err(err)?;
            worst = worst.max(qq_residual(&swapped, &data).map_err(err)?.max_abs_coeff());
        }
        c.measure(worst, RESIDUAL_TOL);
        Ok(())
    });
    if roots.len() == 1 && k == 1 {
        b.run("single_root_closed_form", sampled.clone(), |c| {
            let (data, twist, sols) = solutions.clone()?;
            let sol = sols.first().ok_or("no solution found")?;
            let (a, h) = (data.lambda_roots()[0], data.hbar());
            let expect = a * (twist.xi_tilde * h - twist.xi) / (twist.xi_tilde - twist.xi);
            let s0 = -sol.q_plus.coeff(0);
            c.value("closed_form", cjson(expect));
            c.value("solved", cjson(s0));
            c.measure(scaled_difference(s0, expect), CLOSED_FORM_TOL);
            Ok(())
        });
    }

    let orbifold_q = params.complex_opt("orbifold_q");
    if !matches!(orbifold_q, Ok(None)) {
        let samples = params.count("samples", DEFAULT_SAMPLES).unwrap_or(DEFAULT_SAMPLES);
        let zs: Vec<Complex64> = (0..samples).map(|_| annulus(rng, 0.5, 1.5)).collect();
        b.run(
            "orbifold_symmetry",
            json!({"inputs": sampled, "orbifold_q": params.raw("orbifold_q"), "samples": samples}),
            |c| {
                let q = orbifold_q?.ok_or("orbifold_q missing")?;
                let (_, _, sols) = solutions.clone()?;
                let roots = match sols.first() {
                    Some(sol) => sol.bethe_roots().map_err(err)?,
                    None => Vec::new(),
                };
                let oq = orbifolded_qplus(&roots, q).map_err(err)?;
                let mut worst: f64 = 0.0;
                for &z in &zs {
                    let scale = oq.eval(z).map_err(err)?.norm().max(1.0);
                    worst = worst.max(oq.symmetry_defect(z).map_err(err)? / scale);
                }
                c.value("roots", cvec_json(&roots));
                c.measure(worst, SYMMETRY_TOL);
                Ok(())
            },
        );
    }
}
