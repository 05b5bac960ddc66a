use integrable_core::algebra::linalg::{multiset_distance, vec_max_norm};
use integrable_core::algebra::scaled_difference;
use integrable_core::elliptic::*;
use integrable_core::trs::subset_coefficient;
use integrable_core::Complex64;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{annulus, err};
use crate::report::{cjson, cvec_json, Battery};
use crate::scenario::Scenario;

const TRIG_LIMIT_TOL: f64 = 1e-12;
const HBAR_ONE_TOL: f64 = 1e-12;
const QUASI_PERIOD_TOL: f64 = 1e-12;
const DERIVATIVE_TOL: f64 = 1e-6;
const DERIVATIVE_STEP: f64 = 1e-5;
const ADHM_RESIDUAL_TOL: f64 = 1e-10;
const CONTINUITY_RATIO: f64 = 10.0;
const CLOSED_FORM_TOL: f64 = 1e-12;
const BRANCH_SEPARATION: f64 = 1e-6;
const DEFAULT_SAMPLES: usize = 20;
/// Largest subset enumeration reported in full.
const MAX_REPORTED_N: usize = 8;

fn subsets(n: usize) -> impl Iterator<Item = (u64, Vec<usize>)> {
    (0u64..1 << n).map(move |m| (m, (0..n).filter(|i| m >> i & 1 == 1).collect()))
}

pub(super) fn run_elliptic(s: &Scenario, rng: &mut ChaCha8Rng, b: &mut Battery) {
    let params = s.params();
    let inputs = json!({
        "x": params.raw("x"),
        "hbar": params.raw("hbar"),
        "p_ell": params.raw("p_ell"),
        "truncation": params.raw("truncation"),
    });
    let theta = || -> Result<ThetaParams, String> {
        let p = params.complex("p_ell")?;
        match params.raw("truncation") {
            Some(_) => ThetaParams::new(p, params.count("truncation", 0)?).map_err(err),
            None => ThetaParams::for_accuracy(p, DEFAULT_THETA_ACCURACY).map_err(err),
        }
    };
    let base = || -> Result<(Vec<Complex64>, Complex64, ThetaParams), String> {
        let x = params.complex_vec("x")?;
        if x.len() > MAX_REPORTED_N {
            return Err(format!("at most {MAX_REPORTED_N} coordinates are supported"));
        }
        Ok((x, params.complex("hbar")?, theta()?))
    };
    let samples = params.count("samples", DEFAULT_SAMPLES).unwrap_or(DEFAULT_SAMPLES);
    let xs: Vec<Complex64> = (0..samples).map(|_| annulus(rng, 0.5, 2.0)).collect();

    b.run("ers_coefficients", inputs.clone(), |c| {
        let (x, hbar, theta) = base()?;
        let mut listing = Vec::new();
        for (_, subset) in subsets(x.len()) {
            let req = ErsCoefficientRequest { subset: subset.clone(), x: x.clone(), hbar, theta };
            listing.push(json!({"subset": subset, "value": cjson(ers_hamiltonian_coefficient(&req).map_err(err)?)}));
        }
        c.value("truncation", theta.truncation());
        c.value("coefficients", Value::Array(listing));
        Ok(())
    });
    b.run("trigonometric_limit", inputs.clone(), |c| {
        let (x, hbar, theta) = base()?;
        let trig = ThetaParams::new(Complex64::new(0.0, 0.0), theta.truncation()).map_err(err)?;
        let mut worst: f64 = 0.0;
        for (mask, subset) in subsets(x.len()) {
            let req = ErsCoefficientRequest { subset, x: x.clone(), hbar, theta: trig };
            let ell = ers_hamiltonian_coefficient(&req).map_err(err)?;
            worst = worst.max(scaled_difference(ell, subset_coefficient(&x, hbar, mask)));
        }
        c.measure(worst, TRIG_LIMIT_TOL);
        Ok(())
    });
    b.run("hbar_one", inputs.clone(), |c| {
        let (x, _, theta) = base()?;
        let mut worst: f64 = 0.0;
        for (_, subset) in subsets(x.len()) {
            let req = ErsCoefficientRequest { subset, x: x.clone(), hbar: Complex64::new(1.0, 0.0), theta };
            worst = worst.max((ers_hamiltonian_coefficient(&req).map_err(err)? - 1.0).norm());
        }
        c.measure(worst, HBAR_ONE_TOL);
        Ok(())
    });
    b.run(
        "quasi_periodicity",
        json!({"inputs": inputs, "seed": s.seed, "samples": samples}),
        |c| {
            let theta = theta()?;
            let mut worst: f64 = 0.0;
            for &x in &xs {
                let lhs = theta_trunc(theta.p_ell() * x, &theta).map_err(err)?;
                let rhs = -theta_trunc(x, &theta).map_err(err)? / x;
                worst = worst.max(scaled_difference(lhs, rhs));
            }
            c.measure(worst, QUASI_PERIOD_TOL);
            Ok(())
        },
    );
    b.run("p_derivative", inputs.clone(), |c| {
        let (x, hbar, theta) = base()?;
        if x.len() < 2 {
            return Err("the derivative check needs at least two coordinates".into());
        }
        let at = |p: Complex64| -> Result<Complex64, String> {
            let t = ThetaParams::new(p, theta.truncation()).map_err(err)?;
            let req = ErsCoefficientRequest { subset: vec![0], x: x.clone(), hbar, theta: t };
            ers_hamiltonian_coefficient(&req).map_err(err)
        };
        let p0 = theta.p_ell();
        let fd = (at(p0 + DERIVATIVE_STEP)? - at(p0 - DERIVATIVE_STEP)?) / (2.0 * DERIVATIVE_STEP);
        let req = ErsCoefficientRequest { subset: vec![0], x: x.clone(), hbar, theta };
        let exact = ers_coefficient_p_derivative(&req).map_err(err)?;
        c.value("analytic", cjson(exact));
        c.value("finite_difference", cjson(fd));
        c.measure(scaled_difference(fd, exact), DERIVATIVE_TOL);
        Ok(())
    });
    if params.raw("momenta").is_some() {
        b.run("ers_hamiltonians", json!({"inputs": inputs, "momenta": params.raw("momenta")}), |c| {
            let (x, hbar, theta) = base()?;
            let p = params.complex_vec("momenta")?;
            c.value("h", cvec_json(&ers_hamiltonians(&x, hbar, &p, &theta).map_err(err)?));
            Ok(())
        });
    }
}

fn composition_label(comp: &[usize]) -> String {
    let parts: Vec<String> = comp.iter().map(|m| m.to_string()).collect();
    format!("[{}]", parts.join(","))
}

pub(super) fn run_adhm(s: &Scenario, b: &mut Battery) {
    let params = s.params();
    let config = s.tolerances.solver_config();
    let inputs = json!({
        "a_params": params.raw("a_params"),
        "k": params.raw("k"),
        "q": params.raw("q"),
        "coupling": params.raw("coupling"),
        "hbar": params.raw("hbar"),
        "tolerances": s.tolerances,
    });
    let problem = (|| -> Result<AdhmBetheProblem, String> {
        AdhmBetheProblem::new(
            params.complex_vec("a_params")?,
            params.count("k", 0)?,
            params.complex("q")?,
            params.complex("coupling")?,
        )
        .map_err(err)
    })();
    let hbar = params.complex_opt("hbar");

    b.run("string_seeds_exact", inputs.clone(), |c| {
        let prob = problem.clone()?;
        let at_zero = prob.with_coupling(Complex64::new(0.0, 0.0));
        let mut worst: f64 = 0.0;
        for comp in compositions(prob.k(), prob.a_params().len()) {
            let seed = string_seed(&at_zero, &comp).map_err(err)?;
            worst = worst.max(vec_max_norm(&adhm_residual(&at_zero, &seed).map_err(err)?));
        }
        c.measure(worst, 0.0);
        Ok(())
    });

    let comps = problem
        .as_ref()
        .map(|p| compositions(p.k(), p.a_params().len()))
        .unwrap_or_default();
    let mut endpoints: Vec<Result<Vec<Complex64>, String>> = Vec::new();
    for comp in &comps {
        let label = composition_label(comp);
        let trace = problem
            .clone()
            .and_then(|prob| adhm_bethe_trace(&prob, comp, &config).map_err(err));
        endpoints.push(trace.clone().map(|t| t.last().map(|(_, r)| r.clone()).unwrap_or_default()));
        let comp_inputs = json!({"inputs": inputs, "composition": comp});
        b.run(format!("bethe_solve{label}"), comp_inputs.clone(), |c| {
            let prob = problem.clone()?;
            let trace = trace.clone()?;
            let roots = &trace.last().ok_or("empty path")?.1;
            c.value("roots", cvec_json(roots));
            let q = prob.q();
            c.value("eigenvalue_compact", cjson(universal_bundle_eigenvalue(roots, q, None).map_err(err)?));
            if let Some(h) = hbar.clone()? {
                c.value("eigenvalue", cjson(universal_bundle_eigenvalue(roots, q, Some(h)).map_err(err)?));
            }
            let tol = ADHM_RESIDUAL_TOL.max(config.tolerance);
            c.measure(vec_max_norm(&adhm_residual(&prob, roots).map_err(err)?), tol);
            Ok(())
        });
        b.run(format!("continuity{label}"), comp_inputs, |c| {
            let trace = trace?;
            let mut worst: f64 = 0.0;
            for w in trace.windows(2) {
                let dt = (w[1].0 - w[0].0).norm();
                let ds = w[1].1.iter().zip(&w[0].1).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                if dt > 0.0 {
                    worst = worst.max(ds / dt);
                }
            }
            c.measure(worst, CONTINUITY_RATIO);
            Ok(())
        });
    }

    if comps.len() > 1 {
        b.run("distinct_branches", inputs.clone(), |c| {
            let sols = endpoints.iter().cloned().collect::<Result<Vec<_>, String>>()?;
            let mut closest = f64::INFINITY;
            for (i, a) in sols.iter().enumerate() {
                for b in &sols[i + 1..] {
                    closest = closest.min(multiset_distance(a, b));
                }
            }
            c.value("min_separation", closest);
            c.expect(closest > BRANCH_SEPARATION);
            Ok(())
        });
    }
    let single = problem.as_ref().map(|p| p.k() == 1 && p.a_params().len() == 1).unwrap_or(false);
    if single {
        b.run("single_root_closed_form", inputs, |c| {
            let prob = problem.clone()?;
            let roots = endpoints.first().cloned().ok_or("no branch")??;
            let expect = prob.a_params()[0] + prob.coupling();
            c.value("closed_form", cjson(expect));
            c.measure(scaled_difference(roots[0], expect), CLOSED_FORM_TOL);
            Ok(())
        });
    }
}
