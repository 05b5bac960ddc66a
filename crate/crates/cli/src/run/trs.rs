use integrable_core::algebra::elementary_symmetric_all;
use integrable_core::algebra::linalg::{eigenvalues, multiset_distance, vec_max_norm};
use integrable_core::algebra::scaled_difference;
use integrable_core::trs::*;
use integrable_core::Complex64;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{annulus, err, max_scaled_difference};
use crate::report::{cjson, cvec_json, Battery};
use crate::scenario::Scenario;

const TRACE_TOL: f64 = 1e-12;
const COLLAPSE_TOL: f64 = 1e-12;
const RANK_ONE_TOL: f64 = 1e-12;
const GAUGE_SPECTRUM_TOL: f64 = 1e-10;
const RING_TOL: f64 = 1e-10;
const SPECTRUM_TOL: f64 = 1e-8;
const PERTURBATION: f64 = 0.1;
const PERTURBATION_FLOOR: f64 = 1e-3;
const DEFAULT_SAMPLES: usize = 8;

fn trace_formula(chi: &[Complex64], hbar: Complex64, p: &[Complex64]) -> Complex64 {
    let n = chi.len();
    (0..n)
        .map(|i| {
            let num: Complex64 = (0..n).filter(|&k| k != i).map(|k| chi[i] - chi[k] * hbar).product();
            let den: Complex64 = (0..n).filter(|&k| k != i).map(|k| chi[i] - chi[k]).product();
            num / den * p[i]
        })
        .sum()
}

fn matrix_json(m: &integrable_core::algebra::CMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| cvec_json(&m.row(i).iter().copied().collect::<Vec<_>>())).collect())
}

pub(super) fn run_trs(s: &Scenario, rng: &mut ChaCha8Rng, b: &mut Battery) {
    let params = s.params();
    let inputs = json!({
        "chi": params.raw("chi"),
        "hbar": params.raw("hbar"),
        "p": params.raw("p"),
    });
    let load = || -> Result<TrsSystem, String> {
        TrsSystem::new(params.complex_vec("chi")?, params.complex("hbar")?, params.complex_vec("p")?).map_err(err)
    };

    b.run("lax_matrix", inputs.clone(), |c| {
        c.value("matrix", matrix_json(&lax_matrix(&load()?)));
        Ok(())
    });
    b.run("hamiltonians_charpoly", inputs.clone(), |c| {
        c.value("h", cvec_json(&hamiltonians_charpoly(&load()?).map_err(err)?));
        Ok(())
    });
    b.run("hamiltonians_subset", inputs.clone(), |c| {
        c.value("h", cvec_json(&hamiltonians_subset(&load()?).map_err(err)?));
        Ok(())
    });
    b.run("trace_identity", inputs.clone(), |c| {
        let sys = load()?;
        let h1 = hamiltonians_charpoly(&sys).map_err(err)?[0];
        let expect = trace_formula(sys.chi(), sys.hbar(), sys.momenta());
        c.value("h1", cjson(h1));
        c.value("trace_formula", cjson(expect));
        c.measure(scaled_difference(h1, expect), TRACE_TOL);
        Ok(())
    });

    let samples = params.count("samples", DEFAULT_SAMPLES);
    let n = params.complex_vec("chi").map(|v| v.len()).unwrap_or(0);
    let draws: Vec<Vec<Complex64>> = (0..samples.clone().unwrap_or(0))
        .map(|_| (0..n).map(|_| annulus(rng, 0.5, 1.5)).collect())
        .collect();
    b.run(
        "trace_identity_random_momenta",
        json!({"inputs": inputs, "seed": s.seed, "samples": samples.clone().unwrap_or(0)}),
        |c| {
            samples?;
            let base = load()?;
            let mut worst: f64 = 0.0;
            for p in &draws {
                let sys = TrsSystem::new(base.chi().to_vec(), base.hbar(), p.clone()).map_err(err)?;
                let h1 = hamiltonians_charpoly(&sys).map_err(err)?[0];
                worst = worst.max(scaled_difference(h1, trace_formula(sys.chi(), sys.hbar(), p)));
            }
            c.value("draws", draws.len());
            c.measure(worst, TRACE_TOL);
            Ok(())
        },
    );
    b.run("unit_hbar_collapse", inputs.clone(), |c| {
        let base = load()?;
        let sys = TrsSystem::new(base.chi().to_vec(), Complex64::new(1.0, 0.0), base.momenta().to_vec()).map_err(err)?;
        let e = elementary_symmetric_all(base.momenta());
        let charpoly = hamiltonians_charpoly(&sys).map_err(err)?;
        let subset = hamiltonians_subset(&sys).map_err(err)?;
        let worst = max_scaled_difference(&charpoly, &e[1..]).max(max_scaled_difference(&subset, &e[1..]));
        c.measure(worst, COLLAPSE_TOL);
        Ok(())
    });
    b.run("cm_rank_one", inputs.clone(), |c| {
        let cm = lax_from_cm_point(&load()?).map_err(err)?;
        let (res, norm) = cm.rank_one_residual();
        let sv = cm.moment_singular_values();
        if sv.len() > 1 && sv[0] > 0.0 {
            c.value("singular_value_ratio", sv[1] / sv[0]);
        }
        c.value("uv_norm", norm);
        c.measure(if norm > 0.0 { res / norm } else { res }, RANK_ONE_TOL);
        Ok(())
    });
    b.run("cm_gauge_spectrum", inputs, |c| {
        let sys = load()?;
        let cm = lax_from_cm_point(&sys).map_err(err)?;
        let lax_spec = eigenvalues(&lax_matrix(&sys)).map_err(err)?;
        let t_spec = eigenvalues(&cm.t).map_err(err)?;
        let scale = lax_spec.iter().map(|z| z.norm()).fold(1.0, f64::max);
        c.value("spectrum", cvec_json(&lax_spec));
        c.measure(multiset_distance(&lax_spec, &t_spec) / scale, GAUGE_SPECTRUM_TOL);
        Ok(())
    });
}

type Solved = (Vec<Complex64>, Vec<Complex64>, Complex64, Vec<Complex64>);

pub(super) fn run_duality(s: &Scenario, b: &mut Battery) {
    let params = s.params();
    let config = s.tolerances.solver_config();
    let inputs = json!({
        "zeta": params.raw("zeta"),
        "a": params.raw("a"),
        "hbar": params.raw("hbar"),
        "permutation": params.raw("permutation"),
        "tolerances": s.tolerances,
    });
    let solved = (|| -> Result<Solved, String> {
        let zeta = params.complex_vec("zeta")?;
        let a = params.complex_vec("a")?;
        let hbar = params.complex("hbar")?;
        let perm = params.usize_vec_opt("permutation")?;
        let target = SpectrumTarget::new(a.clone()).map_err(err)?;
        let p = solve_momenta(&zeta, hbar, &target, &config, perm.as_deref()).map_err(err)?;
        Ok((zeta, a, hbar, p))
    })();

    b.run("solve_momenta", inputs.clone(), |c| {
        let (_, _, _, p) = solved.clone()?;
        c.value("p", cvec_json(&p));
        Ok(())
    });
    b.run("ring_residual", inputs.clone(), |c| {
        let (zeta, a, hbar, p) = solved.clone()?;
        let r = qk_ring_residual(&zeta, &a, hbar, &p).map_err(err)?;
        c.measure(vec_max_norm(&r), RING_TOL.max(config.tolerance));
        Ok(())
    });
    b.run("spectrum_match", inputs.clone(), |c| {
        let (zeta, a, hbar, p) = solved.clone()?;
        let spec = eigenvalues(&lax_matrix(&TrsSystem::new(zeta, hbar, p).map_err(err)?)).map_err(err)?;
        c.value("spectrum", cvec_json(&spec));
        c.measure(multiset_distance(&spec, &a), SPECTRUM_TOL);
        Ok(())
    });
    b.run("relations_detect_perturbation", inputs, |c| {
        let (zeta, a, hbar, p) = solved.clone()?;
        let bumped: Vec<Complex64> = p.iter().map(|x| x + PERTURBATION).collect();
        let r = vec_max_norm(&qk_ring_residual(&zeta, &a, hbar, &bumped).map_err(err)?);
        c.value("perturbed_residual", r);
        c.expect(r > PERTURBATION_FLOOR);
        Ok(())
    });
}
