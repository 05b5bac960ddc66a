use integrable_core::spin_chain::*;
use integrable_core::Complex64;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{annulus, err};
use crate::report::Battery;
use crate::scenario::Scenario;

const YBE_TOL: f64 = 1e-12;
const UNITARITY_TOL: f64 = 1e-12;
const COMMUTATOR_TOL: f64 = 1e-10;
const FLATNESS_TOL: f64 = 1e-10;
const DEFAULT_SAMPLES: usize = 20;
/// Draws closer than this to the R-matrix pole `hbar x = 1` are redrawn.
const POLE_MARGIN: f64 = 0.1;
const MAX_REDRAWS: usize = 1000;

fn clear_of_pole(hbar: Complex64, ratios: &[Complex64]) -> bool {
    ratios.iter().all(|x| (hbar * x - 1.0).norm() > POLE_MARGIN)
}

/// Draws `count` points until `accept` holds. Uses the generator even when the
/// scenario itself is invalid, so later draws do not depend on validity.
fn draw(rng: &mut ChaCha8Rng, count: usize, accept: impl Fn(&[Complex64]) -> bool) -> Vec<Complex64> {
    let mut v = Vec::new();
    for _ in 0..MAX_REDRAWS {
        v = (0..count).map(|_| annulus(rng, 0.5, 2.0)).collect();
        if accept(&v) {
            break;
        }
    }
    v
}

pub(super) fn run(s: &Scenario, rng: &mut ChaCha8Rng, b: &mut Battery) {
    let params = s.params();
    let inputs = json!({
        "site_params": params.raw("site_params"),
        "twist": params.raw("twist"),
        "q": params.raw("q"),
        "hbar": params.raw("hbar"),
    });
    let load = || -> Result<SpinChainSpec, String> {
        SpinChainSpec::new(
            params.complex_vec("site_params")?,
            params.complex("twist")?,
            params.complex("q")?,
            params.complex("hbar")?,
        )
        .map_err(err)
    };
    let samples = params.count("samples", DEFAULT_SAMPLES).unwrap_or(DEFAULT_SAMPLES);
    let hbar = params.complex("hbar").unwrap_or(Complex64::new(1.0, 0.0));
    let sites = params.complex_vec("site_params").unwrap_or_default();
    let sampled = json!({"inputs": inputs, "seed": s.seed, "samples": samples});

    let triples: Vec<Vec<Complex64>> = (0..samples)
        .map(|_| draw(rng, 3, |a| clear_of_pole(hbar, &[a[0] / a[1], a[0] / a[2], a[1] / a[2]])))
        .collect();
    let spectral_pairs: Vec<Vec<Complex64>> = (0..samples)
        .map(|_| {
            draw(rng, 2, |u| {
                let ratios: Vec<Complex64> = u.iter().flat_map(|&x| sites.iter().map(move |a| x / a)).collect();
                clear_of_pole(hbar, &ratios)
            })
        })
        .collect();

    b.run("r_at_one_is_permutation", inputs.clone(), |c| {
        let conv = load()?.convention().map_err(err)?;
        c.expect(r_matrix(Complex64::new(1.0, 0.0), &conv).map_err(err)? == permutation());
        Ok(())
    });
    b.run("yang_baxter", sampled.clone(), |c| {
        let conv = load()?.convention().map_err(err)?;
        let mut worst: f64 = 0.0;
        for t in &triples {
            worst = worst.max(yang_baxter_residual(t[0], t[1], t[2], &conv).map_err(err)?);
        }
        c.value("triples", triples.len());
        c.measure(worst, YBE_TOL);
        Ok(())
    });
    b.run("unitarity", sampled.clone(), |c| {
        let conv = load()?.convention().map_err(err)?;
        let mut worst: f64 = 0.0;
        for t in &triples {
            worst = worst.max(unitarity_residual(t[0] / t[1], &conv).map_err(err)?);
        }
        c.measure(worst, UNITARITY_TOL);
        Ok(())
    });
    b.run("transfer_commutativity", sampled.clone(), |c| {
        let spec = load()?;
        let mut worst: f64 = 0.0;
        for u in &spectral_pairs {
            let t1 = transfer_matrix(u[0], &spec).map_err(err)?;
            let t2 = transfer_matrix(u[1], &spec).map_err(err)?;
            worst = worst.max(t1.commutator_norm(&t2));
        }
        c.value("pairs", spectral_pairs.len());
        c.measure(worst, COMMUTATOR_TOL);
        Ok(())
    });
    b.run("magnon_blocks", sampled, |c| {
        let spec = load()?;
        let mut leak: f64 = 0.0;
        if let Some(u) = spectral_pairs.first() {
            leak = leak.max(transfer_matrix(u[0], &spec).map_err(err)?.magnon_leakage());
        }
        for k in 0..spec.len() {
            leak = leak.max(qkz_operator(k, &spec).map_err(err)?.magnon_leakage());
        }
        c.measure(leak, 0.0);
        Ok(())
    });
    b.run("qkz_flatness", inputs, |c| {
        let spec = load()?;
        c.measure(max_qkz_flatness_residual(&spec).map_err(err)?, FLATNESS_TOL);
        Ok(())
    });
}
