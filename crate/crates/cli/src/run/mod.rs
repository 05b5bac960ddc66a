//! Check batteries, one per scenario kind. Every randomized draw comes from
//! a single generator seeded with the scenario seed, consumed in a fixed
//! order, so a scenario and seed determine the report exactly.

mod chain;
mod dwork;
mod elliptic;
mod qq;
mod trs;

use integrable_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{Battery, Report};
use crate::scenario::{Kind, Scenario};

pub fn run_scenario(scenario: &Scenario) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut battery = Battery::default();
    match scenario.kind {
        Kind::Trs => trs::run_trs(scenario, &mut rng, &mut battery),
        Kind::Duality => trs::run_duality(scenario, &mut battery),
        Kind::Spinchain => chain::run(scenario, &mut rng, &mut battery),
        Kind::Qq => qq::run(scenario, &mut rng, &mut battery),
        Kind::Elliptic => elliptic::run_elliptic(scenario, &mut rng, &mut battery),
        Kind::Adhm => elliptic::run_adhm(scenario, &mut battery),
        Kind::Dwork => dwork::run(scenario, &mut battery),
    }
    Report::new(scenario.clone(), scenario.seed, battery.into_records())
}

fn err(e: integrable_core::Error) -> String {
    e.to_string()
}

/// Uniform in the annulus `lo <= |z| <= hi`.
fn annulus(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    let r = rng.random_range(lo..=hi);
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, phi)
}

/// `|a - b| / max(1, |a|, |b|)` over paired entries.
fn max_scaled_difference(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| integrable_core::algebra::scaled_difference(x, y))
        .fold(0.0, f64::max)
}
