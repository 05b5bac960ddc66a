#![allow(dead_code)]

use integrable_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the annulus `lo <= |z| <= hi`.
pub fn annulus(rng: &mut impl Rng, lo: f64, hi: f64) -> Complex64 {
    let r = rng.random_range(lo..=hi);
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, phi)
}

pub fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            gap = gap.min((a - b).norm());
        }
    }
    gap
}

/// `n` points in the annulus with pairwise distance at least `gap`.
pub fn separated(rng: &mut impl Rng, n: usize, lo: f64, hi: f64, gap: f64) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| annulus(rng, lo, hi)).collect();
        if min_gap(&v) >= gap {
            return v;
        }
    }
}

/// Smallest `|chi_i - hbar chi_j|`, `i != j`, scaled by the larger modulus.
pub fn resonance_gap(chi: &[Complex64], hbar: Complex64) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in chi.iter().enumerate() {
        for (j, b) in chi.iter().enumerate() {
            if i != j {
                let hb = hbar * b;
                gap = gap.min((a - hb).norm() / a.norm().max(hb.norm()));
            }
        }
    }
    gap
}

pub fn complex_in(lo: f64, hi: f64) -> impl Strategy<Value = Complex64> {
    (lo..=hi, 0.0..std::f64::consts::TAU).prop_map(|(r, phi)| Complex64::from_polar(r, phi))
}

pub fn complex_vec(n: impl Into<proptest::collection::SizeRange>, lo: f64, hi: f64) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec(complex_in(lo, hi), n)
}
