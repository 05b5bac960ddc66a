//! Shared algebra: polynomials, symmetric functions, characteristic
//! polynomials, and the Newton/continuation solvers used by every model.

pub mod linalg;
pub mod poly;
pub mod solver;
pub mod symmetric;

pub use linalg::{eigenvalues, multiset_distance, CMatrix};
pub use poly::Polynomial;
pub use solver::{
    dedup_points, homotopy_continue, homotopy_trace, linear_path, newton_solve, FnFamily, FnSystem,
    NonlinearSystem, ParametricSystem, SolverConfig,
};
pub use symmetric::{characteristic_coefficients, elementary_symmetric, elementary_symmetric_all, faddeev_leverrier};

use num_complex::Complex64;

/// `|a - b| <= tol * max(1, |a|, |b|)`: absolute near the unit scale,
/// relative for large values.
pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    scaled_difference(a, b) <= tol
}

/// `|a - b| / max(1, |a|, |b|)`.
pub fn scaled_difference(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

/// True when `|v| <= rtol * scale`, the test used for every "is this
/// denominator zero" decision.
pub(crate) fn negligible(v: Complex64, scale: f64) -> bool {
    v.norm() <= SINGULAR_RTOL * scale.max(f64::MIN_POSITIVE)
}

/// Relative threshold below which a difference is treated as an exact
/// coincidence (poles, resonances, degenerate twists).
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Largest order `m` checked when rejecting `x^m = 1`.
pub const ROOT_OF_UNITY_MAX_ORDER: u32 = 12;

pub(crate) fn is_small_root_of_unity(x: Complex64) -> Option<u32> {
    let mut power = Complex64::new(1.0, 0.0);
    for m in 1..=ROOT_OF_UNITY_MAX_ORDER {
        power *= x;
        if negligible(power - 1.0, 1.0) {
            return Some(m);
        }
    }
    None
}
