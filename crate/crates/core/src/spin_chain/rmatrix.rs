//! Trigonometric six-vertex R-matrix on `C^2 (x) C^2`.
//!
//! Basis order `|00>, |01>, |10>, |11>` with the first tensor factor as the
//! high bit. With `a = hbar x - 1`:
//!
//! ```text
//!          | a  0  0  0 |
//! R(x) =   | 0  b  c  0 |  / a,    b = sqrt(hbar) (x - 1),
//!          | 0  c' b  0 |          c = hbar - 1,  c' = x (hbar - 1).
//!          | 0  0  0  a |
//! ```
//!
//! `R(1)` is the permutation, `R12(x) R21(1/x) = 1`, and the Yang-Baxter
//! equation `R12(x/y) R13(x/z) R23(y/z) = R23(y/z) R13(x/z) R12(x/y)` holds.
//! The only pole is `x = 1/hbar`. At `hbar = 1` the rule collapses to the
//! identity for `x != 1`.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::algebra::negligible;
use crate::error::{Error, Result};

pub type R4 = Matrix4<Complex64>;

/// Anything that produces a 4x4 R-matrix from a multiplicative spectral
/// parameter. The chain constructions are generic over it so that alternative
/// or deliberately broken entry rules can be checked against the invariants.
pub trait SpectralRMatrix {
    fn eval(&self, x: Complex64) -> Result<R4>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMatrixConvention {
    hbar: Complex64,
    sqrt_hbar: Complex64,
}

impl RMatrixConvention {
    pub fn new(hbar: Complex64) -> Result<Self> {
        if !hbar.is_finite() || negligible(hbar, 1.0) {
            return Err(Error::Domain(format!("hbar must be finite and nonzero, got {hbar}")));
        }
        Ok(Self {
            hbar,
            sqrt_hbar: hbar.sqrt(),
        })
    }

    pub fn hbar(&self) -> Complex64 {
        self.hbar
    }
}

impl SpectralRMatrix for RMatrixConvention {
    fn eval(&self, x: Complex64) -> Result<R4> {
        r_matrix(x, self)
    }
}

pub fn r_matrix(x: Complex64, conv: &RMatrixConvention) -> Result<R4> {
    if !x.is_finite() || negligible(x, 1.0) {
        return Err(Error::Domain(format!("spectral parameter must be finite and nonzero, got {x}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let h = conv.hbar;
    let a = h * x - one;
    if negligible(a, (h * x).norm()) {
        return Err(Error::Singularity(format!("R-matrix pole at x = {x} (x hbar = 1)")));
    }
    let b = conv.sqrt_hbar * (x - one) / a;
    let c = (h - one) / a;
    let c_prime = x * (h - one) / a;
    let z = Complex64::new(0.0, 0.0);
    Ok(R4::new(
        one, z, z, z, //
        z, b, c, z, //
        z, c_prime, b, z, //
        z, z, z, one,
    ))
}

/// The swap operator on `C^2 (x) C^2`.
pub fn permutation() -> R4 {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    R4::new(
        o, z, z, z, //
        z, z, o, z, //
        z, o, z, z, //
        z, z, z, o,
    )
}

/// Max-norm of `R(x) P R(1/x) P - 1`.
pub fn unitarity_residual<R: SpectralRMatrix + ?Sized>(x: Complex64, r: &R) -> Result<f64> {
    let p = permutation();
    let prod = r.eval(x)? * p * r.eval(Complex64::new(1.0, 0.0) / x)? * p - R4::identity();
    Ok(prod.iter().map(|z| z.norm()).fold(0.0, f64::max))
}
