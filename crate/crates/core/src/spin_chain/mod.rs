//! XXZ chains of two-dimensional evaluation modules: Yang-Baxter checks,
//! twisted transfer matrices and qKZ operators.
//!
//! Sites are 0-based. Site 0 is the most significant bit of a basis index,
//! so `|s_0 s_1 ... s_{n-1}>` has index `sum s_i 2^{n-1-i}`.

pub mod rmatrix;

use num_complex::Complex64;

use crate::algebra::{linalg::max_norm, negligible, CMatrix};
use crate::error::{Error, Result};

pub use rmatrix::{permutation, r_matrix, unitarity_residual, RMatrixConvention, SpectralRMatrix, R4};

/// Left-multiplies `mat` by `op` acting on sites `(i, j)` of an `nsites`
/// register, the first factor of `op` on site `i`.
pub fn apply_two_site(op: &R4, i: usize, j: usize, nsites: usize, mat: &CMatrix) -> CMatrix {
    debug_assert!(i != j && i < nsites && j < nsites);
    let dim = 1usize << nsites;
    let bi = nsites - 1 - i;
    let bj = nsites - 1 - j;
    let mut out = CMatrix::zeros(dim, mat.ncols());
    for col in 0..dim {
        let si = (col >> bi) & 1;
        let sj = (col >> bj) & 1;
        let rest = col & !(1 << bi) & !(1 << bj);
        let c_idx = 2 * si + sj;
        for oi in 0..2 {
            for oj in 0..2 {
                let v = op[(2 * oi + oj, c_idx)];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = rest | (oi << bi) | (oj << bj);
                for k in 0..mat.ncols() {
                    out[(row, k)] += v * mat[(col, k)];
                }
            }
        }
    }
    out
}

/// Left-multiplies `mat` by `diag(z, 1/z)` on site `k`.
fn apply_twist(z: Complex64, k: usize, nsites: usize, mat: &CMatrix) -> CMatrix {
    let bit = nsites - 1 - k;
    let mut out = mat.clone();
    let zi = Complex64::new(1.0, 0.0) / z;
    for row in 0..(1usize << nsites) {
        let f = if (row >> bit) & 1 == 0 { z } else { zi };
        for c in 0..mat.ncols() {
            out[(row, c)] *= f;
        }
    }
    out
}

/// Max-norm of `R12(a1/a2) R13(a1/a3) R23(a2/a3) - R23(a2/a3) R13(a1/a3) R12(a1/a2)`.
pub fn yang_baxter_residual<R: SpectralRMatrix + ?Sized>(
    a1: Complex64,
    a2: Complex64,
    a3: Complex64,
    r: &R,
) -> Result<f64> {
    for a in [a1, a2, a3] {
        if !a.is_finite() || negligible(a, 1.0) {
            return Err(Error::Domain(format!("evaluation parameter must be nonzero, got {a}")));
        }
    }
    let r12 = r.eval(a1 / a2)?;
    let r13 = r.eval(a1 / a3)?;
    let r23 = r.eval(a2 / a3)?;
    let id = CMatrix::identity(8, 8);
    // Products are built right to left.
    let lhs = apply_two_site(&r12, 0, 1, 3, &apply_two_site(&r13, 0, 2, 3, &apply_two_site(&r23, 1, 2, 3, &id)));
    let rhs = apply_two_site(&r23, 1, 2, 3, &apply_two_site(&r13, 0, 2, 3, &apply_two_site(&r12, 0, 1, 3, &id)));
    Ok(max_norm(&(lhs - rhs)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinChainSpec {
    pub site_params: Vec<Complex64>,
    /// `z` in the twist `diag(z, 1/z)`.
    pub twist: Complex64,
    /// qKZ shift.
    pub q: Complex64,
    pub hbar: Complex64,
}

impl SpinChainSpec {
    pub fn new(site_params: Vec<Complex64>, twist: Complex64, q: Complex64, hbar: Complex64) -> Result<Self> {
        if site_params.is_empty() {
            return Err(Error::Domain("a chain needs at least one site".into()));
        }
        if site_params.len() > 10 {
            return Err(Error::Domain("dense chain operators are limited to 10 sites".into()));
        }
        for (name, v) in [("twist", twist), ("q", q), ("hbar", hbar)] {
            if !v.is_finite() || negligible(v, 1.0) {
                return Err(Error::Domain(format!("{name} must be finite and nonzero, got {v}")));
            }
        }
        for (i, &a) in site_params.iter().enumerate() {
            if !a.is_finite() || negligible(a, 1.0) {
                return Err(Error::Domain(format!("site parameter a_{i} must be nonzero")));
            }
            for (j, &b) in site_params.iter().enumerate().skip(i + 1) {
                if negligible(a - b, a.norm().max(b.norm())) {
                    return Err(Error::Singularity(format!("site parameters a_{i} = a_{j}")));
                }
            }
        }
        Ok(Self {
            site_params,
            twist,
            q,
            hbar,
        })
    }

    pub fn len(&self) -> usize {
        self.site_params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.site_params.is_empty()
    }

    pub fn convention(&self) -> Result<RMatrixConvention> {
        RMatrixConvention::new(self.hbar)
    }

    /// Same chain with `a_k` replaced by `q a_k`.
    pub fn shifted(&self, k: usize) -> Self {
        let mut s = self.clone();
        s.site_params[k] *= self.q;
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    Transfer { u: Complex64 },
    Qkz { site: usize },
}

/// A dense operator on the `2^n`-dimensional physical space.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOperator {
    pub matrix: CMatrix,
    pub kind: OperatorKind,
}

impl ChainOperator {
    /// Largest entry connecting different magnon numbers. Exactly zero for
    /// every operator built here.
    pub fn magnon_leakage(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if (r as u64).count_ones() != (c as u64).count_ones() {
                    worst = worst.max(m[(r, c)].norm());
                }
            }
        }
        worst
    }

    pub fn commutator_norm(&self, other: &ChainOperator) -> f64 {
        max_norm(&(&self.matrix * &other.matrix - &other.matrix * &self.matrix))
    }
}

/// `T(u) = Tr_aux[(Z (x) 1) R_{aux,n}(u/a_n) ... R_{aux,1}(u/a_1)]`.
pub fn transfer_matrix(u: Complex64, spec: &SpinChainSpec) -> Result<ChainOperator> {
    transfer_matrix_with(u, spec, &spec.convention()?)
}

pub fn transfer_matrix_with<R: SpectralRMatrix + ?Sized>(
    u: Complex64,
    spec: &SpinChainSpec,
    r: &R,
) -> Result<ChainOperator> {
    let n = spec.len();
    let nsites = n + 1;
    let mut x = CMatrix::identity(1 << nsites, 1 << nsites);
    for (s, &a) in spec.site_params.iter().enumerate() {
        x = apply_two_site(&r.eval(u / a)?, 0, s + 1, nsites, &x);
    }
    x = apply_twist(spec.twist, 0, nsites, &x);
    let d = 1usize << n;
    let matrix = CMatrix::from_fn(d, d, |i, j| x[(i, j)] + x[(i + d, j + d)]);
    Ok(ChainOperator {
        matrix,
        kind: OperatorKind::Transfer { u },
    })
}

/// qKZ operator for site `k`:
///
/// `H_k = R_{k,k+1}(q a_k/a_{k+1}) ... R_{k,n}(q a_k/a_n) Z_k R_{k,1}(a_k/a_1) ... R_{k,k-1}(a_k/a_{k-1})`.
///
/// Written 1-based above; `k` itself is 0-based. With this ordering the
/// difference connection is flat, see [`qkz_flatness_residual`].
pub fn qkz_operator(k: usize, spec: &SpinChainSpec) -> Result<ChainOperator> {
    qkz_operator_with(k, spec, &spec.convention()?)
}

pub fn qkz_operator_with<R: SpectralRMatrix + ?Sized>(
    k: usize,
    spec: &SpinChainSpec,
    r: &R,
) -> Result<ChainOperator> {
    let n = spec.len();
    if k >= n {
        return Err(Error::Domain(format!("site {k} out of range for {n} sites")));
    }
    let a = &spec.site_params;
    let mut x = CMatrix::identity(1 << n, 1 << n);
    for j in (0..k).rev() {
        x = apply_two_site(&r.eval(a[k] / a[j])?, k, j, n, &x);
    }
    x = apply_twist(spec.twist, k, n, &x);
    for j in (k + 1..n).rev() {
        x = apply_two_site(&r.eval(spec.q * a[k] / a[j])?, k, j, n, &x);
    }
    Ok(ChainOperator {
        matrix: x,
        kind: OperatorKind::Qkz { site: k },
    })
}

/// Max-norm of `H_i(a_j -> q a_j) H_j(a) - H_j(a_i -> q a_i) H_i(a)`.
pub fn qkz_flatness_residual(spec: &SpinChainSpec, i: usize, j: usize) -> Result<f64> {
    qkz_flatness_residual_with(spec, i, j, &spec.convention()?)
}

pub fn qkz_flatness_residual_with<R: SpectralRMatrix + ?Sized>(
    spec: &SpinChainSpec,
    i: usize,
    j: usize,
    r: &R,
) -> Result<f64> {
    if i == j {
        return Err(Error::Domain("flatness compares two distinct sites".into()));
    }
    let lhs = &qkz_operator_with(i, &spec.shifted(j), r)?.matrix * &qkz_operator_with(j, spec, r)?.matrix;
    let rhs = &qkz_operator_with(j, &spec.shifted(i), r)?.matrix * &qkz_operator_with(i, spec, r)?.matrix;
    Ok(max_norm(&(lhs - rhs)))
}

/// Worst flatness residual over all ordered site pairs; zero for one site.
pub fn max_qkz_flatness_residual(spec: &SpinChainSpec) -> Result<f64> {
    let n = spec.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                worst = worst.max(qkz_flatness_residual(spec, i, j)?);
            }
        }
    }
    Ok(worst)
}
