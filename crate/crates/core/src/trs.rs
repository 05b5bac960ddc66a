//! Trigonometric Ruijsenaars-Schneider model.
//!
//! Coordinates `chi`, momenta `p` and the deformation `hbar`. Two Hamiltonian
//! conventions are provided and kept separate:
//!
//! * [`hamiltonians_charpoly`]: characteristic-polynomial coefficients of the
//!   Lax matrix `L[j][i] = prod_{k != i}(chi_j - chi_k hbar) / prod_{k != j}(chi_j - chi_k) * p_j`;
//! * [`hamiltonians_subset`]: `H_k = sum_{|I|=k} prod_{i in I, j notin I} (hbar chi_i - chi_j)/(chi_i - chi_j) prod_{m in I} p_m`.
//!
//! They are related by `hbar -> 1/hbar` and a power of `hbar`; the table is
//! pinned in the integration tests.

use num_complex::Complex64;

use crate::algebra::{
    characteristic_coefficients, elementary_symmetric_all, homotopy_continue, is_small_root_of_unity,
    linalg::{frobenius_norm, singular_values, CMatrix},
    linear_path, negligible, FnFamily, SolverConfig,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrsSystem {
    chi: Vec<Complex64>,
    hbar: Complex64,
    momenta: Vec<Complex64>,
}

impl TrsSystem {
    /// Validates that `chi` is nonzero and pairwise distinct and that no
    /// resonance `chi_i = hbar chi_j` (i != j) occurs.
    pub fn new(chi: Vec<Complex64>, hbar: Complex64, momenta: Vec<Complex64>) -> Result<Self> {
        if chi.len() != momenta.len() {
            return Err(Error::Domain(format!(
                "{} coordinates but {} momenta",
                chi.len(),
                momenta.len()
            )));
        }
        if chi.is_empty() {
            return Err(Error::Domain("the model needs at least one particle".into()));
        }
        check_coordinates(&chi, hbar)?;
        Ok(Self { chi, hbar, momenta })
    }

    pub fn chi(&self) -> &[Complex64] {
        &self.chi
    }

    pub fn hbar(&self) -> Complex64 {
        self.hbar
    }

    pub fn momenta(&self) -> &[Complex64] {
        &self.momenta
    }

    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }
}

fn check_coordinates(chi: &[Complex64], hbar: Complex64) -> Result<()> {
    if !hbar.is_finite() || hbar == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(format!("hbar must be finite and nonzero, got {hbar}")));
    }
    for (i, &x) in chi.iter().enumerate() {
        if !x.is_finite() || negligible(x, 1.0) {
            return Err(Error::Singularity(format!("chi_{i} = {x} must be finite and nonzero")));
        }
    }
    check_distinct(chi)?;
    for (i, &a) in chi.iter().enumerate() {
        for (j, &b) in chi.iter().enumerate() {
            if i != j && negligible(a - b * hbar, a.norm().max((b * hbar).norm())) {
                return Err(Error::Singularity(format!(
                    "resonance chi_{i} = hbar * chi_{j}"
                )));
            }
        }
    }
    Ok(())
}

fn check_distinct(chi: &[Complex64]) -> Result<()> {
    for i in 0..chi.len() {
        for j in i + 1..chi.len() {
            if negligible(chi[i] - chi[j], chi[i].norm().max(chi[j].norm())) {
                return Err(Error::Singularity(format!("coincident coordinates chi_{i} = chi_{j}")));
            }
        }
    }
    Ok(())
}

/// Lax matrix from raw inputs; only checks what the formula divides by.
fn lax_entries(chi: &[Complex64], hbar: Complex64, p: &[Complex64]) -> Result<CMatrix> {
    let n = chi.len();
    check_distinct(chi)?;
    let mut lax = CMatrix::zeros(n, n);
    for j in 0..n {
        let den: Complex64 = (0..n).filter(|&k| k != j).map(|k| chi[j] - chi[k]).product();
        for i in 0..n {
            let num: Complex64 = (0..n).filter(|&k| k != i).map(|k| chi[j] - chi[k] * hbar).product();
            lax[(j, i)] = num / den * p[j];
        }
    }
    Ok(lax)
}

pub fn lax_matrix(sys: &TrsSystem) -> CMatrix {
    // Inputs were validated at construction.
    lax_entries(&sys.chi, sys.hbar, &sys.momenta).expect("validated coordinates")
}

/// `(H_1, ..., H_n)` from `det(u - L) = sum_k (-1)^k H_k u^{n-k}`.
pub fn hamiltonians_charpoly(sys: &TrsSystem) -> Result<Vec<Complex64>> {
    characteristic_coefficients(&lax_matrix(sys))
}

/// `prod_{i in I, j notin I} (hbar chi_i - chi_j) / (chi_i - chi_j)` for the
/// subset encoded by the bitmask.
pub fn subset_coefficient(chi: &[Complex64], hbar: Complex64, subset: u64) -> Complex64 {
    let n = chi.len();
    let mut coef = Complex64::new(1.0, 0.0);
    for i in (0..n).filter(|i| subset >> i & 1 == 1) {
        for j in (0..n).filter(|j| subset >> j & 1 == 0) {
            coef *= (hbar * chi[i] - chi[j]) / (chi[i] - chi[j]);
        }
    }
    coef
}

/// `(H_1, ..., H_n)` by explicit subset enumeration.
pub fn hamiltonians_subset(sys: &TrsSystem) -> Result<Vec<Complex64>> {
    let n = sys.len();
    if n >= 64 {
        return Err(Error::Domain("subset enumeration limited to n < 64".into()));
    }
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    for subset in 1u64..(1u64 << n) {
        let size = subset.count_ones() as usize;
        let mono: Complex64 = (0..n)
            .filter(|m| subset >> m & 1 == 1)
            .map(|m| sys.momenta[m])
            .product();
        h[size - 1] += subset_coefficient(&sys.chi, sys.hbar, subset) * mono;
    }
    Ok(h)
}

/// A point `(M, T, u, v)` with `hbar M T - T M = u v^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CmPoint {
    pub m: CMatrix,
    pub t: CMatrix,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub hbar: Complex64,
}

impl CmPoint {
    /// `hbar M T - T M`.
    pub fn moment(&self) -> CMatrix {
        &self.m * &self.t * self.hbar - &self.t * &self.m
    }

    pub fn outer_uv(&self) -> CMatrix {
        let n = self.u.len();
        CMatrix::from_fn(n, n, |i, j| self.u[i] * self.v[j])
    }

    /// `(||hbar M T - T M - u v^T||_F, ||u v^T||_F)`.
    pub fn rank_one_residual(&self) -> (f64, f64) {
        let uv = self.outer_uv();
        (frobenius_norm(&(self.moment() - &uv)), frobenius_norm(&uv))
    }

    /// Singular values of `hbar M T - T M`, largest first.
    pub fn moment_singular_values(&self) -> Vec<f64> {
        singular_values(&self.moment())
    }
}

/// Builds the Calogero-Moser point in the gauge `M = diag(chi)`, `v = (1, ..., 1)`,
/// with `u` obtained by inverting the momentum formula.
pub fn lax_from_cm_point(sys: &TrsSystem) -> Result<CmPoint> {
    let (chi, hbar, p) = (&sys.chi, sys.hbar, &sys.momenta);
    if let Some(order) = is_small_root_of_unity(hbar) {
        return Err(Error::Singularity(format!(
            "hbar is a root of unity of order {order}"
        )));
    }
    let n = chi.len();
    let u: Vec<Complex64> = (0..n)
        .map(|i| {
            let num: Complex64 = (0..n).map(|k| chi[i] - chi[k] * hbar).product();
            let den: Complex64 = (0..n).filter(|&k| k != i).map(|k| chi[i] - chi[k]).product();
            -p[i] * num / den
        })
        .collect();
    let v = vec![Complex64::new(1.0, 0.0); n];
    let mut t = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let den = hbar * chi[i] - chi[j];
            if negligible(den, (hbar * chi[i]).norm().max(chi[j].norm())) {
                return Err(Error::Singularity(format!("hbar chi_{i} = chi_{j}")));
            }
            t[(i, j)] = u[i] * v[j] / den;
        }
    }
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(chi));
    Ok(CmPoint { m, t, u, v, hbar })
}

/// Target spectrum `xi` for the momentum solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTarget {
    pub xi: Vec<Complex64>,
}

impl SpectrumTarget {
    pub fn new(xi: Vec<Complex64>) -> Result<Self> {
        if xi.iter().any(|z| !z.is_finite()) {
            return Err(Error::Domain("target spectrum must be finite".into()));
        }
        Ok(Self { xi })
    }
}

/// Solves `H_k(chi, p, hbar) = e_k(xi)` for the momenta `p` (charpoly
/// convention), continuing in `hbar` from 1, where `p_i = xi_{perm(i)}`.
///
/// `permutation` selects the matching of momenta to target eigenvalues at
/// `hbar = 1`; the identity matching is used when absent.
pub fn solve_momenta(
    chi: &[Complex64],
    hbar: Complex64,
    target: &SpectrumTarget,
    config: &SolverConfig,
    permutation: Option<&[usize]>,
) -> Result<Vec<Complex64>> {
    let n = chi.len();
    if target.xi.len() != n {
        return Err(Error::Domain(format!(
            "{n} coordinates but {} target eigenvalues",
            target.xi.len()
        )));
    }
    check_coordinates(chi, Complex64::new(1.0, 0.0))?;
    check_coordinates(chi, hbar)?;
    let seed: Vec<Complex64> = match permutation {
        None => target.xi.clone(),
        Some(perm) => {
            let mut sorted = perm.to_vec();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return Err(Error::Domain(format!("{perm:?} is not a permutation of 0..{n}")));
            }
            perm.iter().map(|&k| target.xi[k]).collect()
        }
    };
    let rhs: Vec<Complex64> = elementary_symmetric_all(&target.xi)[1..].to_vec();
    let path = momentum_path(hbar, config.step_count);
    for &h in &path {
        if let Err(Error::Singularity(reason)) = check_coordinates(chi, h) {
            return Err(Error::PathSingularity { parameter: h, reason });
        }
    }
    let family = FnFamily::new(n, |p: &[Complex64], h: Complex64| {
        let lax = lax_entries(chi, h, p)?;
        let ham = characteristic_coefficients(&lax)?;
        Ok(ham.iter().zip(&rhs).map(|(a, b)| a - b).collect())
    });
    homotopy_continue(&family, &seed, &path, config)
}

/// Bulge of the continuation arc, relative to `|hbar - 1|`.
pub const PATH_BULGE: f64 = 0.5;

/// `hbar(t) = 1 + (hbar - 1) (t + i b t (1 - t))`, `t` uniform on `[0, 1]`.
///
/// The arc leaves the straight segment, where resonances `chi_i / chi_j`
/// sit for real data.
pub fn momentum_path(hbar: Complex64, steps: usize) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let bulge = Complex64::new(0.0, PATH_BULGE);
    linear_path(Complex64::new(0.0, 0.0), one, steps)
        .into_iter()
        .map(|t| one + (hbar - one) * (t + bulge * t * (one - t)))
        .collect()
}

/// `(H_r(zeta, p, hbar) - e_r(a))_{r = 1..n}`, Hamiltonians in the charpoly
/// convention.
pub fn qk_ring_residual(
    zeta: &[Complex64],
    a: &[Complex64],
    hbar: Complex64,
    p: &[Complex64],
) -> Result<Vec<Complex64>> {
    if zeta.len() != a.len() || zeta.len() != p.len() {
        return Err(Error::Domain("zeta, a and p must have equal length".into()));
    }
    let sys = TrsSystem::new(zeta.to_vec(), hbar, p.to_vec())?;
    let h = hamiltonians_charpoly(&sys)?;
    let e = elementary_symmetric_all(a);
    Ok(h.iter().zip(&e[1..]).map(|(x, y)| x - y).collect())
}
