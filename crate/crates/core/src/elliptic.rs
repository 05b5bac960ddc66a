//! Elliptic RS coefficients from a truncated multiplicative theta function,
//! and the compact ADHM Bethe equations.
//!
//! `theta(x|p) = prod_{m=0..M} (1 - p^m x) prod_{m=1..M} (1 - p^m / x)`.
//! The coefficient of `prod_{i in I} p_i` in `H_r` is
//! `prod_{i in I, j notin I} theta(hbar x_i/x_j) / theta(x_i/x_j)`, which at
//! `p = 0` is the trigonometric `(hbar x_i - x_j)/(x_i - x_j)` product.

use num_complex::Complex64;

use crate::algebra::{
    homotopy_trace, is_small_root_of_unity, linear_path, negligible, FnFamily, SolverConfig,
};
use crate::error::{Error, Result};

/// Target `|p|^(M+1)` for [`ThetaParams::for_accuracy`].
pub const DEFAULT_THETA_ACCURACY: f64 = 1e-16;
/// Minimum root separation along an ADHM path.
pub const COLLISION_THRESHOLD: f64 = 1e-10;

const MAX_TRUNCATION: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    p_ell: Complex64,
    truncation: usize,
}

impl ThetaParams {
    pub fn new(p_ell: Complex64, truncation: usize) -> Result<Self> {
        if p_ell.norm().is_nan() || p_ell.norm() >= 1.0 {
            return Err(Error::Domain(format!("|p| must be < 1, got {p_ell}")));
        }
        if truncation == 0 {
            return Err(Error::Domain("truncation must be positive".into()));
        }
        Ok(Self { p_ell, truncation })
    }

    /// Smallest `M` with `|p|^(M+1) < accuracy`.
    pub fn for_accuracy(p_ell: Complex64, accuracy: f64) -> Result<Self> {
        if !(accuracy > 0.0 && accuracy < 1.0) {
            return Err(Error::Domain(format!("accuracy must lie in (0, 1), got {accuracy}")));
        }
        let r = p_ell.norm();
        if r.is_nan() || r >= 1.0 {
            return Err(Error::Domain(format!("|p| must be < 1, got {p_ell}")));
        }
        let m = if r == 0.0 {
            1
        } else {
            let needed = (accuracy.ln() / r.ln()).ceil() as usize;
            needed.saturating_sub(1).max(1)
        };
        if m > MAX_TRUNCATION {
            return Err(Error::Domain(format!("|p| = {r} needs more than {MAX_TRUNCATION} factors")));
        }
        Self::new(p_ell, m)
    }

    pub fn p_ell(&self) -> Complex64 {
        self.p_ell
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }
}

pub fn theta_trunc(x: Complex64, params: &ThetaParams) -> Result<Complex64> {
    if !x.is_finite() || x == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(format!("theta argument must be finite and nonzero, got {x}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut value = one - x;
    let mut pm = one;
    for _ in 1..=params.truncation {
        pm *= params.p_ell;
        value *= (one - pm * x) * (one - pm / x);
    }
    Ok(value)
}

/// `d/dp log theta(x|p)` of the truncated product.
pub fn theta_log_derivative(x: Complex64, params: &ThetaParams) -> Result<Complex64> {
    if !x.is_finite() || x == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(format!("theta argument must be finite and nonzero, got {x}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let p = params.p_ell;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pm_1 = one;
    for m in 1..=params.truncation {
        let pm = pm_1 * p;
        let dm = pm_1 * m as f64;
        let f1 = one - pm * x;
        let f2 = one - pm / x;
        if negligible(f1, 1.0) || negligible(f2, 1.0) {
            return Err(Error::Singularity(format!("theta factor vanishes at x = {x}")));
        }
        sum -= dm * x / f1 + dm / x / f2;
        pm_1 = pm;
    }
    Ok(sum)
}

/// One coefficient of the elliptic Hamiltonians. `subset` lists 0-based
/// indices into `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErsCoefficientRequest {
    pub subset: Vec<usize>,
    pub x: Vec<Complex64>,
    pub hbar: Complex64,
    pub theta: ThetaParams,
}

impl ErsCoefficientRequest {
    fn validate(&self) -> Result<Vec<bool>> {
        let n = self.x.len();
        let mut member = vec![false; n];
        for &i in &self.subset {
            if i >= n {
                return Err(Error::Domain(format!("subset index {i} out of range for n = {n}")));
            }
            if member[i] {
                return Err(Error::Domain(format!("subset index {i} repeated")));
            }
            member[i] = true;
        }
        for (i, &xi) in self.x.iter().enumerate() {
            if !xi.is_finite() || negligible(xi, 1.0) {
                return Err(Error::Domain(format!("x_{i} must be finite and nonzero")));
            }
            for (j, &xj) in self.x.iter().enumerate().skip(i + 1) {
                if negligible(xi - xj, xi.norm().max(xj.norm())) {
                    return Err(Error::Singularity(format!("x_{i} = x_{j}")));
                }
            }
        }
        Ok(member)
    }

    fn pairs(&self, member: &[bool]) -> Vec<Complex64> {
        let n = self.x.len();
        let mut ratios = Vec::new();
        for i in (0..n).filter(|&i| member[i]) {
            for j in (0..n).filter(|&j| !member[j]) {
                ratios.push(self.x[i] / self.x[j]);
            }
        }
        ratios
    }
}

fn checked_denominator(r: Complex64, theta: &ThetaParams) -> Result<Complex64> {
    let den = theta_trunc(r, theta)?;
    if negligible(den, 1.0) {
        return Err(Error::Singularity(format!("theta(x_i/x_j) vanishes at ratio {r}")));
    }
    Ok(den)
}

pub fn ers_hamiltonian_coefficient(req: &ErsCoefficientRequest) -> Result<Complex64> {
    let member = req.validate()?;
    let mut coef = Complex64::new(1.0, 0.0);
    for r in req.pairs(&member) {
        coef *= theta_trunc(req.hbar * r, &req.theta)? / checked_denominator(r, &req.theta)?;
    }
    Ok(coef)
}

/// `d/dp` of [`ers_hamiltonian_coefficient`].
pub fn ers_coefficient_p_derivative(req: &ErsCoefficientRequest) -> Result<Complex64> {
    let member = req.validate()?;
    let coef = ers_hamiltonian_coefficient(req)?;
    let mut log_deriv = Complex64::new(0.0, 0.0);
    for r in req.pairs(&member) {
        log_deriv += theta_log_derivative(req.hbar * r, &req.theta)? - theta_log_derivative(r, &req.theta)?;
    }
    Ok(coef * log_deriv)
}

/// `(H_1, ..., H_n)` of the elliptic model at momenta `p`.
pub fn ers_hamiltonians(
    x: &[Complex64],
    hbar: Complex64,
    momenta: &[Complex64],
    theta: &ThetaParams,
) -> Result<Vec<Complex64>> {
    let n = x.len();
    if momenta.len() != n {
        return Err(Error::Domain("x and momenta must have equal length".into()));
    }
    if n >= 64 {
        return Err(Error::Domain("subset enumeration limited to n < 64".into()));
    }
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    for mask in 1u64..(1u64 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mono: Complex64 = subset.iter().map(|&i| momenta[i]).product();
        let req = ErsCoefficientRequest {
            subset,
            x: x.to_vec(),
            hbar,
            theta: *theta,
        };
        h[req.subset.len() - 1] += ers_hamiltonian_coefficient(&req)? * mono;
    }
    Ok(h)
}

/// `prod_l (s_a - a_l) prod_{b != a} (s_a - q s_b)/(s_a - s_b/q) = coupling`,
/// `a = 1..k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdhmBetheProblem {
    a_params: Vec<Complex64>,
    k: usize,
    q: Complex64,
    coupling: Complex64,
}

impl AdhmBetheProblem {
    pub fn new(a_params: Vec<Complex64>, k: usize, q: Complex64, coupling: Complex64) -> Result<Self> {
        if a_params.is_empty() || k == 0 {
            return Err(Error::Domain("need N >= 1 parameters and k >= 1 roots".into()));
        }
        if !q.is_finite() || negligible(q, 1.0) {
            return Err(Error::Domain("q must be finite and nonzero".into()));
        }
        if let Some(order) = is_small_root_of_unity(q) {
            return Err(Error::Singularity(format!("q is a root of unity of order {order}")));
        }
        if !coupling.is_finite() {
            return Err(Error::Domain("coupling must be finite".into()));
        }
        for (l, &a) in a_params.iter().enumerate() {
            if !a.is_finite() || negligible(a, 1.0) {
                return Err(Error::Domain(format!("a_{l} must be finite and nonzero")));
            }
            for (m, &b) in a_params.iter().enumerate().skip(l + 1) {
                if negligible(a - b, a.norm().max(b.norm())) {
                    return Err(Error::Singularity(format!("a_{l} = a_{m}")));
                }
            }
        }
        Ok(Self {
            a_params,
            k,
            q,
            coupling,
        })
    }

    pub fn a_params(&self) -> &[Complex64] {
        &self.a_params
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn coupling(&self) -> Complex64 {
        self.coupling
    }

    pub fn with_coupling(&self, coupling: Complex64) -> Self {
        Self {
            coupling,
            ..self.clone()
        }
    }
}

/// Roots `a_l, q a_l, ..., q^(m_l - 1) a_l` for each entry `m_l` of the
/// composition. Every such configuration solves the equations at coupling 0.
pub fn string_seed(prob: &AdhmBetheProblem, composition: &[usize]) -> Result<Vec<Complex64>> {
    if composition.len() != prob.a_params.len() {
        return Err(Error::Domain(format!(
            "composition has {} parts, expected N = {}",
            composition.len(),
            prob.a_params.len()
        )));
    }
    let total: usize = composition.iter().sum();
    if total != prob.k {
        return Err(Error::Domain(format!("composition sums to {total}, expected k = {}", prob.k)));
    }
    let mut roots = Vec::with_capacity(total);
    for (&a, &m) in prob.a_params.iter().zip(composition) {
        let mut s = a;
        for _ in 0..m {
            roots.push(s);
            s *= prob.q;
        }
    }
    Ok(roots)
}

/// All compositions of `k` into `n` nonnegative parts, lexicographic.
pub fn compositions(k: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in compositions(k - first, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn cleared_residual(a: &[Complex64], q: Complex64, coupling: Complex64, s: &[Complex64]) -> Vec<Complex64> {
    let qinv = q.inv();
    (0..s.len())
        .map(|i| {
            let lam: Complex64 = a.iter().map(|al| s[i] - al).product();
            let (mut num, mut den) = (lam, Complex64::new(1.0, 0.0));
            for (_, &sj) in s.iter().enumerate().filter(|&(j, _)| j != i) {
                num *= s[i] - q * sj;
                den *= s[i] - qinv * sj;
            }
            num - coupling * den
        })
        .collect()
}

/// Denominator-cleared equations
/// `prod_l (s_a - a_l) prod_{b != a} (s_a - q s_b) - coupling prod_{b != a} (s_a - s_b/q)`.
/// String seeds make the displayed ratios `0/0`; this form stays regular.
pub fn adhm_residual(prob: &AdhmBetheProblem, roots: &[Complex64]) -> Result<Vec<Complex64>> {
    if roots.len() != prob.k {
        return Err(Error::Domain(format!("expected {} roots, got {}", prob.k, roots.len())));
    }
    Ok(cleared_residual(&prob.a_params, prob.q, prob.coupling, roots))
}

/// The equations as displayed, `LHS - coupling`, with the ratio form.
pub fn adhm_rational_residual(prob: &AdhmBetheProblem, roots: &[Complex64]) -> Result<Vec<Complex64>> {
    if roots.len() != prob.k {
        return Err(Error::Domain(format!("expected {} roots, got {}", prob.k, roots.len())));
    }
    let qinv = prob.q.inv();
    (0..roots.len())
        .map(|i| {
            let mut lhs: Complex64 = prob.a_params.iter().map(|al| roots[i] - al).product();
            for (j, &sj) in roots.iter().enumerate().filter(|&(j, _)| j != i) {
                let den = roots[i] - qinv * sj;
                if negligible(den, roots[i].norm().max((qinv * sj).norm())) {
                    return Err(Error::Pole(format!("s_{i} = s_{j} / q")));
                }
                lhs *= (roots[i] - prob.q * sj) / den;
            }
            Ok(lhs - prob.coupling)
        })
        .collect()
}

fn min_separation(roots: &[Complex64]) -> f64 {
    let mut sep = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            sep = sep.min((a - b).norm());
        }
    }
    sep
}

/// Coupling values and roots along the path `0 -> prob.coupling` with
/// `config.step_count` steps, starting from the string seed.
pub fn adhm_bethe_trace(
    prob: &AdhmBetheProblem,
    composition: &[usize],
    config: &SolverConfig,
) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    config.validate()?;
    let seed = string_seed(prob, composition)?;
    let zero = Complex64::new(0.0, 0.0);
    let path = linear_path(zero, prob.coupling, config.step_count);
    let (a, q) = (prob.a_params.clone(), prob.q);
    let family = FnFamily::new(prob.k, move |s: &[Complex64], t: Complex64| Ok(cleared_residual(&a, q, t, s)));
    let trace = homotopy_trace(&family, &seed, &path, config)?;
    for (t, roots) in &trace {
        let separation = min_separation(roots);
        if separation < COLLISION_THRESHOLD {
            return Err(Error::CollidingRoots {
                parameter: *t,
                separation,
            });
        }
    }
    Ok(trace)
}

pub fn adhm_bethe_solve(
    prob: &AdhmBetheProblem,
    composition: &[usize],
    config: &SolverConfig,
) -> Result<Vec<Complex64>> {
    let mut trace = adhm_bethe_trace(prob, composition, config)?;
    Ok(trace.pop().map(|(_, roots)| roots).unwrap_or_default())
}

/// `1 - (1 - 1/hbar)(1 - q) sum s_a`; without `hbar`, the compact limit
/// `1 - (1 - q) sum s_a`.
pub fn universal_bundle_eigenvalue(roots: &[Complex64], q: Complex64, hbar: Option<Complex64>) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let sum: Complex64 = roots.iter().sum();
    let factor = match hbar {
        Some(h) if h == Complex64::new(0.0, 0.0) => {
            return Err(Error::Domain("hbar must be nonzero".into()));
        }
        Some(h) => one - h.inv(),
        None => one,
    };
    Ok(one - factor * (one - q) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::linalg::vec_max_norm;
    use crate::trs::subset_coefficient;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn theta_trivial_values() {
        let zero = ThetaParams::new(c(0.0, 0.0), 8).unwrap();
        let x = c(0.3, -1.2);
        assert!((theta_trunc(x, &zero).unwrap() - (c(1.0, 0.0) - x)).norm() < 1e-15);
        let p = ThetaParams::new(c(0.05, 0.08), 16).unwrap();
        assert_eq!(theta_trunc(c(1.0, 0.0), &p).unwrap(), c(0.0, 0.0));
        assert!(theta_trunc(c(0.0, 0.0), &p).is_err());
    }

    #[test]
    fn theta_quasi_periodic() {
        let p = ThetaParams::new(c(0.06, 0.08), 16).unwrap();
        let x = c(0.7, 0.4);
        let lhs = theta_trunc(p.p_ell() * x, &p).unwrap();
        let rhs = -theta_trunc(x, &p).unwrap() / x;
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn accuracy_truncation() {
        let p = ThetaParams::for_accuracy(c(0.1, 0.0), 1e-16).unwrap();
        assert_eq!(p.truncation(), 16);
        assert_eq!(ThetaParams::for_accuracy(c(0.0, 0.0), 1e-16).unwrap().truncation(), 1);
        assert!(ThetaParams::for_accuracy(c(1.0, 0.0), 1e-16).is_err());
    }

    #[test]
    fn trig_limit_and_hbar_one() {
        let x = vec![c(1.0, 0.2), c(-0.4, 0.9), c(2.0, -0.3)];
        let hbar = c(0.7, 0.5);
        let theta = ThetaParams::new(c(0.0, 0.0), 4).unwrap();
        let req = ErsCoefficientRequest {
            subset: vec![0, 2],
            x: x.clone(),
            hbar,
            theta,
        };
        let expect = subset_coefficient(&x, hbar, 0b101);
        assert!((ers_hamiltonian_coefficient(&req).unwrap() - expect).norm() < 1e-13);

        let req = ErsCoefficientRequest {
            hbar: c(1.0, 0.0),
            theta: ThetaParams::new(c(0.2, 0.1), 16).unwrap(),
            ..req
        };
        assert!((ers_hamiltonian_coefficient(&req).unwrap() - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn p_derivative_matches_finite_difference() {
        let x = vec![c(1.0, 0.2), c(-0.4, 0.9), c(2.0, -0.3)];
        let p0 = c(0.1, 0.05);
        let req_at = |p| ErsCoefficientRequest {
            subset: vec![1],
            x: x.clone(),
            hbar: c(0.7, 0.5),
            theta: ThetaParams::new(p, 24).unwrap(),
        };
        let h = 1e-5;
        let fd = (ers_hamiltonian_coefficient(&req_at(p0 + h)).unwrap()
            - ers_hamiltonian_coefficient(&req_at(p0 - h)).unwrap())
            / (2.0 * h);
        let analytic = ers_coefficient_p_derivative(&req_at(p0)).unwrap();
        assert!((fd - analytic).norm() < 1e-6, "{fd} vs {analytic}");
    }

    #[test]
    fn bad_requests() {
        let theta = ThetaParams::new(c(0.0, 0.0), 4).unwrap();
        let base = ErsCoefficientRequest {
            subset: vec![3],
            x: vec![c(1.0, 0.0), c(2.0, 0.0)],
            hbar: c(0.5, 0.0),
            theta,
        };
        assert!(ers_hamiltonian_coefficient(&base).is_err());
        let dup = ErsCoefficientRequest {
            subset: vec![0],
            x: vec![c(1.0, 0.0), c(1.0, 0.0)],
            ..base
        };
        assert!(ers_hamiltonian_coefficient(&dup).is_err());
    }

    #[test]
    fn single_root_closed_form() {
        let a = c(0.8, -0.3);
        let coupling = c(0.25, 0.1);
        let prob = AdhmBetheProblem::new(vec![a], 1, c(0.6, 0.7), coupling).unwrap();
        let s = adhm_bethe_solve(&prob, &[1], &SolverConfig::default()).unwrap();
        assert!((s[0] - (a + coupling)).norm() < 1e-12);
        let ev = universal_bundle_eigenvalue(&s, prob.q(), None).unwrap();
        let expect = c(1.0, 0.0) - (c(1.0, 0.0) - prob.q()) * (a + coupling);
        assert!((ev - expect).norm() < 1e-12);
    }

    #[test]
    fn string_is_exact_at_zero_coupling() {
        let a = c(1.1, 0.4);
        let q = c(0.5, 0.9);
        let prob = AdhmBetheProblem::new(vec![a], 2, q, c(0.0, 0.0)).unwrap();
        let seed = string_seed(&prob, &[2]).unwrap();
        assert_eq!(seed, vec![a, q * a]);
        assert_eq!(vec_max_norm(&adhm_residual(&prob, &seed).unwrap()), 0.0);
        assert!(adhm_rational_residual(&prob, &seed).is_err());
    }

    #[test]
    fn two_parameter_branch() {
        let (a1, a2) = (c(1.0, 0.3), c(-0.7, 0.5));
        let coupling = c(0.05, -0.02);
        let prob = AdhmBetheProblem::new(vec![a1, a2], 1, c(0.3, 1.1), coupling).unwrap();
        let s = adhm_bethe_solve(&prob, &[1, 0], &SolverConfig::default()).unwrap()[0];
        let b = -(a1 + a2);
        let cc = a1 * a2 - coupling;
        let disc = (b * b - 4.0 * cc).sqrt();
        let roots = [(-b + disc) / 2.0, (-b - disc) / 2.0];
        let nearest = roots.iter().map(|r| (r - s).norm()).fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-12);
        assert!((s - a1).norm() < (s - a2).norm());
    }

    #[test]
    fn compositions_enumerated() {
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(compositions(3, 3).len(), 10);
    }

    #[test]
    fn problem_validation() {
        assert!(AdhmBetheProblem::new(vec![c(1.0, 0.0)], 1, c(-1.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(AdhmBetheProblem::new(vec![c(1.0, 0.0), c(1.0, 0.0)], 1, c(2.0, 0.0), c(0.0, 0.0)).is_err());
        let prob = AdhmBetheProblem::new(vec![c(1.0, 0.0)], 2, c(2.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(string_seed(&prob, &[1]).is_err());
    }

    #[test]
    fn universal_bundle_limits() {
        let roots = [c(0.3, 0.1), c(-1.0, 2.0)];
        assert_eq!(universal_bundle_eigenvalue(&roots, c(1.0, 0.0), Some(c(3.0, 0.0))).unwrap(), c(1.0, 0.0));
        let full = universal_bundle_eigenvalue(&roots, c(0.4, 0.2), Some(c(1e6, 0.0))).unwrap();
        let compact = universal_bundle_eigenvalue(&roots, c(0.4, 0.2), None).unwrap();
        assert!((full - compact).norm() <= 1e-5 * compact.norm());
    }
}
