//! SL(2) QQ-systems
//!
//! `xi_tilde Q-(u) Q+(hbar u) - xi Q-(hbar u) Q+(u) = c Lambda(u)`, with monic
//! `Q+` of degree k, monic `Q-` of degree N - k, and the scalar `c` absorbing
//! the normalization. Bethe equations are read off this relation by
//! elimination, and the orbifolded Q-functions `prod (z - s)(q/z - s)` are
//! provided with their `z -> q/z` symmetry.

use num_complex::Complex64;
use num_traits::Num;

use crate::algebra::{
    linalg::{least_squares, CMatrix},
    negligible, newton_solve, FnSystem, Polynomial, SolverConfig,
};
use crate::error::{Error, Result};

/// Largest `|m|` checked for the resonances `a_l / a_m = hbar^m` and
/// `xi = xi_tilde hbar^m`.
pub const RESONANCE_ORDER: i32 = 4;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrinfeldData {
    lambda_roots: Vec<Complex64>,
    hbar: Complex64,
    magnon_count: usize,
}

impl DrinfeldData {
    pub fn new(lambda_roots: Vec<Complex64>, hbar: Complex64, magnon_count: usize) -> Result<Self> {
        if magnon_count > lambda_roots.len() {
            return Err(Error::Domain(format!(
                "magnon count {magnon_count} exceeds N = {}",
                lambda_roots.len()
            )));
        }
        if !hbar.is_finite() || negligible(hbar, 1.0) {
            return Err(Error::Domain("hbar must be finite and nonzero".into()));
        }
        for (l, &a) in lambda_roots.iter().enumerate() {
            if !a.is_finite() || negligible(a, 1.0) {
                return Err(Error::Domain(format!("Drinfeld root a_{l} must be nonzero")));
            }
            for (m, &b) in lambda_roots.iter().enumerate().skip(l + 1) {
                for power in -RESONANCE_ORDER..=RESONANCE_ORDER {
                    let hp = hbar.powi(power);
                    if negligible(a - b * hp, a.norm().max((b * hp).norm())) {
                        return Err(Error::Singularity(format!(
                            "a_{l} / a_{m} = hbar^{power}"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            lambda_roots,
            hbar,
            magnon_count,
        })
    }

    pub fn lambda_roots(&self) -> &[Complex64] {
        &self.lambda_roots
    }

    pub fn hbar(&self) -> Complex64 {
        self.hbar
    }

    pub fn magnon_count(&self) -> usize {
        self.magnon_count
    }

    /// `N`.
    pub fn degree(&self) -> usize {
        self.lambda_roots.len()
    }

    /// `Lambda(u) = prod (u - a_l)`.
    pub fn lambda(&self) -> Polynomial {
        Polynomial::from_roots(&self.lambda_roots)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub xi: Complex64,
    pub xi_tilde: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QqSolution {
    pub q_plus: Polynomial,
    pub q_minus: Polynomial,
    pub xi: Complex64,
    pub xi_tilde: Complex64,
    pub normalization: Complex64,
}

impl QqSolution {
    pub fn twist(&self) -> Twist {
        Twist {
            xi: self.xi,
            xi_tilde: self.xi_tilde,
        }
    }

    /// Roots of `Q+`.
    pub fn bethe_roots(&self) -> Result<Vec<Complex64>> {
        self.q_plus.roots()
    }
}

/// `xi_tilde Q-(u) Q+(hbar u) - xi Q-(hbar u) Q+(u) - c Lambda(u)`.
pub fn qq_residual(sol: &QqSolution, data: &DrinfeldData) -> Result<Polynomial> {
    let (dp, dm) = (sol.q_plus.degree(), sol.q_minus.degree());
    match (dp, dm) {
        (Some(dp), Some(dm)) if dp + dm == data.degree() => {}
        _ => {
            return Err(Error::Domain(format!(
                "deg Q+ + deg Q- must equal N = {} (got {dp:?} and {dm:?})",
                data.degree()
            )))
        }
    }
    Ok(qq_expression(&sol.q_plus, &sol.q_minus, sol.xi, sol.xi_tilde, sol.normalization, data))
}

fn qq_expression(
    q_plus: &Polynomial,
    q_minus: &Polynomial,
    xi: Complex64,
    xi_tilde: Complex64,
    c: Complex64,
    data: &DrinfeldData,
) -> Polynomial {
    let h = data.hbar;
    let first = (q_minus * &q_plus.scale_argument(&h)).scale(&xi_tilde);
    let second = (&q_minus.scale_argument(&h) * q_plus).scale(&xi);
    &(&first - &second) - &data.lambda().scale(&c)
}

fn check_twist(twist: &Twist, hbar: Complex64, n: usize) -> Result<()> {
    let Twist { xi, xi_tilde } = *twist;
    for (name, v) in [("xi", xi), ("xi_tilde", xi_tilde)] {
        if !v.is_finite() || negligible(v, 1.0) {
            return Err(Error::DegenerateTwist(format!("{name} must be finite and nonzero")));
        }
    }
    let bound = RESONANCE_ORDER.max(n as i32);
    for m in -bound..=bound {
        let rhs = xi_tilde * hbar.powi(m);
        if negligible(xi - rhs, xi.norm().max(rhs.norm())) {
            return Err(Error::DegenerateTwist(format!("xi = xi_tilde hbar^{m}")));
        }
    }
    Ok(())
}

/// Unknown vector layout: `[Q+ lower coeffs (k), Q- lower coeffs (N-k), c]`.
fn unpack(x: &[Complex64], k: usize, n: usize) -> (Polynomial, Polynomial, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let mut p: Vec<Complex64> = x[..k].to_vec();
    p.push(one);
    let mut m: Vec<Complex64> = x[k..n].to_vec();
    m.push(one);
    (Polynomial::new(p), Polynomial::new(m), x[n])
}

fn residual_vector(x: &[Complex64], data: &DrinfeldData, twist: &Twist) -> Vec<Complex64> {
    let (k, n) = (data.magnon_count, data.degree());
    let (p, m, c) = unpack(x, k, n);
    let r = qq_expression(&p, &m, twist.xi, twist.xi_tilde, c, data);
    (0..=n).map(|i| r.coeff(i)).collect()
}

/// Newton solve of the QQ-relation on the coefficients of monic `Q+`, monic
/// `Q-` and the normalization. `seed` holds initial Bethe roots (the roots
/// of `Q+`); `Q-` and `c` are initialised by least squares, since the relation
/// is linear in them once `Q+` is fixed.
pub fn solve_qq(data: &DrinfeldData, twist: &Twist, seed: &[Complex64], config: &SolverConfig) -> Result<QqSolution> {
    let (k, n) = (data.magnon_count, data.degree());
    if seed.len() != k {
        return Err(Error::Domain(format!("seed has {} roots, expected {k}", seed.len())));
    }
    check_twist(twist, data.hbar, n)?;

    let seed_plus = Polynomial::from_roots(seed);
    let mut x0: Vec<Complex64> = (0..k).map(|i| seed_plus.coeff(i)).collect();
    x0.extend(std::iter::repeat_n(czero(), n - k + 1));
    let base = residual_vector(&x0, data, twist);
    let mut a = CMatrix::zeros(n + 1, n - k + 1);
    for col in 0..=n - k {
        let mut probe = x0.clone();
        probe[k + col] = Complex64::new(1.0, 0.0);
        let r = residual_vector(&probe, data, twist);
        for row in 0..=n {
            a[(row, col)] = r[row] - base[row];
        }
    }
    let neg_base: Vec<Complex64> = base.iter().map(|z| -z).collect();
    let y = least_squares(&a, &neg_base)?;
    x0[k..].copy_from_slice(&y);

    let system = FnSystem::new(n + 1, |x: &[Complex64]| Ok(residual_vector(x, data, twist)));
    let x = newton_solve(&system, &x0, config)?;
    let (q_plus, q_minus, normalization) = unpack(&x, k, n);
    Ok(QqSolution {
        q_plus,
        q_minus,
        xi: twist.xi,
        xi_tilde: twist.xi_tilde,
        normalization,
    })
}

/// Runs [`solve_qq`] from every seed and keeps one solution per distinct
/// `Q+` (coefficient max-norm distance above `threshold`). Seeds that fail
/// to converge are skipped.
pub fn solve_qq_multistart(
    data: &DrinfeldData,
    twist: &Twist,
    seeds: &[Vec<Complex64>],
    config: &SolverConfig,
    threshold: f64,
) -> Result<Vec<QqSolution>> {
    check_twist(twist, data.hbar, data.degree())?;
    let mut found: Vec<QqSolution> = Vec::new();
    for seed in seeds {
        let Ok(sol) = solve_qq(data, twist, seed, config) else {
            continue;
        };
        let duplicate = found.iter().any(|f| {
            let d = &f.q_plus - &sol.q_plus;
            d.max_abs_coeff() <= threshold
        });
        if !duplicate {
            found.push(sol);
        }
    }
    Ok(found)
}

/// `-(xi_tilde/xi) Q+(hbar s_a)/Q+(s_a/hbar) - Lambda(s_a)/Lambda(s_a/hbar)`
/// for each root, with `Q+ = prod (u - s_b)`. Vanishes on QQ solutions.
pub fn bethe_residual(s_roots: &[Complex64], data: &DrinfeldData, twist: &Twist) -> Result<Vec<Complex64>> {
    let q_plus = Polynomial::from_roots(s_roots);
    let lambda = data.lambda();
    let h = data.hbar;
    s_roots
        .iter()
        .map(|&s| {
            let down = s / h;
            let qp_den = q_plus.eval(&down);
            let l_den = lambda.eval(&down);
            let scale_q: f64 = s_roots.iter().map(|r| down.norm() + r.norm()).product();
            let scale_l: f64 = data.lambda_roots.iter().map(|r| down.norm() + r.norm()).product();
            if negligible(qp_den, scale_q) || negligible(l_den, scale_l) {
                return Err(Error::Pole(format!("denominator vanishes at s/hbar = {down}")));
            }
            Ok(-(twist.xi_tilde / twist.xi) * q_plus.eval(&(h * s)) / qp_den - lambda.eval(&s) / l_den)
        })
        .collect()
}

/// Exchanges `Q+ <-> Q-` and `xi <-> xi_tilde`; the normalization flips sign.
pub fn backlund_swap(sol: &QqSolution) -> Result<QqSolution> {
    if negligible(sol.xi - sol.xi_tilde, sol.xi.norm().max(sol.xi_tilde.norm())) {
        return Err(Error::DegenerateTwist(
            "xi = xi_tilde is a fixed point of the Weyl reflection".into(),
        ));
    }
    Ok(QqSolution {
        q_plus: sol.q_minus.clone(),
        q_minus: sol.q_plus.clone(),
        xi: sol.xi_tilde,
        xi_tilde: sol.xi,
        normalization: -sol.normalization,
    })
}

/// `prod_i (z - s_i)(q/z - s_i)` over any field.
pub fn orbifolded_eval<T: Num + Clone>(roots: &[T], q: &T, z: &T) -> T {
    let inv = q.clone() / z.clone();
    roots.iter().fold(T::one(), |acc, s| {
        acc * (z.clone() - s.clone()) * (inv.clone() - s.clone())
    })
}

/// `Q+(z) = prod (z - s_i)(q/z - s_i)`, invariant under `z -> q/z`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbifoldedQ {
    roots: Vec<Complex64>,
    q: Complex64,
}

pub fn orbifolded_qplus(roots: &[Complex64], q: Complex64) -> Result<OrbifoldedQ> {
    if !q.is_finite() || negligible(q, 1.0) {
        return Err(Error::Domain("q must be finite and nonzero".into()));
    }
    if let Some(i) = roots.iter().position(|s| negligible(*s, 1.0)) {
        return Err(Error::Domain(format!("root s_{i} is zero")));
    }
    Ok(OrbifoldedQ {
        roots: roots.to_vec(),
        q,
    })
}

impl OrbifoldedQ {
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if negligible(z, 1.0) {
            return Err(Error::Pole("Q+ has a pole at z = 0".into()));
        }
        Ok(orbifolded_eval(&self.roots, &self.q, &z))
    }

    /// `|Q+(q/z) - Q+(z)|`.
    pub fn symmetry_defect(&self, z: Complex64) -> Result<f64> {
        Ok((self.eval(self.q / z)? - self.eval(z)?).norm())
    }

    /// `z^k Q+(z) = prod (z - s_i)(q - s_i z)`, a polynomial of degree 2k.
    pub fn cleared(&self) -> Polynomial {
        self.roots.iter().fold(Polynomial::one(), |acc, &s| {
            let f = &Polynomial::linear_factor(s) * &Polynomial::new(vec![self.q, -s]);
            &acc * &f
        })
    }

    /// Zeros of the cleared polynomial: `{s_i} u {q / s_i}`.
    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        self.cleared().roots()
    }
}
