//! Damped Newton iteration and parameter continuation for small complex
//! nonlinear systems.

use num_complex::Complex64;

use super::linalg::{solve, vec_max_norm, CMatrix};
use crate::error::{Error, Result};

/// Relative step for the central finite-difference Jacobian.
pub const FD_STEP: f64 = 1e-7;

/// Roots closer than this (max-norm) are treated as the same root.
pub const DEDUP_THRESHOLD: f64 = 1e-8;

/// Residual target at interior path points, which only seed the next step.
/// The endpoint is held to the configured tolerance.
pub const PATH_TOLERANCE: f64 = 1e-9;

const MAX_BACKTRACK: usize = 12;
const MAX_REFINE_DEPTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Target residual max-norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Number of subdivisions of a homotopy path.
    pub step_count: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 100,
            step_count: 64,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Domain(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 || self.step_count == 0 {
            return Err(Error::Domain("max_iterations and step_count must be positive".into()));
        }
        Ok(())
    }
}

/// A square system `F: C^n -> C^n`.
pub trait NonlinearSystem {
    fn arity(&self) -> usize;

    fn residual(&self, x: &[Complex64]) -> Result<Vec<Complex64>>;

    /// Exact Jacobian, when the system has one. Finite differences otherwise.
    fn jacobian(&self, _x: &[Complex64]) -> Option<Result<CMatrix>> {
        None
    }
}

/// A one-parameter family `F(x; t)` used for continuation.
pub trait ParametricSystem {
    fn arity(&self) -> usize;

    fn residual(&self, x: &[Complex64], t: Complex64) -> Result<Vec<Complex64>>;

    fn jacobian(&self, _x: &[Complex64], _t: Complex64) -> Option<Result<CMatrix>> {
        None
    }
}

/// Wraps a closure as a [`NonlinearSystem`].
pub struct FnSystem<F> {
    arity: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    pub fn new(arity: usize, f: F) -> Self {
        Self { arity, f }
    }
}

impl<F> NonlinearSystem for FnSystem<F>
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    fn arity(&self) -> usize {
        self.arity
    }
    fn residual(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        (self.f)(x)
    }
}

/// Wraps a closure as a [`ParametricSystem`].
pub struct FnFamily<F> {
    arity: usize,
    f: F,
}

impl<F> FnFamily<F>
where
    F: Fn(&[Complex64], Complex64) -> Result<Vec<Complex64>>,
{
    pub fn new(arity: usize, f: F) -> Self {
        Self { arity, f }
    }
}

impl<F> ParametricSystem for FnFamily<F>
where
    F: Fn(&[Complex64], Complex64) -> Result<Vec<Complex64>>,
{
    fn arity(&self) -> usize {
        self.arity
    }
    fn residual(&self, x: &[Complex64], t: Complex64) -> Result<Vec<Complex64>> {
        (self.f)(x, t)
    }
}

/// A family frozen at one parameter value.
pub struct AtParameter<'a, P: ?Sized> {
    pub family: &'a P,
    pub t: Complex64,
}

impl<P: ParametricSystem + ?Sized> NonlinearSystem for AtParameter<'_, P> {
    fn arity(&self) -> usize {
        self.family.arity()
    }
    fn residual(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.family.residual(x, self.t)
    }
    fn jacobian(&self, x: &[Complex64]) -> Option<Result<CMatrix>> {
        self.family.jacobian(x, self.t)
    }
}

fn checked_residual<S: NonlinearSystem + ?Sized>(system: &S, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let r = system.residual(x)?;
    if r.len() != system.arity() {
        return Err(Error::Domain(format!(
            "residual has dimension {} but the system has arity {}",
            r.len(),
            system.arity()
        )));
    }
    if r.iter().any(|z| !z.is_finite()) {
        return Err(Error::Singularity("residual is not finite".into()));
    }
    Ok(r)
}

/// Central differences along the real axis of each coordinate. The systems
/// here are holomorphic, so this is the complex derivative.
pub fn finite_difference_jacobian<S: NonlinearSystem + ?Sized>(
    system: &S,
    x: &[Complex64],
) -> Result<CMatrix> {
    let n = system.arity();
    let mut jac = CMatrix::zeros(n, n);
    let mut probe = x.to_vec();
    for j in 0..n {
        let h = FD_STEP * x[j].norm().max(1.0);
        probe[j] = x[j] + h;
        let plus = checked_residual(system, &probe)?;
        probe[j] = x[j] - h;
        let minus = checked_residual(system, &probe)?;
        probe[j] = x[j];
        for i in 0..n {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Newton's method with backtracking on the residual max-norm.
///
/// On success the returned point satisfies `max |F(x)| <= config.tolerance`.
pub fn newton_solve<S: NonlinearSystem + ?Sized>(
    system: &S,
    start: &[Complex64],
    config: &SolverConfig,
) -> Result<Vec<Complex64>> {
    config.validate()?;
    if start.len() != system.arity() {
        return Err(Error::Domain(format!(
            "start has length {} but the system has arity {}",
            start.len(),
            system.arity()
        )));
    }
    let mut x = start.to_vec();
    let mut r = checked_residual(system, &x)?;
    let mut norm = vec_max_norm(&r);
    for iteration in 0..config.max_iterations {
        if norm <= config.tolerance {
            return Ok(x);
        }
        let jac = match system.jacobian(&x) {
            Some(j) => j?,
            None => finite_difference_jacobian(system, &x)?,
        };
        let neg_r: Vec<Complex64> = r.iter().map(|z| -z).collect();
        let dx = solve(&jac, &neg_r).map_err(|_| Error::Convergence {
            iterations: iteration,
            residual: norm,
            last: x.clone(),
            parameter: None,
        })?;

        // Backtrack until the residual decreases; keep the best trial otherwise.
        let mut best: Option<(Vec<Complex64>, Vec<Complex64>, f64)> = None;
        let mut lambda = 1.0;
        for _ in 0..MAX_BACKTRACK {
            let trial: Vec<Complex64> = x.iter().zip(&dx).map(|(a, d)| a + d * lambda).collect();
            if let Ok(rt) = checked_residual(system, &trial) {
                let nt = vec_max_norm(&rt);
                let improved = best.as_ref().is_none_or(|b| nt < b.2);
                if improved {
                    best = Some((trial, rt, nt));
                }
                if nt < norm {
                    break;
                }
            }
            lambda *= 0.5;
        }
        match best {
            Some((bx, br, bn)) => {
                x = bx;
                r = br;
                norm = bn;
            }
            None => {
                return Err(Error::Convergence {
                    iterations: iteration + 1,
                    residual: norm,
                    last: x,
                    parameter: None,
                })
            }
        }
    }
    if norm <= config.tolerance {
        Ok(x)
    } else {
        Err(Error::Convergence {
            iterations: config.max_iterations,
            residual: norm,
            last: x,
            parameter: None,
        })
    }
}

/// Evenly spaced parameter values `from, ..., to` (`steps + 1` points).
pub fn linear_path(from: Complex64, to: Complex64, steps: usize) -> Vec<Complex64> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|i| from + (to - from) * (i as f64 / steps as f64))
        .collect()
}

/// Follows a root of `family` along `path`, returning the root at each path
/// value. Each Newton solve is seeded with the previous root; a failing step
/// is bisected a few times before giving up.
pub fn homotopy_trace<P: ParametricSystem + ?Sized>(
    family: &P,
    start_root: &[Complex64],
    path: &[Complex64],
    config: &SolverConfig,
) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let Some(&t0) = path.first() else {
        return Err(Error::Domain("empty homotopy path".into()));
    };
    let at = |t| AtParameter { family, t };
    let interior = SolverConfig {
        tolerance: config.tolerance.max(PATH_TOLERANCE),
        ..*config
    };
    let last = path.len() - 1;
    let first_config = if last == 0 { config } else { &interior };
    let mut x = newton_solve(&at(t0), start_root, first_config).map_err(|e| with_parameter(e, t0))?;
    let mut trace = vec![(t0, x.clone())];
    for (i, &t) in path.iter().enumerate().skip(1) {
        let prev_t = trace.last().map(|p| p.0).unwrap_or(t0);
        let step_config = if i == last { config } else { &interior };
        x = step_with_refinement(family, &x, prev_t, t, step_config, 0)?;
        trace.push((t, x.clone()));
    }
    Ok(trace)
}

fn step_with_refinement<P: ParametricSystem + ?Sized>(
    family: &P,
    seed: &[Complex64],
    from: Complex64,
    to: Complex64,
    config: &SolverConfig,
    depth: usize,
) -> Result<Vec<Complex64>> {
    match newton_solve(&AtParameter { family, t: to }, seed, config) {
        Ok(x) => Ok(x),
        Err(e) if depth >= MAX_REFINE_DEPTH => Err(with_parameter(e, to)),
        Err(_) => {
            let mid = (from + to) * 0.5;
            let x_mid = step_with_refinement(family, seed, from, mid, config, depth + 1)?;
            step_with_refinement(family, &x_mid, mid, to, config, depth + 1)
        }
    }
}

fn with_parameter(e: Error, t: Complex64) -> Error {
    match e {
        Error::Convergence {
            iterations,
            residual,
            last,
            ..
        } => Error::Convergence {
            iterations,
            residual,
            last,
            parameter: Some(t),
        },
        other => other,
    }
}

/// Root at the end of `path`.
pub fn homotopy_continue<P: ParametricSystem + ?Sized>(
    family: &P,
    start_root: &[Complex64],
    path: &[Complex64],
    config: &SolverConfig,
) -> Result<Vec<Complex64>> {
    let mut trace = homotopy_trace(family, start_root, path, config)?;
    Ok(trace.pop().map(|(_, x)| x).unwrap_or_default())
}

/// Keeps the first representative of every cluster of points within
/// `threshold` (max-norm) of each other.
pub fn dedup_points(points: Vec<Vec<Complex64>>, threshold: f64) -> Vec<Vec<Complex64>> {
    let mut unique: Vec<Vec<Complex64>> = Vec::new();
    for p in points {
        let seen = unique.iter().any(|u| {
            u.len() == p.len() && u.iter().zip(&p).all(|(a, b)| (a - b).norm() <= threshold)
        });
        if !seen {
            unique.push(p);
        }
    }
    unique
}
