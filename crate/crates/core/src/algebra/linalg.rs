//! Small dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues of a square complex matrix, read off the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Domain(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|z| !z.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let schur = nalgebra::Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Domain("Schur decomposition did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let rhs = DVector::from_column_slice(b);
    a.clone()
        .lu()
        .solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::Singularity("linear system is singular".into()))
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn least_squares(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let rhs = DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    svd.solve(&rhs, 1e-13)
        .map(|x| x.iter().copied().collect())
        .map_err(|e| Error::Domain(format!("least squares failed: {e}")))
}

/// Distance between two multisets of complex numbers: the smallest, over all
/// matchings, of the largest matched difference.
///
/// Exhaustive over permutations, so intended for the short spectra used in
/// this crate (n <= 8).
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    fn search(a: &[Complex64], b: &[Complex64], used: &mut [bool], depth: usize, worst: f64, best: &mut f64) {
        if worst >= *best {
            return;
        }
        if depth == a.len() {
            *best = worst;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let d = (a[depth] - b[j]).norm();
                search(a, b, used, depth + 1, worst.max(d), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; b.len()];
    search(a, b, &mut used, 0, 0.0, &mut best);
    if a.is_empty() {
        0.0
    } else {
        best
    }
}

/// Matrix from row-major nested vectors.
pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Domain("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triangular_eigenvalues() {
        let m = from_rows(&[
            vec![c(1.0, 0.0), c(5.0, 2.0), c(0.0, 1.0)],
            vec![c(0.0, 0.0), c(2.0, -1.0), c(3.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(-4.0, 0.5)],
        ])
        .unwrap();
        let ev = eigenvalues(&m).unwrap();
        let expect = [c(1.0, 0.0), c(2.0, -1.0), c(-4.0, 0.5)];
        assert!(multiset_distance(&ev, &expect) < 1e-12);
    }

    #[test]
    fn non_square_is_rejected() {
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(eigenvalues(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn multiset_distance_finds_best_matching() {
        let a = [c(0.0, 0.0), c(1.0, 0.0), c(5.0, 0.0)];
        let b = [c(5.1, 0.0), c(0.0, 0.05), c(1.0, 0.0)];
        assert!((multiset_distance(&a, &b) - 0.1).abs() < 1e-12);
        assert_eq!(multiset_distance(&a, &b[..2]), f64::INFINITY);
    }

    #[test]
    fn lu_solve() {
        let a = from_rows(&[vec![c(2.0, 0.0), c(1.0, 1.0)], vec![c(0.0, 1.0), c(3.0, 0.0)]]).unwrap();
        let x = solve(&a, &[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let r0 = a[(0, 0)] * x[0] + a[(0, 1)] * x[1] - c(1.0, 0.0);
        let r1 = a[(1, 0)] * x[0] + a[(1, 1)] * x[1] - c(2.0, 0.0);
        assert!(r0.norm() < 1e-14 && r1.norm() < 1e-14);
    }
}
