//! Elementary symmetric functions and characteristic-polynomial coefficients.
//!
//! Sign convention throughout: `det(u - M) = sum_k (-1)^k H_k u^{n-k}` with
//! `H_0 = 1`, so `H_k` is the k-th elementary symmetric function of the
//! eigenvalues of `M`.

use num_complex::Complex64;
use num_traits::{FromPrimitive, Num};

use super::linalg::{eigenvalues, CMatrix};
use crate::error::{Error, Result};

/// `e_k(values)`, the sum over all k-subsets of the products of their members.
pub fn elementary_symmetric<T: Num + Clone>(values: &[T], k: usize) -> Result<T> {
    if k > values.len() {
        return Err(Error::Domain(format!(
            "e_{k} requested for {} values",
            values.len()
        )));
    }
    Ok(elementary_symmetric_all(values).swap_remove(k))
}

/// `(e_0, e_1, ..., e_n)` in one pass.
pub fn elementary_symmetric_all<T: Num + Clone>(values: &[T]) -> Vec<T> {
    let n = values.len();
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for (m, v) in values.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] = e[k].clone() + e[k - 1].clone() * v.clone();
        }
    }
    e
}

/// `(H_1, ..., H_n)` of a square complex matrix, from its eigenvalues.
pub fn characteristic_coefficients(m: &CMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Domain(format!(
            "characteristic polynomial needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let ev = eigenvalues(m)?;
    let mut e = elementary_symmetric_all(&ev);
    e.remove(0);
    Ok(e)
}

/// `(H_1, ..., H_n)` by the Faddeev-LeVerrier recursion.
///
/// Division-free apart from the integer divisors `1..n`, so it is exact over
/// any field of characteristic zero (e.g. `BigRational`).
pub fn faddeev_leverrier<T: Num + Clone + FromPrimitive>(rows: &[Vec<T>]) -> Result<Vec<T>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Domain("characteristic polynomial needs a square matrix".into()));
    }
    let matmul = |a: &[Vec<T>], b: &[Vec<T>]| -> Vec<Vec<T>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(T::zero(), |acc, k| acc + a[i][k].clone() * b[k][j].clone())
                    })
                    .collect()
            })
            .collect()
    };
    // c[n-k] are the monic charpoly coefficients: det(u - A) = sum c_j u^j.
    let mut c = vec![T::zero(); n + 1];
    c[n] = T::one();
    let mut mk: Vec<Vec<T>> = vec![vec![T::zero(); n]; n];
    for k in 1..=n {
        let mut next = matmul(rows, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = row[i].clone() + c[n - k + 1].clone();
        }
        mk = next;
        let amk = matmul(rows, &mk);
        let trace = (0..n).fold(T::zero(), |acc, i| acc + amk[i][i].clone());
        let kk = T::from_usize(k).ok_or_else(|| Error::Domain("index overflow".into()))?;
        c[n - k] = T::zero() - trace / kk;
    }
    Ok((1..=n)
        .map(|k| {
            if k % 2 == 0 {
                c[n - k].clone()
            } else {
                T::zero() - c[n - k].clone()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Brute force over all k-subsets.
    fn e_brute(values: &[i64], k: usize) -> i64 {
        let n = values.len();
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| values[i]).product::<i64>())
            .sum()
    }

    #[test]
    fn elementary_symmetric_examples() {
        let v = [1i64, 2, 3];
        assert_eq!(elementary_symmetric(&v, 1).unwrap(), 6);
        assert_eq!(elementary_symmetric(&v, 0).unwrap(), 1);
        assert_eq!(e_brute(&v, 2), 11);
        assert_eq!(elementary_symmetric(&v, 2).unwrap(), 11);
        assert!(matches!(elementary_symmetric(&v, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn elementary_symmetric_matches_brute_force() {
        let v = [3i64, -1, 4, 1, -5, 9, 2];
        for k in 0..=v.len() {
            assert_eq!(elementary_symmetric(&v, k).unwrap(), e_brute(&v, k));
        }
    }

    #[test]
    fn identity_and_diagonal() {
        let id = CMatrix::identity(2, 2);
        let h = characteristic_coefficients(&id).unwrap();
        assert!((h[0] - c(2.0)).norm() < 1e-15 && (h[1] - c(1.0)).norm() < 1e-15);

        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0), Complex64::new(0.0, 2.0)]));
        let h = characteristic_coefficients(&d).unwrap();
        assert!((h[0] - Complex64::new(3.0, 2.0)).norm() < 1e-15);
        assert!((h[1] - Complex64::new(0.0, 6.0)).norm() < 1e-15);
    }

    #[test]
    fn non_square_rejected() {
        assert!(characteristic_coefficients(&CMatrix::zeros(2, 3)).is_err());
        assert!(faddeev_leverrier(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn exact_and_floating_routes_agree_on_integer_matrices() {
        let rows: Vec<Vec<i64>> = vec![vec![2, -1, 0, 3], vec![1, 4, -2, 0], vec![0, 5, 1, -1], vec![-3, 0, 2, 2]];
        let exact = faddeev_leverrier(
            &rows
                .iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect::<Vec<Vec<_>>>(),
        )
        .unwrap();
        let float = characteristic_coefficients(&CMatrix::from_fn(4, 4, |i, j| c(rows[i][j] as f64))).unwrap();
        for (x, y) in exact.iter().zip(&float) {
            assert!(x.is_integer());
            let xv = x.to_integer().to_string().parse::<f64>().unwrap();
            assert!((c(xv) - y).norm() < 1e-10 * xv.abs().max(1.0), "{xv} vs {y}");
        }
        // trace and determinant by hand
        assert_eq!(exact[0], BigRational::from_integer(9.into()));
    }
}
