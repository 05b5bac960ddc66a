//! Truncations `T_s(z) = sum_{d < p^s} c_d z^d` of a normalized series and the
//! Dwork congruences `T_{s+1}(z) T_{s-1}(z^p) = T_s(z) T_s(z^p) mod p^s`,
//! all in exact integer arithmetic.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::Polynomial;
use crate::error::{Error, Result};

/// Largest `p^(s+1)` (the residual length) accepted.
pub const MAX_TRUNCATION_LENGTH: u64 = 1 << 16;

type Generator = Arc<dyn Fn(usize) -> Option<BigRational> + Send + Sync>;

/// `d -> c_d`. A generator returns `None` past the end of a finite series.
#[derive(Clone)]
pub struct CoefficientSeries {
    name: String,
    generator: Generator,
}

impl fmt::Debug for CoefficientSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientSeries").field("name", &self.name).finish()
    }
}

impl CoefficientSeries {
    /// Rejects generators with `c_0 != 1`.
    pub fn new(
        name: impl Into<String>,
        generator: impl Fn(usize) -> Option<BigRational> + Send + Sync + 'static,
    ) -> Result<Self> {
        let name = name.into();
        match generator(0) {
            Some(c0) if c0.is_one() => {}
            other => {
                return Err(Error::Domain(format!(
                    "series {name}: c_0 must be 1, got {}",
                    other.map(|c| c.to_string()).unwrap_or_else(|| "nothing".into())
                )))
            }
        }
        Ok(Self {
            name,
            generator: Arc::new(generator),
        })
    }

    /// `c_d = C(2d, d)`.
    pub fn central_binomial() -> Self {
        Self::new("central-binomial", |d| Some(BigRational::from_integer(binomial(2 * d, d))))
            .expect("C(0, 0) = 1")
    }

    /// `c_0 = 1`, `c_d = d! + 1`: fails the congruences.
    pub fn factorial_control() -> Self {
        Self::new("factorial-control", |d| {
            let c = if d == 0 { BigInt::one() } else { factorial(d) + 1 };
            Some(BigRational::from_integer(c))
        })
        .expect("c_0 = 1")
    }

    /// A finite series; degrees past the end are unavailable.
    pub fn from_integers(name: impl Into<String>, coeffs: Vec<BigInt>) -> Result<Self> {
        let coeffs = Arc::new(coeffs);
        Self::new(name, move |d| coeffs.get(d).cloned().map(BigRational::from_integer))
    }

    /// Newline-separated decimal integers, `c_0` first. Blank lines are skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut coeffs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let c: BigInt = line
                .parse()
                .map_err(|_| Error::Domain(format!("{}:{}: not an integer: {line}", path.display(), lineno + 1)))?;
            coeffs.push(c);
        }
        Self::from_integers(path.display().to_string(), coeffs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `c_d` as an exact integer.
    pub fn coefficient(&self, d: usize) -> Result<BigInt> {
        let c = (self.generator)(d)
            .ok_or_else(|| Error::Domain(format!("series {} has no coefficient at degree {d}", self.name)))?;
        if !c.is_integer() {
            return Err(Error::NonIntegerCoefficient { degree: d });
        }
        Ok(c.to_integer())
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{p} is not prime")))
    }
}

fn checked_power(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .filter(|&v| v <= MAX_TRUNCATION_LENGTH)
        .ok_or_else(|| Error::Domain(format!("{p}^{e} exceeds the size limit {MAX_TRUNCATION_LENGTH}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPolynomial {
    pub prime: u64,
    pub level: u32,
    pub poly: Polynomial<BigInt>,
}

pub fn truncation_poly(series: &CoefficientSeries, prime: u64, level: u32) -> Result<TruncationPolynomial> {
    check_prime(prime)?;
    let len = checked_power(prime, level)? as usize;
    let coeffs = (0..len).map(|d| series.coefficient(d)).collect::<Result<Vec<_>>>()?;
    Ok(TruncationPolynomial {
        prime,
        level,
        poly: Polynomial::new(coeffs),
    })
}

/// `T_{s+1}(z) T_{s-1}(z^p) - T_s(z) T_s(z^p)` truncated to degree `< p^(s+1)`,
/// coefficients reduced into `[0, p^s)`. Zero means the congruence holds.
pub fn dwork_congruence_residual(series: &CoefficientSeries, prime: u64, level: u32) -> Result<Polynomial<BigInt>> {
    if level == 0 {
        return Err(Error::Domain("congruence level must be >= 1".into()));
    }
    check_prime(prime)?;
    let len = checked_power(prime, level + 1)? as usize;
    let modulus = BigInt::from(prime).pow(level);
    let p = prime as usize;

    let upper = truncation_poly(series, prime, level + 1)?.poly;
    let mid = truncation_poly(series, prime, level)?.poly;
    let lower = truncation_poly(series, prime, level - 1)?.poly;

    let left = truncated_product(&upper, &lower.substitute_power(p), len);
    let right = truncated_product(&mid, &mid.substitute_power(p), len);
    let coeffs = (0..len)
        .map(|d| (left.coeff(d) - right.coeff(d)).mod_floor(&modulus))
        .collect();
    Ok(Polynomial::new(coeffs))
}

fn truncated_product(a: &Polynomial<BigInt>, b: &Polynomial<BigInt>, len: usize) -> Polynomial<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.coeffs().iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs().iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    Polynomial::new(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(e) => write!(f, "{e}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(e) => Some(e),
            Valuation::Infinite => None,
        }
    }
}

/// Largest `e` with `p^e | n`; infinite for `n = 0`.
pub fn padic_valuation(n: &BigInt, prime: u64) -> Result<Valuation> {
    check_prime(prime)?;
    if n.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let p = BigInt::from(prime);
    let mut m = n.abs();
    let mut e = 0u32;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Ok(Valuation::Finite(e));
        }
        m = q;
        e += 1;
    }
}

/// Smallest valuation among the coefficients of `poly`.
pub fn polynomial_valuation(poly: &Polynomial<BigInt>, prime: u64) -> Result<Valuation> {
    poly.coeffs()
        .iter()
        .map(|c| padic_valuation(c, prime))
        .try_fold(Valuation::Infinite, |acc, v| Ok(acc.min(v?)))
}

/// Converts a small polynomial to `i64` coefficients, for display.
pub fn to_i64_coeffs(poly: &Polynomial<BigInt>) -> Option<Vec<i64>> {
    poly.coeffs().iter().map(|c| c.to_i64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn truncations_of_central_binomial() {
        let cb = CoefficientSeries::central_binomial();
        assert_eq!(truncation_poly(&cb, 2, 0).unwrap().poly.coeffs(), ints(&[1]).as_slice());
        assert_eq!(truncation_poly(&cb, 2, 1).unwrap().poly.coeffs(), ints(&[1, 2]).as_slice());
        assert_eq!(truncation_poly(&cb, 3, 1).unwrap().poly.coeffs(), ints(&[1, 2, 6]).as_slice());
        assert!(truncation_poly(&cb, 4, 1).is_err());
    }

    #[test]
    fn congruences() {
        let cb = CoefficientSeries::central_binomial();
        assert!(dwork_congruence_residual(&cb, 3, 1).unwrap().is_zero());
        assert!(!dwork_congruence_residual(&CoefficientSeries::factorial_control(), 3, 1)
            .unwrap()
            .is_zero());
        assert!(dwork_congruence_residual(&cb, 3, 0).is_err());
    }

    #[test]
    fn normalization_and_integrality() {
        assert!(CoefficientSeries::from_integers("bad", ints(&[2, 1])).is_err());
        let half = CoefficientSeries::new("half", |d| {
            Some(if d == 0 {
                BigRational::one()
            } else {
                BigRational::new(BigInt::one(), BigInt::from(2))
            })
        })
        .unwrap();
        assert_eq!(truncation_poly(&half, 2, 1), Err(Error::NonIntegerCoefficient { degree: 1 }));
        let short = CoefficientSeries::from_integers("short", ints(&[1, 2])).unwrap();
        assert!(truncation_poly(&short, 3, 1).is_err());
    }

    #[test]
    fn valuations() {
        let v = |n: i64, p| padic_valuation(&BigInt::from(n), p).unwrap();
        assert_eq!(v(18, 3), Valuation::Finite(2));
        assert_eq!(v(12, 2), Valuation::Finite(2));
        assert_eq!(v(0, 5), Valuation::Infinite);
        assert_eq!(v(-8, 2), Valuation::Finite(3));
        assert!(padic_valuation(&BigInt::from(4), 6).is_err());
    }

    #[test]
    fn size_guard() {
        let cb = CoefficientSeries::central_binomial();
        assert!(truncation_poly(&cb, 2, 40).is_err());
    }
}
