//! Dense univariate polynomials with exact rational coefficients.
//!
//! Coefficients are stored in ascending degree order. This is the shared
//! exact-arithmetic backbone for the majority polynomials and the
//! Budan-Fourier machinery.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// Polynomial over the rationals, coefficients ascending by degree.
///
/// Invariant: the highest-degree stored coefficient is nonzero unless the
/// polynomial is zero (empty coefficient vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Horner evaluation on rounded coefficients. Adequate for small
    /// degrees and well-scaled coefficients; the majority polynomials use
    /// a cancellation-free basis instead (see [`crate::poly`]).
    pub fn eval_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + ratio_to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect();
        Self::new(coeffs)
    }

    /// All derivatives `P, P', ..., P^(deg)` as polynomials.
    pub fn derivative_sequence(&self) -> Vec<Self> {
        let mut out = vec![self.clone()];
        while !out.last().unwrap().is_zero() {
            let next = out.last().unwrap().derivative();
            if next.is_zero() {
                break;
            }
            out.push(next);
        }
        out
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }
}

/// Rational helper `a/b`.
pub fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Exact binomial coefficient as a big integer.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Binomial coefficient in `f64`, by log-free running product.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Convert a big rational to `f64` without overflowing intermediate
/// conversions: the quotient is computed to ~80 bits and rescaled.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let numer = r.numer();
    let denom = r.denom();
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    let s = 80 - (nb - db);
    let q = if s >= 0 {
        (numer << s as usize) / denom
    } else {
        numer / (denom << (-s) as usize)
    };
    let q = q.to_f64().unwrap_or(if r.is_positive() {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    });
    q * 2f64.powi(-s as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_and_eval() {
        // p(t) = 1 + 2t + 3t^2
        let p = RationalPolynomial::new(vec![rat(1, 1), rat(2, 1), rat(3, 1)]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.eval(&rat(2, 1)), rat(17, 1));
        let dp = p.derivative();
        assert_eq!(dp.coeffs(), &[rat(2, 1), rat(6, 1)]);
        assert_eq!(p.derivative_sequence().len(), 3);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = RationalPolynomial::new(vec![rat(1, 2), rat(0, 1), rat(0, 1)]);
        assert_eq!(p.degree(), Some(0));
        assert!(RationalPolynomial::new(vec![rat(0, 1)]).is_zero());
    }

    #[test]
    fn big_ratio_to_f64() {
        let big = BigRational::new(BigInt::from(3) << 400, BigInt::from(1) << 401);
        assert!((ratio_to_f64(&big) - 1.5).abs() < 1e-14);
        assert_eq!(ratio_to_f64(&BigRational::zero()), 0.0);
        let neg = BigRational::new(BigInt::from(-7), BigInt::from(4));
        assert!((ratio_to_f64(&neg) + 1.75).abs() < 1e-15);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(2000, 2), BigInt::from(1999000));
        assert_eq!(binomial(5, 7), BigInt::zero());
        assert!((binomial_f64(50, 25) - 1.2641060643775006e14).abs() / 1e14 < 1e-12);
    }
}
