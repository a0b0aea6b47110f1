//! Budan-Fourier sign-variation counts in exact arithmetic.
//!
//! For a polynomial `P` let `V_c(P)` be the number of sign changes in
//! `(P(c), P'(c), ..., P^(deg)(c))` after dropping zeros. Budan's theorem:
//! the number of roots in `(a, b]`, counted with multiplicity, equals
//! `V_a - V_b` minus a nonnegative even number.
//!
//! The application here: `gamma(t) = t f_n(t)` is strictly increasing on
//! `(0, 1/2)` because `gamma'(t) = t^n g((1-t)/t)` for the auxiliary
//! polynomial `g` below, and `g` has no roots in `(1, +infinity)`. This
//! yields `f_n'(t) > -f_n(t)/t`, hence `f_n'(alpha_n) > -1`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use serde::Serialize;

use crate::ratpoly::{binomial, RationalPolynomial};

/// `V_c(P)`: sign variations of the derivative sequence at `c`.
pub fn sign_variations(p: &RationalPolynomial, c: &BigRational) -> usize {
    count_changes(
        p.derivative_sequence()
            .iter()
            .map(|q| sign_of(&q.eval(c))),
    )
}

/// `V_{+inf}(P)`, from the signs of the leading coefficients of the
/// derivative sequence. (Each derivative keeps the leading sign of `P`,
/// so this is zero for every nonzero polynomial; computed anyway to
/// mirror the limit argument.)
pub fn sign_variations_at_infinity(p: &RationalPolynomial) -> usize {
    count_changes(
        p.derivative_sequence()
            .iter()
            .map(|q| q.leading_coefficient().map_or(0, sign_of)),
    )
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn count_changes<I: Iterator<Item = i8>>(signs: I) -> usize {
    let mut changes = 0;
    let mut prev = 0i8;
    for s in signs {
        if s != 0 {
            if prev != 0 && s != prev {
                changes += 1;
            }
            prev = s;
        }
    }
    changes
}

/// Budan root bound on `(a, b]` (`b = None` means `+infinity`). The true
/// root count equals `bound` minus a nonnegative even number, so the
/// count is pinned down exactly whenever `bound <= 1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BudanBound {
    pub bound: usize,
    pub exact: bool,
}

pub fn budan_root_bound(
    p: &RationalPolynomial,
    a: &BigRational,
    b: Option<&BigRational>,
) -> BudanBound {
    let va = sign_variations(p, a);
    let vb = b.map_or_else(|| sign_variations_at_infinity(p), |b| sign_variations(p, b));
    let bound = va.saturating_sub(vb);
    BudanBound { bound, exact: bound <= 1 }
}

/// The auxiliary polynomial satisfying `gamma'(t) = t^n g((1-t)/t)`:
///
/// ```text
/// g(s) = sum_{0 <= 2k <= n} 2^(-2k) C(n,2k) C(2k,k)
///        s^(2k-1) ( s (n+1-2k) - 2k )
/// ```
///
/// (the `k = 0` term is the constant `n + 1`).
pub fn build_g(n: usize) -> RationalPolynomial {
    assert!(n >= 2);
    let mut coeffs = vec![BigRational::zero(); n + 1];
    for k in 0..=n / 2 {
        let c = BigRational::new(
            binomial(n, 2 * k) * binomial(2 * k, k),
            BigInt::one() << (2 * k),
        );
        coeffs[2 * k] += &c * BigRational::from_integer(BigInt::from(n as i64 + 1 - 2 * k as i64));
        if k > 0 {
            coeffs[2 * k - 1] -= &c * BigRational::from_integer(BigInt::from(2 * k as i64));
        }
    }
    RationalPolynomial::new(coeffs)
}

/// Values `g^(l)(1)` for `l = 0..=deg g`, exact.
pub fn g_derivatives_at_one(n: usize) -> Vec<BigRational> {
    build_g(n)
        .derivative_sequence()
        .iter()
        .map(|q| q.eval(&BigRational::one()))
        .collect()
}

/// JSON-serializable certificate that `gamma(t) = t f_n(t)` is strictly
/// increasing on `(0, 1/2)`.
#[derive(Debug, Clone, Serialize)]
pub struct MonotoneCertificate {
    pub n: usize,
    /// Budan bound for roots of `g` in `(1, +infinity)`.
    pub bound: usize,
    /// Signs of `g(1), g'(1), ..., g^(deg)(1)`.
    pub derivative_signs_at_1: Vec<i8>,
    pub verdict: bool,
}

/// Certify monotonicity: no roots of `g` past 1, positive leading
/// behaviour, and the nonnegative derivative ladder at 1.
pub fn gamma_monotone_certificate(n: usize) -> MonotoneCertificate {
    let g = build_g(n);
    let bound = budan_root_bound(&g, &BigRational::one(), None).bound;
    let signs: Vec<i8> = g_derivatives_at_one(n).iter().map(sign_of).collect();
    let leading_positive = g.leading_coefficient().is_some_and(|c| c.is_positive());
    let verdict = bound == 0 && leading_positive && signs.iter().all(|&s| s >= 0);
    MonotoneCertificate { n, bound, derivative_signs_at_1: signs, verdict }
}
