//! The uniform-case majority polynomials.
//!
//! `f_n(t)` is the probability that a node with `n` children is undecided
//! (or keeps the leading opinion) when two opinions are tied among the
//! children, each decided with probability `(1-t)/2`:
//!
//! ```text
//! f_n(t) = sum_{0 <= 2k <= n} C(n,2k) C(2k,k) ((1-t)/2)^(2k) t^(n-2k)
//! ```
//!
//! Exact monomial coefficients are kept for identity checking; float
//! evaluation uses the expression above directly — every summand is
//! nonnegative on `[0,1]`, so the sum is computed without cancellation.
//! (Horner on the rounded monomial coefficients loses ~8 digits by n=50:
//! the coefficients reach ~1e21 with alternating signs.)

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::offspring::OffspringDistribution;
use crate::ratpoly::{binomial, binomial_f64, rat, ratio_to_f64, RationalPolynomial};
use crate::{quad, simplex, Error, Result};

/// Exact monomial-basis representation of `f_n`.
#[derive(Debug, Clone)]
pub struct MajorityPolynomial {
    n: usize,
    poly: RationalPolynomial,
}

impl MajorityPolynomial {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn polynomial(&self) -> &RationalPolynomial {
        &self.poly
    }

    pub fn eval_exact(&self, t: &BigRational) -> BigRational {
        self.poly.eval(t)
    }
}

/// Exact expansion of `f_n`, cached per `n`.
pub fn build_fn(n: usize) -> Arc<MajorityPolynomial> {
    assert!(n >= 1);
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<MajorityPolynomial>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return Arc::clone(hit);
    }
    let mut coeffs = vec![BigRational::zero(); n + 1];
    for k in 0..=n / 2 {
        // C(n,2k) C(2k,k) / 4^k * (1-t)^(2k) t^(n-2k)
        let a = BigRational::new(
            binomial(n, 2 * k) * binomial(2 * k, k),
            BigInt::one() << (2 * k),
        );
        for j in 0..=2 * k {
            let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            coeffs[n - 2 * k + j] += &a * BigRational::from_integer(sign * binomial(2 * k, j));
        }
    }
    let arc = Arc::new(MajorityPolynomial { n, poly: RationalPolynomial::new(coeffs) });
    cache.lock().unwrap().insert(n, Arc::clone(&arc));
    arc
}

fn check_unit_interval(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
    }
    Ok(())
}

/// `f_n(t)`, evaluated in the cancellation-free mixed basis.
pub fn eval_fn(n: usize, t: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    check_unit_interval(t)?;
    let u = 1.0 - t;
    let mut acc = 0.0;
    for k in 0..=n / 2 {
        let a = binomial_f64(n, 2 * k) * binomial_f64(2 * k, k) / 4f64.powi(k as i32);
        acc += a * u.powi(2 * k as i32) * t.powi((n - 2 * k) as i32);
    }
    Ok(acc.min(1.0))
}

/// The derivative `f_n^(l)(t)`.
///
/// Orders 1 and 2 use the mixed basis (differences of nonnegative sums,
/// absolute error O(n^l eps)); higher orders differentiate the exact
/// polynomial and evaluate it in rational arithmetic at the (exactly
/// representable) float `t`, so the result is correctly rounded.
pub fn eval_fn_derivative(n: usize, order: usize, t: f64) -> Result<f64> {
    if n < 1 || order > n {
        return Err(Error::Domain(format!("derivative order {order} outside 0..={n}")));
    }
    check_unit_interval(t)?;
    match order {
        0 => eval_fn(n, t),
        1 => {
            let u = 1.0 - t;
            let mut grow = 0.0; // d/dt of t-powers
            let mut shrink = 0.0; // d/dt of (1-t)-powers
            for k in 0..=n / 2 {
                let a = binomial_f64(n, 2 * k) * binomial_f64(2 * k, k) / 4f64.powi(k as i32);
                if n - 2 * k > 0 {
                    grow += a
                        * (n - 2 * k) as f64
                        * u.powi(2 * k as i32)
                        * t.powi((n - 2 * k - 1) as i32);
                }
                if k > 0 {
                    shrink += a
                        * (2 * k) as f64
                        * u.powi(2 * k as i32 - 1)
                        * t.powi((n - 2 * k) as i32);
                }
            }
            Ok(grow - shrink)
        }
        2 => {
            let u = 1.0 - t;
            let mut plus = 0.0;
            let mut minus = 0.0;
            for k in 0..=n / 2 {
                let a = binomial_f64(n, 2 * k) * binomial_f64(2 * k, k) / 4f64.powi(k as i32);
                let m = n - 2 * k;
                if m >= 2 {
                    plus += a * (m * (m - 1)) as f64 * u.powi(2 * k as i32) * t.powi(m as i32 - 2);
                }
                if k >= 1 && m >= 1 {
                    minus += a
                        * (4 * k * m) as f64
                        * u.powi(2 * k as i32 - 1)
                        * t.powi(m as i32 - 1);
                }
                if k >= 1 {
                    plus += a
                        * (2 * k * (2 * k - 1)) as f64
                        * u.powi(2 * k as i32 - 2)
                        * t.powi(m as i32);
                }
            }
            Ok(plus - minus)
        }
        _ => {
            let mut p = build_fn(n).polynomial().clone();
            for _ in 0..order {
                p = p.derivative();
            }
            let tr = BigRational::from_float(t)
                .ok_or_else(|| Error::Domain("t is not finite".into()))?;
            Ok(ratio_to_f64(&p.eval(&tr)))
        }
    }
}

/// `f_n(t)` via the integral representation
/// `(1/pi) int_0^pi ((1-t) cos x + t)^n dx`.
pub fn eval_fn_integral(n: usize, t: f64, quadrature_order: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    check_unit_interval(t)?;
    let order = quadrature_order.max(n / 2 + 1);
    let val = quad::integrate(
        |x| ((1.0 - t) * x.cos() + t).powi(n as i32),
        0.0,
        std::f64::consts::PI,
        order,
    );
    Ok(val / std::f64::consts::PI)
}

/// Default quadrature order for [`eval_fn_integral`].
pub fn default_quadrature_order(n: usize) -> usize {
    (2 * n).max(40)
}

/// `f_n` and `f_n'` by the three-term recurrences
/// `n f_n = (2n-1) t f_{n-1} - (n-1)(2t-1) f_{n-2}`, seeded by
/// `f_0 = 1, f_1 = t`. Independent of the coefficient tables; used as a
/// cross-check oracle.
pub fn eval_fn_recurrence(n: usize, t: f64) -> (f64, f64) {
    let (mut f_prev, mut f) = (1.0, t);
    let (mut d_prev, mut d) = (0.0, 1.0);
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 2..=n {
        let mf = m as f64;
        let f_next = ((2.0 * mf - 1.0) * t * f - (mf - 1.0) * (2.0 * t - 1.0) * f_prev) / mf;
        let d_next = ((2.0 * mf - 1.0) * (f + t * d)
            - (mf - 1.0) * (2.0 * f_prev + (2.0 * t - 1.0) * d_prev))
            / mf;
        f_prev = f;
        f = f_next;
        d_prev = d;
        d = d_next;
    }
    (f, d)
}

/// The uniform-case one-step map `h_k` on `[0, 1/k]`: starting from
/// `(1 - kx, x, ..., x)`, the probability that the root holds any given
/// opinion after one generation.
pub fn eval_hk(k: usize, dist: &OffspringDistribution, x: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    if !(0.0..=1.0 / k as f64 + 1e-15).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, 1/{k}]")));
    }
    let (support, _) = dist.support_truncated();
    let mut p = vec![1.0 - k as f64 * x];
    p.extend(std::iter::repeat(x).take(k));
    Ok(simplex::step_h_raw(&p, &support)[1])
}

/// The Galton-Watson mixture `f(t) = sum_n q_n f_n(t)` over the truncated
/// support. The truncation bias is at most the reported tail mass since
/// each `f_n <= 1`.
pub fn eval_f_gw(dist: &OffspringDistribution, t: f64) -> Result<f64> {
    check_unit_interval(t)?;
    let (support, tail) = dist.support_truncated();
    if tail >= dist.eps_tail() * 10.0 {
        return Err(Error::Truncation(tail));
    }
    Ok(support.iter().map(|&(n, q)| q * eval_fn(n, t).unwrap()).sum())
}

/// Closed form of the mixture for the shifted geometric law
/// `q_n = p (1-p)^(n-2)`, `n >= 2`:
/// `f(t) = p/(1-p)^2 ( -((1-p)t + 1) + (p (2 - p + 2t(p-1)))^(-1/2) )`.
pub fn geometric_f_closed(p: f64, t: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} outside (0, 1)")));
    }
    check_unit_interval(t)?;
    let radicand = p * (2.0 - p + 2.0 * t * (p - 1.0));
    if radicand <= 0.0 {
        return Err(Error::Domain(format!("radicand {radicand} not positive")));
    }
    Ok(p / ((1.0 - p) * (1.0 - p)) * (-((1.0 - p) * t + 1.0) + 1.0 / radicand.sqrt()))
}

/// Three-opinion undecided-or-tied probability: children decide each of
/// 3 opinions with probability `(1-t)/3`. A node stays undecided when
/// all three opinions tie, or exactly two tie above the third:
///
/// ```text
/// f3_n(t) = sum_{k>=0} C(n,3k) (3k)!/(k!)^3 t^(n-3k) ((1-t)/3)^(3k)
///   + 3 sum_{k>=1} C(n,2k) C(2k,k)
///       sum_{j=0}^{min(k-1, n-2k)} C(n-2k,j) t^(n-2k-j) ((1-t)/3)^(2k+j)
/// ```
pub fn eval_f3(n: usize, t: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain("n must be >= 2".into()));
    }
    check_unit_interval(t)?;
    Ok(ratio_to_f64(&eval_f3_exact(
        n,
        &BigRational::from_float(t).ok_or_else(|| Error::Domain("t not finite".into()))?,
    )))
}

/// Exact-rational form of [`eval_f3`].
pub fn eval_f3_exact(n: usize, t: &BigRational) -> BigRational {
    let u = (BigRational::one() - t) / BigRational::from_integer(BigInt::from(3));
    let pow = |base: &BigRational, e: usize| num::pow::pow(base.clone(), e);
    let mut acc = BigRational::zero();
    // all three opinions tied at k (k = 0 covers the all-undecided case)
    for k in 0..=n / 3 {
        let trinom = binomial(3 * k, k) * binomial(2 * k, k);
        let c = BigRational::from_integer(binomial(n, 3 * k) * trinom);
        acc += c * pow(t, n - 3 * k) * pow(&u, 3 * k);
    }
    // exactly two opinions tied at the top with k each, the third at j < k
    for k in 1..=n / 2 {
        let pair = BigRational::from_integer(binomial(n, 2 * k) * binomial(2 * k, k));
        let mut inner = BigRational::zero();
        for j in 0..=(k - 1).min(n - 2 * k) {
            inner += BigRational::from_integer(binomial(n - 2 * k, j))
                * pow(t, n - 2 * k - j)
                * pow(&u, 2 * k + j);
        }
        acc += BigRational::from_integer(BigInt::from(3)) * pair * inner;
    }
    acc
}

/// Outcome of the §-recurrence checks for one `n`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RecurrenceReport {
    pub n: usize,
    /// `(t-1) f_n'(t) = n (f_n(t) - f_{n-1}(t))` as an exact polynomial
    /// identity.
    pub step_identity_exact: bool,
    /// Telescoped form `f_n(t) - t = (t-1) sum_{k=2}^n f_k'(t)/k`, exact.
    pub telescoped_exact: bool,
    /// Even `n` only: residual of `f_n(xhat) = f_{n-1}(xhat)` at the
    /// minimizer `xhat` of `f_n`.
    pub argmin_residual: Option<f64>,
}

/// Verify the first-difference recurrence, its telescoped form, and (for
/// even `n`) the minimizer coincidence `f_n(xhat_n) = f_{n-1}(xhat_n)`.
/// The two polynomial identities are checked exactly; `grid` supplies
/// extra rational evaluation points double-checking the same equalities.
pub fn check_recurrences(n: usize, grid: &[BigRational]) -> Result<RecurrenceReport> {
    if n < 2 {
        return Err(Error::Domain("n must be >= 2".into()));
    }
    let fnp = build_fn(n);
    let fprev = build_fn(n - 1);
    let t_minus_1 = RationalPolynomial::new(vec![rat(-1, 1), rat(1, 1)]);
    let n_rat = BigRational::from_integer(BigInt::from(n));

    let lhs = t_minus_1.mul(&fnp.polynomial().derivative());
    let rhs = fnp.polynomial().sub(fprev.polynomial()).scale(&n_rat);
    let step_identity_exact = lhs == rhs
        && grid.iter().all(|t| lhs.eval(t) == rhs.eval(t));

    let mut tele_sum = RationalPolynomial::zero();
    for k in 2..=n {
        let inv_k = BigRational::new(BigInt::one(), BigInt::from(k));
        tele_sum = tele_sum.add(&build_fn(k).polynomial().derivative().scale(&inv_k));
    }
    let tele_lhs = fnp
        .polynomial()
        .sub(&RationalPolynomial::new(vec![BigRational::zero(), BigRational::one()]));
    let tele_rhs = t_minus_1.mul(&tele_sum);
    let telescoped_exact = tele_lhs == tele_rhs
        && grid.iter().all(|t| tele_lhs.eval(t) == tele_rhs.eval(t));

    let argmin_residual = (n % 2 == 0)
        .then(|| {
            let xhat = minimize_fn(n)?;
            Ok::<f64, Error>((eval_fn(n, xhat)? - eval_fn(n - 1, xhat)?).abs())
        })
        .transpose()?;

    Ok(RecurrenceReport { n, step_identity_exact, telescoped_exact, argmin_residual })
}

/// Minimizer of `f_n` on `(0, 1)` for even `n`: the unique zero of
/// `f_n'` (strict convexity), by bisection.
pub fn minimize_fn(n: usize) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    if eval_fn_derivative(n, 1, lo)? >= 0.0 || eval_fn_derivative(n, 1, hi)? <= 0.0 {
        return Err(Error::NoSignChange(lo, hi));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval_fn_derivative(n, 1, mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Dump exact coefficients of `f_n` for each `n` as CSV rows
/// `n, degree, num_0/den_0, ..., num_deg/den_deg`.
pub fn write_coefficients_csv<W: std::io::Write>(
    ns: &[usize],
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "n,degree,coefficients")?;
    for &n in ns {
        let p = build_fn(n);
        let cells: Vec<String> = p
            .polynomial()
            .coeffs()
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect();
        writeln!(w, "{n},{},{}", p.polynomial().degree().unwrap(), cells.join(";"))?;
    }
    Ok(())
}

#[allow(dead_code)]
fn is_nonnegative(r: &BigRational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_expansions() {
        // f_2 = (3/2)t^2 - t + 1/2, f_3 = t^3 + (3/2)t(1-t)^2
        assert_eq!(build_fn(2).polynomial().coeffs(), &[rat(1, 2), rat(-1, 1), rat(3, 2)]);
        assert_eq!(
            build_fn(3).polynomial().coeffs(),
            &[rat(0, 1), rat(3, 2), rat(-3, 1), rat(5, 2)]
        );
    }

    #[test]
    fn boundary_values_exact() {
        for n in 1..=30 {
            let p = build_fn(n);
            assert!(p.eval_exact(&rat(1, 1)).is_one(), "f_{n}(1) != 1");
            let at0 = p.eval_exact(&rat(0, 1));
            if n % 2 == 1 {
                assert!(at0.is_zero());
            } else {
                let expect = BigRational::new(binomial(n, n / 2), BigInt::one() << n);
                assert_eq!(at0, expect);
            }
        }
    }

    #[test]
    fn value_at_half_is_central_binomial() {
        for n in 2..=10 {
            let got = build_fn(n).eval_exact(&rat(1, 2));
            let expect = BigRational::new(binomial(2 * n, n), BigInt::one() << (2 * n));
            assert_eq!(got, expect, "f_{n}(1/2)");
        }
        assert_eq!(build_fn(2).eval_exact(&rat(1, 2)), rat(3, 8));
    }

    #[test]
    fn derivative_endpoint_values() {
        for n in 2..=20 {
            assert!((eval_fn_derivative(n, 1, 1.0).unwrap() - n as f64).abs() < 1e-11);
        }
        assert!((eval_fn_derivative(3, 1, 0.0).unwrap() - 1.5).abs() < 1e-15);
        // f_n'(0) = n 2^(1-n) C(n-1, (n-1)/2) for odd n
        for n in [5usize, 7, 9] {
            let expect =
                n as f64 * binomial_f64(n - 1, (n - 1) / 2) / 2f64.powi(n as i32 - 1);
            assert!((eval_fn_derivative(n, 1, 0.0).unwrap() - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn float_eval_matches_exact_to_machine_precision() {
        for n in [2usize, 7, 20, 50, 151, 348] {
            for t in [0.0, 0.001, 0.17, 0.5, 0.83, 1.0] {
                let exact = ratio_to_f64(
                    &build_fn(n).eval_exact(&BigRational::from_float(t).unwrap()),
                );
                let got = eval_fn(n, t).unwrap();
                assert!(
                    (got - exact).abs() <= 5e-13 * exact.max(1e-3),
                    "n={n} t={t}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn recurrence_oracle_agrees() {
        for n in [2usize, 5, 26, 101, 348] {
            for t in [0.01, 0.2, 0.5, 0.9] {
                let (f, d) = eval_fn_recurrence(n, t);
                assert!((f - eval_fn(n, t).unwrap()).abs() < 1e-11, "f_{n}({t})");
                assert!(
                    (d - eval_fn_derivative(n, 1, t).unwrap()).abs() < 1e-9 * n as f64,
                    "f_{n}'({t})"
                );
            }
        }
    }

    #[test]
    fn integral_representation_agrees() {
        assert!(eval_fn_integral(3, 0.0, 40).unwrap().abs() < 1e-14);
        assert!((eval_fn_integral(2, 1.0, 40).unwrap() - 1.0).abs() < 1e-14);
        assert!(
            (eval_fn_integral(4, 0.3, 40).unwrap() - eval_fn(4, 0.3).unwrap()).abs() < 1e-12
        );
        for n in [10usize, 33, 50] {
            let order = default_quadrature_order(n);
            for i in 0..=20 {
                let t = i as f64 / 20.0;
                let a = eval_fn_integral(n, t, order).unwrap();
                let b = eval_fn(n, t).unwrap();
                assert!((a - b).abs() < 1e-10, "n={n} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn hk_special_cases() {
        let binary = OffspringDistribution::nary(2).unwrap();
        // h_1(x) = 1 - G(1-x) = 2x - x^2
        for x in [0.0, 0.3, 0.7, 1.0] {
            let got = eval_hk(1, &binary, x).unwrap();
            assert!((got - (2.0 * x - x * x)).abs() < 1e-15);
        }
        let ternary = OffspringDistribution::nary(3).unwrap();
        // 1 - 2 h_2((1-t)/2) = f_n(t)
        let x = 0.35;
        let lhs = 1.0 - 2.0 * eval_hk(2, &ternary, x).unwrap();
        assert!((lhs - eval_fn(3, 0.3).unwrap()).abs() < 1e-14);
        for dist in [binary, ternary] {
            for k in 1..=5 {
                assert_eq!(eval_hk(k, &dist, 0.0).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn gw_mixture_values() {
        let d5 = OffspringDistribution::nary(5).unwrap();
        assert_eq!(eval_f_gw(&d5, 0.37).unwrap(), eval_fn(5, 0.37).unwrap());
        let geom = OffspringDistribution::shifted_geometric(0.5).unwrap();
        assert!((eval_f_gw(&geom, 1.0).unwrap() - 1.0).abs() < 1e-12);
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let series = eval_f_gw(&geom, t).unwrap();
            let closed = geometric_f_closed(0.5, t).unwrap();
            assert!((series - closed).abs() < 1e-10, "t={t}: {series} vs {closed}");
        }
    }

    #[test]
    fn geometric_closed_form_endpoint() {
        assert!((geometric_f_closed(0.5, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let alpha = 0.2807764064044151; // (-3p + sqrt(p(p+8)))/(4(1-p)) at p = 1/2
        assert!((geometric_f_closed(0.5, alpha).unwrap() - alpha).abs() < 1e-12);
        assert!(geometric_f_closed(0.0, 0.5).is_err());
    }

    #[test]
    fn f3_small_cases() {
        assert!((eval_f3(2, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(eval_f3_exact(2, &rat(0, 1)), rat(2, 3));
        assert_eq!(eval_f3_exact(3, &rat(0, 1)), rat(2, 9));
    }

    /// Independent oracle: enumerate all 4^n child assignments with
    /// probabilities (t, (1-t)/3, (1-t)/3, (1-t)/3) and score a child
    /// profile as "parent undecided" when no strict plurality exists.
    fn f3_brute(n: usize, t: &BigRational) -> BigRational {
        let u = (BigRational::one() - t) / BigRational::from_integer(BigInt::from(3));
        let probs = [t.clone(), u.clone(), u.clone(), u];
        let mut acc = BigRational::zero();
        for mut code in 0..4usize.pow(n as u32) {
            let mut tally = [0usize; 4];
            let mut prob = BigRational::one();
            for _ in 0..n {
                let c = code % 4;
                code /= 4;
                tally[c] += 1;
                prob *= &probs[c];
            }
            let top = *tally[1..].iter().max().unwrap();
            let undecided =
                top == 0 || tally[1..].iter().filter(|&&c| c == top).count() >= 2;
            if undecided {
                acc += prob;
            }
        }
        acc
    }

    #[test]
    fn f3_matches_brute_force() {
        for n in 2..=6 {
            for t in [rat(0, 1), rat(1, 4), rat(2, 3), rat(1, 1)] {
                assert_eq!(eval_f3_exact(n, &t), f3_brute(n, &t), "n={n} t={t}");
            }
        }
    }

    #[test]
    fn recurrence_reports_pass() {
        let grid = [rat(1, 2), rat(1, 7), rat(3, 4), rat(1, 1)];
        for n in 2..=12 {
            let r = check_recurrences(n, &grid).unwrap();
            assert!(r.step_identity_exact, "step identity fails at n={n}");
            assert!(r.telescoped_exact, "telescoped identity fails at n={n}");
            if let Some(res) = r.argmin_residual {
                assert!(res < 1e-10, "argmin residual {res} at n={n}");
            }
        }
    }

    #[test]
    fn higher_derivatives_positive_where_convex() {
        // f'' > 0 on [0,1] for even n; f''' > 0 on (0,1) for odd n >= 3
        for n in [4usize, 10, 26] {
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                assert!(eval_fn_derivative(n, 2, t).unwrap() > 0.0, "n={n} t={t}");
            }
        }
        for n in [3usize, 9, 25] {
            for i in 1..10 {
                let t = i as f64 / 10.0;
                assert!(eval_fn_derivative(n, 3, t).unwrap() > 0.0, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn even_lower_bound_dlp() {
        // f_n(t) >= 1/sqrt(2 pi (n+1)) for even n
        for n in [2usize, 8, 20, 50] {
            let floor = 1.0 / (2.0 * std::f64::consts::PI * (n as f64 + 1.0)).sqrt();
            for i in 0..=50 {
                let t = i as f64 / 50.0;
                assert!(eval_fn(n, t).unwrap() >= floor, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn coefficients_csv_shape() {
        let mut buf = Vec::new();
        write_coefficients_csv(&[2, 3], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,degree,coefficients");
        assert_eq!(lines[1], "2,2,1/2;-1/1;3/2");
    }

    proptest! {
        #[test]
        fn fn_in_unit_interval_and_monotone_for_odd(n in 1usize..25, i in 0usize..100) {
            let n = 2 * n + 1;
            let t = i as f64 / 100.0;
            let v = eval_fn(n, t).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            let w = eval_fn(n, t + 0.01).unwrap();
            prop_assert!(w > v - 1e-15);
        }

        #[test]
        fn odd_mixture_monotone(t in 0.0f64..0.99) {
            let dist = OffspringDistribution::explicit(&[(3, 0.5), (5, 0.5)]).unwrap();
            let a = eval_f_gw(&dist, t).unwrap();
            let b = eval_f_gw(&dist, t + 0.01).unwrap();
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b >= a);
        }
    }
}
