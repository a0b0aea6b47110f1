//! Central-binomial and Wallis estimates, the fixed-point envelope, the
//! large-`n` derivative-sign threshold, and the exact identity suite.
//!
//! Notation: `xi_{2n} = 2^(-2n) C(2n, n)` and `W_n` is the Wallis
//! integral `int_0^(pi/2) sin^n t dt`. Wallis values are carried as
//! `coeff * pi^e` with an exact rational `coeff`, so the recurrence
//! relations can be checked without rounding.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use serde::Serialize;

use crate::ratpoly::{binomial, rat, ratio_to_f64};
use crate::{poly, Error, Result};

/// `xi_{2n}` as an exact rational.
pub fn xi_exact(n: usize) -> BigRational {
    BigRational::new(binomial(2 * n, n), BigInt::one() << (2 * n))
}

/// `xi_{2n}` in floats by the cancellation-free recurrence
/// `xi_{2(n+1)} = xi_{2n} (2n+1)/(2n+2)`.
pub fn xi_f64(n: usize) -> f64 {
    let mut x = 1.0;
    for m in 0..n {
        x *= (2 * m + 1) as f64 / (2 * m + 2) as f64;
    }
    x
}

/// An exact multiple of a power of pi.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WallisValue {
    #[serde(serialize_with = "rational_as_fraction")]
    pub coeff: BigRational,
    pub pi_power: i32,
}

fn rational_as_fraction<S: serde::Serializer>(
    r: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl WallisValue {
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.coeff) * std::f64::consts::PI.powi(self.pi_power)
    }
}

/// `W_n` via `(n+2) W_{n+2} = (n+1) W_n`, `W_0 = pi/2`, `W_1 = 1`.
pub fn wallis(n: usize) -> WallisValue {
    let (mut coeff, pi_power) = if n % 2 == 0 {
        (rat(1, 2), 1)
    } else {
        (BigRational::one(), 0)
    };
    let mut m = n % 2;
    while m < n {
        // W_{m+2} = (m+1)/(m+2) W_m
        coeff *= rat(m as i64 + 1, m as i64 + 2);
        m += 2;
    }
    WallisValue { coeff, pi_power }
}

/// One inequality check with its margin (`rhs - lhs` for `lhs < rhs`).
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: bool,
}

fn strict(name: &str, n: usize, lhs: f64, rhs: f64) -> BoundCheck {
    BoundCheck {
        name: name.to_string(),
        n,
        lhs,
        rhs,
        margin: rhs - lhs,
        verdict: lhs < rhs,
    }
}

/// The xi/Wallis inequalities for one `n >= 1`:
/// `2/sqrt(2 pi (2n+1)) < xi_{2n} < 1/sqrt(pi n)`,
/// `xi_{4n} < e^(1/(4n)) xi_{2n} / sqrt 2`, and
/// `sqrt(pi/(2(n+1))) < W_n < sqrt(pi/(2n))`.
pub fn check_xi_bounds(n: usize) -> Result<Vec<BoundCheck>> {
    if n < 1 {
        return Err(Error::Domain("bounds hold for n >= 1".into()));
    }
    use std::f64::consts::PI;
    let xi2n = xi_f64(n);
    let wn = wallis(n).to_f64();
    Ok(vec![
        strict("nass1_lower", n, 2.0 / (2.0 * PI * (2 * n + 1) as f64).sqrt(), xi2n),
        strict("nass1_upper", n, xi2n, 1.0 / (PI * n as f64).sqrt()),
        strict(
            "nass2",
            n,
            xi_f64(2 * n),
            (1.0 / (4 * n) as f64).exp() * xi2n / 2f64.sqrt(),
        ),
        strict("easystuff_lower", n, (PI / (2 * (n + 1)) as f64).sqrt(), wn),
        strict("easystuff_upper", n, wn, (PI / (2 * n) as f64).sqrt()),
    ])
}

/// Envelope of the fixed point: `alpha_n <= xi_{n#} <= sqrt(2/(pi(n-1)))`
/// with `n# = 2 floor(n/2)` (hard, `n >= 3`), and `xi_{4n} <= alpha_n`
/// (holds from `n >= 536`; below that it is recorded as an observation
/// only, and it does fail for small `n`).
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeReport {
    pub n: usize,
    pub alpha: f64,
    pub xi_nsharp: f64,
    pub upper_cap: f64,
    pub xi_4n: f64,
    pub upper_ok: bool,
    pub cap_ok: bool,
    pub lower_ok: bool,
    pub lower_proven: bool,
}

pub fn check_alpha_envelope(n: usize, alpha: f64) -> Result<EnvelopeReport> {
    if n < 3 {
        return Err(Error::Domain("envelope stated for n >= 3".into()));
    }
    let xi_nsharp = xi_f64(n / 2);
    let upper_cap = (2.0 / (std::f64::consts::PI * (n - 1) as f64)).sqrt();
    let xi_4n = xi_f64(2 * n);
    Ok(EnvelopeReport {
        n,
        alpha,
        xi_nsharp,
        upper_cap,
        xi_4n,
        upper_ok: alpha <= xi_nsharp,
        cap_ok: xi_nsharp <= upper_cap,
        lower_ok: xi_4n <= alpha,
        lower_proven: n >= 536,
    })
}

/// The threshold sequence controlling the sign of `f_n'` near
/// `zeta_n = 1/sqrt(2 pi (n+1))`: `f_n'(zeta_n) > 0` whenever
/// `1/4 - w_n > 0`, with
///
/// ```text
/// w_n = (sqrt(n-1)/(2 sqrt(2 pi))) e^(-(n-1)/2)
///     + (1/(2 sqrt(2 pi))) e^(-(n-1)/2)
///     + 1/(n-1)
///     + (n-1) e^(-(n-1)/sqrt(2 pi (n+1)))
/// ```
#[derive(Debug, Clone, Serialize)]
pub struct DpaReport {
    pub n: usize,
    pub w_n: f64,
    pub quarter_minus_w: f64,
    pub zeta: f64,
    pub f_prime_at_zeta: f64,
}

pub fn check_dpa_threshold(n: usize) -> Result<DpaReport> {
    if n % 2 != 0 || n < 4 {
        return Err(Error::Domain("threshold stated for even n >= 4".into()));
    }
    use std::f64::consts::PI;
    let m = (n - 1) as f64;
    let w_n = (m.sqrt() + 1.0) / (2.0 * (2.0 * PI).sqrt()) * (-m / 2.0).exp()
        + 1.0 / m
        + m * (-m / (2.0 * PI * (n + 1) as f64).sqrt()).exp();
    let zeta = 1.0 / (2.0 * PI * (n + 1) as f64).sqrt();
    Ok(DpaReport {
        n,
        w_n,
        quarter_minus_w: 0.25 - w_n,
        zeta,
        f_prime_at_zeta: poly::eval_fn_derivative(n, 1, zeta)?,
    })
}

/// Exact verification of the binomial identities; any mismatch is an
/// error (it would indicate a coefficient bug, not a numerical issue).
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub n_max: usize,
    pub ell_max: usize,
    pub checks: usize,
}

pub fn identity_suite(n_max: usize, ell_max: usize) -> Result<IdentityReport> {
    let mut checks = 0;
    let fail = |what: String| Error::Solver(format!("identity violated: {what}"));
    let big = |v: i64| BigRational::from_integer(BigInt::from(v));

    for n in 0..=n_max {
        // sum 2k C(n,2k) = sum (2k+1) C(n,2k+1) = n 2^(n-2), n != 1
        if n != 1 {
            let even: BigInt = (0..=n / 2).map(|k| BigInt::from(2 * k) * binomial(n, 2 * k)).sum();
            let odd: BigInt = (0..=n.div_ceil(2))
                .filter(|&k| 2 * k + 1 <= n)
                .map(|k| BigInt::from(2 * k + 1) * binomial(n, 2 * k + 1))
                .sum();
            let target = if n >= 2 {
                BigRational::from_integer(BigInt::from(n)) * BigRational::new(BigInt::one() << n, BigInt::from(4))
            } else {
                BigRational::zero()
            };
            if BigRational::from_integer(even.clone()) != target
                || BigRational::from_integer(odd) != target
            {
                return Err(fail(format!("weighted binomial sums at n={n}")));
            }
            checks += 1;
        }

        // sum_j C(n,2j) C(2j,j) 2^(-2j) = 2^(-n) C(2n,n)
        let lhs: BigRational = (0..=n / 2)
            .map(|j| BigRational::new(binomial(n, 2 * j) * binomial(2 * j, j), BigInt::one() << (2 * j)))
            .sum();
        if lhs != BigRational::new(binomial(2 * n, n), BigInt::one() << n) {
            return Err(fail(format!("central binomial sum at n={n}")));
        }
        checks += 1;

        // falling-factorial generalization, l >= 1, n >= l:
        // sum_j (j)_l C(n,2j) C(2j,j) 2^(-2j)
        //   = 2^(-n) C(2(n-l), n-l) (n-l)_l
        for l in 1..=ell_max.min(n) {
            let falling = |top: i64, len: usize| -> BigRational {
                (0..len as i64).map(|i| big(top - i)).product()
            };
            let lhs: BigRational = (0..=n / 2)
                .map(|j| {
                    falling(j as i64, l)
                        * BigRational::new(
                            binomial(n, 2 * j) * binomial(2 * j, j),
                            BigInt::one() << (2 * j),
                        )
                })
                .sum();
            let rhs = if n >= 2 * l {
                BigRational::new(binomial(2 * (n - l), n - l), BigInt::one() << n)
                    * falling((n - l) as i64, l)
            } else {
                BigRational::zero()
            };
            if lhs != rhs {
                return Err(fail(format!("falling-factorial sum at n={n}, l={l}")));
            }
            checks += 1;
        }

        // sum_k C(n,2k) x^(2k) y^(n-2k) = ((x+y)^n + (y-x)^n)/2 at
        // deterministic pseudo-random rational points
        let mut state = 0x2545f4914f6cdd1du64.wrapping_mul(n as u64 + 1);
        let mut small = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 19) as i64 - 9
        };
        for _ in 0..3 {
            let (x, y) = (rat(small(), 7), rat(small(), 5));
            let lhs: BigRational = (0..=n / 2)
                .map(|k| {
                    BigRational::from_integer(binomial(n, 2 * k))
                        * num::pow::pow(x.clone(), 2 * k)
                        * num::pow::pow(y.clone(), n - 2 * k)
                })
                .sum();
            let rhs = (num::pow::pow(&x + &y, n) + num::pow::pow(&y - &x, n)) / big(2);
            if lhs != rhs {
                return Err(fail(format!("even-part binomial expansion at n={n}")));
            }
            checks += 1;
        }
    }
    Ok(IdentityReport { n_max, ell_max, checks })
}

/// The weighted-mean comparison: for positive `mu`, `nu` with `nu/mu`
/// increasing, a monotone `alpha` satisfies
/// `(sum a m)/(sum m) >= (sum a v)/(sum v)` over `k = ell..=n` when
/// `alpha` decreases, with the reversed inequality when it increases.
/// Returns whether the matching inequality holds; precondition
/// violations are errors.
pub fn weighted_mean_inequality(
    mu: &[BigRational],
    nu: &[BigRational],
    alpha: &[BigRational],
    ell: usize,
    n: usize,
) -> Result<bool> {
    if mu.len() != nu.len() || mu.len() != alpha.len() || n >= mu.len() || ell > n {
        return Err(Error::Domain("sequence lengths and range are inconsistent".into()));
    }
    if mu.iter().any(|x| !x.is_positive()) || nu.iter().any(|x| !x.is_positive()) {
        return Err(Error::Domain("mu and nu must be positive".into()));
    }
    let ratio_increasing = mu
        .windows(2)
        .zip(nu.windows(2))
        .all(|(m, v)| &v[1] * &m[0] >= &v[0] * &m[1]);
    if !ratio_increasing {
        return Err(Error::Domain("nu/mu must be increasing".into()));
    }
    let decreasing = alpha.windows(2).all(|w| w[1] <= w[0]);
    let increasing = alpha.windows(2).all(|w| w[1] >= w[0]);
    if !decreasing && !increasing {
        return Err(Error::Domain("alpha must be monotone".into()));
    }
    let dot = |a: &[BigRational], b: Option<&[BigRational]>| -> BigRational {
        (ell..=n)
            .map(|k| b.map_or_else(|| a[k].clone(), |b| &a[k] * &b[k]))
            .sum()
    };
    // cross-multiplied form of (sum a m)/(sum m) vs (sum a v)/(sum v)
    let lhs = dot(alpha, Some(mu)) * dot(nu, None);
    let rhs = dot(alpha, Some(nu)) * dot(mu, None);
    Ok(if decreasing { lhs >= rhs } else { lhs <= rhs })
}
