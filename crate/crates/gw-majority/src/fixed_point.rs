//! Fixed points of the uniform-case maps and basin-of-attraction
//! certificates.
//!
//! For each arity `n` the polynomial `f_n` has a unique fixed point
//! `alpha_n` in `(0, 1)` with `alpha_n < 1/2`. Even `n` additionally get
//! the minimizer `xhat_n` of `f_n` and, when they exist, the preimages
//! `a_n < alpha_n < xhat_n < b_n` of `xhat_n`, which feed the contraction
//! certificate.

use serde::Serialize;

use crate::offspring::{OffspringDistribution, SupportParity};
use crate::poly;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    LinearlyAttracting,
    NeutralSuspect,
    Repelling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BasinCertificate {
    /// `f' > 0` on the whole verification grid (odd case): the basin of
    /// the unique fixed point is `(0, 1)`.
    MonotoneIncreasing,
    /// `f` convex with `f'(alpha) >= 0`: basin `[0, 1)`.
    DerivPositiveAtAlpha,
    /// Preimages of the minimizer exist and
    /// `max(|f'(a)|, |f'(b)|) < 1`: basin `[0, 1)`.
    MinMaxContraction,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointReport {
    /// Which map was analyzed, in the CLI distribution grammar
    /// (`nary:3`, `geom:0.5`, ...).
    pub source: String,
    pub alpha: f64,
    pub derivative_at_alpha: f64,
    pub classification: Classification,
    pub xhat: Option<f64>,
    pub f_at_xhat: Option<f64>,
    pub a_point: Option<f64>,
    pub b_point: Option<f64>,
    /// `a = b = xhat` collapse (happens at n = 2).
    pub degenerate_preimages: bool,
    pub basin_certificate: BasinCertificate,
    /// Sign changes of `f(t) - t` found on the interior scan grid.
    pub sign_changes_found: usize,
    /// Set for mixed-parity offspring support, where uniqueness and full
    /// attractivity are not established.
    pub exploratory: bool,
}

const RESIDUAL_TOL: f64 = 1e-13;
const NEUTRAL_BAND: f64 = 1e-9;

/// Root of `f(t) = t` inside `bracket`: bisection to width 1e-6, then
/// Newton safeguarded by the shrinking bracket.
pub fn find_alpha<F, D>(f: F, df: D, bracket: (f64, f64)) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let g = |t: f64| f(t) - t;
    let (mut lo, mut hi) = bracket;
    let (mut glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoSignChange(lo, hi));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..60 {
        let gt = g(t);
        if gt == 0.0 {
            break;
        }
        if gt.signum() == glo.signum() {
            lo = t;
        } else {
            hi = t;
        }
        let slope = df(t) - 1.0;
        let newton = t - gt / slope;
        t = if slope != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-16 {
            break;
        }
    }
    let residual = g(t).abs();
    if residual > RESIDUAL_TOL {
        return Err(Error::Solver(format!("residual {residual:.3e} at t = {t}")));
    }
    Ok(t)
}

/// Attractivity from the derivative at a verified fixed point, with a
/// diagnostic band of width 1e-9 around `|f'| = 1`.
pub fn classify(derivative_at_alpha: f64) -> Classification {
    let d = derivative_at_alpha.abs();
    if d < 1.0 - NEUTRAL_BAND {
        Classification::LinearlyAttracting
    } else if d > 1.0 + NEUTRAL_BAND {
        Classification::Repelling
    } else {
        Classification::NeutralSuspect
    }
}

/// Minimizer of `f_n` over `(0, 1)` (even `n`).
pub fn find_xhat(n: usize) -> Result<f64> {
    if n % 2 != 0 {
        return Err(Error::Domain(format!("n = {n} is odd; f_n has no interior minimum")));
    }
    poly::minimize_fn(n)
}

/// Preimages `(a, b, degenerate)` of `xhat_n` under `f_n`, when they
/// exist. Since `f_n` decreases to its minimum at `xhat` and then
/// increases to 1, `a` exists iff `f_n(0) >= xhat` and `b` always pairs
/// with it. At `n = 2` the preimage equation has the double root
/// `a = b = xhat`.
pub fn find_preimages(n: usize) -> Result<Option<(f64, f64, bool)>> {
    let xhat = find_xhat(n)?;
    let f_min = poly::eval_fn(n, xhat)?;
    if (f_min - xhat).abs() < 1e-9 {
        return Ok(Some((xhat, xhat, true)));
    }
    if f_min > xhat || poly::eval_fn(n, 0.0)? < xhat {
        return Ok(None);
    }
    let root = |mut lo: f64, mut hi: f64| -> f64 {
        // sign change of f_n(t) - xhat guaranteed by the checks above
        let s = (poly::eval_fn(n, lo).unwrap() - xhat).signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (poly::eval_fn(n, mid).unwrap() - xhat).signum() == s {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(Some((root(0.0, xhat), root(xhat, 1.0), false)))
}

/// Scan `g(t) = f(t) - t` on an interior grid and report the sign-change
/// brackets (the fixed points are interior to them).
pub fn scan_sign_changes<F: Fn(f64) -> f64>(f: F, points: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut prev_t = 1.0 / (points as f64 + 1.0);
    let mut prev = f(prev_t) - prev_t;
    for i in 2..=points {
        let t = i as f64 / (points as f64 + 1.0);
        let cur = f(t) - t;
        if prev.signum() != cur.signum() && prev != 0.0 {
            out.push((prev_t, t));
        }
        prev_t = t;
        prev = cur;
    }
    out
}

fn certificate<D, D2>(
    df: D,
    d2f: D2,
    alpha: f64,
    preimages: Option<(f64, f64)>,
) -> BasinCertificate
where
    D: Fn(f64) -> f64,
    D2: Fn(f64) -> f64,
{
    let grid = |i: usize| i as f64 / 100.0;
    if (0..=100).all(|i| df(grid(i)) > 0.0) {
        return BasinCertificate::MonotoneIncreasing;
    }
    let convex = (0..=100).all(|i| d2f(grid(i)) > -1e-9);
    if convex && df(alpha) >= -1e-12 {
        return BasinCertificate::DerivPositiveAtAlpha;
    }
    if let Some((a, b)) = preimages {
        if df(a).abs().max(df(b).abs()) < 1.0 {
            return BasinCertificate::MinMaxContraction;
        }
    }
    BasinCertificate::None
}

/// Full fixed-point analysis of `f_n`.
pub fn report_for_n(n: usize) -> Result<FixedPointReport> {
    let f = |t: f64| poly::eval_fn(n, t).unwrap();
    let df = |t: f64| poly::eval_fn_derivative(n, 1, t).unwrap();
    let alpha = find_alpha(f, df, (1e-6, 0.6))?;
    let derivative_at_alpha = df(alpha);
    let (xhat, f_at_xhat, pre) = if n % 2 == 0 {
        let x = find_xhat(n)?;
        (Some(x), Some(poly::eval_fn(n, x)?), find_preimages(n)?)
    } else {
        (None, None, None)
    };
    let (a_point, b_point, degenerate) = match pre {
        Some((a, b, d)) => (Some(a), Some(b), d),
        None => (None, None, false),
    };
    let d2f = |t: f64| poly::eval_fn_derivative(n, 2, t).unwrap();
    let pre_nondeg = (!degenerate).then_some(()).and(a_point.zip(b_point));
    let basin = certificate(df, d2f, alpha, pre_nondeg);
    Ok(FixedPointReport {
        source: format!("nary:{n}"),
        alpha,
        derivative_at_alpha,
        classification: classify(derivative_at_alpha),
        xhat,
        f_at_xhat,
        a_point,
        b_point,
        degenerate_preimages: degenerate,
        basin_certificate: basin,
        sign_changes_found: scan_sign_changes(f, 10_000).len(),
        exploratory: false,
    })
}

/// Fixed-point analysis of the Galton-Watson mixture `f = sum q_n f_n`.
/// For mixed-parity support the smallest fixed point is reported and the
/// run is labelled exploratory (uniqueness is not asserted).
pub fn report_for_dist(dist: &OffspringDistribution) -> Result<FixedPointReport> {
    let (support, _) = dist.support_truncated();
    let f = |t: f64| poly::eval_f_gw(dist, t).unwrap();
    let df = move |t: f64| {
        support
            .iter()
            .map(|&(n, q)| q * poly::eval_fn_derivative(n, 1, t).unwrap())
            .sum::<f64>()
    };
    let brackets = scan_sign_changes(&f, 10_000);
    let (lo, hi) = *brackets
        .first()
        .ok_or_else(|| Error::NoSignChange(0.0, 1.0))?;
    let alpha = find_alpha(&f, &df, (lo, hi))?;
    let derivative_at_alpha = df(alpha);
    // convexity probed by a symmetric second difference of f'
    let d2f = |t: f64| {
        let h = 1e-5;
        let (a, b) = (t - h, t + h);
        let (a, b) = (a.max(0.0), b.min(1.0));
        (df(b) - df(a)) / (b - a)
    };
    let basin = certificate(&df, d2f, alpha, None);
    let exploratory = dist.support_parity() == SupportParity::Mixed;
    Ok(FixedPointReport {
        source: dist.to_string(),
        alpha,
        derivative_at_alpha,
        classification: classify(derivative_at_alpha),
        xhat: None,
        f_at_xhat: None,
        a_point: None,
        b_point: None,
        degenerate_preimages: false,
        basin_certificate: basin,
        sign_changes_found: brackets.len(),
        exploratory,
    })
}

/// Closed-form fixed point of the shifted-geometric mixture.
pub fn geometric_alpha_closed(p: f64) -> Result<f64> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} outside (0, 1)")));
    }
    Ok((-3.0 * p + (p * (p + 8.0)).sqrt()) / (4.0 * (1.0 - p)))
}

/// One row of the even-arity summary table.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub xhat: f64,
    pub f_at_xhat: f64,
    pub alpha: f64,
    pub deriv_alpha: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub deriv_a: Option<f64>,
    pub deriv_b: Option<f64>,
}

/// Rows for each even `n` in `ns` (odd values are rejected).
pub fn table_rows(ns: &[usize]) -> Result<Vec<TableRow>> {
    if let Some(&bad) = ns.iter().find(|&&n| n % 2 != 0 || n < 2) {
        return Err(Error::Domain(format!("table rows need even n >= 2, got {bad}")));
    }
    let row = |&n: &usize| -> Result<TableRow> {
        let r = report_for_n(n)?;
        let df = |t: f64| poly::eval_fn_derivative(n, 1, t).unwrap();
        Ok(TableRow {
            n,
            xhat: r.xhat.unwrap(),
            f_at_xhat: r.f_at_xhat.unwrap(),
            alpha: r.alpha,
            deriv_alpha: r.derivative_at_alpha,
            a: r.a_point,
            b: r.b_point,
            deriv_a: r.a_point.map(df),
            deriv_b: r.b_point.map(df),
        })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ns.par_iter().map(row).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ns.iter().map(row).collect()
    }
}

/// CSV with the paper-table column layout; absent cells stay empty.
pub fn write_table_csv<W: std::io::Write>(rows: &[TableRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,xhat,f_at_xhat,alpha,deriv_alpha,a,b,deriv_a,deriv_b")?;
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
    for r in rows {
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{}",
            r.n,
            r.xhat,
            r.f_at_xhat,
            r.alpha,
            r.deriv_alpha,
            cell(r.a),
            cell(r.b),
            cell(r.deriv_a),
            cell(r.deriv_b),
        )?;
    }
    Ok(())
}
