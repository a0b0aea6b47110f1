//! Offspring laws for the Galton-Watson tree.
//!
//! All laws satisfy the Boettcher condition `q_0 = q_1 = 0`, so every node
//! has at least two children and the generating function obeys
//! `G(0) = G'(0) = 0` and `G'(1) = E[N] >= 2`.

use crate::{Error, Result};

const DEFAULT_EPS_TAIL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// Deterministic arity: `q_n = 1`.
    NAry(usize),
    /// `q_n = p (1-p)^(n-2)` for `n >= 2` (one plus a geometric count).
    ShiftedGeometric(f64),
    /// Finite explicit pmf, pairs `(n, q_n)` with `n >= 2`.
    Explicit(Vec<(usize, f64)>),
}

/// Reproduction law of the tree, with a truncation policy for
/// infinite-support laws.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringDistribution {
    kind: Kind,
    eps_tail: f64,
}

/// Parity classification of the (truncated) support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SupportParity {
    AllOdd,
    AllEven,
    Mixed,
}

impl OffspringDistribution {
    pub fn nary(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDistribution(format!(
                "arity {n} violates q_0 = q_1 = 0"
            )));
        }
        Ok(Self { kind: Kind::NAry(n), eps_tail: DEFAULT_EPS_TAIL })
    }

    pub fn shifted_geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "geometric parameter {p} outside (0,1)"
            )));
        }
        Ok(Self { kind: Kind::ShiftedGeometric(p), eps_tail: DEFAULT_EPS_TAIL })
    }

    pub fn explicit(pmf: &[(usize, f64)]) -> Result<Self> {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        let mut total = 0.0;
        for &(n, q) in pmf {
            if q == 0.0 {
                continue;
            }
            if n < 2 {
                return Err(Error::InvalidDistribution(format!(
                    "q_{n} > 0 violates q_0 = q_1 = 0"
                )));
            }
            if q < 0.0 {
                return Err(Error::InvalidDistribution(format!("q_{n} = {q} < 0")));
            }
            if entries.iter().any(|&(m, _)| m == n) {
                return Err(Error::InvalidDistribution(format!("duplicate entry for n = {n}")));
            }
            entries.push((n, q));
            total += q;
        }
        if entries.is_empty() || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "pmf sums to {total}, expected 1"
            )));
        }
        entries.sort_by_key(|&(n, _)| n);
        Ok(Self { kind: Kind::Explicit(entries), eps_tail: DEFAULT_EPS_TAIL })
    }

    /// Parse a distribution spec: `nary:5`, `geom:0.25`, `pmf:2=0.3,3=0.7`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (head, body) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in distribution spec '{spec}'")))?;
        match head {
            "nary" => {
                let n: usize = body
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad arity '{body}'")))?;
                Self::nary(n)
            }
            "geom" => {
                let p: f64 = body
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad parameter '{body}'")))?;
                Self::shifted_geometric(p)
            }
            "pmf" => {
                let mut pairs = Vec::new();
                for item in body.split(',') {
                    let (n, q) = item.split_once('=').ok_or_else(|| {
                        Error::Parse(format!("bad pmf entry '{item}', expected n=q"))
                    })?;
                    let n: usize =
                        n.parse().map_err(|_| Error::Parse(format!("bad index '{n}'")))?;
                    let q: f64 =
                        q.parse().map_err(|_| Error::Parse(format!("bad mass '{q}'")))?;
                    pairs.push((n, q));
                }
                Self::explicit(&pairs)
            }
            other => Err(Error::Parse(format!("unknown distribution kind '{other}'"))),
        }
    }

    pub fn with_eps_tail(mut self, eps_tail: f64) -> Self {
        self.eps_tail = eps_tail;
        self
    }

    pub fn eps_tail(&self) -> f64 {
        self.eps_tail
    }

    /// Probability mass `q_n`.
    pub fn q(&self, n: usize) -> f64 {
        match &self.kind {
            Kind::NAry(m) => {
                if n == *m {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::ShiftedGeometric(p) => {
                if n >= 2 {
                    p * (1.0 - p).powi(n as i32 - 2)
                } else {
                    0.0
                }
            }
            Kind::Explicit(pmf) => {
                pmf.iter().find(|&&(m, _)| m == n).map_or(0.0, |&(_, q)| q)
            }
        }
    }

    /// Smallest `n` with `q_n > 0`.
    pub fn min_support(&self) -> usize {
        match &self.kind {
            Kind::NAry(n) => *n,
            Kind::ShiftedGeometric(_) => 2,
            Kind::Explicit(pmf) => pmf[0].0,
        }
    }

    /// Truncated support `(n, q_n)` together with the residual tail mass
    /// `sum_{n > N*} q_n`, which is below the configured tail budget.
    pub fn support_truncated(&self) -> (Vec<(usize, f64)>, f64) {
        match &self.kind {
            Kind::NAry(n) => (vec![(*n, 1.0)], 0.0),
            Kind::ShiftedGeometric(p) => {
                let mut out = Vec::new();
                let mut n = 2usize;
                // tail mass after retaining up to n is (1-p)^(n-1)
                loop {
                    out.push((n, self.q(n)));
                    let tail = (1.0 - p).powi(n as i32 - 1);
                    if tail < self.eps_tail {
                        return (out, tail);
                    }
                    n += 1;
                }
            }
            Kind::Explicit(pmf) => (pmf.clone(), 0.0),
        }
    }

    /// Generating function `G(s) = E[s^N]` on `[0, 1]`.
    pub fn g(&self, s: f64) -> f64 {
        self.g_derivative(0, s)
    }

    /// `k`-th derivative of `G` at `s`, i.e. the truncated series
    /// `sum q_n n(n-1)...(n-k+1) s^(n-k)`; closed forms are used where the
    /// law admits one.
    pub fn g_derivative(&self, order: usize, s: f64) -> f64 {
        match &self.kind {
            Kind::NAry(n) => {
                let n = *n;
                if order > n {
                    return 0.0;
                }
                let mut coef = 1.0;
                for i in 0..order {
                    coef *= (n - i) as f64;
                }
                coef * s.powi((n - order) as i32)
            }
            // G(s) = p s^2 / (1 - r s) with r = 1-p; differentiate by
            // Leibniz over the product s^2 * (1 - r s)^(-1).
            Kind::ShiftedGeometric(p) => {
                let r = 1.0 - *p;
                let base = 1.0 - r * s;
                let mut acc = 0.0;
                for j in 0..=order.min(2) {
                    let s2_deriv = match j {
                        0 => s * s,
                        1 => 2.0 * s,
                        _ => 2.0,
                    };
                    let m = order - j;
                    // d^m (1 - r s)^(-1) = m! r^m (1 - r s)^(-m-1)
                    let mut fact = 1.0;
                    for i in 1..=m {
                        fact *= i as f64;
                    }
                    let mut choose = 1.0;
                    for i in 0..j {
                        choose = choose * (order - i) as f64 / (i + 1) as f64;
                    }
                    acc += choose * s2_deriv * fact * r.powi(m as i32) / base.powi(m as i32 + 1);
                }
                p * acc
            }
            Kind::Explicit(pmf) => {
                let mut acc = 0.0;
                for &(n, q) in pmf {
                    if order > n {
                        continue;
                    }
                    let mut term = q;
                    for i in 0..order {
                        term *= (n - i) as f64;
                    }
                    acc += term * s.powi((n - order) as i32);
                }
                acc
            }
        }
    }

    /// Mean offspring count `E[N] = G'(1)`.
    pub fn mean(&self) -> f64 {
        self.g_derivative(1, 1.0)
    }

    pub fn support_parity(&self) -> SupportParity {
        let (support, _) = self.support_truncated();
        let odd = support.iter().any(|&(n, q)| q > 0.0 && n % 2 == 1);
        let even = support.iter().any(|&(n, q)| q > 0.0 && n % 2 == 0);
        match (odd, even) {
            (true, false) => SupportParity::AllOdd,
            (false, true) => SupportParity::AllEven,
            _ => SupportParity::Mixed,
        }
    }

    /// Lower bound `beta` on the major-opinion mass along any canonical
    /// trajectory started with major mass `p1` over `k` opinions.
    ///
    /// `beta = min(eta^a q_a, p1)` where `a` is the smallest supported
    /// arity and `eta = u*/k` with `u*` the root of `G'(1-u) = 1`: for
    /// `x <= eta` and `y <= (k-1)x` monotonicity of `G'` gives
    /// `G'(1-x-y) >= G'(1-u*) = 1`, which is the inequality the floor
    /// argument needs.
    pub fn persistence_floor(&self, k: usize, p1: f64) -> Result<f64> {
        if !(p1 > 0.0) {
            return Err(Error::Domain(format!("initial major mass {p1} must be positive")));
        }
        if k == 0 {
            return Err(Error::Domain("k must be at least 1".into()));
        }
        // G'(1-u) decreases in u from G'(1) >= 2 to G'(0) = 0.
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        if self.g_derivative(1, 1.0) < 1.0 {
            return Err(Error::Solver("G'(1) < 1, root of G'(1-u)=1 not bracketed".into()));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.g_derivative(1, 1.0 - mid) >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u_star = lo;
        let eta = u_star / k as f64;
        let a = self.min_support();
        Ok((eta.powi(a as i32) * self.q(a)).min(p1))
    }
}

impl std::fmt::Display for OffspringDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            Kind::NAry(n) => write!(f, "nary:{n}"),
            Kind::ShiftedGeometric(p) => write!(f, "geom:{p}"),
            Kind::Explicit(pmf) => {
                write!(f, "pmf:")?;
                for (i, (n, q)) in pmf.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{n}={q}")?;
                }
                Ok(())
            }
        }
    }
}
