//! States on the probability simplex and the one-generation map `H`.
//!
//! A state `p = (p_0, ..., p_k)` gives the probability that a node is
//! undecided (`p_0`) or holds opinion `i` (`p_i`). One generation of
//! majority spreading maps `p` to `H(p)`, where for `i >= 1`
//!
//! ```text
//! H_i(p) = sum_n q_n sum_{m0=0}^{n-1} C(n, m0) p_0^m0
//!          sum_{(m_1..m_k): sum = n-m0, m_j < m_i for j != i}
//!              multinom(n-m0; m_1..m_k) prod_j p_j^m_j
//! ```
//!
//! and `H_0 = 1 - sum_{i>=1} H_i`. Both a float path and an exact
//! rational path are exposed; the float path truncates infinite-support
//! laws at the distribution's tail budget.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};

use crate::offspring::OffspringDistribution;
use crate::ratpoly::binomial_f64;
use crate::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// A point of the simplex: nonnegative entries summing to one, with
/// `p_0 < 1` (at least one opinion present).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidVector("need at least one opinion slot".into()));
        }
        if entries.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidVector(format!("negative or non-finite entry in {entries:?}")));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidVector(format!("entries sum to {sum}, expected 1")));
        }
        if entries[0] >= 1.0 - SUM_TOL {
            return Err(Error::InvalidVector("p_0 = 1: no opinion present".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Number of opinions `k`.
    pub fn opinion_count(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn max_norm_distance(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A simplex state with opinion coordinates sorted non-increasingly.
#[derive(Debug, Clone)]
pub struct CanonicalState {
    vector: ProbabilityVector,
    /// `permutation[j]` is the original opinion index (1-based) now
    /// sitting in sorted slot `j+1`.
    permutation: Vec<usize>,
    /// Number of opinions tied at the maximal probability.
    major_count: usize,
}

impl CanonicalState {
    pub fn vector(&self) -> &ProbabilityVector {
        &self.vector
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn major_count(&self) -> usize {
        self.major_count
    }
}

/// An orbit of the map `H`: consecutive states related by one step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<ProbabilityVector>,
    pub converged: bool,
    pub limit_estimate: Option<ProbabilityVector>,
    /// Residual tail mass reported by truncation, if any.
    pub tail_mass: f64,
}

impl Trajectory {
    /// Serialize as CSV with columns `m, p_0, ..., p_k` at 17 significant
    /// digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let k = self.states[0].opinion_count();
        write!(w, "m")?;
        for i in 0..=k {
            write!(w, ",p_{i}")?;
        }
        writeln!(w)?;
        for (m, state) in self.states.iter().enumerate() {
            write!(w, "{m}")?;
            for x in state.entries() {
                write!(w, ",{x:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Sort the opinion coordinates non-increasingly (stable, so ties keep
/// their original order) and record the permutation and the major count.
pub fn canonicalize(p: &ProbabilityVector) -> Result<CanonicalState> {
    let k = p.opinion_count();
    let mut order: Vec<usize> = (1..=k).collect();
    order.sort_by(|&a, &b| p.entries[b].partial_cmp(&p.entries[a]).unwrap());
    let mut entries = Vec::with_capacity(k + 1);
    entries.push(p.entries[0]);
    entries.extend(order.iter().map(|&j| p.entries[j]));
    let p1 = entries[1];
    if p1 <= 0.0 {
        return Err(Error::InvalidVector("no opinion has positive mass".into()));
    }
    let major_count = entries[1..].iter().take_while(|&&x| x == p1).count();
    Ok(CanonicalState { vector: ProbabilityVector { entries }, permutation: order, major_count })
}

/// The set `S^i_n`: tuples `(m_1, ..., m_k)` of nonnegative integers
/// summing to `n` in which opinion `i` holds a strict plurality.
pub fn winning_compositions(i: usize, n: usize, k: usize) -> Vec<Vec<usize>> {
    assert!(i >= 1 && i <= k && n >= 1);
    let canonical = winner_first_compositions(n, k);
    canonical
        .iter()
        .map(|(tuple, _)| {
            let mut out = vec![0usize; k];
            out[i - 1] = tuple[0] as usize;
            let mut slot = 0usize;
            for j in 0..k {
                if j != i - 1 {
                    slot += 1;
                    out[j] = tuple[slot] as usize;
                }
            }
            out
        })
        .collect()
}

type CompositionTable = Vec<(Vec<u32>, f64)>;

/// Compositions of `s` into `k` parts with part 0 strictly largest,
/// paired with their multinomial coefficients. Memoized per `(s, k)`.
fn winner_first_compositions(s: usize, k: usize) -> Arc<CompositionTable> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<CompositionTable>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(s, k)) {
        return Arc::clone(hit);
    }
    let mut table = Vec::new();
    let mut tuple = vec![0u32; k];
    // winner count m_1: the k-1 losers hold at most m_1 - 1 each
    for m1 in 1..=s {
        if s - m1 > (k - 1) * (m1 - 1) {
            continue;
        }
        tuple[0] = m1 as u32;
        fill_losers(s - m1, 1, m1 - 1, &mut tuple, &mut table);
    }
    let arc = Arc::new(table);
    cache.lock().unwrap().insert((s, k), Arc::clone(&arc));
    arc
}

fn fill_losers(
    rest: usize,
    pos: usize,
    cap: usize,
    tuple: &mut Vec<u32>,
    out: &mut CompositionTable,
) {
    let k = tuple.len();
    if pos == k {
        if rest == 0 {
            out.push((tuple.clone(), multinomial_f64(tuple)));
        }
        return;
    }
    let remaining_cap = (k - pos - 1) * cap;
    for m in 0..=cap.min(rest) {
        if rest - m > remaining_cap {
            continue;
        }
        tuple[pos] = m as u32;
        fill_losers(rest - m, pos + 1, cap, tuple, out);
    }
    tuple[pos] = 0;
}

fn multinomial_f64(parts: &[u32]) -> f64 {
    let mut total = 0usize;
    let mut acc = 1.0f64;
    for &m in parts {
        total += m as usize;
        acc *= binomial_f64(total, m as usize);
    }
    acc
}

fn multinomial_big(parts: &[usize]) -> BigInt {
    let mut total = 0usize;
    let mut acc = BigInt::one();
    for &m in parts {
        total += m;
        acc *= crate::ratpoly::binomial(total, m);
    }
    acc
}

/// One step of `H` on raw coordinates over an explicit truncated support.
/// No simplex validation is performed; the map is polynomial and is also
/// used off the simplex by the finite-difference Jacobian.
pub fn step_h_raw(p: &[f64], support: &[(usize, f64)]) -> Vec<f64> {
    let k = p.len() - 1;
    let p0 = p[0];
    let mut out = vec![0.0; k + 1];
    for &(n, q) in support {
        if q == 0.0 {
            continue;
        }
        let mut p0_pow = 1.0;
        for m0 in 0..n {
            let weight = q * binomial_f64(n, m0) * p0_pow;
            p0_pow *= p0;
            if weight == 0.0 {
                continue;
            }
            let table = winner_first_compositions(n - m0, k);
            for i in 1..=k {
                if p[i] == 0.0 {
                    continue;
                }
                let mut acc = 0.0;
                'tuples: for (tuple, multinom) in table.iter() {
                    let mut prod = p[i].powi(tuple[0] as i32);
                    if prod == 0.0 {
                        continue;
                    }
                    let mut slot = 0usize;
                    for j in 1..=k {
                        if j == i {
                            continue;
                        }
                        slot += 1;
                        let m = tuple[slot];
                        if m > 0 {
                            if p[j] == 0.0 {
                                continue 'tuples;
                            }
                            prod *= p[j].powi(m as i32);
                        }
                    }
                    acc += multinom * prod;
                }
                out[i] += weight * acc;
            }
        }
    }
    out[0] = 1.0 - out[1..].iter().sum::<f64>();
    out
}

/// One step of `H` in exact rational arithmetic over an explicit support.
pub fn step_h_exact(p: &[BigRational], support: &[(usize, BigRational)]) -> Vec<BigRational> {
    let k = p.len() - 1;
    let mut out = vec![BigRational::zero(); k + 1];
    for (n, q) in support {
        let n = *n;
        if q.is_zero() {
            continue;
        }
        let mut p0_pow = BigRational::one();
        for m0 in 0..n {
            let weight =
                q * BigRational::from_integer(crate::ratpoly::binomial(n, m0)) * &p0_pow;
            p0_pow *= &p[0];
            if weight.is_zero() {
                continue;
            }
            let table = winner_first_compositions(n - m0, k);
            for i in 1..=k {
                if p[i].is_zero() {
                    continue;
                }
                let mut acc = BigRational::zero();
                'tuples: for (tuple, _) in table.iter() {
                    let mut prod = num::pow::pow(p[i].clone(), tuple[0] as usize);
                    let mut parts = vec![tuple[0] as usize];
                    let mut slot = 0usize;
                    for j in 1..=k {
                        if j == i {
                            continue;
                        }
                        slot += 1;
                        let m = tuple[slot] as usize;
                        parts.push(m);
                        if m > 0 {
                            if p[j].is_zero() {
                                continue 'tuples;
                            }
                            prod *= num::pow::pow(p[j].clone(), m);
                        }
                    }
                    acc += BigRational::from_integer(multinomial_big(&parts)) * prod;
                }
                out[i] += &weight * acc;
            }
        }
    }
    let mass: BigRational = out[1..].iter().sum();
    out[0] = BigRational::one() - mass;
    out
}

/// Apply one generation of majority spreading.
pub fn step_h(p: &ProbabilityVector, dist: &OffspringDistribution) -> Result<ProbabilityVector> {
    let (support, tail) = dist.support_truncated();
    if tail >= dist.eps_tail() * 10.0 {
        return Err(Error::Truncation(tail));
    }
    let out = step_h_raw(p.entries(), &support);
    ProbabilityVector::new(out)
}

/// Iterate `H` until successive states differ by less than `tol` in
/// max-norm or `max_steps` is reached.
pub fn iterate(
    p: &ProbabilityVector,
    dist: &OffspringDistribution,
    max_steps: usize,
    tol: f64,
) -> Result<Trajectory> {
    let (support, tail_mass) = dist.support_truncated();
    let mut states = vec![p.clone()];
    let mut converged = false;
    for _ in 0..max_steps {
        let prev = states.last().unwrap();
        let next = ProbabilityVector::new(step_h_raw(prev.entries(), &support))?;
        let delta = prev.max_norm_distance(&next);
        states.push(next);
        if delta < tol {
            converged = true;
            break;
        }
    }
    let limit_estimate = converged.then(|| states.last().unwrap().clone());
    Ok(Trajectory { states, converged, limit_estimate, tail_mass })
}

/// Ratios `w_m = p_{i+1}(m) / p_1(m)` along a trajectory started from a
/// canonical state with `i` major opinions. Empty when no minor opinion
/// is present. Errors if the major mass underflows the persistence floor
/// guarantee (`p_1(m) <= 0`).
pub fn minor_decay_ratios(traj: &Trajectory, major_count: usize) -> Result<Vec<f64>> {
    let k = traj.states[0].opinion_count();
    if major_count >= k {
        return Ok(Vec::new());
    }
    traj.states
        .iter()
        .map(|s| {
            let p1 = s.entries()[1];
            if p1 <= 0.0 {
                return Err(Error::InvalidVector(
                    "major mass underflowed to zero along the trajectory".into(),
                ));
            }
            Ok(s.entries()[major_count + 1] / p1)
        })
        .collect()
}

/// Central finite-difference Jacobian of the truncated map
/// `(H_1, H_{i+1}, ..., H_k)` in the reduced coordinates
/// `(x_1, x_{i+1}, ..., x_k)`, at the reduced point extracted from `p`
/// (which must have its first `i` opinion coordinates equal).
pub fn jacobian_fd(
    p: &ProbabilityVector,
    major_count: usize,
    dist: &OffspringDistribution,
    h: f64,
) -> Result<Vec<Vec<f64>>> {
    let k = p.opinion_count();
    let i = major_count;
    if i < 1 || i > k {
        return Err(Error::Domain(format!("major count {i} outside 1..={k}")));
    }
    let (support, _) = dist.support_truncated();
    let mut reduced = vec![p.entries()[1]];
    reduced.extend_from_slice(&p.entries()[i + 1..]);
    let dim = reduced.len();

    let eval = |y: &[f64]| -> Vec<f64> {
        let mut full = Vec::with_capacity(k + 1);
        let minor_sum: f64 = y[1..].iter().sum();
        full.push(1.0 - i as f64 * y[0] - minor_sum);
        for _ in 0..i {
            full.push(y[0]);
        }
        full.extend_from_slice(&y[1..]);
        let image = step_h_raw(&full, &support);
        let mut out = vec![image[1]];
        out.extend_from_slice(&image[i + 1..]);
        out
    };

    if reduced[0] - h < 0.0 || i as f64 * (reduced[0] + h) + h > 1.0 {
        return Err(Error::Domain(format!("step {h} leaves the domain at {reduced:?}")));
    }

    let mut jac = vec![vec![0.0; dim]; dim];
    for col in 0..dim {
        let mut plus = reduced.clone();
        let mut minus = reduced.clone();
        plus[col] += h;
        minus[col] -= h;
        let fp = eval(&plus);
        let fm = eval(&minus);
        for row in 0..dim {
            jac[row][col] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly;
    use crate::ratpoly::rat;

    fn pv(entries: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn canonicalize_sorts_and_counts() {
        let c = canonicalize(&pv(&[0.2, 0.3, 0.5])).unwrap();
        assert_eq!(c.vector().entries(), &[0.2, 0.5, 0.3]);
        assert_eq!(c.permutation(), &[2, 1]);
        assert_eq!(c.major_count(), 1);

        let c = canonicalize(&pv(&[0.0, 0.5, 0.5])).unwrap();
        assert_eq!(c.vector().entries(), &[0.0, 0.5, 0.5]);
        assert_eq!(c.major_count(), 2);

        assert!(ProbabilityVector::new(vec![1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn winning_composition_sets() {
        assert_eq!(winning_compositions(1, 2, 2), vec![vec![2, 0]]);
        assert_eq!(winning_compositions(1, 1, 3), vec![vec![1, 0, 0]]);
        assert_eq!(winning_compositions(1, 2, 3), vec![vec![2, 0, 0]]);
        // i = 2 is the mirror of i = 1
        assert_eq!(winning_compositions(2, 2, 2), vec![vec![0, 2]]);
        // ties excluded: compositions of 2 into 2 parts are (2,0),(1,1),(0,2)
        assert_eq!(winning_compositions(1, 2, 2).len(), 1);
    }

    #[test]
    fn step_binary_tree_even_split() {
        let dist = OffspringDistribution::nary(2).unwrap();
        let out = step_h(&pv(&[0.0, 0.5, 0.5]), &dist).unwrap();
        let got = out.entries();
        assert!((got[0] - 0.5).abs() < 1e-15);
        assert!((got[1] - 0.25).abs() < 1e-15);
        assert!((got[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn step_ternary_tree_two_opinions_has_no_ties() {
        let dist = OffspringDistribution::nary(3).unwrap();
        let out = step_h(&pv(&[0.0, 0.5, 0.5]), &dist).unwrap();
        let got = out.entries();
        assert!(got[0].abs() < 1e-15);
        assert!((got[1] - 0.5).abs() < 1e-15);
        assert!((got[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn step_matches_uniform_polynomial() {
        // first coordinate of H on (t, (1-t)/2, (1-t)/2) is f_n(t)
        let dist = OffspringDistribution::nary(3).unwrap();
        let t = 0.3;
        let out = step_h(&pv(&[t, 0.35, 0.35]), &dist).unwrap();
        assert!((out.entries()[0] - 0.2475).abs() < 1e-15);
        assert!((out.entries()[0] - poly::eval_fn(3, t).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn uniform_case_reduces_to_hk() {
        for k in 1..=4usize {
            for dist in [
                OffspringDistribution::nary(3).unwrap(),
                OffspringDistribution::shifted_geometric(0.5).unwrap(),
            ] {
                let x = 0.8 / (k as f64 + 1.0) / k as f64 * (k as f64); // inside (0, 1/k)
                let x = x.min(0.9 / k as f64);
                let mut p = vec![1.0 - k as f64 * x];
                p.extend(std::iter::repeat(x).take(k));
                let out = step_h(&pv(&p), &dist).unwrap();
                let hk = poly::eval_hk(k, &dist, x).unwrap();
                for i in 1..=k {
                    assert!(
                        (out.entries()[i] - hk).abs() < 1e-12,
                        "k={k} i={i}: {} vs {hk}",
                        out.entries()[i]
                    );
                }
                assert!((out.entries()[0] - (1.0 - k as f64 * hk)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn simplex_preservation_and_ordering() {
        let dist = OffspringDistribution::shifted_geometric(0.4).unwrap();
        let p = pv(&[0.1, 0.4, 0.3, 0.15, 0.05]);
        let out = step_h(&p, &dist).unwrap();
        let got = out.entries();
        assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(got.iter().all(|&x| x >= 0.0));
        for i in 1..got.len() - 1 {
            assert!(got[i] >= got[i + 1] - 1e-15, "ordering broken at {i}");
        }
    }

    #[test]
    fn zero_preservation() {
        let dist = OffspringDistribution::nary(4).unwrap();
        let p = pv(&[0.2, 0.5, 0.3, 0.0]);
        let out = step_h(&p, &dist).unwrap();
        assert_eq!(out.entries()[3], 0.0);
        assert!(out.entries()[1] > 0.0 && out.entries()[2] > 0.0);
    }

    #[test]
    fn iterate_ternary_converges_to_alpha3() {
        let dist = OffspringDistribution::nary(3).unwrap();
        let traj = iterate(&pv(&[0.0, 0.45, 0.45, 0.10]), &dist, 10_000, 1e-10).unwrap();
        assert!(traj.converged);
        let lim = traj.limit_estimate.unwrap();
        assert!((lim.entries()[0] - 0.2).abs() < 1e-6, "p0 -> {}", lim.entries()[0]);
        assert!((lim.entries()[1] - 0.4).abs() < 1e-6);
        assert!((lim.entries()[2] - 0.4).abs() < 1e-6);
        assert!(lim.entries()[3] < 1e-8);
    }

    #[test]
    fn iterate_single_major_opinion_spreads() {
        let dist = OffspringDistribution::nary(2).unwrap();
        let traj = iterate(&pv(&[0.0, 0.6, 0.4]), &dist, 10_000, 1e-12).unwrap();
        assert!(traj.converged);
        let lim = traj.limit_estimate.unwrap();
        assert!(lim.entries()[0] < 1e-9);
        assert!((lim.entries()[1] - 1.0).abs() < 1e-9);
        assert!(lim.entries()[2] < 1e-9);
    }

    #[test]
    fn fixed_point_stays_fixed() {
        let dist = OffspringDistribution::nary(3).unwrap();
        let fixed = pv(&[0.0, 0.5, 0.5]);
        let traj = iterate(&fixed, &dist, 50, 1e-12).unwrap();
        assert!(traj.converged);
        for s in &traj.states {
            assert!(fixed.max_norm_distance(s) < 1e-14);
        }
    }

    #[test]
    fn minor_ratios_strictly_decrease() {
        let dist = OffspringDistribution::nary(3).unwrap();
        let traj = iterate(&pv(&[0.1, 0.4, 0.4, 0.1]), &dist, 60, 0.0).unwrap();
        let w = minor_decay_ratios(&traj, 2).unwrap();
        assert!(!w.is_empty());
        for pair in w.windows(2) {
            if pair[0] > 0.0 && pair[1] > 0.0 {
                assert!(pair[1] < pair[0], "w not strictly decreasing: {pair:?}");
            }
        }
        // geometric-fit exponent of w_m over m = 5..30 is < 1
        let pts: Vec<(f64, f64)> = (5..=30)
            .filter(|&m| w[m] > 0.0)
            .map(|m| (m as f64, w[m].ln()))
            .collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(slope.exp() < 1.0, "fit ratio {} not < 1", slope.exp());
    }

    #[test]
    fn no_minor_opinions_gives_empty_ratios() {
        let dist = OffspringDistribution::nary(3).unwrap();
        let traj = iterate(&pv(&[0.2, 0.4, 0.4]), &dist, 10, 0.0).unwrap();
        assert!(minor_decay_ratios(&traj, 2).unwrap().is_empty());
    }

    #[test]
    fn persistence_floor_holds_along_trajectory() {
        let dist = OffspringDistribution::nary(3).unwrap();
        let beta = dist.persistence_floor(2, 0.45).unwrap();
        let traj = iterate(&pv(&[0.1, 0.45, 0.45]), &dist, 100, 0.0).unwrap();
        for s in &traj.states {
            assert!(s.entries()[1] >= beta);
        }
    }

    #[test]
    fn exact_step_matches_float() {
        let p = [rat(1, 10), rat(2, 5), rat(2, 5), rat(1, 10)];
        let support = [(3usize, rat(1, 1))];
        let exact = step_h_exact(&p, &support);
        let float = step_h_raw(&[0.1, 0.4, 0.4, 0.1], &[(3, 1.0)]);
        for (e, f) in exact.iter().zip(&float) {
            assert!((crate::ratpoly::ratio_to_f64(e) - f).abs() < 1e-14);
        }
        let total: BigRational = exact.iter().sum();
        assert!(total.is_one());
    }

    #[test]
    fn jacobian_upper_triangular_at_uniform_fixed_point() {
        // ternary tree, i = 2 major opinions among k = 3
        let dist = OffspringDistribution::nary(3).unwrap();
        let alpha = 0.2;
        let xbar = (1.0 - alpha) / 2.0;
        let p = pv(&[alpha, xbar, xbar, 0.0]);
        let jac = jacobian_fd(&p, 2, &dist, 1e-5).unwrap();
        assert_eq!(jac.len(), 2);
        // lower-left entry vanishes: the minor block does not feed back
        assert!(jac[1][0].abs() < 1e-8, "lower-left {}", jac[1][0]);
        // diagonal: h_2'(xbar) and G'(1 - 2 xbar)
        let h2p = -2.0 * poly::eval_fn_derivative(3, 1, 1.0 - 2.0 * xbar).unwrap() * (-0.5);
        let _ = h2p;
        assert!((jac[0][0] - poly::eval_fn_derivative(3, 1, alpha).unwrap()).abs() < 1e-6);
        assert!((jac[1][1] - dist.g_derivative(1, alpha)).abs() < 1e-6);
        // G'(p_0) < 1 at a fixed point with positive major mass
        assert!(dist.g_derivative(1, alpha) < 1.0);
    }

    #[test]
    fn jacobian_rejects_bad_step() {
        let dist = OffspringDistribution::nary(3).unwrap();
        let p = pv(&[0.0, 0.5, 0.5]);
        assert!(jacobian_fd(&p, 2, &dist, 0.6).is_err());
    }

    #[test]
    fn trajectory_csv_roundtrip() {
        let dist = OffspringDistribution::nary(2).unwrap();
        let traj = iterate(&pv(&[0.0, 0.5, 0.5]), &dist, 3, 0.0).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "m,p_0,p_1,p_2");
        for (m, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[0].parse::<usize>().unwrap(), m);
            let parsed: Vec<f64> = fields[1..].iter().map(|s| s.parse().unwrap()).collect();
            for (a, b) in parsed.iter().zip(traj.states[m].entries()) {
                assert_eq!(a, b, "17-digit round trip must be exact");
            }
        }
    }
}
