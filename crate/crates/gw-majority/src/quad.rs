//! Fixed-order Gauss-Legendre quadrature.
//!
//! Nodes are the roots of the Legendre polynomial `P_n`, found by Newton
//! iteration from the Chebyshev-like initial guesses; an order-`n` rule
//! integrates polynomials of degree `2n - 1` exactly up to rounding.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on `[-1, 1]` for the given order. Memoized.
pub fn gauss_legendre(order: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    assert!(order >= 1);
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&order) {
        return Arc::clone(hit);
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let arc = Arc::new((nodes, weights));
    cache.lock().unwrap().insert(order, Arc::clone(&arc));
    arc
}

/// Integrate `f` over `[a, b]` with an order-`order` Gauss-Legendre rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in rule.0.iter().zip(&rule.1) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        // order n is exact through degree 2n-1
        let val = integrate(|x| x.powi(7) - 3.0 * x.powi(4) + 1.0, 0.0, 2.0, 4);
        let exact = 2f64.powi(8) / 8.0 - 3.0 * 2f64.powi(5) / 5.0 + 2.0;
        assert!((val - exact).abs() < 1e-12);
    }

    #[test]
    fn cosine_moments() {
        // (1/pi) int_0^pi cos^n x dx = 0 (odd), 2^-n C(n, n/2) (even)
        use std::f64::consts::PI;
        let odd = integrate(|x| x.cos().powi(5), 0.0, PI, 40) / PI;
        assert!(odd.abs() < 1e-14);
        let even = integrate(|x| x.cos().powi(6), 0.0, PI, 40) / PI;
        assert!((even - 20.0 / 64.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for order in [1, 2, 3, 7, 40, 101] {
            let rule = gauss_legendre(order);
            let total: f64 = rule.1.iter().sum();
            assert!((total - 2.0).abs() < 1e-12, "order {order}: {total}");
            assert!(rule.0.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
