//! Gauss-Hermite rules and Gaussian-weighted expectations.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Nodes and weights for weight function `exp(-t^2)`; weights sum to
/// `sqrt(pi)`.
#[derive(Debug, Clone)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn compute_rule(order: usize) -> HermiteRule {
    assert!(order >= 1);
    // Golub-Welsch: eigen-decompose the Jacobi matrix of the Hermite
    // recurrence (zero diagonal, off-diagonal sqrt(k/2)).
    let mut jacobi = DMatrix::zeros(order, order);
    for k in 1..order {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let first = eig.eigenvectors[(0, i)];
            (node, std::f64::consts::PI.sqrt() * first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // Enforce the exact +/- symmetry of the rule, which eigen roundoff
    // slightly breaks.
    let n = pairs.len();
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let j = n - 1 - i;
        nodes[i] = 0.5 * (pairs[i].0 - pairs[j].0);
        weights[i] = 0.5 * (pairs[i].1 + pairs[j].1);
    }
    HermiteRule { nodes, weights }
}

/// Shared cache; rules are pure functions of the order.
pub fn hermite_rule(order: usize) -> Arc<HermiteRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<HermiteRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("rule cache poisoned");
    guard.entry(order).or_insert_with(|| Arc::new(compute_rule(order))).clone()
}

/// `E[g(x)]` for `x ~ N(mean, cov)` by a tensor Gauss-Hermite rule with
/// `order` nodes per dimension: `x = mean + sqrt(2) L t`.
pub fn gaussian_expectation(
    mean: &DVector<f64>,
    chol_l: &DMatrix<f64>,
    order: usize,
    mut g: impl FnMut(&DVector<f64>) -> f64,
) -> f64 {
    let mut out = [0.0];
    gaussian_expectation_vec(mean, chol_l, order, &mut out, |x, acc| acc[0] = g(x));
    out[0]
}

/// Vector-valued variant: one grid pass accumulating every component the
/// integrand writes into its scratch slice. `out` is overwritten.
pub fn gaussian_expectation_vec(
    mean: &DVector<f64>,
    chol_l: &DMatrix<f64>,
    order: usize,
    out: &mut [f64],
    mut g: impl FnMut(&DVector<f64>, &mut [f64]),
) {
    let n = mean.len();
    let rule = hermite_rule(order);
    let norm = std::f64::consts::PI.powf(-(n as f64) / 2.0);
    let sqrt2 = std::f64::consts::SQRT_2;

    out.fill(0.0);
    let mut scratch = vec![0.0; out.len()];
    let mut idx = vec![0usize; n];
    loop {
        let t = DVector::from_iterator(n, idx.iter().map(|&i| rule.nodes[i]));
        let w: f64 = idx.iter().map(|&i| rule.weights[i]).product();
        let x = mean + sqrt2 * chol_l * t;
        scratch.fill(0.0);
        g(&x, &mut scratch);
        for (o, s) in out.iter_mut().zip(&scratch) {
            *o += w * s;
        }

        // Odometer over the tensor grid.
        let mut d = 0;
        loop {
            if d == n {
                for o in out.iter_mut() {
                    *o *= norm;
                }
                return;
            }
            idx[d] += 1;
            if idx[d] < rule.nodes.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for order in [8, 64, 128] {
            let r = hermite_rule(order);
            let s: f64 = r.weights.iter().sum();
            assert!((s - std::f64::consts::PI.sqrt()).abs() < 1e-12, "order {order}: {s}");
        }
    }

    #[test]
    fn nodes_are_symmetric() {
        let r = hermite_rule(64);
        for i in 0..64 {
            assert_eq!(r.nodes[i], -r.nodes[63 - i]);
            assert_eq!(r.weights[i], r.weights[63 - i]);
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // E[x^4] = 3 sigma^4 for N(0, sigma^2).
        let mean = DVector::from_element(1, 0.0);
        let l = DMatrix::from_element(1, 1, 1.5f64);
        let v = gaussian_expectation(&mean, &l, 8, |x| x[0].powi(4));
        let expected = 3.0 * 1.5f64.powi(4);
        assert!((v - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn integrates_shifted_gaussian_moments() {
        // E[x] = m, E[x^2] = m^2 + s^2 under N(m, s^2).
        let mean = DVector::from_element(1, 0.7);
        let l = DMatrix::from_element(1, 1, 0.9f64);
        let m1 = gaussian_expectation(&mean, &l, 16, |x| x[0]);
        let m2 = gaussian_expectation(&mean, &l, 16, |x| x[0] * x[0]);
        assert!((m1 - 0.7).abs() < 1e-13);
        assert!((m2 - (0.49 + 0.81)).abs() < 1e-13);
    }

    #[test]
    fn two_dimensional_grid() {
        // E[x1^2 x2^2] = v1 v2 for independent components.
        let mean = DVector::zeros(2);
        let l = DMatrix::from_diagonal(&DVector::from_vec(vec![1.2f64, 0.5]));
        let v = gaussian_expectation(&mean, &l, 12, |x| x[0] * x[0] * x[1] * x[1]);
        let expected = 1.2f64.powi(2) * 0.5f64.powi(2);
        assert!((v - expected).abs() < 1e-12);
    }
}
