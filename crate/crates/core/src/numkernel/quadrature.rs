//! Gauss–Hermite rules for the weight `exp(-u^2 / lambda)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported node count; beyond this the extreme weights underflow.
pub const MAX_NODES: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    /// Strictly increasing.
    pub nodes: Vec<f64>,
    /// Strictly positive.
    pub weights: Vec<f64>,
    pub parameter: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(x_i)`, i.e. `∫ f(u) exp(-u²/λ) du` for polynomial `f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Weight multiplied by `exp(u²/λ)`, for integrating functions that
    /// already carry their own Gaussian decay.
    pub fn unweighted(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * (x * x / self.parameter).exp())
            .collect()
    }
}

/// Orthonormal Hermite polynomial `p_k` for weight `exp(-x^2)`, returning
/// `(p_{m}(x), p_{m-1}(x))`.
fn orthonormal_pair(m: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    for k in 0..m {
        let next = (2.0 / (k as f64 + 1.0)).sqrt() * x * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Standard rule for weight `exp(-x^2)`: Golub–Welsch eigenvalues as
/// starting points, Newton-polished roots, Christoffel weights
/// `1 / (m p_{m-1}(x)^2)`.
fn standard_rule(m: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::<f64>::from_fn(m, m, |i, j| {
        if i + 1 == j {
            (j as f64 / 2.0).sqrt()
        } else if j + 1 == i {
            (i as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut guesses: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    guesses.sort_by(f64::total_cmp);

    let half = m / 2;
    let mut pos = Vec::with_capacity(half);
    // Refine the positive half and mirror, so the rule is exactly symmetric.
    for &g in guesses.iter().skip(m - half) {
        let mut x = g;
        for _ in 0..100 {
            let (p, q) = orthonormal_pair(m, x);
            let dp = (2.0 * m as f64).sqrt() * q;
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        pos.push(x);
    }
    let weight = |x: f64| {
        let (_, q) = orthonormal_pair(m, x);
        1.0 / (m as f64 * q * q)
    };
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for &x in pos.iter().rev() {
        nodes.push(-x);
        weights.push(weight(x));
    }
    if m % 2 == 1 {
        nodes.push(0.0);
        weights.push(weight(0.0));
    }
    for &x in &pos {
        nodes.push(x);
        weights.push(weight(x));
    }
    (nodes, weights)
}

/// Gauss–Hermite rule exact for `∫ p(u) exp(-u²/λ) du`, `deg p <= 2m-1`.
pub fn gauss_hermite(parameter: f64, node_count: usize) -> Result<QuadratureRule> {
    if !(parameter > 0.0) || !parameter.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "quadrature parameter must be positive, got {parameter}"
        )));
    }
    if node_count == 0 || node_count > MAX_NODES {
        return Err(Error::InvalidParameter(format!(
            "node count must lie in 1..={MAX_NODES}, got {node_count}"
        )));
    }
    let (x, w) = standard_rule(node_count);
    let s = parameter.sqrt();
    Ok(QuadratureRule {
        nodes: x.iter().map(|v| v * s).collect(),
        weights: w.iter().map(|v| v * s).collect(),
        parameter,
    })
}
