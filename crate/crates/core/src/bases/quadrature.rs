//! Gauss-Legendre rules by Newton iteration on `P_q`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const MAX_NEWTON: usize = 100;

/// Nodes and weights on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `(P_q(t), P_q'(t))` by the three-term recurrence.
fn legendre_with_derivative(q: usize, t: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = t;
    for n in 1..q {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * t * p - nf * p_prev) / (nf + 1.0);
        p_prev = p;
        p = next;
    }
    let qf = q as f64;
    let dp = qf * (t * p - p_prev) / (t * t - 1.0);
    (p, dp)
}

/// `q`-point Gauss-Legendre rule mapped to `[lo, hi]`.
pub fn gauss_legendre(q: usize, lo: f64, hi: f64) -> Result<QuadratureRule> {
    if q == 0 {
        return Err(Error::Contract("quadrature order must be at least 1".into()));
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::Contract(format!("bad quadrature interval [{lo}, {hi}]")));
    }
    let mut ref_nodes = vec![0.0; q];
    let mut ref_weights = vec![0.0; q];
    if q == 1 {
        ref_weights[0] = 2.0;
    }
    let qf = q as f64;
    // Roots come in +/- pairs; solve for the positive half and mirror.
    for i in 0..q / 2 {
        let mut t = (PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..MAX_NEWTON {
            let (p, dp) = legendre_with_derivative(q, t);
            let step = p / dp;
            t -= step;
            if step.abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numeric(format!(
                "Gauss-Legendre Newton iteration did not converge for q = {q}, root {i}"
            )));
        }
        let (_, dp) = legendre_with_derivative(q, t);
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        ref_nodes[i] = -t;
        ref_nodes[q - 1 - i] = t;
        ref_weights[i] = w;
        ref_weights[q - 1 - i] = w;
    }
    if q % 2 == 1 && q > 1 {
        let (_, dp) = legendre_with_derivative(q, 0.0);
        ref_nodes[q / 2] = 0.0;
        ref_weights[q / 2] = 2.0 / (dp * dp);
    }

    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    Ok(QuadratureRule {
        nodes: ref_nodes.iter().map(|t| mid + half * t).collect(),
        weights: ref_weights.iter().map(|w| half * w).collect(),
        lo,
        hi,
    })
}

/// Default order for products of two basis members of mode index up to
/// `max_index`, four derivatives and the linear profile.
pub fn default_order(max_index: usize) -> usize {
    4 * max_index + 16
}
