//! Gauss quadrature rules normalized to probability measures.
//!
//! Nodes come from the eigenvalues of the Jacobi matrix of the orthogonal
//! polynomial family and are then polished by Newton steps on the three-term
//! recurrence. Weights use the Christoffel form `1 / sum_k p_k(t)^2` over the
//! orthonormal polynomials, which stays accurate for the tiny tail weights
//! where eigenvector-based weights lose relative precision.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// Nodes and weights of a rule whose weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(t_i)`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Rule for `E[f(T)]` with `T ~ N(0, 1/2)`, i.e. the weight `exp(-t^2)/sqrt(pi)`.
///
/// This is the per-component law of unit-variance circularly symmetric
/// complex Gaussian noise.
pub fn gauss_hermite(order: usize) -> Result<GaussRule> {
    if order == 0 {
        return invalid("quadrature order must be positive");
    }
    let diag = vec![0.0; order];
    let off: Vec<f64> = (1..=order).map(|k| (k as f64 / 2.0).sqrt()).collect();
    Ok(rule_from_recurrence(&diag, &off))
}

/// Rule for `E[f(T)]` with `T ~ Gamma(alpha + 1, 1)` (generalized Gauss–Laguerre).
pub fn gauss_laguerre(order: usize, alpha: f64) -> Result<GaussRule> {
    if order == 0 {
        return invalid("quadrature order must be positive");
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return invalid(format!("Laguerre parameter must exceed -1, got {alpha}"));
    }
    let diag: Vec<f64> = (0..order).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let off: Vec<f64> = (1..=order)
        .map(|k| (k as f64 * (k as f64 + alpha)).sqrt())
        .collect();
    Ok(rule_from_recurrence(&diag, &off))
}

/// Rule for the fading power `chi ~ Gamma(shape = nu, rate = nu)`, so that
/// `E[chi] = 1` and `E[chi^2] = 1 + 1/nu`.
pub fn gamma_power_rule(order: usize, nu: f64) -> Result<GaussRule> {
    if !(nu > 0.0) || !nu.is_finite() {
        return invalid(format!(
            "Nakagami parameter must be positive and finite, got {nu}"
        ));
    }
    let mut rule = gauss_laguerre(order, nu - 1.0)?;
    for t in &mut rule.nodes {
        *t /= nu;
    }
    Ok(rule)
}

/// `diag[k] = a_k` for `k < n`, `off[k] = b_{k+1}` for `k < n` (the last entry
/// is only used by the Newton polish).
fn rule_from_recurrence(diag: &[f64], off: &[f64]) -> GaussRule {
    let n = diag.len();
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let mut weights = Vec::with_capacity(n);
    for t in &mut nodes {
        for _ in 0..8 {
            let (p, dp, _) = orthonormal(*t, diag, off);
            let step = p / dp;
            *t -= step;
            if step.abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
                break;
            }
        }
        let (_, _, sumsq) = orthonormal(*t, diag, off);
        weights.push(1.0 / sumsq);
    }
    // Remove the residual rounding so the rule is an exact probability measure.
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    GaussRule { nodes, weights }
}

/// Returns `(p_n(t), p_n'(t), sum_{k<n} p_k(t)^2)` for the orthonormal family.
fn orthonormal(t: f64, diag: &[f64], off: &[f64]) -> (f64, f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    let mut sumsq = 0.0;
    let mut b_prev = 0.0;
    for k in 0..diag.len() {
        sumsq += p * p;
        let p_next = ((t - diag[k]) * p - b_prev * p_prev) / off[k];
        let d_next = (p + (t - diag[k]) * d - b_prev * d_prev) / off[k];
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        b_prev = off[k];
    }
    (p, d, sumsq)
}
