//! Gauss–Hermite rules over the real line and the complex plane.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussHermite;

use crate::error::{invalid, Result};

/// Gauss–Hermite rule for `∫ e^{−x²} f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteRule {
    nodes: Vec<(f64, f64)>,
}

impl HermiteRule {
    pub fn new(degree: usize) -> Result<Self> {
        let degree = NonZeroUsize::new(degree)
            .ok_or_else(|| invalid("nodes", "quadrature degree must be positive"))?;
        let rule = GaussHermite::new(degree);
        let nodes = rule.iter().map(|(x, w)| (*x, *w)).collect();
        Ok(Self { nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(node, weight)` pairs.
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Nodes and weights for `E[f(Z)]` with `Z ~ N(0, variance)`. A zero
    /// variance collapses to the single node `(0, 1)`.
    pub fn normal(&self, variance: f64) -> Vec<(f64, f64)> {
        if variance <= 0.0 {
            return vec![(0.0, 1.0)];
        }
        let scale = (2.0 * variance).sqrt();
        let norm = PI.sqrt();
        self.nodes
            .iter()
            .map(|&(x, w)| (scale * x, w / norm))
            .collect()
    }
}

/// Tensor-product node in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneNode {
    pub re: f64,
    pub im: f64,
    pub weight: f64,
    /// `e^{x² + y²}` in the rule's own coordinates; divides out the Gaussian
    /// weight when the integrand is not of the form `e^{−|·|²} f`.
    pub inverse_weight_fn: f64,
}

/// Tensor rule for `∫ e^{−κ|α|²} f(α) d²α/π` split into kept and pruned nodes.
///
/// Nodes whose product weight falls below `prune_below` are returned separately
/// so callers can bound their contribution instead of evaluating them.
pub fn plane_rule(
    rule: &HermiteRule,
    kappa: f64,
    prune_below: f64,
) -> (Vec<PlaneNode>, Vec<PlaneNode>) {
    let scale = 1.0 / kappa.sqrt();
    let mut kept = Vec::with_capacity(rule.len() * rule.len());
    let mut pruned = Vec::new();
    for &(x, wx) in rule.nodes() {
        for &(y, wy) in rule.nodes() {
            // d²α/π = dRe dIm / π and α = (x + iy)/√κ.
            let weight = wx * wy / (PI * kappa);
            let node = PlaneNode {
                re: scale * x,
                im: scale * y,
                weight,
                inverse_weight_fn: (x * x + y * y).exp(),
            };
            if weight * kappa >= prune_below {
                kept.push(node);
            } else {
                pruned.push(node);
            }
        }
    }
    (kept, pruned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_moments() {
        let rule = HermiteRule::new(12).unwrap();
        let nodes = rule.normal(0.7);
        let m0: f64 = nodes.iter().map(|(_, w)| w).sum();
        let m2: f64 = nodes.iter().map(|(x, w)| w * x * x).sum();
        let m4: f64 = nodes.iter().map(|(x, w)| w * x.powi(4)).sum();
        assert_abs_diff_eq!(m0, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m2, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(m4, 3.0 * 0.49, epsilon = 1e-13);
        assert_eq!(rule.normal(0.0), vec![(0.0, 1.0)]);
        assert!(HermiteRule::new(0).is_err());
    }

    #[test]
    fn plane_rule_integrates_prior_moments() {
        // ∫ (λ/π) e^{−λ|α|²} |α|² d²α = 1/λ.
        let rule = HermiteRule::new(40).unwrap();
        let lambda = 1.7;
        let (kept, pruned) = plane_rule(&rule, lambda, 1e-30);
        assert!(!pruned.is_empty());
        let mass: f64 = kept.iter().map(|n| lambda * n.weight).sum();
        let second: f64 = kept
            .iter()
            .map(|n| lambda * n.weight * (n.re * n.re + n.im * n.im))
            .sum();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(second, 1.0 / lambda, epsilon = 1e-13);
    }
}
