use serde::{Deserialize, Serialize};

use super::{BenchmarkParams, NoiseReport};
use crate::channels::mp_noise_normalized;
use crate::error::{invalid, require_finite, Result};
use crate::phase_space::Quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `[V̄_x − a][V̄_p − a] ≥ (1 + η/(1+λ))²/4`, `a = η/(2(1+λ))`.
    Product,
    /// Product form with unequal gains `(g_x, g_p)`.
    AsymmetricProduct,
    /// `(V̄_x + V̄_p)/2 ≥ 1/2 + η/(1+λ)`.
    Sum,
}

/// One inequality evaluated on a noise report. `margin > 0` means the
/// entanglement-breaking limit is violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub kind: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub violated: bool,
}

impl BoundVerdict {
    fn new(kind: BoundKind, lhs: f64, rhs: f64, margin: f64) -> Self {
        let margin = snap_rounding(margin, lhs, rhs);
        Self {
            kind,
            lhs,
            rhs,
            margin,
            violated: margin > 0.0,
        }
    }
}

/// Differences at the level of a few ulps of the operands are equality.
fn snap_rounding(margin: f64, lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if margin.abs() <= 8.0 * f64::EPSILON * scale {
        0.0
    } else {
        margin
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub product: BoundVerdict,
    pub sum: BoundVerdict,
    /// `(3 − V̄)/2`, a lower bound on the average fidelity; symmetric gains only.
    pub fidelity_lower_bound: Option<f64>,
}

impl BoundReport {
    pub fn violated(&self) -> bool {
        self.product.violated || self.sum.violated
    }
}

fn check_gains(params: &BenchmarkParams) -> Result<()> {
    if params.gain_x > 0.0 && params.gain_p > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            "gain",
            format!(
                "bounds need positive gains, got ({}, {})",
                params.gain_x, params.gain_p
            ),
        ))
    }
}

/// Product-form verdict. If either bracket is nonpositive the limit is
/// violated outright: the margin is then `rhs − min(lhs, 0) > 0`.
pub(crate) fn product_verdict(v_x: f64, v_p: f64, params: &BenchmarkParams) -> BoundVerdict {
    let w = 1.0 + params.lambda;
    let f_x = v_x - params.offset(Quadrature::X);
    let f_p = v_p - params.offset(Quadrature::P);
    let lhs = f_x * f_p;
    let rhs = 0.25 * (1.0 + params.eta() / w).powi(2);
    let margin = if f_x > 0.0 && f_p > 0.0 {
        rhs - lhs
    } else {
        rhs - lhs.min(0.0)
    };
    let kind = if params.is_symmetric() {
        BoundKind::Product
    } else {
        BoundKind::AsymmetricProduct
    };
    BoundVerdict::new(kind, lhs, rhs, margin)
}

/// Sum-form verdict on `(V̄_x + V̄_p)/2`. With unequal gains the right-hand side
/// becomes `1/2 + (g_x g_p + (g_x² + g_p²)/2) / (2(1+λ))`, which follows from
/// the product form by `|a| + |b| ≥ 2√|ab|`.
pub(crate) fn sum_verdict(v_x: f64, v_p: f64, params: &BenchmarkParams) -> BoundVerdict {
    let lhs = 0.5 * (v_x + v_p);
    let (g_x, g_p) = (params.gain_x, params.gain_p);
    let rhs = 0.5 + (g_x * g_p + 0.5 * (g_x * g_x + g_p * g_p)) / (2.0 * (1.0 + params.lambda));
    BoundVerdict::new(BoundKind::Sum, lhs, rhs, rhs - lhs)
}

/// Evaluates the product and sum limits on a report.
pub fn evaluate_bounds(report: &NoiseReport, params: &BenchmarkParams) -> Result<BoundReport> {
    check_gains(params)?;
    require_finite("v_x", report.v_x)?;
    require_finite("v_p", report.v_p)?;
    if report.success_prob < 1.0 && !report.normalized {
        return Err(invalid(
            "report",
            "a report with success probability below one must be normalized",
        ));
    }
    let product = product_verdict(report.v_x, report.v_p, params);
    let sum = sum_verdict(report.v_x, report.v_p, params);
    let fidelity_lower_bound = params
        .is_symmetric()
        .then(|| (3.0 - report.v_total()) / 2.0);
    Ok(BoundReport {
        product,
        sum,
        fidelity_lower_bound,
    })
}

/// Points `(V̄_x, V̄_p)` on the entanglement-breaking limit for symmetric gains,
/// one per preparation squeezing `R`.
pub fn boundary_curve(params: &BenchmarkParams, balances: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !params.is_symmetric() {
        return Err(invalid("gain", "boundary curves need symmetric gains"));
    }
    boundary_curve_normalized(params.eta() / (1.0 + params.lambda), balances)
}

/// Boundary curve in terms of the normalized gain `η' = η/(1+λ)`; the curve
/// depends on `(η, λ)` only through `η'`.
pub fn boundary_curve_normalized(eta_prime: f64, balances: &[f64]) -> Result<Vec<(f64, f64)>> {
    require_finite("eta_prime", eta_prime)?;
    if eta_prime < 0.0 {
        return Err(invalid(
            "eta_prime",
            format!("must be nonnegative, got {eta_prime}"),
        ));
    }
    balances
        .iter()
        .map(|&big_r| {
            require_finite("R", big_r)?;
            Ok(mp_noise_normalized(eta_prime, big_r))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sym(eta: f64, lambda: f64) -> BenchmarkParams {
        BenchmarkParams::symmetric(eta, lambda).unwrap()
    }

    #[test]
    fn one_quadrature_noise_threshold() {
        let report = NoiseReport::new(1.0, 0.5);
        let at = |lambda: f64| evaluate_bounds(&report, &sym(1.0, lambda)).unwrap().product;
        let zero = at(0.0);
        assert_eq!(zero.lhs, 0.0);
        assert_eq!(zero.rhs, 1.0);
        assert!(zero.violated);
        assert!(at(1.0).violated);
        assert!(at(3.9).violated);
        let four = at(4.0);
        assert_abs_diff_eq!(four.lhs, 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(four.rhs, 0.36, epsilon = 1e-15);
        assert!(four.margin.abs() <= 1e-12);
        assert!(!four.violated);
        assert!(!at(5.0).violated);
    }

    #[test]
    fn uncertainty_relation_limit() {
        let g = 1e-12;
        let p = BenchmarkParams::new(1.0, g, g).unwrap();
        let v = evaluate_bounds(&NoiseReport::new(0.5, 0.5), &p).unwrap().product;
        assert_abs_diff_eq!(v.rhs, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(v.lhs, 0.25, epsilon = 1e-15);
        assert!(!v.violated);
        assert!(evaluate_bounds(&NoiseReport::new(0.5, 0.5), &BenchmarkParams::new(1.0, 0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn attenuator_witness() {
        let v = evaluate_bounds(&NoiseReport::new(1.4, 1.4), &sym(2.0, 1.0)).unwrap().product;
        assert_abs_diff_eq!(v.lhs, 0.81, epsilon = 1e-14);
        assert_abs_diff_eq!(v.rhs, 1.0, epsilon = 1e-15);
        assert!(v.violated);
    }

    #[test]
    fn teleportation_saturates_sum_form() {
        let b = evaluate_bounds(&NoiseReport::new(1.5, 1.5), &sym(1.0, 0.0)).unwrap();
        assert_eq!(b.sum.lhs, 1.5);
        assert_eq!(b.sum.rhs, 1.5);
        assert!(!b.sum.violated);
        assert_eq!(b.fidelity_lower_bound, Some(0.0));
        assert!(!b.product.violated);
    }

    #[test]
    fn identity_at_flat_prior() {
        let b = evaluate_bounds(&NoiseReport::new(0.5, 0.5), &sym(1.0, 0.0)).unwrap();
        assert_eq!(b.product.lhs, 0.0);
        assert_eq!(b.product.margin, 1.0);
        assert!(b.product.violated);
        assert_eq!(b.sum.margin, 1.0);
        assert_eq!(b.fidelity_lower_bound, Some(1.0));
    }

    #[test]
    fn unnormalized_stochastic_report_rejected() {
        let report = NoiseReport {
            v_x: 1.0,
            v_p: 1.0,
            success_prob: 0.5,
            normalized: false,
        };
        assert!(evaluate_bounds(&report, &sym(1.0, 1.0)).is_err());
    }

    #[test]
    fn boundary_curve_examples() {
        let pts = boundary_curve(&sym(2.0, 1.0), &[0.0]).unwrap();
        assert_abs_diff_eq!(pts[0].0, 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pts[0].1, 1.5, epsilon = 1e-15);
        let pts = boundary_curve(&sym(1.0, 1.0), &[0.0]).unwrap();
        assert_abs_diff_eq!(pts[0].0, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pts[0].1, 1.0, epsilon = 1e-15);

        let rs: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.2).collect();
        for (vx, vp) in boundary_curve_normalized(0.0, &rs).unwrap() {
            assert_abs_diff_eq!(vx * vp, 0.25, epsilon = 1e-15);
        }
        for &(eta, lambda) in &[(1.0, 1.0), (3.0, 0.2), (0.4, 5.0)] {
            let p = sym(eta, lambda);
            for (vx, vp) in boundary_curve(&p, &rs).unwrap() {
                let v = product_verdict(vx, vp, &p);
                assert!(v.margin.abs() <= 1e-12, "{v:?}");
            }
        }
        assert!(boundary_curve(&BenchmarkParams::with_balance(1.0, 1.0, 0.2).unwrap(), &rs).is_err());
    }

    #[test]
    fn asymmetric_reduces_to_symmetric() {
        // At q = 0 the asymmetric form is exactly the symmetric one.
        let p = BenchmarkParams::with_balance(1.7, 0.4, 0.0).unwrap();
        let a = product_verdict(1.2, 0.9, &p);
        let s = product_verdict(1.2, 0.9, &sym(1.7, 0.4));
        assert_abs_diff_eq!(a.lhs, s.lhs, epsilon = 1e-15);
        assert_abs_diff_eq!(a.rhs, s.rhs, epsilon = 1e-15);
    }
}
