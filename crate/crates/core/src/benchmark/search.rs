//! Deterministic search for benchmark settings that expose a quantum-domain
//! Gaussian channel.

use serde::{Deserialize, Serialize};

use super::bounds::product_verdict;
use super::{average_noise_gaussian, BenchmarkParams, NoiseReport};
use crate::channels::GaussianChannelSpec;
use crate::error::Result;
use crate::BoundVerdict;

/// Grid and refinement settings. `eta_range` is relative to `|t_x t_p|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub eta_range: (f64, f64),
    pub eta_points: usize,
    pub lambda_range: (f64, f64),
    pub lambda_points: usize,
    pub q_range: (f64, f64),
    pub q_points: usize,
    pub refine_steps: usize,
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self {
            eta_range: (1e-2, 1e2),
            eta_points: 40,
            lambda_range: (1e-3, 1e2),
            lambda_points: 40,
            q_range: (-2.0, 2.0),
            q_points: 21,
            refine_steps: 20,
        }
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linear(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

fn linear(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Best setting found and its product-form verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationSearch {
    pub params: BenchmarkParams,
    pub report: NoiseReport,
    pub verdict: BoundVerdict,
}

/// Point in search coordinates `(ln η, ln λ, q)`.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    log_eta: f64,
    log_lambda: f64,
    q: f64,
    found: ViolationSearch,
}

impl Candidate {
    /// Larger margin wins; ties go to smaller λ, then smaller |q|.
    fn beats(&self, other: &Candidate) -> bool {
        let (a, b) = (self.found.verdict.margin, other.found.verdict.margin);
        if a != b {
            return a > b;
        }
        if self.log_lambda != other.log_lambda {
            return self.log_lambda < other.log_lambda;
        }
        self.q.abs() < other.q.abs()
    }
}

fn evaluate(spec: &GaussianChannelSpec, log_eta: f64, log_lambda: f64, q: f64) -> Result<Candidate> {
    let params = BenchmarkParams::with_balance(log_eta.exp(), log_lambda.exp(), q)?;
    let report = average_noise_gaussian(spec, &params)?;
    let verdict = product_verdict(report.v_x, report.v_p, &params);
    Ok(Candidate {
        log_eta,
        log_lambda,
        q,
        found: ViolationSearch {
            params,
            report,
            verdict,
        },
    })
}

/// Maximizes the product-form margin with the default grid.
pub fn find_violation(spec: &GaussianChannelSpec) -> Result<ViolationSearch> {
    find_violation_with(spec, &SearchGrid::default())
}

/// Grid scan over `(η, λ)` (and `q` when the channel treats the quadratures
/// differently), two seed points, then coordinate descent with step halving.
pub fn find_violation_with(spec: &GaussianChannelSpec, grid: &SearchGrid) -> Result<ViolationSearch> {
    spec.ensure_completely_positive()?;
    let tt = (spec.t_x * spec.t_p).abs();
    let scale = if tt > 0.0 { tt } else { 1.0 };
    let asymmetric = spec.t_x != spec.t_p || spec.n_x != spec.n_p;

    let etas = log_space(grid.eta_range.0 * scale, grid.eta_range.1 * scale, grid.eta_points);
    let lambdas = log_space(grid.lambda_range.0, grid.lambda_range.1, grid.lambda_points);
    let qs = if asymmetric {
        linear(grid.q_range.0, grid.q_range.1, grid.q_points)
    } else {
        vec![0.0]
    };

    let mut best = evaluate(spec, (4.0 * scale).ln(), 0.0, 0.0)?;
    let second_seed = evaluate(spec, scale.ln(), grid.lambda_range.0.ln(), 0.0)?;
    if second_seed.beats(&best) {
        best = second_seed;
    }
    for &eta in &etas {
        for &lambda in &lambdas {
            for &q in &qs {
                let c = evaluate(spec, eta.ln(), lambda.ln(), q)?;
                if c.beats(&best) {
                    best = c;
                }
            }
        }
    }

    let step_of = |lo: f64, hi: f64, n: usize| {
        if n > 1 {
            (hi - lo) / (n - 1) as f64
        } else {
            0.0
        }
    };
    let mut steps = [
        step_of(grid.eta_range.0.ln(), grid.eta_range.1.ln(), grid.eta_points),
        step_of(grid.lambda_range.0.ln(), grid.lambda_range.1.ln(), grid.lambda_points),
        if asymmetric {
            step_of(grid.q_range.0, grid.q_range.1, grid.q_points)
        } else {
            0.0
        },
    ];
    for _ in 0..grid.refine_steps {
        let mut improved = false;
        for (axis, step) in steps.iter().enumerate() {
            if *step == 0.0 {
                continue;
            }
            for sign in [-1.0, 1.0] {
                let mut coords = [best.log_eta, best.log_lambda, best.q];
                coords[axis] += sign * step;
                let c = evaluate(spec, coords[0], coords[1], coords[2])?;
                if c.beats(&best) {
                    best = c;
                    improved = true;
                }
            }
        }
        if !improved {
            for step in steps.iter_mut() {
                *step *= 0.5;
            }
        }
    }
    Ok(best.found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{classify_gaussian_channel, ChannelClass};

    #[test]
    fn attenuator_violates_near_witness() {
        let spec = GaussianChannelSpec::from_gain_noise(0.5, 0.0).unwrap();
        let s = find_violation(&spec).unwrap();
        assert!(s.verdict.violated);
        assert!(s.verdict.margin > 0.0);
        let witness = evaluate(&spec, 2f64.ln(), 0.0, 0.0).unwrap();
        assert!(witness.found.verdict.violated);
        assert!(s.verdict.margin >= witness.found.verdict.margin);
    }

    #[test]
    fn teleportation_never_violates() {
        let s = find_violation(&GaussianChannelSpec::classical_teleportation()).unwrap();
        assert!(s.verdict.margin <= 0.0, "{s:?}");
        assert!(!s.verdict.violated);
    }

    #[test]
    fn one_quadrature_noise_violates_at_unit_gain() {
        let spec = GaussianChannelSpec::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(classify_gaussian_channel(&spec), ChannelClass::QuantumDomain);
        let s = find_violation(&spec).unwrap();
        assert!(s.verdict.violated);
        let p = BenchmarkParams::symmetric(1.0, 1.0).unwrap();
        let r = average_noise_gaussian(&spec, &p).unwrap();
        assert!(product_verdict(r.v_x, r.v_p, &p).violated);
    }

    #[test]
    fn zero_gain_channel_uses_unit_scale() {
        let spec = GaussianChannelSpec::new(0.0, 0.0, 0.5, 0.5).unwrap();
        let s = find_violation(&spec).unwrap();
        assert!(!s.verdict.violated);
    }

    #[test]
    fn spacing_helpers() {
        let v = log_space(1e-2, 1e2, 5);
        assert!((v[2] - 1.0).abs() < 1e-12);
        assert_eq!(linear(-2.0, 2.0, 21)[10], 0.0);
        assert_eq!(linear(0.0, 1.0, 1), vec![0.5]);
    }
}
