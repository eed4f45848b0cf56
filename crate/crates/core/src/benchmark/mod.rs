//! Averaged noise functionals and the entanglement-breaking limits.
//!
//! For an input ensemble of coherent states `|α⟩` drawn from
//! `p_λ(α) = (λ/π) e^{−λ|α|²}` and quadrature gains `(g_x, g_p)`, the
//! mean-square deviation of quadrature `z` is
//!
//! ```text
//! V̄_z = ∫ p_λ(α) tr[(ẑ − g_z z_α)² E(ρ_α)] d²α
//! ```
//!
//! Stochastic maps are normalized by their success probability.

mod bounds;
mod hybrid;
mod search;

pub use bounds::{
    boundary_curve, boundary_curve_normalized, evaluate_bounds, BoundKind, BoundReport,
    BoundVerdict,
};
pub use hybrid::{hybrid_lhs, params_from_hybrid, HybridTestParams, HybridValue};
pub use search::{find_violation, SearchGrid, ViolationSearch};

use serde::{Deserialize, Serialize};

use crate::channels::{Channel, GaussianChannelSpec, MeasurePrepareSpec};
use crate::error::{invalid, require_finite, Result};
use crate::phase_space::Quadrature;
use crate::SHOT_NOISE;

/// Prior width and quadrature gains of a benchmark setting.
///
/// `λ = 0` (flat prior) is accepted by the bound formulas only. Zero gains are
/// representable as the `η → 0` limit but rejected by [`evaluate_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkParams {
    pub lambda: f64,
    pub gain_x: f64,
    pub gain_p: f64,
}

impl BenchmarkParams {
    pub fn new(lambda: f64, gain_x: f64, gain_p: f64) -> Result<Self> {
        require_finite("lambda", lambda)?;
        require_finite("gain_x", gain_x)?;
        require_finite("gain_p", gain_p)?;
        if lambda < 0.0 {
            return Err(invalid("lambda", format!("must be nonnegative, got {lambda}")));
        }
        if gain_x < 0.0 || gain_p < 0.0 {
            return Err(invalid(
                "gain",
                format!("gains must be nonnegative, got ({gain_x}, {gain_p})"),
            ));
        }
        Ok(Self {
            lambda,
            gain_x,
            gain_p,
        })
    }

    /// Symmetric gains `g_x = g_p = √η`.
    pub fn symmetric(eta: f64, lambda: f64) -> Result<Self> {
        require_finite("eta", eta)?;
        if eta < 0.0 {
            return Err(invalid("eta", format!("must be nonnegative, got {eta}")));
        }
        Self::new(lambda, eta.sqrt(), eta.sqrt())
    }

    /// Gains `(√η e^{−q}, √η e^{q})`.
    pub fn with_balance(eta: f64, lambda: f64, q: f64) -> Result<Self> {
        require_finite("q", q)?;
        let s = Self::symmetric(eta, lambda)?;
        Self::new(lambda, s.gain_x * (-q).exp(), s.gain_p * q.exp())
    }

    /// `η = g_x g_p`.
    pub fn eta(&self) -> f64 {
        self.gain_x * self.gain_p
    }

    /// `q = ln(g_p/g_x)/2`.
    pub fn balance(&self) -> f64 {
        0.5 * (self.gain_p / self.gain_x).ln()
    }

    pub fn is_symmetric(&self) -> bool {
        self.gain_x == self.gain_p
    }

    pub fn gain(&self, axis: Quadrature) -> f64 {
        match axis {
            Quadrature::X => self.gain_x,
            Quadrature::P => self.gain_p,
        }
    }

    /// `g_z² / (2(1+λ))`, the offset subtracted from `V̄_z` in the product limit.
    pub fn offset(&self, axis: Quadrature) -> f64 {
        let g = self.gain(axis);
        g * g / (2.0 * (1.0 + self.lambda))
    }
}

/// Measured or computed averaged noises.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub v_x: f64,
    pub v_p: f64,
    pub success_prob: f64,
    /// `true` when `v_x`, `v_p` are conditioned on acceptance.
    pub normalized: bool,
}

impl NoiseReport {
    /// Deterministic (trace-preserving) report.
    pub fn new(v_x: f64, v_p: f64) -> Self {
        Self {
            v_x,
            v_p,
            success_prob: 1.0,
            normalized: false,
        }
    }

    pub fn conditioned(v_x: f64, v_p: f64, success_prob: f64) -> Self {
        Self {
            v_x,
            v_p,
            success_prob,
            normalized: success_prob < 1.0,
        }
    }

    pub fn v_total(&self) -> f64 {
        self.v_x + self.v_p
    }

    pub fn get(&self, axis: Quadrature) -> f64 {
        match axis {
            Quadrature::X => self.v_x,
            Quadrature::P => self.v_p,
        }
    }
}

fn require_finite_prior(params: &BenchmarkParams) -> Result<()> {
    if params.lambda > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            "lambda",
            "the noise functional needs a normalizable prior (lambda > 0)",
        ))
    }
}

/// Closed-form `V̄_z = (t_z − g_z)²/λ + t_z²/2 + n_z` for a diagonal Gaussian channel.
///
/// `λ = 0` is accepted only when `t_z = g_z` on both quadratures, where the
/// divergent term vanishes identically.
pub fn average_noise_gaussian(
    spec: &GaussianChannelSpec,
    params: &BenchmarkParams,
) -> Result<NoiseReport> {
    spec.ensure_completely_positive()?;
    let flat_ok = spec.t_x == params.gain_x && spec.t_p == params.gain_p;
    if !flat_ok {
        require_finite_prior(params)?;
    }
    let v = |axis: Quadrature| {
        let (t, g, n) = (spec.gain(axis), params.gain(axis), spec.noise(axis));
        let mismatch = if t == g { 0.0 } else { (t - g).powi(2) / params.lambda };
        mismatch + t * t * SHOT_NOISE + n
    };
    Ok(NoiseReport::new(v(Quadrature::X), v(Quadrature::P)))
}

/// Averaged noises of a measure-and-prepare map, including post-selection.
///
/// Per quadrature the input mean `z ~ N(0, 1/λ)` and the heterodyne outcome
/// `b = m z + ε` with `m = e^{±r}`, `ε ~ N(0, (m² + 1)/2)` are jointly Gaussian.
/// Acceptance `exp(−c|β|²) = Π_z exp(−c b_z²/2)` reweights that pair, which
/// stays Gaussian; the output mean is `k b` with `k = γ e^{∓(R+q)}` and the
/// prepared variance is `e^{∓2(R+q)}/2`.
pub fn average_noise_mp(spec: &MeasurePrepareSpec, params: &BenchmarkParams) -> Result<NoiseReport> {
    let r = spec.measure_squeeze;
    let big_r = spec.output_frame_squeeze();
    let c = spec.acceptance;
    let exact_flat = c == 0.0
        && params.gain_x == spec.gamma * (r - big_r).exp()
        && params.gain_p == spec.gamma * (big_r - r).exp();
    if params.lambda == 0.0 && !exact_flat {
        require_finite_prior(params)?;
    }

    let per_axis = |axis: Quadrature| -> (f64, f64) {
        let sign = match axis {
            Quadrature::X => 1.0,
            Quadrature::P => -1.0,
        };
        let m = (sign * r).exp();
        let k = spec.gamma * (-sign * big_r).exp();
        let prep_var = (-2.0 * sign * big_r).exp() * SHOT_NOISE;
        let noise_var = (m * m + 1.0) * SHOT_NOISE;
        let g = params.gain(axis);
        if params.lambda == 0.0 {
            // Only reached when k m = g and c = 0.
            return (prep_var + k * k * noise_var, 1.0);
        }
        let s_zz = 1.0 / params.lambda;
        let s_zb = m / params.lambda;
        let s_bb = m * m / params.lambda + noise_var;
        // Sherman–Morrison for (Σ⁻¹ + diag(0, c))⁻¹.
        let shrink = c / (1.0 + c * s_bb);
        let (a_zz, a_zb, a_bb) = (
            s_zz - shrink * s_zb * s_zb,
            s_zb - shrink * s_zb * s_bb,
            s_bb - shrink * s_bb * s_bb,
        );
        let deviation = g * g * a_zz - 2.0 * g * k * a_zb + k * k * a_bb;
        (prep_var + deviation, 1.0 / (1.0 + c * s_bb).sqrt())
    };
    let (v_x, p_x) = per_axis(Quadrature::X);
    let (v_p, p_p) = per_axis(Quadrature::P);
    Ok(if spec.is_stochastic() {
        NoiseReport::conditioned(v_x, v_p, p_x * p_p)
    } else {
        NoiseReport::new(v_x, v_p)
    })
}

/// Dispatches to the analytic noise functional of either channel family.
pub fn average_noise(channel: &Channel, params: &BenchmarkParams) -> Result<NoiseReport> {
    match channel {
        Channel::Gaussian(spec) => average_noise_gaussian(spec, params),
        Channel::MeasurePrepare(spec) => average_noise_mp(spec, params),
    }
}

/// Average fidelity `∫ p_λ(α) ⟨α_g| E(ρ_α) |α_g⟩ d²α` of a diagonal Gaussian
/// channel, where `|α_g⟩` is the coherent state with mean `(g_x x_α, g_p p_α)`.
///
/// The overlap of a Gaussian state `(m, σ)` with a coherent state `(m₀, I/2)` is
/// `exp(−½ dᵀ(σ + I/2)⁻¹ d)/√det(σ + I/2)` with `d = m − m₀`; averaging over
/// `d_z ~ N(0, (t_z − g_z)²/λ)` gives a product of one-dimensional factors.
pub fn average_fidelity_gaussian(
    spec: &GaussianChannelSpec,
    params: &BenchmarkParams,
) -> Result<f64> {
    spec.ensure_completely_positive()?;
    let mut fidelity = 1.0;
    for axis in Quadrature::BOTH {
        let (t, g, n) = (spec.gain(axis), params.gain(axis), spec.noise(axis));
        let sum_cov = t * t * SHOT_NOISE + n + SHOT_NOISE;
        let spread = if t == g {
            0.0
        } else {
            require_finite_prior(params)?;
            (t - g).powi(2) / params.lambda
        };
        fidelity /= (sum_cov * (1.0 + spread / sum_cov)).sqrt();
    }
    Ok(fidelity)
}
