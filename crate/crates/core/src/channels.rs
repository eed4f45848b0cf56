//! Channel models: diagonal one-mode Gaussian channels and the
//! measure-and-prepare family that saturates the entanglement-breaking limit.

use nalgebra::Matrix2;
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, Error, Result};
use crate::phase_space::{CoherentAmplitude, GaussianState, PhasePoint};
use crate::SHOT_NOISE;

/// Slack on the complete-positivity and entanglement-breaking inequalities.
pub const CHANNEL_TOL: f64 = 1e-12;

/// Diagonal one-mode Gaussian channel: `z̄ → t_z z̄`, `V_z → t_z² V_z + n_z`.
///
/// The symmetric channel of gain `G` and excess noise `ñ` has `t_x = t_p = √G`
/// and `n_z = ñ + |1 − G|/2`, so a coherent input leaves with variance
/// `ñ + (G + |1 − G|)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianChannelSpec {
    pub t_x: f64,
    pub t_p: f64,
    pub n_x: f64,
    pub n_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelClass {
    Unphysical,
    QuantumDomain,
    EntanglementBreaking,
}

impl GaussianChannelSpec {
    /// Validates finiteness and nonnegative noise. Complete positivity is a
    /// separate check, see [`is_completely_positive`](Self::is_completely_positive).
    pub fn new(t_x: f64, t_p: f64, n_x: f64, n_p: f64) -> Result<Self> {
        require_finite("t_x", t_x)?;
        require_finite("t_p", t_p)?;
        require_finite("n_x", n_x)?;
        require_finite("n_p", n_p)?;
        if n_x < 0.0 {
            return Err(invalid("n_x", format!("must be nonnegative, got {n_x}")));
        }
        if n_p < 0.0 {
            return Err(invalid("n_p", format!("must be nonnegative, got {n_p}")));
        }
        Ok(Self { t_x, t_p, n_x, n_p })
    }

    pub fn identity() -> Self {
        Self {
            t_x: 1.0,
            t_p: 1.0,
            n_x: 0.0,
            n_p: 0.0,
        }
    }

    /// Measure-and-prepare teleportation without entanglement: unit gain, one
    /// shot-noise unit added on each quadrature.
    pub fn classical_teleportation() -> Self {
        Self {
            t_x: 1.0,
            t_p: 1.0,
            n_x: 1.0,
            n_p: 1.0,
        }
    }

    /// Phase-insensitive channel of actual gain `G ≥ 0` and excess noise `ñ ≥ 0`.
    pub fn from_gain_noise(gain: f64, excess: f64) -> Result<Self> {
        require_finite("gain", gain)?;
        require_finite("excess", excess)?;
        if gain < 0.0 {
            return Err(invalid("gain", format!("must be nonnegative, got {gain}")));
        }
        if excess < 0.0 {
            return Err(invalid("excess", format!("must be nonnegative, got {excess}")));
        }
        let t = gain.sqrt();
        let n = excess + (1.0 - gain).abs() / 2.0;
        Self::new(t, t, n, n)
    }

    pub fn gain(&self, axis: crate::Quadrature) -> f64 {
        match axis {
            crate::Quadrature::X => self.t_x,
            crate::Quadrature::P => self.t_p,
        }
    }

    pub fn noise(&self, axis: crate::Quadrature) -> f64 {
        match axis {
            crate::Quadrature::X => self.n_x,
            crate::Quadrature::P => self.n_p,
        }
    }

    fn noise_geometric_mean(&self) -> f64 {
        (self.n_x * self.n_p).sqrt()
    }

    pub fn is_completely_positive(&self) -> bool {
        self.noise_geometric_mean() >= (1.0 - self.t_x * self.t_p).abs() / 2.0 - CHANNEL_TOL
    }

    pub(crate) fn ensure_completely_positive(&self) -> Result<()> {
        if self.is_completely_positive() {
            Ok(())
        } else {
            Err(Error::UnphysicalChannel {
                noise: self.noise_geometric_mean(),
                required: (1.0 - self.t_x * self.t_p).abs() / 2.0,
            })
        }
    }

    /// Mean and per-quadrature variance of the output for a coherent input.
    pub fn output_moments(&self, alpha: CoherentAmplitude) -> (PhasePoint, [f64; 2]) {
        let m = alpha.quadrature_means();
        (
            PhasePoint::new(self.t_x * m.x, self.t_p * m.p),
            [
                self.t_x * self.t_x * SHOT_NOISE + self.n_x,
                self.t_p * self.t_p * SHOT_NOISE + self.n_p,
            ],
        )
    }

    fn gain_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.t_x, 0.0, 0.0, self.t_p)
    }

    fn noise_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.n_x, 0.0, 0.0, self.n_p)
    }
}

/// Classifies a diagonal Gaussian channel.
///
/// Entanglement breaking iff `√(n_x n_p) ≥ (1 + |t_x t_p|)/2`: the noise then
/// splits as `N = N₁ + N₂` with `N₁ ≥ iΩ/2` and `N₂ ≥ i T Ω Tᵀ/2`, i.e. a
/// heterodyne-type measurement followed by re-preparation.
pub fn classify_gaussian_channel(spec: &GaussianChannelSpec) -> ChannelClass {
    if !spec.is_completely_positive() {
        ChannelClass::Unphysical
    } else if spec.noise_geometric_mean() >= (1.0 + (spec.t_x * spec.t_p).abs()) / 2.0 - CHANNEL_TOL
    {
        ChannelClass::EntanglementBreaking
    } else {
        ChannelClass::QuantumDomain
    }
}

/// Applies the channel to a single-mode state.
pub fn apply_gaussian_channel(
    spec: &GaussianChannelSpec,
    state: &GaussianState,
) -> Result<GaussianState> {
    if state.modes() != 1 {
        return Err(Error::MalformedState(format!(
            "expected a single-mode state, got {} modes",
            state.modes()
        )));
    }
    apply_to_mode(spec, state, 0)
}

/// Applies the channel to one mode of a multimode state.
pub fn apply_to_mode(
    spec: &GaussianChannelSpec,
    state: &GaussianState,
    mode: usize,
) -> Result<GaussianState> {
    spec.ensure_completely_positive()?;
    state.transform_mode(mode, &spec.gain_matrix(), &spec.noise_matrix())
}

/// Choi-type state `(E ⊗ I)(|ψ_ξ⟩⟨ψ_ξ|)` with the channel acting on mode A.
pub fn choi_state(spec: &GaussianChannelSpec, xi: f64) -> Result<GaussianState> {
    let tmss = GaussianState::two_mode_squeezed(xi)?;
    apply_to_mode(spec, &tmss, 0)
}

/// Measure-and-prepare map: heterodyne in the frame squeezed by `r`, outcome
/// `β` accepted with probability `exp(−c|β|²)`, then preparation of
/// `S_q S_R |γβ⟩`.
///
/// With `q = 0` and `c = 0` this is the entanglement-breaking map that saturates
/// the product limit; `q ≠ 0` squeezes the output for asymmetric gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurePrepareSpec {
    /// Squeezing `r` of the measurement frame.
    pub measure_squeeze: f64,
    /// Amplitude rescaling `γ ≥ 0` between outcome and prepared state.
    pub gamma: f64,
    /// Squeezing `R` of the prepared state.
    pub prepare_squeeze: f64,
    /// Output squeezing `q`.
    pub output_squeeze: f64,
    /// Post-selection coefficient `c ≥ 0`.
    pub acceptance: f64,
}

impl MeasurePrepareSpec {
    pub fn new(
        measure_squeeze: f64,
        gamma: f64,
        prepare_squeeze: f64,
        output_squeeze: f64,
        acceptance: f64,
    ) -> Result<Self> {
        require_finite("r", measure_squeeze)?;
        require_finite("gamma", gamma)?;
        require_finite("R", prepare_squeeze)?;
        require_finite("q", output_squeeze)?;
        require_finite("acceptance_c", acceptance)?;
        if gamma < 0.0 {
            return Err(invalid("gamma", format!("must be nonnegative, got {gamma}")));
        }
        if acceptance < 0.0 {
            return Err(invalid(
                "acceptance_c",
                format!("must be nonnegative, got {acceptance}"),
            ));
        }
        Ok(Self {
            measure_squeeze,
            gamma,
            prepare_squeeze,
            output_squeeze,
            acceptance,
        })
    }

    pub fn with_acceptance(self, acceptance: f64) -> Result<Self> {
        Self::new(
            self.measure_squeeze,
            self.gamma,
            self.prepare_squeeze,
            self.output_squeeze,
            acceptance,
        )
    }

    pub fn is_stochastic(&self) -> bool {
        self.acceptance > 0.0
    }

    /// Acceptance probability for outcome `β`.
    pub fn acceptance_probability(&self, beta: CoherentAmplitude) -> f64 {
        (-self.acceptance * beta.norm_sqr()).exp()
    }

    /// Total squeezing of the prepared state, `R + q`.
    pub fn output_frame_squeeze(&self) -> f64 {
        self.prepare_squeeze + self.output_squeeze
    }
}

/// Measure-and-prepare parameters that saturate the product limit at `(η, λ)`
/// for measurement squeezing `r`:
///
/// `γ = √η / √((1+λ)² cosh² r − sinh² r)`,
/// `e^R = √(((1+λ) cosh r + sinh r) / ((1+λ) cosh r − sinh r))`.
///
/// `λ = 0` is the flat-prior limit.
pub fn mp_from_benchmark(eta: f64, lambda: f64, r: f64, q: f64) -> Result<MeasurePrepareSpec> {
    require_finite("eta", eta)?;
    require_finite("lambda", lambda)?;
    if eta <= 0.0 {
        return Err(invalid("eta", format!("must be positive, got {eta}")));
    }
    if lambda < 0.0 {
        return Err(invalid("lambda", format!("must be nonnegative, got {lambda}")));
    }
    require_finite("r", r)?;
    let (ch, sh) = (r.cosh(), r.sinh());
    let w = 1.0 + lambda;
    let gamma = eta.sqrt() / ((w * ch).powi(2) - sh * sh).sqrt();
    let big_r = 0.5 * ((w * ch + sh) / (w * ch - sh)).ln();
    MeasurePrepareSpec::new(r, gamma, big_r, q, 0.0)
}

/// One run of the measure-and-prepare map on the coherent input `|α⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct MpTranscript {
    pub outcome: CoherentAmplitude,
    pub accepted: bool,
    /// Prepared output state; `None` when the outcome was rejected.
    pub prepared: Option<GaussianState>,
}

pub fn mp_transcript<R: Rng + ?Sized>(
    spec: &MeasurePrepareSpec,
    alpha: CoherentAmplitude,
    rng: &mut R,
) -> Result<MpTranscript> {
    // ⟨β|S_r†|α⟩: heterodyne on S_{−r}|α⟩.
    let frame = GaussianState::squeezed_coherent(alpha, -spec.measure_squeeze)?;
    let outcome = frame.heterodyne_distribution(0)?.sample(rng);
    let accepted = !spec.is_stochastic()
        || rng.random::<f64>() < spec.acceptance_probability(outcome);
    let prepared = if accepted {
        Some(GaussianState::squeezed_coherent(
            outcome.scale(spec.gamma),
            spec.output_frame_squeeze(),
        )?)
    } else {
        None
    };
    Ok(MpTranscript {
        outcome,
        accepted,
        prepared,
    })
}

/// Averaged noises of the saturating map:
/// `(V̄_x, V̄_p) = u⁻² (e^{−2R} + v², e^{2R} + v²) / 2` with
/// `v²/u² = η/(1+λ)` and `u⁻² = 1 + η/(1+λ)`.
pub fn mp_noise_closed_form(eta: f64, lambda: f64, big_r: f64) -> Result<(f64, f64)> {
    require_finite("eta", eta)?;
    require_finite("lambda", lambda)?;
    require_finite("R", big_r)?;
    if eta < 0.0 {
        return Err(invalid("eta", format!("must be nonnegative, got {eta}")));
    }
    if lambda < 0.0 {
        return Err(invalid("lambda", format!("must be nonnegative, got {lambda}")));
    }
    Ok(mp_noise_normalized(eta / (1.0 + lambda), big_r))
}

/// Closed form in terms of the normalized gain `η' = η/(1+λ)`.
pub(crate) fn mp_noise_normalized(eta_prime: f64, big_r: f64) -> (f64, f64) {
    let inv_u2 = 1.0 + eta_prime;
    let v2 = eta_prime / inv_u2;
    (
        inv_u2 * ((-2.0 * big_r).exp() + v2) / 2.0,
        inv_u2 * ((2.0 * big_r).exp() + v2) / 2.0,
    )
}

/// Any channel the toolkit can simulate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    Gaussian(GaussianChannelSpec),
    MeasurePrepare(MeasurePrepareSpec),
}

impl From<GaussianChannelSpec> for Channel {
    fn from(spec: GaussianChannelSpec) -> Self {
        Channel::Gaussian(spec)
    }
}

impl From<MeasurePrepareSpec> for Channel {
    fn from(spec: MeasurePrepareSpec) -> Self {
        Channel::MeasurePrepare(spec)
    }
}
