//! Hybrid separable condition on two-mode states and the map from its
//! parameters `(ξ, u, v)` to benchmark parameters `(η, λ)`.

use serde::{Deserialize, Serialize};

use super::BenchmarkParams;
use crate::error::{invalid, Error, Result};
use crate::phase_space::GaussianState;

/// Tolerance on `u² + v² = 1`.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridTestParams {
    pub xi: f64,
    pub u: f64,
    pub v: f64,
}

impl HybridTestParams {
    pub fn new(xi: f64, u: f64, v: f64) -> Result<Self> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(invalid("xi", format!("must lie in (0, 1), got {xi}")));
        }
        if !u.is_finite() || !v.is_finite() || (u * u + v * v - 1.0).abs() > UNIT_TOL {
            return Err(invalid(
                "u, v",
                format!("need u² + v² = 1, got u = {u}, v = {v}"),
            ));
        }
        Ok(Self { xi, u, v })
    }

    /// `(u, v) = (cos θ, sin θ)`.
    pub fn from_angle(xi: f64, theta: f64) -> Result<Self> {
        Self::new(xi, theta.cos(), theta.sin())
    }
}

/// The two brackets of the hybrid condition and their product. Separable
/// states have `product ≥ 1/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridValue {
    pub term_x: f64,
    pub term_p: f64,
    pub product: f64,
}

/// `term_x = ⟨(u x̂_A − v x̂_B)²⟩`, `term_p = ⟨(u p̂_A + v p̂_B)²⟩` on a two-mode
/// Gaussian state.
///
/// These second moments equal the coherent-basis integrals
/// `∫ tr_A[(u ẑ_A − v z_α)² ⟨α*|J|α*⟩_B] d²α/π − v²/2`; the Fock oracle
/// evaluates that integral form literally.
pub fn hybrid_lhs(state: &GaussianState, hp: &HybridTestParams) -> Result<HybridValue> {
    if state.modes() != 2 {
        return Err(Error::MalformedState(format!(
            "hybrid condition needs a two-mode state, got {} modes",
            state.modes()
        )));
    }
    let (mean, cov) = (state.mean(), state.cov());
    let (u, v) = (hp.u, hp.v);
    // x: coefficients (u, −v) on (x_A, x_B) = indices (0, 2); p: (u, v) on (1, 3).
    let second_moment = |a: usize, b: usize, cb: f64| {
        let var = u * u * cov[(a, a)] + 2.0 * u * cb * cov[(a, b)] + cb * cb * cov[(b, b)];
        let m = u * mean[a] + cb * mean[b];
        var + m * m
    };
    let term_x = second_moment(0, 2, -v);
    let term_p = second_moment(1, 3, v);
    Ok(HybridValue {
        term_x,
        term_p,
        product: term_x * term_p,
    })
}

/// `λ = (1 − ξ²)/ξ²`, `η = (v/u)²/ξ²`, symmetric gains `√η`.
///
/// Then `1/u² = 1 + η/(1+λ)`. For `uv ≥ 0` the coherent-basis integral of the
/// hybrid condition on the Choi state equals `u² V̄_z(η, λ)`; `uv < 0` would
/// correspond to the negative gain `−√η`.
pub fn params_from_hybrid(hp: &HybridTestParams) -> Result<BenchmarkParams> {
    if hp.u == 0.0 {
        return Err(invalid("u", "must be nonzero"));
    }
    let xi2 = hp.xi * hp.xi;
    let lambda = (1.0 - xi2) / xi2;
    let eta = (hp.v / hp.u).powi(2) / xi2;
    BenchmarkParams::symmetric(eta, lambda)
}
