//! Simulation and certification toolkit for the uncertainty-product benchmark of
//! continuous-variable quantum channels.
//!
//! A channel is probed with coherent states drawn from a Gaussian prior of width
//! `1/λ` and its output is measured by homodyne detection. The prior-averaged
//! mean-square deviations `(V̄_x, V̄_p)` about the gain-rescaled input mean are
//! compared with the product limit obeyed by every entanglement-breaking channel:
//!
//! ```text
//! [V̄_x − η/(2(1+λ))] [V̄_p − η/(2(1+λ))] ≥ (1 + η/(1+λ))² / 4
//! ```
//!
//! A violation certifies that the channel is in the quantum domain.
//!
//! Conventions: `[x̂, p̂] = i`, shot noise `V₀ = 1/2`, quadratures ordered
//! `(x₁, p₁, x₂, p₂, …)`, squeezer `S_r = exp(r(â² − â†²)/2)` so that
//! `S_r` reduces the x-variance to `e^{−2r}/2`.

pub mod benchmark;
pub mod channels;
pub mod document;
pub mod error;
pub mod fock;
pub mod montecarlo;
pub mod phase_space;
pub mod quadrature;

pub use benchmark::{
    average_fidelity_gaussian, average_noise, average_noise_gaussian, average_noise_mp,
    boundary_curve, evaluate_bounds, find_violation, hybrid_lhs, params_from_hybrid, BenchmarkParams,
    BoundKind, BoundReport, BoundVerdict, HybridTestParams, HybridValue, NoiseReport,
    ViolationSearch,
};
pub use channels::{
    choi_state, classify_gaussian_channel, mp_from_benchmark, mp_noise_closed_form, mp_transcript,
    Channel, ChannelClass, GaussianChannelSpec, MeasurePrepareSpec, MpTranscript,
};
pub use document::ChannelDocument;
pub use error::{Error, Result};
pub use phase_space::{CoherentAmplitude, GaussianState, PhasePoint, Quadrature, StateKind};

/// Quadrature variance of the vacuum and of every coherent state.
pub const SHOT_NOISE: f64 = 0.5;
