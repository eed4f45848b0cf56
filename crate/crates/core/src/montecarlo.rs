//! End-to-end simulation of the benchmark experiment and statistically
//! certified verdicts.
//!
//! Trials are split into chunks of [`CHUNK_TRIALS`]. Chunk `k` draws from a
//! ChaCha8 generator seeded with the experiment seed on stream `k`, and chunk
//! statistics are merged in chunk order, so an estimate depends only on
//! `(seed, config, channel)` and not on the number of worker threads.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::benchmark::BenchmarkParams;
use crate::channels::{mp_transcript, Channel};
use crate::error::{invalid, require_finite, Error, Result};
use crate::phase_space::{CoherentAmplitude, Quadrature};

pub const CHUNK_TRIALS: u64 = 4096;

/// Minimum accepted trials per quadrature before [`certify`] will decide.
pub const MIN_CERTIFY_COUNT: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// x on even trial indices, p on odd ones.
    #[default]
    Alternate,
    /// Fair coin per trial.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub params: BenchmarkParams,
    pub schedule: Schedule,
}

impl ExperimentConfig {
    pub fn new(n_samples: u64, seed: u64, params: BenchmarkParams) -> Result<Self> {
        let config = Self {
            n_samples,
            seed,
            params,
            schedule: Schedule::Alternate,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(invalid("n_samples", "must be positive"));
        }
        if !(self.params.lambda > 0.0) {
            return Err(invalid(
                "lambda",
                format!("sampling needs lambda > 0, got {}", self.params.lambda),
            ));
        }
        Ok(())
    }
}

/// Sample estimate of the averaged noises.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub v_x: f64,
    pub v_p: f64,
    pub se_x: f64,
    pub se_p: f64,
    pub count_x: u64,
    pub count_p: u64,
    pub trials: u64,
    pub accepted: u64,
    pub acceptance_rate: f64,
}

impl Estimate {
    pub fn get(&self, axis: Quadrature) -> (f64, f64, u64) {
        match axis {
            Quadrature::X => (self.v_x, self.se_x, self.count_x),
            Quadrature::P => (self.v_p, self.se_p, self.count_p),
        }
    }
}

/// Draws `α` from `p_λ(α) = (λ/π) e^{−λ|α|²}`.
pub fn sample_prior<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<CoherentAmplitude> {
    require_finite("lambda", lambda)?;
    if lambda <= 0.0 {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let sd = (0.5 / lambda).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Ok(CoherentAmplitude::new(sd * re, sd * im))
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Welford {
            n,
            mean: self.mean + d * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64,
        }
    }

    fn standard_error(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ChunkStats {
    x: Welford,
    p: Welford,
    accepted: u64,
}

/// Output quadrature outcome for one trial, or `None` if rejected.
fn trial<R: Rng + ?Sized>(
    channel: &Channel,
    alpha: CoherentAmplitude,
    axis: Quadrature,
    rng: &mut R,
) -> Result<Option<f64>> {
    let (mean, var) = match channel {
        Channel::Gaussian(spec) => {
            let (m, v) = spec.output_moments(alpha);
            (m.get(axis), v[axis.offset()])
        }
        Channel::MeasurePrepare(spec) => match mp_transcript(spec, alpha, rng)?.prepared {
            Some(state) => state.quadrature_marginal(0, axis)?,
            None => return Ok(None),
        },
    };
    let noise: f64 = rng.sample(StandardNormal);
    Ok(Some(mean + var.sqrt() * noise))
}

fn run_chunk(channel: &Channel, config: &ExperimentConfig, chunk: u64) -> Result<ChunkStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(chunk);
    let start = chunk * CHUNK_TRIALS;
    let end = (start + CHUNK_TRIALS).min(config.n_samples);
    let mut stats = ChunkStats::default();
    for index in start..end {
        let axis = match config.schedule {
            Schedule::Alternate if index % 2 == 0 => Quadrature::X,
            Schedule::Alternate => Quadrature::P,
            Schedule::Random if rng.random::<bool>() => Quadrature::X,
            Schedule::Random => Quadrature::P,
        };
        let alpha = sample_prior(config.params.lambda, &mut rng)?;
        let Some(z) = trial(channel, alpha, axis, &mut rng)? else {
            continue;
        };
        let target = config.params.gain(axis) * alpha.quadrature_means().get(axis);
        let sq = (z - target).powi(2);
        stats.accepted += 1;
        match axis {
            Quadrature::X => stats.x.push(sq),
            Quadrature::P => stats.p.push(sq),
        }
    }
    Ok(stats)
}

/// Simulates `n_samples` trials. Rejected trials of stochastic maps are
/// dropped, so the estimate is the acceptance-conditioned noise.
pub fn run_experiment(channel: &Channel, config: &ExperimentConfig) -> Result<Estimate> {
    config.validate()?;
    if let Channel::Gaussian(spec) = channel {
        spec.ensure_completely_positive()?;
    }
    let chunks = config.n_samples.div_ceil(CHUNK_TRIALS);
    let per_chunk: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|k| run_chunk(channel, config, k))
        .collect::<Result<_>>()?;
    let total = per_chunk.into_iter().fold(ChunkStats::default(), |acc, c| ChunkStats {
        x: acc.x.merge(c.x),
        p: acc.p.merge(c.p),
        accepted: acc.accepted + c.accepted,
    });
    if total.accepted == 0 {
        return Err(Error::NoAcceptedTrials {
            trials: config.n_samples,
        });
    }
    let value = |w: &Welford| if w.n == 0 { f64::NAN } else { w.mean };
    Ok(Estimate {
        v_x: value(&total.x),
        v_p: value(&total.p),
        se_x: total.x.standard_error(),
        se_p: total.p.standard_error(),
        count_x: total.x.n,
        count_p: total.p.n,
        trials: config.n_samples,
        accepted: total.accepted,
        acceptance_rate: total.accepted as f64 / config.n_samples as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// The product limit is violated at the requested confidence.
    Violation,
    /// No conclusion. Never read as evidence of entanglement breaking.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedVerdict {
    pub status: Certification,
    pub confidence: f64,
    pub z_star: f64,
    /// `v̂_z + z*·se_z − g_z²/(2(1+λ))`.
    pub upper_x: f64,
    pub upper_p: f64,
    pub lhs_upper: f64,
    pub rhs: f64,
}

impl CertifiedVerdict {
    pub fn certified(&self) -> bool {
        self.status == Certification::Violation
    }
}

/// Conservative test of the product limit. Each factor is inflated by its own
/// one-sided normal quantile; a violation is certified only if both inflated
/// factors are positive and their product is still below the right-hand side.
pub fn certify(est: &Estimate, params: &BenchmarkParams, confidence: f64) -> Result<CertifiedVerdict> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(invalid(
            "confidence",
            format!("must lie in (0, 1), got {confidence}"),
        ));
    }
    for axis in Quadrature::BOTH {
        let (_, se, count) = est.get(axis);
        if count < MIN_CERTIFY_COUNT || !se.is_finite() {
            return Err(Error::InsufficientSamples {
                count,
                required: MIN_CERTIFY_COUNT,
            });
        }
    }
    let z_star = Normal::standard().inverse_cdf(confidence);
    let upper = |axis: Quadrature| {
        let (v, se, _) = est.get(axis);
        v + z_star * se - params.offset(axis)
    };
    let (upper_x, upper_p) = (upper(Quadrature::X), upper(Quadrature::P));
    let lhs_upper = upper_x * upper_p;
    let rhs = 0.25 * (1.0 + params.eta() / (1.0 + params.lambda)).powi(2);
    let status = if upper_x > 0.0 && upper_p > 0.0 && lhs_upper < rhs {
        Certification::Violation
    } else {
        Certification::Inconclusive
    };
    Ok(CertifiedVerdict {
        status,
        confidence,
        z_star,
        upper_x,
        upper_p,
        lhs_upper,
        rhs,
    })
}
