//! Quadrature-plus-Fock evaluation of the averaged noises and of the hybrid
//! separable condition.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{coherent_amplitudes, padded, squeezed_coherent_amplitudes, FockOperators, FockState};
use crate::benchmark::BenchmarkParams;
use crate::channels::{Channel, GaussianChannelSpec, MeasurePrepareSpec};
use crate::error::{invalid, require_finite, Error, Result};
use crate::phase_space::{CoherentAmplitude, PhasePoint, Quadrature};
use crate::quadrature::{plane_rule, HermiteRule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Fock cutoff `D`.
    pub cutoff: usize,
    /// Gauss–Hermite nodes per real axis.
    pub nodes: usize,
    /// Nodes per axis for the classical noise of Gaussian channels.
    pub mixture_nodes: usize,
    /// Tensor nodes with a smaller normalized weight are skipped and bounded.
    pub prune_below: f64,
    /// Largest acceptable estimated error.
    pub budget: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            cutoff: 40,
            nodes: 40,
            mixture_nodes: 4,
            prune_below: 1e-22,
            budget: 1e-5,
        }
    }
}

impl OracleConfig {
    pub fn with_cutoff(self, cutoff: usize) -> Self {
        Self { cutoff, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.cutoff < 2 {
            return Err(invalid("cutoff", "must be at least 2"));
        }
        if self.nodes == 0 || self.mixture_nodes < 2 {
            return Err(invalid("nodes", "need at least one node, two for the mixture rule"));
        }
        require_finite("budget", self.budget)?;
        Ok(())
    }
}

/// Poisson-tail cutoff `⌈n̄ + 6√n̄ + 10⌉`.
pub fn suggested_cutoff(n_bar: f64) -> usize {
    (n_bar + 6.0 * n_bar.sqrt() + 10.0).ceil() as usize
}

/// Largest per-node cutoff; states beyond it are truncated and bounded.
pub const MAX_NODE_CUTOFF: usize = 400;

/// `D` raised to [`suggested_cutoff`] for a state of mean photon number `n̄`.
fn node_cutoff(floor: usize, n_bar: f64) -> usize {
    floor.max(suggested_cutoff(n_bar)).min(MAX_NODE_CUTOFF)
}

/// Mean photon number of a Gaussian state with the given quadrature means and
/// variances.
fn photons(mean: PhasePoint, var: [f64; 2]) -> f64 {
    0.5 * (mean.x * mean.x + mean.p * mean.p + var[0] + var[1] - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleNoise {
    pub v_x: f64,
    pub v_p: f64,
    /// Integrated acceptance; one for deterministic channels up to quadrature error.
    pub success_prob: f64,
    /// Estimated quadrature, pruning and truncation error per quadrature.
    pub error_bound: f64,
}

/// Per-node contribution: weighted `f_x`, `f_p`, mass and error.
#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    fx: f64,
    fp: f64,
    mass: f64,
    err: f64,
    scale: f64,
}

impl Partial {
    fn add(self, o: Partial) -> Partial {
        Partial {
            fx: self.fx + o.fx,
            fp: self.fp + o.fp,
            mass: self.mass + o.mass,
            err: self.err + o.err,
            scale: self.scale.max(o.scale),
        }
    }
}

/// Energy scale of `(ẑ − c)²` on the first levels above the cutoff.
fn tail_scale(cutoff: usize, c: f64) -> f64 {
    2.0 * (2.0 * cutoff as f64 + 3.0) + 2.0 * c * c
}

/// Truncation error of `⟨(ẑ − c)²⟩` on a vector with discarded mass `tail`
/// and squared amplitude `top` on its two highest kept levels.
fn truncation_error(tail: f64, top: f64, cutoff: usize, c: f64) -> f64 {
    let b = tail_scale(cutoff, c);
    tail * b + 2.0 * (tail * top).sqrt() * b
}

fn top_mass(amps: &[Complex64]) -> f64 {
    amps.iter().rev().take(2).map(|a| a.norm_sqr()).sum()
}

/// Fock-basis `(⟨ẑ⟩, ⟨ẑ²⟩, ‖ψ‖²)` of a truncated single-mode vector, per quadrature.
struct Moments {
    mean: [f64; 2],
    second: [f64; 2],
    norm: f64,
    tail: f64,
    top: f64,
}

fn moments(ops: &FockOperators, amps: &[Complex64], tail: f64) -> Moments {
    let psi = padded(amps, amps.len() + 1);
    let (mx, sx) = ops.quadrature_moments(&psi, Quadrature::X);
    let (mp, sp) = ops.quadrature_moments(&psi, Quadrature::P);
    Moments {
        mean: [mx, mp],
        second: [sx, sp],
        norm: psi.norm_squared(),
        tail,
        top: top_mass(amps),
    }
}

impl Moments {
    /// `tr[(ẑ − c)² ρ]` for the truncated vector.
    fn deviation(&self, axis: Quadrature, c: f64) -> f64 {
        let i = axis.offset();
        self.second[i] - 2.0 * c * self.mean[i] + c * c * self.norm
    }
}

fn complex(a: CoherentAmplitude) -> Complex64 {
    Complex64::new(a.re, a.im)
}

fn normal_density(z: f64, mean: f64, var: f64) -> f64 {
    (-(z - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Prior-averaged noises evaluated in the Fock basis.
///
/// The α-integral uses a tensor Gauss–Hermite rule for the prior. Gaussian
/// channel outputs are expanded as a Gaussian mixture of squeezed coherent
/// states (pure part `S_ρ`, classical displacement noise on a small Hermite
/// rule). Measure-and-prepare maps integrate the outcome plane explicitly with
/// the outcome density `|⟨β|S_r†|α⟩|²/π` from Fock overlaps.
pub fn oracle_average_noise(
    channel: &Channel,
    params: &BenchmarkParams,
    config: &OracleConfig,
) -> Result<OracleNoise> {
    config.validate()?;
    if !(params.lambda > 0.0) {
        return Err(invalid(
            "lambda",
            format!("the oracle needs lambda > 0, got {}", params.lambda),
        ));
    }
    let ops = FockOperators::new(config.cutoff.max(MAX_NODE_CUTOFF) + 1)?;
    let rule = HermiteRule::new(config.nodes)?;
    let noise = match channel {
        Channel::Gaussian(spec) => gaussian_oracle(spec, params, config, &ops, &rule)?,
        Channel::MeasurePrepare(spec) => mp_oracle(spec, params, config, &ops, &rule)?,
    };
    if noise.error_bound > config.budget {
        return Err(Error::TruncationBudget {
            estimate: noise.error_bound,
            budget: config.budget,
        });
    }
    Ok(noise)
}

fn rounding_floor(p: &Partial) -> f64 {
    1e-12 * p.scale.max(1.0)
}

fn gaussian_oracle(
    spec: &GaussianChannelSpec,
    params: &BenchmarkParams,
    config: &OracleConfig,
    ops: &FockOperators,
    rule: &HermiteRule,
) -> Result<OracleNoise> {
    spec.ensure_completely_positive()?;
    let lambda = params.lambda;
    let d = config.cutoff;
    let (kept, pruned) = plane_rule(rule, lambda, config.prune_below);

    // Output covariance diag(V_x, V_p) = pure squeezed part + classical noise.
    let (_, var) = spec.output_moments(CoherentAmplitude::new(0.0, 0.0));
    let squeeze = -0.25 * (var[0] / var[1]).ln();
    let pure = [(-2.0 * squeeze).exp() / 2.0, (2.0 * squeeze).exp() / 2.0];
    let classical = [(var[0] - pure[0]).max(0.0), (var[1] - pure[1]).max(0.0)];
    let small = HermiteRule::new(config.mixture_nodes)?;
    let (dx, dp) = (small.normal(classical[0]), small.normal(classical[1]));

    let node_value = |node: &crate::quadrature::PlaneNode| -> Partial {
        let w_prior = lambda * node.weight;
        let alpha = CoherentAmplitude::new(node.re, node.im);
        let m = alpha.quadrature_means();
        let (out_mean, _) = spec.output_moments(alpha);
        let targets = [params.gain_x * m.x, params.gain_p * m.p];
        let mut acc = Partial::default();
        for &(ex, wx) in &dx {
            for &(ep, wp) in &dp {
                let centre = PhasePoint::new(out_mean.x + ex, out_mean.p + ep);
                // S_ρ|α'⟩ has means (e^{−ρ} x_{α'}, e^{ρ} p_{α'}).
                let source = CoherentAmplitude::from_quadratures(PhasePoint::new(
                    squeeze.exp() * centre.x,
                    (-squeeze).exp() * centre.p,
                ));
                let k = node_cutoff(d, photons(centre, pure));
                let (amps, tail) = squeezed_coherent_amplitudes(complex(source), squeeze, k);
                let mo = moments(ops, &amps, tail);
                let w = w_prior * wx * wp;
                let fx = mo.deviation(Quadrature::X, targets[0]);
                let fp = mo.deviation(Quadrature::P, targets[1]);
                let err = truncation_error(mo.tail, mo.top, k, targets[0].abs().max(targets[1].abs()));
                acc = acc.add(Partial {
                    fx: w * fx,
                    fp: w * fp,
                    mass: w,
                    err: w * err,
                    scale: fx.abs().max(fp.abs()),
                });
            }
        }
        acc
    };
    let total = kept
        .par_iter()
        .map(node_value)
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Partial::default(), Partial::add);

    let k = 1.0 + spec.t_x.abs().max(spec.t_p.abs()) + params.gain_x.max(params.gain_p);
    let pruned_err: f64 = pruned
        .iter()
        .map(|n| lambda * n.weight * (var[0] + var[1] + 2.0 * k * k * (n.re * n.re + n.im * n.im)))
        .sum();
    Ok(OracleNoise {
        v_x: total.fx,
        v_p: total.fp,
        success_prob: total.mass,
        error_bound: total.err + pruned_err + rounding_floor(&total),
    })
}

/// Per-quadrature Gaussian structure of `(z, b)`: input mean `z ~ N(0, 1/λ)`,
/// heterodyne quadrature `b = m z + ε`. Used only to place quadrature nodes;
/// the weights are corrected with the Fock-computed outcome density.
struct AxisRule {
    /// Accepted marginal variance of `b`.
    b_var: f64,
    /// `z | b ~ N(k b, cond_var)`.
    k: f64,
    cond_var: f64,
}

impl AxisRule {
    fn new(m: f64, lambda: f64, c: f64) -> Self {
        let s_bb = m * m / lambda + (m * m + 1.0) / 2.0;
        let s_zb = m / lambda;
        Self {
            b_var: s_bb / (1.0 + c * s_bb),
            k: s_zb / s_bb,
            cond_var: 1.0 / lambda - s_zb * s_zb / s_bb,
        }
    }
}

fn mp_oracle(
    spec: &MeasurePrepareSpec,
    params: &BenchmarkParams,
    config: &OracleConfig,
    ops: &FockOperators,
    rule: &HermiteRule,
) -> Result<OracleNoise> {
    let lambda = params.lambda;
    let d = config.cutoff;
    let r = spec.measure_squeeze;
    let c = spec.acceptance;
    // The heterodyne frame S_{−r}|α⟩ scales x by e^{r} and p by e^{−r}.
    let axes = [AxisRule::new(r.exp(), lambda, c), AxisRule::new((-r).exp(), lambda, c)];
    let b_rules = [rule.normal(axes[0].b_var), rule.normal(axes[1].b_var)];
    let unit = rule.normal(1.0);

    let mut beta_nodes = Vec::new();
    let mut pruned_mass = 0.0;
    for &(bx, wx) in &b_rules[0] {
        for &(bp, wp) in &b_rules[1] {
            if wx * wp >= config.prune_below {
                beta_nodes.push((bx, bp, wx * wp));
            } else {
                pruned_mass += wx * wp;
            }
        }
    }

    let node_value = |&(bx, bp, wb): &(f64, f64, f64)| -> Partial {
        let beta = CoherentAmplitude::from_quadratures(PhasePoint::new(bx, bp));
        let mut inner = Vec::with_capacity(unit.len() * unit.len());
        let mut inner_pruned = 0.0;
        for &(yx, vx) in &unit {
            for &(yp, vp) in &unit {
                let wa = vx * vp;
                if wa < config.prune_below {
                    inner_pruned += wa;
                    continue;
                }
                let zx = axes[0].k * bx + axes[0].cond_var.sqrt() * yx;
                let zp = axes[1].k * bp + axes[1].cond_var.sqrt() * yp;
                inner.push((zx, zp, wa));
            }
        }
        // One length for the measurement vector and every input it meets.
        let frame_var = [(-2.0 * r).exp() / 2.0, (2.0 * r).exp() / 2.0];
        let frame_mean = PhasePoint::new((-r).exp() * bx, r.exp() * bp);
        let input_photons = inner
            .iter()
            .map(|&(zx, zp, _)| 0.5 * (zx * zx + zp * zp))
            .fold(0.0, f64::max);
        let k = node_cutoff(d, photons(frame_mean, frame_var).max(input_photons));
        let (phi, tail_phi) = squeezed_coherent_amplitudes(complex(beta), r, k);

        let prepared = beta.scale(spec.gamma);
        let big_r = spec.output_frame_squeeze();
        let prepared_photons = photons(
            PhasePoint::new((-big_r).exp() * prepared.quadrature_means().x, big_r.exp() * prepared.quadrature_means().p),
            [(-2.0 * big_r).exp() / 2.0, (2.0 * big_r).exp() / 2.0],
        );
        let k_out = node_cutoff(d, prepared_photons);
        let (chi, tail_chi) = squeezed_coherent_amplitudes(complex(prepared), big_r, k_out);
        let out = moments(ops, &chi, tail_chi);
        let acceptance = spec.acceptance_probability(beta);
        let q_b = normal_density(bx, 0.0, axes[0].b_var) * normal_density(bp, 0.0, axes[1].b_var);

        let mut acc = Partial::default();
        for &(zx, zp, wa) in &inner {
            let alpha = CoherentAmplitude::from_quadratures(PhasePoint::new(zx, zp));
            let (amps, tail_a) = coherent_amplitudes(complex(alpha), k);
            let overlap = phi.iter().zip(&amps).map(|(f, a)| f.conj() * a).sum::<Complex64>();
            // Outcome density per db_x db_p is |⟨β|S_r†|α⟩|²/(2π).
            let p_out = overlap.norm_sqr() / (2.0 * PI);
            let prior = normal_density(zx, 0.0, 1.0 / lambda) * normal_density(zp, 0.0, 1.0 / lambda);
            let q = q_b
                * normal_density(zx, axes[0].k * bx, axes[0].cond_var)
                * normal_density(zp, axes[1].k * bp, axes[1].cond_var);
            let w = wb * wa * prior * p_out * acceptance / q;
            let (tx, tp) = (params.gain_x * zx, params.gain_p * zp);
            let fx = out.deviation(Quadrature::X, tx);
            let fp = out.deviation(Quadrature::P, tp);
            let eps = (tail_a * tail_phi).sqrt();
            let rel_p = if p_out > 0.0 {
                (2.0 * overlap.norm() * eps + eps * eps) / (2.0 * PI * p_out)
            } else {
                0.0
            };
            let trunc = truncation_error(out.tail, out.top, k_out, tx.abs().max(tp.abs()));
            acc = acc.add(Partial {
                fx: w * fx,
                fp: w * fp,
                mass: w,
                err: w * (rel_p * fx.abs().max(fp.abs()) + trunc),
                scale: fx.abs().max(fp.abs()),
            });
        }
        acc.err += wb * inner_pruned * acc.scale.max(1.0);
        acc
    };
    let total = beta_nodes
        .par_iter()
        .map(node_value)
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Partial::default(), Partial::add);

    let mut error = total.err + pruned_mass * 10.0 * total.scale.max(1.0) + rounding_floor(&total);
    let (v_x, v_p) = if spec.is_stochastic() {
        if !(total.mass > 0.0) {
            return Err(invalid("acceptance", "integrated acceptance vanished"));
        }
        error /= total.mass;
        (total.fx / total.mass, total.fp / total.mass)
    } else {
        (total.fx, total.fp)
    };
    Ok(OracleNoise {
        v_x,
        v_p,
        success_prob: total.mass,
        error_bound: error,
    })
}

/// Literal coherent-basis evaluation of the hybrid condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridOracle {
    pub term_x: f64,
    pub term_p: f64,
    pub error_bound: f64,
}

impl HybridOracle {
    pub fn product(&self) -> f64 {
        self.term_x * self.term_p
    }
}

fn require_two_modes(j: &FockState) -> Result<()> {
    if j.modes() == 2 {
        Ok(())
    } else {
        Err(Error::MalformedState(format!(
            "hybrid condition needs a two-mode state, got {} modes",
            j.modes()
        )))
    }
}

/// Amplitude matrix `M[m, n]` (A row, B column) of a two-mode vector, padded
/// by one level on each mode.
fn amplitude_matrix(v: &DVector<Complex64>, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d + 1, d + 1, |m, n| {
        if m < d && n < d {
            v[m * d + n]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `z_term = tr_A ∫ (u ẑ_A − v z_α)² ⟨α*|J|α*⟩_B d²α/π − v²/2` for `z = x, p`.
///
/// The B-mode projection uses `⟨α*|n⟩ = e^{−|α|²/2} αⁿ/√n!`. The α-plane is
/// integrated with a Hermite rule of width matched to the B-mode photon number.
pub fn oracle_hybrid_check(j: &FockState, u: f64, v: f64, config: &OracleConfig) -> Result<HybridOracle> {
    config.validate()?;
    require_two_modes(j)?;
    require_finite("u", u)?;
    require_finite("v", v)?;
    let d = j.cutoff();
    let ops = FockOperators::new(d + 1)?;
    let rule = HermiteRule::new(config.nodes)?;
    let kappa = 1.0 / (2.0 * (j.mean_photons(1)? + 1.0));
    let (kept, pruned) = plane_rule(&rule, kappa, config.prune_below);
    let mats: Vec<(f64, DMatrix<Complex64>)> = j
        .components()
        .iter()
        .map(|(w, vec)| (*w, amplitude_matrix(vec, d)))
        .collect();

    let node_value = |node: &crate::quadrature::PlaneNode| -> Partial {
        let alpha = Complex64::new(node.re, node.im);
        let (proj, _) = coherent_amplitudes(alpha, d + 1);
        let proj = DVector::from_vec(proj);
        let m = CoherentAmplitude::new(node.re, node.im).quadrature_means();
        let w = node.weight * node.inverse_weight_fn;
        let mut acc = Partial::default();
        for (p, mat) in &mats {
            // φ_α[m] = Σ_n M[m, n] ⟨α*|n⟩.
            let phi = mat * &proj;
            let mut f = [0.0; 2];
            for (i, (op, z)) in [(&ops.x, m.x), (&ops.p, m.p)].into_iter().enumerate() {
                let shifted = op * &phi * Complex64::new(u, 0.0) - &phi * Complex64::new(v * z, 0.0);
                f[i] = p * shifted.norm_squared();
            }
            acc = acc.add(Partial {
                fx: w * f[0],
                fp: w * f[1],
                mass: w * p * phi.norm_squared(),
                err: 0.0,
                scale: f[0].max(f[1]),
            });
        }
        acc
    };
    let total = kept
        .par_iter()
        .map(node_value)
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Partial::default(), Partial::add);

    let pruned_weight: f64 = pruned.iter().map(|n| n.weight * kappa).sum();
    let b = 4.0 * (2.0 * d as f64 + 3.0);
    let error = j.tail_mass() * b + pruned_weight * b + rounding_floor(&total);
    if error > config.budget {
        return Err(Error::TruncationBudget {
            estimate: error,
            budget: config.budget,
        });
    }
    let shift = v * v / 2.0;
    Ok(HybridOracle {
        term_x: total.fx - shift,
        term_p: total.fp - shift,
        error_bound: error,
    })
}

/// `(⟨(u x̂_A − v x̂_B)²⟩, ⟨(u p̂_A + v p̂_B)²⟩)` from Fock matrices.
pub fn moment_form(j: &FockState, u: f64, v: f64) -> Result<(f64, f64)> {
    require_two_modes(j)?;
    let d = j.cutoff();
    let ops = FockOperators::new(d + 1)?;
    let cu = Complex64::new(u, 0.0);
    let cv = Complex64::new(v, 0.0);
    let mut out = (0.0, 0.0);
    for (w, vec) in j.components() {
        let m = amplitude_matrix(vec, d);
        // (O_A ⊗ 1) ψ ↔ O M and (1 ⊗ O_B) ψ ↔ M O_Bᵀ.
        let x_term = &ops.x * &m * cu - &m * ops.x.transpose() * cv;
        let p_term = &ops.p * &m * cu + &m * ops.p.transpose() * cv;
        out.0 += w * x_term.norm_squared();
        out.1 += w * p_term.norm_squared();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::{average_noise, hybrid_lhs, HybridTestParams};
    use crate::channels::mp_from_benchmark;
    use crate::fock::build_states;
    use crate::phase_space::{GaussianState, StateKind};
    use approx::assert_abs_diff_eq;

    fn sym(eta: f64, lambda: f64) -> BenchmarkParams {
        BenchmarkParams::symmetric(eta, lambda).unwrap()
    }

    #[test]
    fn identity_is_shot_noise() {
        let out = oracle_average_noise(
            &GaussianChannelSpec::identity().into(),
            &sym(1.0, 1.0),
            &OracleConfig::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(out.v_x, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(out.v_p, 0.5, epsilon = 1e-6);
        assert!(out.error_bound < 1e-6);
    }

    #[test]
    fn attenuator_matches_closed_form() {
        let spec = GaussianChannelSpec::from_gain_noise(0.5, 0.4).unwrap();
        let out = oracle_average_noise(&spec.into(), &sym(2.0, 1.0), &OracleConfig::default()).unwrap();
        assert_abs_diff_eq!(out.v_x, 1.4, epsilon = 1e-6);
        assert_abs_diff_eq!(out.v_p, 1.4, epsilon = 1e-6);
    }

    #[test]
    fn asymmetric_channel_matches_closed_form() {
        let spec = GaussianChannelSpec::new(0.8, 1.1, 0.3, 0.2).unwrap();
        let params = BenchmarkParams::new(0.7, 0.9, 1.2).unwrap();
        let out = oracle_average_noise(&spec.into(), &params, &OracleConfig::default()).unwrap();
        let exact = average_noise(&spec.into(), &params).unwrap();
        assert_abs_diff_eq!(out.v_x, exact.v_x, epsilon = 1e-6);
        assert_abs_diff_eq!(out.v_p, exact.v_p, epsilon = 1e-6);
    }

    #[test]
    fn mp_matches_closed_form() {
        let mp = mp_from_benchmark(1.0, 1.0, 0.0, 0.0).unwrap();
        let out = oracle_average_noise(&mp.into(), &sym(1.0, 1.0), &OracleConfig::default()).unwrap();
        assert_abs_diff_eq!(out.v_x, 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(out.v_p, 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(out.success_prob, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn coherent_basis_integral_on_tmss() {
        let xi: f64 = 0.5;
        let s = xi.atanh();
        let j = build_states(&StateKind::TwoModeSqueezed { xi }, 40).unwrap();
        let u = std::f64::consts::FRAC_1_SQRT_2;
        let h = oracle_hybrid_check(&j, u, u, &OracleConfig::default()).unwrap();
        assert_abs_diff_eq!(h.term_x, (-2.0 * s).exp() / 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(h.term_p, (-2.0 * s).exp() / 2.0, epsilon = 1e-6);
        let g = hybrid_lhs(
            &GaussianState::two_mode_squeezed(xi).unwrap(),
            &HybridTestParams::new(xi, u, u).unwrap(),
        )
        .unwrap();
        let (mx, mp) = moment_form(&j, u, u).unwrap();
        assert_abs_diff_eq!(mx, g.term_x, epsilon = 1e-10);
        assert_abs_diff_eq!(mp, g.term_p, epsilon = 1e-10);
    }

    #[test]
    fn coherent_basis_integral_on_vacuum() {
        let vac = build_states(&StateKind::Coherent { alpha: CoherentAmplitude::new(0.0, 0.0) }, 20).unwrap();
        let j = FockState::product(&vac, &vac).unwrap();
        for theta in [0.0, 0.4, 1.3, 2.9] {
            let h = oracle_hybrid_check(&j, f64::cos(theta), f64::sin(theta), &OracleConfig::default()).unwrap();
            assert_abs_diff_eq!(h.term_x, 0.5, epsilon = 1e-10);
            assert_abs_diff_eq!(h.term_p, 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn suggested_cutoff_formula() {
        assert_eq!(suggested_cutoff(0.0), 10);
        assert_eq!(suggested_cutoff(4.0), 26);
    }
}
