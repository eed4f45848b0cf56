//! Truncated Fock-basis numerics, used as an independent check of the
//! phase-space results.

mod oracle;

pub use oracle::{
    moment_form, oracle_average_noise, oracle_hybrid_check, suggested_cutoff, HybridOracle,
    OracleConfig, OracleNoise,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, require_finite, Error, Result};
use crate::phase_space::{CoherentAmplitude, StateKind};

/// Default bound on the probability discarded by truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Ladder and quadrature matrices on `span{|0⟩, …, |D−1⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperators {
    cutoff: usize,
    pub a: DMatrix<Complex64>,
    pub adag: DMatrix<Complex64>,
    pub x: DMatrix<Complex64>,
    pub p: DMatrix<Complex64>,
}

impl FockOperators {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(invalid("cutoff", "must be positive"));
        }
        let a = DMatrix::from_fn(cutoff, cutoff, |m, n| {
            if n == m + 1 {
                Complex64::new((n as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let adag = a.adjoint();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = (&a + &adag) * Complex64::new(s, 0.0);
        let p = (&a - &adag) * Complex64::new(0.0, -s);
        Ok(Self {
            cutoff,
            a,
            adag,
            x,
            p,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Largest entry of `[x̂, p̂] − i` on the leading `(D−1)×(D−1)` block, where
    /// truncation does not reach.
    pub fn commutator_defect(&self) -> f64 {
        let comm = &self.x * &self.p - &self.p * &self.x;
        let k = self.cutoff - 1;
        let mut worst: f64 = 0.0;
        for m in 0..k {
            for n in 0..k {
                let target = if m == n {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((comm[(m, n)] - target).norm());
            }
        }
        worst
    }

    /// `(⟨ẑ⟩, ⟨ẑ²⟩)` of an unnormalized vector whose top entry is zero, so that
    /// `ẑψ` is represented exactly. Shorter vectors use the leading block.
    fn quadrature_moments(&self, psi: &DVector<Complex64>, axis: crate::Quadrature) -> (f64, f64) {
        let op = match axis {
            crate::Quadrature::X => &self.x,
            crate::Quadrature::P => &self.p,
        };
        let k = psi.len();
        let z_psi = op.view((0, 0), (k, k)) * psi;
        (psi.dotc(&z_psi).re, z_psi.norm_squared())
    }
}

/// Vector padded with zeros to `len`.
fn padded(amps: &[Complex64], len: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(len);
    v.rows_mut(0, amps.len()).copy_from(&DVector::from_column_slice(amps));
    v
}

/// `e^{−|α|²/2} αⁿ/√n!` for `n < len`, plus the discarded probability.
pub(crate) fn coherent_amplitudes(alpha: Complex64, len: usize) -> (Vec<Complex64>, f64) {
    let mut amps = Vec::with_capacity(len);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    let mut kept = 0.0;
    for n in 0..len {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        kept += c.norm_sqr();
        amps.push(c);
    }
    let tail = (1.0 - kept).max(0.0);
    (amps, tail)
}

/// Amplitudes of `S_r|α⟩` from `(â cosh r + â† sinh r) S_r|α⟩ = α S_r|α⟩`, i.e.
/// `ψ_{n+1} = (α ψ_n − sinh r √n ψ_{n−1}) / (cosh r √(n+1))`.
///
/// The recurrence is run past the cutoff until the remaining terms are
/// negligible, normalized, and cut back to `len`.
pub(crate) fn squeezed_coherent_amplitudes(
    alpha: Complex64,
    r: f64,
    len: usize,
) -> (Vec<Complex64>, f64) {
    if r == 0.0 {
        return coherent_amplitudes(alpha, len);
    }
    const MAX_LEVELS: usize = 50_000;
    let (ch, sh) = (r.cosh(), r.sinh());
    let mut amps: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    let mut total = 1.0;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    loop {
        let cur = amps[n];
        let next = (alpha * cur - prev * (sh * (n as f64).sqrt())) / (ch * ((n + 1) as f64).sqrt());
        amps.push(next);
        total += next.norm_sqr();
        prev = cur;
        n += 1;
        if total > 1e200 {
            let s = 1e-100;
            amps.iter_mut().for_each(|a| *a *= s);
            prev *= s;
            total *= s * s;
        }
        let recent = amps[n].norm_sqr() + amps[n - 1].norm_sqr();
        if (n + 1 >= len && n > 8 && recent < 1e-40 * total) || n + 1 >= MAX_LEVELS {
            break;
        }
    }
    let norm = total.sqrt();
    let kept: Vec<Complex64> = amps.iter().take(len).map(|a| a / norm).collect();
    let kept_prob: f64 = kept.iter().map(|a| a.norm_sqr()).sum();
    let mut kept = kept;
    kept.resize(len, Complex64::new(0.0, 0.0));
    (kept, (1.0 - kept_prob).max(0.0))
}

/// State at cutoff `D`: a convex mixture of pure amplitude vectors. Two-mode
/// vectors are indexed `m·D + n` with `m` on mode A.
///
/// Amplitudes are not renormalized after truncation; `tail_mass` is the
/// discarded probability.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    cutoff: usize,
    components: Vec<(f64, DVector<Complex64>)>,
    tail_mass: f64,
}

impl FockState {
    fn pure(modes: usize, cutoff: usize, amps: DVector<Complex64>, tail_mass: f64) -> Self {
        Self {
            modes,
            cutoff,
            components: vec![(1.0, amps)],
            tail_mass,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn is_pure(&self) -> bool {
        self.components.len() == 1
    }

    /// Weighted pure components.
    pub fn components(&self) -> &[(f64, DVector<Complex64>)] {
        &self.components
    }

    /// Trace of the truncated density operator.
    pub fn norm(&self) -> f64 {
        self.components
            .iter()
            .map(|(w, v)| w * v.norm_squared())
            .sum()
    }

    /// Mean photon number of one mode.
    pub fn mean_photons(&self, mode: usize) -> Result<f64> {
        if mode >= self.modes {
            return Err(Error::ModeOutOfRange {
                index: mode,
                modes: self.modes,
            });
        }
        let d = self.cutoff;
        let mut total = 0.0;
        for (w, v) in &self.components {
            for (i, amp) in v.iter().enumerate() {
                let n = if self.modes == 1 {
                    i
                } else if mode == 0 {
                    i / d
                } else {
                    i % d
                };
                total += w * n as f64 * amp.norm_sqr();
            }
        }
        Ok(total)
    }

    /// `Σ pᵢ ρᵢ`. Weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, FockState)]) -> Result<FockState> {
        let first = parts
            .first()
            .ok_or_else(|| invalid("mixture", "needs at least one component"))?;
        let (modes, cutoff) = (first.1.modes, first.1.cutoff);
        let mut total = 0.0;
        let mut tail = 0.0;
        let mut components = Vec::new();
        for (p, s) in parts {
            require_finite("weight", *p)?;
            if *p < 0.0 {
                return Err(invalid("weight", format!("must be nonnegative, got {p}")));
            }
            if s.modes != modes || s.cutoff != cutoff {
                return Err(invalid("mixture", "components differ in modes or cutoff"));
            }
            total += p;
            tail += p * s.tail_mass;
            components.extend(s.components.iter().map(|(w, v)| (p * w, v.clone())));
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("weight", format!("weights sum to {total}, not 1")));
        }
        Ok(FockState {
            modes,
            cutoff,
            components,
            tail_mass: tail,
        })
    }

    /// `ρ_A ⊗ ρ_B` of two single-mode states at the same cutoff.
    pub fn product(a: &FockState, b: &FockState) -> Result<FockState> {
        if a.modes != 1 || b.modes != 1 || a.cutoff != b.cutoff {
            return Err(invalid(
                "product",
                "needs two single-mode states at the same cutoff",
            ));
        }
        let d = a.cutoff;
        let mut components = Vec::with_capacity(a.components.len() * b.components.len());
        for (wa, va) in &a.components {
            for (wb, vb) in &b.components {
                let v = DVector::from_fn(d * d, |i, _| va[i / d] * vb[i % d]);
                components.push((wa * wb, v));
            }
        }
        Ok(FockState {
            modes: 2,
            cutoff: d,
            components,
            tail_mass: a.tail_mass + b.tail_mass,
        })
    }
}

/// Fock expansion of a phase-space constructor at cutoff `D`, failing if more
/// than [`DEFAULT_TAIL_TOL`] of the probability lies above the cutoff.
pub fn build_states(kind: &StateKind, cutoff: usize) -> Result<FockState> {
    build_states_with_tol(kind, cutoff, DEFAULT_TAIL_TOL)
}

pub fn build_states_with_tol(kind: &StateKind, cutoff: usize, tail_tol: f64) -> Result<FockState> {
    if cutoff == 0 {
        return Err(invalid("cutoff", "must be positive"));
    }
    let to_complex = |a: &CoherentAmplitude| Complex64::new(a.re, a.im);
    let state = match kind {
        StateKind::Coherent { alpha } => {
            require_finite("alpha", alpha.re)?;
            require_finite("alpha", alpha.im)?;
            let (amps, tail) = coherent_amplitudes(to_complex(alpha), cutoff);
            FockState::pure(1, cutoff, DVector::from_vec(amps), tail)
        }
        StateKind::SqueezedCoherent { alpha, r } => {
            require_finite("alpha", alpha.re)?;
            require_finite("alpha", alpha.im)?;
            require_finite("r", *r)?;
            let (amps, tail) = squeezed_coherent_amplitudes(to_complex(alpha), *r, cutoff);
            FockState::pure(1, cutoff, DVector::from_vec(amps), tail)
        }
        StateKind::TwoModeSqueezed { xi } => {
            if !(*xi > 0.0 && *xi < 1.0) {
                return Err(invalid("xi", format!("must lie in (0, 1), got {xi}")));
            }
            // √(1−ξ²) Σ ξⁿ |n⟩|n⟩, tail (1−ξ²) Σ_{n≥D} ξ^{2n} = ξ^{2D}.
            let norm = (1.0 - xi * xi).sqrt();
            let mut v = DVector::zeros(cutoff * cutoff);
            for n in 0..cutoff {
                v[n * cutoff + n] = Complex64::new(norm * xi.powi(n as i32), 0.0);
            }
            FockState::pure(2, cutoff, v, xi.powi(2 * cutoff as i32))
        }
    };
    if state.tail_mass > tail_tol {
        return Err(Error::TruncationBudget {
            estimate: state.tail_mass,
            budget: tail_tol,
        });
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{GaussianState, Quadrature};
    use approx::assert_abs_diff_eq;

    #[test]
    fn operators_are_canonical() {
        let ops = FockOperators::new(30).unwrap();
        assert!(ops.commutator_defect() < 1e-10);
        for m in 0..30 {
            for n in 0..30 {
                assert_eq!(ops.x[(m, n)].im, 0.0);
                assert_eq!(ops.x[(m, n)], ops.x[(n, m)]);
            }
        }
        assert!(FockOperators::new(0).is_err());
    }

    #[test]
    fn coherent_examples() {
        let vac = build_states(&StateKind::Coherent { alpha: CoherentAmplitude::new(0.0, 0.0) }, 5).unwrap();
        assert_eq!(vac.components()[0].1[0], Complex64::new(1.0, 0.0));
        assert_eq!(vac.tail_mass(), 0.0);

        let s = build_states(&StateKind::Coherent { alpha: CoherentAmplitude::new(2.0, 0.0) }, 30).unwrap();
        assert_abs_diff_eq!(s.mean_photons(0).unwrap(), 4.0, epsilon = 1e-6);
        assert!(s.norm() <= 1.0 + 1e-15 && s.norm() >= 1.0 - 10.0 * DEFAULT_TAIL_TOL);
        assert!(build_states(&StateKind::Coherent { alpha: CoherentAmplitude::new(5.0, 0.0) }, 10).is_err());
    }

    #[test]
    fn tmss_tail_is_geometric() {
        let s = build_states(&StateKind::TwoModeSqueezed { xi: 0.5 }, 30).unwrap();
        assert!(s.tail_mass() <= 1e-15);
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.mean_photons(1).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn squeezed_coherent_matches_phase_space_moments() {
        let ops = FockOperators::new(121).unwrap();
        for &(re, im, r) in &[(0.0, 0.0, 0.5), (0.7, -0.4, 0.3), (1.1, 0.5, -0.6), (0.3, 0.2, 1.0)] {
            let alpha = CoherentAmplitude::new(re, im);
            let fock = build_states(&StateKind::SqueezedCoherent { alpha, r }, 120).unwrap();
            let g = GaussianState::squeezed_coherent(alpha, r).unwrap();
            let psi = padded(fock.components()[0].1.as_slice(), 121);
            for axis in Quadrature::BOTH {
                let (m, second) = ops.quadrature_moments(&psi, axis);
                let (gm, gv) = g.quadrature_marginal(0, axis).unwrap();
                assert_abs_diff_eq!(m, gm, epsilon = 1e-10);
                assert_abs_diff_eq!(second - m * m, gv, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn mixtures_and_products() {
        let c = |re| build_states(&StateKind::Coherent { alpha: CoherentAmplitude::new(re, 0.0) }, 20).unwrap();
        let m = FockState::mixture(&[(0.25, c(0.5)), (0.75, c(-0.3))]).unwrap();
        assert!(!m.is_pure());
        assert_abs_diff_eq!(m.norm(), 1.0, epsilon = 1e-12);
        assert!(FockState::mixture(&[(0.5, c(0.1))]).is_err());
        let prod = FockState::product(&c(0.5), &m).unwrap();
        assert_eq!(prod.modes(), 2);
        assert_eq!(prod.components().len(), 2);
        assert_abs_diff_eq!(prod.mean_photons(0).unwrap(), 0.25, epsilon = 1e-12);
    }
}
