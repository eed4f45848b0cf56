//! Phase-space description of Gaussian states.
//!
//! Quadratures are ordered `(x₁, p₁, x₂, p₂, …)` with symplectic form
//! `Ω = ⊕ [[0, 1], [−1, 0]]`. A state is physical when every symplectic
//! eigenvalue of its covariance matrix is at least the shot noise `1/2`.

use std::f64::consts::SQRT_2;
use std::ops::Add;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_finite, Error, Result};
use crate::SHOT_NOISE;

/// Tolerance on symplectic eigenvalues below `1/2`.
pub const PHYSICAL_TOL: f64 = 1e-10;
/// Relative tolerance on covariance symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Mean quadratures `(x, p)` of a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }

    pub fn get(&self, axis: Quadrature) -> f64 {
        match axis {
            Quadrature::X => self.x,
            Quadrature::P => self.p,
        }
    }
}

impl Add for PhasePoint {
    type Output = PhasePoint;

    fn add(self, rhs: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x + rhs.x, self.p + rhs.p)
    }
}

/// Complex coherent amplitude `α = re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoherentAmplitude {
    pub re: f64,
    pub im: f64,
}

impl CoherentAmplitude {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::new(self.re * factor, self.im * factor)
    }

    /// Mean quadratures `x_α = √2 Re α`, `p_α = √2 Im α`.
    pub fn quadrature_means(&self) -> PhasePoint {
        PhasePoint::new(SQRT_2 * self.re, SQRT_2 * self.im)
    }

    /// Inverse of [`quadrature_means`](Self::quadrature_means).
    pub fn from_quadratures(point: PhasePoint) -> Self {
        Self::new(point.x / SQRT_2, point.p / SQRT_2)
    }
}

impl Add for CoherentAmplitude {
    type Output = CoherentAmplitude;

    fn add(self, rhs: CoherentAmplitude) -> CoherentAmplitude {
        CoherentAmplitude::new(self.re + rhs.re, self.im + rhs.im)
    }
}

/// Free-function form of [`CoherentAmplitude::quadrature_means`].
pub fn quadrature_means(alpha: CoherentAmplitude) -> PhasePoint {
    alpha.quadrature_means()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    pub const BOTH: [Quadrature; 2] = [Quadrature::X, Quadrature::P];

    /// Offset of this quadrature inside a mode block.
    pub fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// Parametrized families of pure Gaussian states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    /// `|α⟩`.
    Coherent { alpha: CoherentAmplitude },
    /// `S_r |α⟩`.
    SqueezedCoherent { alpha: CoherentAmplitude, r: f64 },
    /// `√(1−ξ²) Σ ξⁿ |n⟩|n⟩`, `ξ ∈ (0, 1)`.
    TwoModeSqueezed { xi: f64 },
}

/// An `n`-mode Gaussian state: first moments and covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state from raw moments. Checks dimensions, finiteness and symmetry;
    /// physicality is left to [`check_physical`](Self::check_physical).
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::MalformedState(format!(
                "mean vector length {dim} is not a positive even number"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::MalformedState(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::MalformedState("non-finite moment".into()));
        }
        check_symmetric(&cov)?;
        Ok(Self {
            modes: dim / 2,
            mean,
            cov,
        })
    }

    /// `n`-mode vacuum.
    pub fn vacuum(modes: usize) -> Self {
        let dim = 2 * modes.max(1);
        Self {
            modes: dim / 2,
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim) * SHOT_NOISE,
        }
    }

    pub fn coherent(alpha: CoherentAmplitude) -> Result<Self> {
        Self::squeezed_coherent(alpha, 0.0)
    }

    /// `S_r |α⟩`: mean `(e^{−r} x_α, e^{r} p_α)`, covariance `diag(e^{−2r}, e^{2r})/2`.
    pub fn squeezed_coherent(alpha: CoherentAmplitude, r: f64) -> Result<Self> {
        require_finite("alpha.re", alpha.re)?;
        require_finite("alpha.im", alpha.im)?;
        require_finite("r", r)?;
        let m = alpha.quadrature_means();
        let (shrink, grow) = ((-r).exp(), r.exp());
        Ok(Self {
            modes: 1,
            mean: DVector::from_vec(vec![shrink * m.x, grow * m.p]),
            cov: DMatrix::from_diagonal(&DVector::from_vec(vec![
                shrink * shrink * SHOT_NOISE,
                grow * grow * SHOT_NOISE,
            ])),
        })
    }

    /// Two-mode squeezed vacuum with `ξ = tanh s`.
    pub fn two_mode_squeezed(xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(invalid("xi", format!("must lie in (0, 1), got {xi}")));
        }
        let s = xi.atanh();
        let (c, sh) = ((2.0 * s).cosh() * SHOT_NOISE, (2.0 * s).sinh() * SHOT_NOISE);
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            c,   0.0, sh,  0.0,
            0.0, c,   0.0, -sh,
            sh,  0.0, c,   0.0,
            0.0, -sh, 0.0, c,
        ]);
        Ok(Self {
            modes: 2,
            mean: DVector::zeros(4),
            cov,
        })
    }

    pub fn from_kind(kind: StateKind) -> Result<Self> {
        match kind {
            StateKind::Coherent { alpha } => Self::coherent(alpha),
            StateKind::SqueezedCoherent { alpha, r } => Self::squeezed_coherent(alpha, r),
            StateKind::TwoModeSqueezed { xi } => Self::two_mode_squeezed(xi),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (da, db) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(da + db);
        mean.rows_mut(0, da).copy_from(&self.mean);
        mean.rows_mut(da, db).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(da + db, da + db);
        cov.view_mut((0, 0), (da, da)).copy_from(&self.cov);
        cov.view_mut((da, da), (db, db)).copy_from(&other.cov);
        GaussianState {
            modes: self.modes + other.modes,
            mean,
            cov,
        }
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.modes {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                index: mode,
                modes: self.modes,
            })
        }
    }

    /// Reduced state of a single mode.
    pub fn reduced(&self, mode: usize) -> Result<GaussianState> {
        self.check_mode(mode)?;
        let i = 2 * mode;
        Ok(GaussianState {
            modes: 1,
            mean: self.mean.rows(i, 2).into_owned(),
            cov: self.cov.view((i, i), (2, 2)).into_owned(),
        })
    }

    /// Applies `mean → S mean + d`, `cov → S cov Sᵀ + N` where `S`, `d`, `N` act
    /// on a single mode (identity elsewhere).
    pub fn transform_mode(
        &self,
        mode: usize,
        gain: &Matrix2<f64>,
        added_noise: &Matrix2<f64>,
    ) -> Result<GaussianState> {
        self.check_mode(mode)?;
        let dim = 2 * self.modes;
        let i = 2 * mode;
        let mut full = DMatrix::<f64>::identity(dim, dim);
        full.view_mut((i, i), (2, 2)).copy_from(gain);
        let mean = &full * &self.mean;
        let mut cov = &full * &self.cov * full.transpose();
        let mut block = cov.view_mut((i, i), (2, 2));
        block += added_noise;
        // Re-symmetrize to absorb rounding.
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(GaussianState {
            modes: self.modes,
            mean,
            cov,
        })
    }

    /// Symplectic eigenvalues in ascending order.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.cov)
    }

    /// `true` iff every symplectic eigenvalue is at least `1/2 − 1e-10`.
    pub fn check_physical(&self) -> bool {
        match self.symplectic_eigenvalues() {
            Ok(nu) => nu.iter().all(|&v| v >= SHOT_NOISE - PHYSICAL_TOL),
            Err(_) => false,
        }
    }

    /// Homodyne statistics `(mean, variance)` of one quadrature of one mode.
    pub fn quadrature_marginal(&self, mode: usize, axis: Quadrature) -> Result<(f64, f64)> {
        self.check_mode(mode)?;
        let i = 2 * mode + axis.offset();
        Ok((self.mean[i], self.cov[(i, i)]))
    }

    /// Heterodyne outcome distribution of `mode` (its Husimi Q-function).
    pub fn heterodyne_distribution(&self, mode: usize) -> Result<HeterodyneDistribution> {
        let reduced = self.reduced(mode)?;
        let mean = Vector2::new(reduced.mean[0], reduced.mean[1]);
        let cov = Matrix2::new(
            reduced.cov[(0, 0)],
            reduced.cov[(0, 1)],
            reduced.cov[(1, 0)],
            reduced.cov[(1, 1)],
        ) + Matrix2::identity() * SHOT_NOISE;
        Ok(HeterodyneDistribution { mean, cov })
    }
}

/// Free-function form of [`GaussianState::check_physical`]; rejects
/// non-symmetric covariance matrices as malformed input.
pub fn check_physical(cov: &DMatrix<f64>) -> Result<bool> {
    check_symmetric(cov)?;
    Ok(match symplectic_eigenvalues(cov) {
        Ok(nu) => nu.iter().all(|&v| v >= SHOT_NOISE - PHYSICAL_TOL),
        Err(_) => false,
    })
}

fn check_symmetric(cov: &DMatrix<f64>) -> Result<()> {
    if !cov.is_square() {
        return Err(Error::MalformedState("covariance is not square".into()));
    }
    let scale = cov.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let n = cov.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (cov[(i, j)] - cov[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::MalformedState(format!(
                    "covariance not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Symplectic form `⊕ [[0, 1], [−1, 0]]` on `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic spectrum of a positive-definite covariance matrix.
///
/// With `A = σ^{1/2} Ω σ^{1/2}` (antisymmetric), the eigenvalues of `AᵀA` are the
/// squared symplectic eigenvalues, each appearing twice.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = cov.nrows();
    if dim == 0 || !dim.is_multiple_of(2) || !cov.is_square() {
        return Err(Error::MalformedState(format!(
            "covariance dimension {dim} is not a positive even number"
        )));
    }
    let sym = (cov + cov.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::MalformedState(
            "covariance is not positive definite".into(),
        ));
    }
    let sqrt_cov = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let a = &sqrt_cov * symplectic_form(dim / 2) * &sqrt_cov;
    let gram = a.transpose() * &a;
    let gram = (&gram + gram.transpose()) * 0.5;
    let mut squared: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().copied().collect();
    squared.sort_by(f64::total_cmp);
    Ok(squared
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}

/// Gaussian density of heterodyne outcomes in quadrature coordinates
/// `(√2 Re β, √2 Im β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeterodyneDistribution {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
}

impl HeterodyneDistribution {
    /// Draws an outcome `β`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CoherentAmplitude {
        // 2x2 Cholesky; `cov` is positive definite for any physical state.
        let l11 = self.cov[(0, 0)].sqrt();
        let l21 = self.cov[(1, 0)] / l11;
        let l22 = (self.cov[(1, 1)] - l21 * l21).max(0.0).sqrt();
        let n1: f64 = StandardNormal.sample(rng);
        let n2: f64 = StandardNormal.sample(rng);
        let x = self.mean[0] + l11 * n1;
        let p = self.mean[1] + l21 * n1 + l22 * n2;
        CoherentAmplitude::from_quadratures(PhasePoint::new(x, p))
    }
}
