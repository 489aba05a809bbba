//! Hidden parameters, noisy rewards and regret bookkeeping.
//!
//! Randomness is split into counter-based ChaCha streams keyed by
//! `(experiment_id, replication, role)`. The noise stream is repositioned at
//! every step, so the noise drawn at step `t` is the same whichever arm is
//! played; two policies run on the same replication therefore see common
//! random numbers.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::ArmSet;
use crate::linalg::{self, Vector};
use crate::stats::{MeanEstimate, RunningMean};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    Prior = 0,
    Noise = 1,
    Policy = 2,
    Aux = 3,
}

/// Independent generator for one `(experiment, replication, role)` triple.
pub fn stream_rng(experiment_id: u64, replication: u64, role: StreamRole) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(experiment_id);
    rng.set_stream(replication.wrapping_mul(4).wrapping_add(role as u64));
    rng
}

/// 32-bit words reserved per step on the noise stream.
const WORDS_PER_STEP: u128 = 64;

/// Noise stream whose draws are addressed by step index.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(experiment_id: u64, replication: u64) -> Self {
        Self { rng: stream_rng(experiment_id, replication, StreamRole::Noise) }
    }

    /// Generator positioned at the block reserved for step `t`.
    pub fn at_step(&mut self, t: usize) -> &mut ChaCha8Rng {
        self.rng.set_word_pos(t as u128 * WORDS_PER_STEP);
        &mut self.rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Gaussian { sigma: f64 },
    /// Uniform on `[−a, a]`.
    Uniform { half_width: f64 },
}

impl NoiseModel {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise sigma must be ≥ 0, got {sigma}")));
        }
        Ok(NoiseModel::Gaussian { sigma })
    }

    pub fn uniform(half_width: f64) -> Result<Self> {
        if !(half_width >= 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise half-width must be ≥ 0, got {half_width}")));
        }
        Ok(NoiseModel::Uniform { half_width })
    }

    /// Sub-Gaussian proxy `σ₀`: `σ` for Gaussian noise, `a` for uniform on `[−a, a]`.
    pub fn sigma0(&self) -> f64 {
        match *self {
            NoiseModel::Gaussian { sigma } => sigma,
            NoiseModel::Uniform { half_width } => half_width,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            NoiseModel::Gaussian { sigma } => sigma * sigma,
            NoiseModel::Uniform { half_width } => half_width * half_width / 3.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::Gaussian { sigma } => {
                if sigma == 0.0 {
                    0.0
                } else {
                    sigma * rng.sample::<f64, _>(StandardNormal)
                }
            }
            NoiseModel::Uniform { half_width } => {
                if half_width == 0.0 {
                    0.0
                } else {
                    rng.random_range(-half_width..=half_width)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CustomPrior {
    /// Uniform on the sphere of the given radius.
    UniformSphere { dim: usize, radius: f64 },
    /// Independent coordinates, each uniform on `[low, high]`.
    IidUniform { dim: usize, low: f64, high: f64 },
    /// Independent coordinates, each `N(mean, std²)`.
    IidNormal { dim: usize, mean: f64, std: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Prior {
    /// `N(0, I_r / r)`.
    GaussianIsotropic { dim: usize },
    FixedPoint(Vector),
    Custom(CustomPrior),
}

impl Prior {
    pub fn dim(&self) -> usize {
        match self {
            Prior::GaussianIsotropic { dim } => *dim,
            Prior::FixedPoint(z) => z.len(),
            Prior::Custom(
                CustomPrior::UniformSphere { dim, .. }
                | CustomPrior::IidUniform { dim, .. }
                | CustomPrior::IidNormal { dim, .. },
            ) => *dim,
        }
    }
}

/// One draw of the hidden parameter.
pub fn sample_z<R: Rng + ?Sized>(prior: &Prior, rng: &mut R) -> Vector {
    match prior {
        Prior::GaussianIsotropic { dim } => linalg::random_normal_vector(rng, *dim) / (*dim as f64).sqrt(),
        Prior::FixedPoint(z) => z.clone(),
        Prior::Custom(CustomPrior::UniformSphere { dim, radius }) => linalg::random_unit_vector(rng, *dim) * *radius,
        Prior::Custom(CustomPrior::IidUniform { dim, low, high }) => {
            Vector::from_fn(*dim, |_, _| low + (high - low) * rng.random::<f64>())
        }
        Prior::Custom(CustomPrior::IidNormal { dim, mean, std }) => {
            Vector::from_fn(*dim, |_, _| mean + std * rng.sample::<f64, _>(StandardNormal))
        }
    }
}

#[derive(Debug, Clone)]
pub struct BanditInstance {
    arm_set: Arc<ArmSet>,
    z: Vector,
    noise: NoiseModel,
}

impl BanditInstance {
    pub fn new(arm_set: Arc<ArmSet>, z: Vector, noise: NoiseModel) -> Result<Self> {
        if z.len() != arm_set.dim() {
            return Err(Error::DimensionMismatch { expected: arm_set.dim(), found: z.len() });
        }
        Ok(Self { arm_set, z, noise })
    }

    pub fn arm_set(&self) -> &Arc<ArmSet> {
        &self.arm_set
    }

    pub fn z(&self) -> &Vector {
        &self.z
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    /// `X = u'z + W` with a fresh noise draw from `rng`.
    pub fn pull<R: Rng + ?Sized>(&self, arm: &Vector, rng: &mut R) -> Result<f64> {
        self.arm_set.ensure_member(arm)?;
        Ok(arm.dot(&self.z) + self.noise.sample(rng))
    }

    /// Expected-reward shortfall of `arm` against the best arm.
    pub fn regret(&self, arm: &Vector) -> Result<f64> {
        self.arm_set.gap(&self.z, arm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Spanner / initialization pull.
    Explore,
    /// Greedy pull on the current estimate.
    Exploit,
    /// Index-maximizing pull (optimistic policies).
    Optimistic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub arm: Vector,
    pub arm_index: Option<usize>,
    pub kind: StepKind,
    pub reward: f64,
    pub regret: f64,
    /// `‖U_t‖²_{C_{t−1}}` when the policy maintains a Gram inverse.
    pub weighted_norm_sq: Option<f64>,
    /// `R_{t−1}^{U_t}` for uncertainty-ellipsoid pulls.
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub replication: u64,
    pub z: Vector,
    pub steps: Vec<StepRecord>,
    pub checkpoints: Vec<(usize, f64)>,
}

impl TrajectoryRecord {
    pub fn cumulative_regret(&self) -> f64 {
        self.steps.iter().map(|s| s.regret).sum()
    }

    pub fn count_kind(&self, kind: StepKind) -> usize {
        self.steps.iter().filter(|s| s.kind == kind).count()
    }

    pub fn checkpoint(&self, t: usize) -> Option<f64> {
        self.checkpoints.iter().find(|(c, _)| *c == t).map(|(_, v)| *v)
    }
}

/// Powers of two up to `horizon`, plus `horizon` itself.
pub fn checkpoint_grid(horizon: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = std::iter::successors(Some(1usize), |&t| t.checked_mul(2))
        .take_while(|&t| t <= horizon)
        .collect();
    if grid.last() != Some(&horizon) && horizon > 0 {
        grid.push(horizon);
    }
    grid
}

/// `1 − 4θ² − 1/β²`.
pub fn norm_band_lower_bound(theta: f64, beta: f64) -> f64 {
    1.0 - 4.0 * theta * theta - 1.0 / (beta * beta)
}

/// Monte Carlo estimate of `Pr{θ ≤ ‖Z‖ ≤ β}` for `Z ~ N(0, I_r / r)`.
pub fn norm_band_probability<R: Rng + ?Sized>(
    theta: f64,
    beta: f64,
    dim: usize,
    n: usize,
    rng: &mut R,
) -> Result<MeanEstimate> {
    if !(theta > 0.0 && theta <= 0.5) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0, 1/2], got {theta}")));
    }
    if !(beta > theta) {
        return Err(Error::InvalidParameter(format!("beta must exceed theta, got {beta}")));
    }
    let prior = Prior::GaussianIsotropic { dim };
    let mut acc = RunningMean::default();
    for _ in 0..n {
        let norm = sample_z(&prior, rng).norm();
        acc.push(if norm >= theta && norm <= beta { 1.0 } else { 0.0 });
    }
    Ok(acc.estimate())
}

/// Monte Carlo estimates of `E‖Z‖` and `E[1/‖Z‖]` under `N(0, I_r / r)`.
pub fn norm_moments<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> (MeanEstimate, MeanEstimate) {
    let prior = Prior::GaussianIsotropic { dim };
    let mut norm = RunningMean::default();
    let mut inv = RunningMean::default();
    for _ in 0..n {
        let z = sample_z(&prior, rng).norm();
        norm.push(z);
        inv.push(1.0 / z);
    }
    (norm.estimate(), inv.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn sphere2() -> Arc<ArmSet> {
        Arc::new(ArmSet::unit_sphere(2).unwrap())
    }

    #[test]
    fn fixed_point_prior_is_verbatim() {
        let mut rng = stream_rng(1, 0, StreamRole::Prior);
        assert_eq!(sample_z(&Prior::FixedPoint(dvector![1.0, 2.0]), &mut rng), dvector![1.0, 2.0]);
    }

    #[test]
    fn zero_noise_pulls_are_exact() {
        let inst = BanditInstance::new(sphere2(), dvector![1.0, 0.0], NoiseModel::gaussian(0.0).unwrap()).unwrap();
        let mut rng = stream_rng(0, 0, StreamRole::Noise);
        assert_eq!(inst.pull(&dvector![1.0, 0.0], &mut rng).unwrap(), 1.0);
        assert_eq!(inst.pull(&dvector![0.0, 1.0], &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn pull_rejects_non_members() {
        let inst = BanditInstance::new(sphere2(), dvector![1.0, 0.0], NoiseModel::gaussian(1.0).unwrap()).unwrap();
        let mut rng = stream_rng(0, 0, StreamRole::Noise);
        assert!(matches!(inst.pull(&dvector![2.0, 0.0], &mut rng), Err(Error::NotInSet { .. })));
    }

    #[test]
    fn gaussian_pull_mean() {
        let inst = BanditInstance::new(sphere2(), dvector![1.0, 0.0], NoiseModel::gaussian(1.0).unwrap()).unwrap();
        let mut rng = stream_rng(5, 0, StreamRole::Noise);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| inst.pull(&dvector![1.0, 0.0], &mut rng).unwrap()).collect();
        let est = MeanEstimate::from_samples(&xs);
        assert!((est.mean - 1.0).abs() <= 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn instance_dimension_checked() {
        assert!(BanditInstance::new(sphere2(), dvector![1.0, 0.0, 0.0], NoiseModel::gaussian(1.0).unwrap()).is_err());
    }

    #[test]
    fn noise_stream_is_step_addressed() {
        let mut a = NoiseStream::new(9, 3);
        let mut b = NoiseStream::new(9, 3);
        let noise = NoiseModel::gaussian(1.0).unwrap();
        let x5 = noise.sample(a.at_step(5));
        let _ = noise.sample(b.at_step(1));
        let _ = noise.sample(b.at_step(2));
        assert_eq!(noise.sample(b.at_step(5)), x5);
        assert_ne!(noise.sample(a.at_step(6)), x5);
    }

    #[test]
    fn checkpoint_grid_powers_plus_final() {
        assert_eq!(checkpoint_grid(8), vec![1, 2, 4, 8]);
        assert_eq!(checkpoint_grid(75), vec![1, 2, 4, 8, 16, 32, 64, 75]);
    }

    #[test]
    fn norm_band_preconditions() {
        let mut rng = stream_rng(0, 0, StreamRole::Aux);
        assert!(norm_band_probability(0.6, 3.0, 2, 10, &mut rng).is_err());
        assert!(norm_band_probability(0.0, 3.0, 2, 10, &mut rng).is_err());
        let wide = norm_band_probability(0.001, 1e3, 2, 100_000, &mut rng).unwrap();
        assert!(wide.mean > 0.999);
        let vac = norm_band_probability(0.5, 1.01, 8, 100_000, &mut rng).unwrap();
        assert!(norm_band_lower_bound(0.5, 1.01) <= 0.0);
        assert!(vac.at_least(norm_band_lower_bound(0.5, 1.01), 3.0));
    }

    #[test]
    fn uniform_noise_sigma0_is_half_width() {
        assert_eq!(NoiseModel::uniform(0.5).unwrap().sigma0(), 0.5);
        assert!(NoiseModel::gaussian(-1.0).is_err());
    }
}
