//! Trajectory runner and Monte Carlo estimators.

use std::sync::Arc;

use rand::RngCore;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::summary::{CurveSet, SummaryStats};
use crate::environment::{
    sample_z, stream_rng, BanditInstance, NoiseModel, NoiseStream, Prior, StepRecord, StreamRole, TrajectoryRecord,
};
use crate::error::{Error, Result};
use crate::geometry::ArmSet;
use crate::linalg::Vector;
use crate::policies::PolicySpec;

/// Environment variable that overrides the worker count.
pub const WORKERS_ENV: &str = "LINBANDIT_WORKERS";

/// Worker threads for replication batches: `LINBANDIT_WORKERS` if set to a
/// positive integer, else the available cores.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// A validated configuration with its components built once.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    arms: Arc<ArmSet>,
    prior: Prior,
    noise: NoiseModel,
    policy: PolicySpec,
    policy_label: String,
    checkpoints: Vec<usize>,
}

impl Experiment {
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let arms = Arc::new(config.arm_set.build()?);
        let prior = config.prior.build(arms.dim())?;
        let noise = config.noise.build()?;
        let policy = PolicySpec::from(&config.policy);
        // fail on unknown names and geometry mismatches before any replication runs
        let mut probe = policy.build(noise.sigma0())?;
        probe.reset(arms.clone(), 0)?;
        Ok(Self {
            checkpoints: config.checkpoint_grid(),
            config: config.clone(),
            arms,
            prior,
            noise,
            policy,
            policy_label: probe.name(),
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn arms(&self) -> &Arc<ArmSet> {
        &self.arms
    }

    pub fn dim(&self) -> usize {
        self.arms.dim()
    }

    /// Display name of the policy, including any `α` override.
    pub fn policy_name(&self) -> &str {
        &self.policy_label
    }

    pub fn checkpoints(&self) -> &[usize] {
        &self.checkpoints
    }

    /// The hidden parameter of replication `replication` under the prior.
    pub fn draw_z(&self, replication: u64) -> Vector {
        sample_z(&self.prior, &mut stream_rng(self.config.seed, replication, StreamRole::Prior))
    }

    /// One trajectory of length `horizon` against a fixed `z`. Deterministic in
    /// `(config, z, replication)`.
    pub fn run_trajectory(&self, z: &Vector, replication: u64) -> Result<TrajectoryRecord> {
        let seed = self.config.seed;
        let policy_seed = stream_rng(seed, replication, StreamRole::Policy).next_u64();
        let mut policy = self.policy.build(self.noise.sigma0())?;
        policy.reset(self.arms.clone(), policy_seed)?;
        let instance = BanditInstance::new(self.arms.clone(), z.clone(), self.noise)?;
        let mut noise = NoiseStream::new(seed, replication);

        let horizon = self.config.horizon;
        let mut steps = Vec::with_capacity(horizon);
        let mut checkpoints = Vec::with_capacity(self.checkpoints.len());
        let mut next_cp = self.checkpoints.iter().peekable();
        let mut cumulative = 0.0;
        for t in 1..=horizon {
            let sel = policy.select(t)?;
            let reward = instance.pull(&sel.arm, noise.at_step(t))?;
            let regret = instance.regret(&sel.arm)?;
            policy.observe(&sel.arm, reward)?;
            cumulative += regret;
            if next_cp.peek() == Some(&&t) {
                next_cp.next();
                checkpoints.push((t, cumulative));
            }
            steps.push(StepRecord {
                arm: sel.arm,
                arm_index: sel.index,
                kind: sel.kind,
                reward,
                regret,
                weighted_norm_sq: sel.weighted_norm_sq,
                radius: sel.radius,
            });
        }
        Ok(TrajectoryRecord { seed, replication, z: z.clone(), steps, checkpoints })
    }

    /// Runs replications `0..n` on the worker pool and maps each trajectory
    /// through `f`; results come back in replication order. With `fixed_z`
    /// every replication uses it, otherwise each draws its own from the prior.
    pub fn map_replications<T, F>(&self, n: usize, fixed_z: Option<&Vector>, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(TrajectoryRecord) -> Result<T> + Sync,
    {
        if let Some(z) = fixed_z {
            if z.len() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), found: z.len() });
            }
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(worker_count())
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(|| {
            (0..n as u64)
                .into_par_iter()
                .map(|rep| {
                    let z = fixed_z.cloned().unwrap_or_else(|| self.draw_z(rep));
                    f(self.run_trajectory(&z, rep)?)
                })
                .collect()
        })
    }

    /// Checkpoint curves of `n` replications.
    pub fn sample_curves(&self, n: usize, fixed_z: Option<&Vector>) -> Result<CurveSet> {
        let values = self.map_replications(n, fixed_z, |rec| Ok(rec.checkpoints.iter().map(|&(_, v)| v).collect()))?;
        Ok(CurveSet {
            policy: self.policy_label.clone(),
            dim: self.dim(),
            checkpoints: self.checkpoints.clone(),
            values,
        })
    }

    /// Regret at a fixed `z`.
    pub fn estimate_regret(&self, z: &Vector, n: usize) -> Result<SummaryStats> {
        self.sample_curves(n, Some(z))?.summary()
    }

    /// Bayes risk: every replication draws a fresh `z` from the prior.
    pub fn estimate_bayes_risk(&self, n: usize) -> Result<SummaryStats> {
        self.sample_curves(n, None)?.summary()
    }
}

pub fn run_trajectory(config: &ExperimentConfig, z: &Vector, replication: u64) -> Result<TrajectoryRecord> {
    Experiment::from_config(config)?.run_trajectory(z, replication)
}

pub fn estimate_regret(config: &ExperimentConfig, z: &Vector, n: usize) -> Result<SummaryStats> {
    Experiment::from_config(config)?.estimate_regret(z, n)
}

pub fn estimate_bayes_risk(config: &ExperimentConfig, n: usize) -> Result<SummaryStats> {
    Experiment::from_config(config)?.estimate_bayes_risk(n)
}
