//! Sequential decision policies behind one interface.
//!
//! A policy is driven as `reset` once, then alternating `select(t)` /
//! `observe(arm, reward)` for `t = 1, 2, …`. Calling `select` twice without an
//! `observe` in between (or the reverse) is a protocol error.

mod baselines;
mod pege;
mod ue;

use std::sync::Arc;

use crate::environment::StepKind;
use crate::error::{Error, Result};
use crate::geometry::ArmSet;
use crate::linalg::Vector;

pub use baselines::{ExtremePointWrapper, Greedy, Ucb1};
pub use pege::{pege_periods, Pege, PegePhase};
pub use ue::{maximize_optimistic_index, UncertaintyEllipsoid};

/// What a policy plays at one step, plus the diagnostics it can report.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub arm: Vector,
    /// Position in the finite arm list, when the arm set is finite.
    pub index: Option<usize>,
    pub kind: StepKind,
    /// `‖U_t‖²_{C_{t−1}}`.
    pub weighted_norm_sq: Option<f64>,
    /// `R_{t−1}^{U_t}`.
    pub radius: Option<f64>,
}

impl Selection {
    pub fn plain(arm: Vector, index: Option<usize>, kind: StepKind) -> Self {
        Self { arm, index, kind, weighted_norm_sq: None, radius: None }
    }
}

pub trait Policy: Send {
    fn name(&self) -> String;

    /// Binds the policy to an arm set and clears all history.
    fn reset(&mut self, arms: Arc<ArmSet>, seed: u64) -> Result<()>;

    /// Arm for period `t` (1-based).
    fn select(&mut self, t: usize) -> Result<Selection>;

    fn observe(&mut self, arm: &Vector, reward: f64) -> Result<()>;
}

/// Policy selection by name: `pege`, `ue`, `greedy`, `ucb1`, or
/// `extreme+<finite-policy>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub name: String,
    /// Overrides the theoretical `α = 4σ₀κ₀²` of the uncertainty ellipsoid.
    pub alpha: Option<f64>,
    /// Declared sub-Gaussian constant; defaults to the noise model's.
    pub sigma0: Option<f64>,
}

impl PolicySpec {
    pub fn named(name: &str) -> Self {
        Self { name: name.to_string(), alpha: None, sigma0: None }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    /// Builds an unbound policy; `noise_sigma0` is used unless the spec declares its own.
    pub fn build(&self, noise_sigma0: f64) -> Result<Box<dyn Policy>> {
        let sigma0 = self.sigma0.unwrap_or(noise_sigma0);
        if let Some(inner) = self.name.strip_prefix("extreme+") {
            let inner_spec = PolicySpec { name: inner.to_string(), ..self.clone() };
            if inner_spec.name.starts_with("extreme+") {
                return Err(Error::UnknownPolicy(self.name.clone()));
            }
            return Ok(Box::new(ExtremePointWrapper::new(inner_spec.build(noise_sigma0)?)));
        }
        Ok(match self.name.as_str() {
            "pege" => Box::new(Pege::new()),
            "ue" => Box::new(UncertaintyEllipsoid::new(sigma0, self.alpha)),
            "greedy" => Box::new(Greedy::new()),
            "ucb1" => Box::new(Ucb1::new()),
            other => return Err(Error::UnknownPolicy(other.to_string())),
        })
    }
}

/// Guards the select/observe alternation.
#[derive(Debug, Clone, Default)]
pub(crate) struct Handshake {
    pending: Option<Vector>,
}

impl Handshake {
    pub(crate) fn begin(&mut self, arm: &Vector) -> Result<()> {
        if self.pending.is_some() {
            return Err(Error::Protocol("select called twice without observe".into()));
        }
        self.pending = Some(arm.clone());
        Ok(())
    }

    pub(crate) fn finish(&mut self, arm: &Vector) -> Result<()> {
        match self.pending.take() {
            None => Err(Error::Protocol("observe called without a pending select".into())),
            Some(p) if p != *arm => Err(Error::Protocol("observed arm differs from the selected arm".into())),
            Some(_) => Ok(()),
        }
    }

    pub(crate) fn clear(&mut self) {
        self.pending = None;
    }
}

pub(crate) fn unbound() -> Error {
    Error::Protocol("policy used before reset".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_names() {
        for name in ["pege", "ue", "greedy", "ucb1", "extreme+ucb1", "extreme+ue"] {
            assert!(PolicySpec::named(name).build(1.0).is_ok(), "{name}");
        }
        assert!(matches!(PolicySpec::named("lai").build(1.0), Err(Error::UnknownPolicy(_))));
        assert!(PolicySpec::named("extreme+extreme+ucb1").build(1.0).is_err());
    }
}
