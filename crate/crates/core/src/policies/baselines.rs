use std::sync::Arc;

use super::{unbound, Handshake, Policy, Selection};
use crate::environment::StepKind;
use crate::error::{Error, Result};
use crate::estimation::OlsState;
use crate::geometry::{ArmSet, SpannerArms};
use crate::linalg::Vector;

/// Pure greedy: spanner initialization, then `u*(Ẑ_{t−1})` on the full OLS fit.
#[derive(Debug, Clone, Default)]
pub struct Greedy {
    bound: Option<GreedyBound>,
    handshake: Handshake,
}

#[derive(Debug, Clone)]
struct GreedyBound {
    arms: Arc<ArmSet>,
    spanner: SpannerArms,
    init_rewards: Vec<f64>,
    ols: Option<OlsState>,
}

impl Greedy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ols(&self) -> Option<&OlsState> {
        self.bound.as_ref().and_then(|b| b.ols.as_ref())
    }
}

impl Policy for Greedy {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn reset(&mut self, arms: Arc<ArmSet>, _seed: u64) -> Result<()> {
        let spanner = arms.spanner()?;
        self.bound = Some(GreedyBound { arms, spanner, init_rewards: Vec::new(), ols: None });
        self.handshake.clear();
        Ok(())
    }

    fn select(&mut self, _t: usize) -> Result<Selection> {
        let b = self.bound.as_ref().ok_or_else(unbound)?;
        let sel = match &b.ols {
            None => {
                let k = b.init_rewards.len();
                let arm = b.spanner.arms[k].clone();
                let index = match b.arms.as_ref() {
                    ArmSet::Finite(v) => v.iter().position(|x| *x == arm),
                    _ => None,
                };
                Selection::plain(arm, index, StepKind::Explore)
            }
            Some(ols) => {
                let arm = b.arms.best_arm(ols.estimate())?;
                let index = b.arms.best_arm_index(ols.estimate())?;
                let mut s = Selection::plain(arm, index, StepKind::Exploit);
                s.weighted_norm_sq = Some(ols.weighted_norm_sq(&s.arm)?);
                s
            }
        };
        self.handshake.begin(&sel.arm)?;
        Ok(sel)
    }

    fn observe(&mut self, arm: &Vector, reward: f64) -> Result<()> {
        if !reward.is_finite() {
            return Err(Error::NonFiniteReward(reward));
        }
        self.handshake.finish(arm)?;
        let b = self.bound.as_mut().ok_or_else(unbound)?;
        match b.ols.as_mut() {
            Some(ols) => ols.update(arm, reward)?,
            None => {
                b.init_rewards.push(reward);
                if b.init_rewards.len() == b.arms.dim() {
                    b.ols = Some(OlsState::init(&b.spanner.arms, &b.init_rewards)?);
                }
            }
        }
        Ok(())
    }
}

/// UCB1 over a finite arm list: every arm once, then
/// `argmax mean + √(2 ln n / nᵤ)` with `n` the number of pulls so far.
#[derive(Debug, Clone, Default)]
pub struct Ucb1 {
    bound: Option<UcbBound>,
    handshake: Handshake,
}

#[derive(Debug, Clone)]
struct UcbBound {
    arms: Vec<Vector>,
    counts: Vec<u64>,
    sums: Vec<f64>,
    total: u64,
    last: Option<usize>,
}

impl Ucb1 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn counts(&self) -> Option<&[u64]> {
        self.bound.as_ref().map(|b| b.counts.as_slice())
    }
}

impl Policy for Ucb1 {
    fn name(&self) -> String {
        "ucb1".into()
    }

    fn reset(&mut self, arms: Arc<ArmSet>, _seed: u64) -> Result<()> {
        let ArmSet::Finite(v) = arms.as_ref() else {
            return Err(Error::PolicyMismatch("ucb1 requires a finite arm set".into()));
        };
        let n = v.len();
        self.bound = Some(UcbBound { arms: v.clone(), counts: vec![0; n], sums: vec![0.0; n], total: 0, last: None });
        self.handshake.clear();
        Ok(())
    }

    fn select(&mut self, _t: usize) -> Result<Selection> {
        let b = self.bound.as_mut().ok_or_else(unbound)?;
        let idx = match b.counts.iter().position(|&c| c == 0) {
            Some(i) => i,
            None => {
                let log_n = (b.total as f64).ln();
                let mut best = 0;
                let mut best_val = f64::NEG_INFINITY;
                for i in 0..b.arms.len() {
                    let n = b.counts[i] as f64;
                    let val = b.sums[i] / n + (2.0 * log_n / n).sqrt();
                    if val > best_val {
                        best_val = val;
                        best = i;
                    }
                }
                best
            }
        };
        b.last = Some(idx);
        let sel = Selection::plain(b.arms[idx].clone(), Some(idx), StepKind::Optimistic);
        self.handshake.begin(&sel.arm)?;
        Ok(sel)
    }

    fn observe(&mut self, arm: &Vector, reward: f64) -> Result<()> {
        if !reward.is_finite() {
            return Err(Error::NonFiniteReward(reward));
        }
        self.handshake.finish(arm)?;
        let b = self.bound.as_mut().ok_or_else(unbound)?;
        let idx = b.last.take().ok_or_else(|| Error::Protocol("no pending arm".into()))?;
        b.counts[idx] += 1;
        b.sums[idx] += reward;
        b.total += 1;
        Ok(())
    }
}

/// Replaces a polytope by its extreme points and runs a finite-arm policy on them.
pub struct ExtremePointWrapper {
    inner: Box<dyn Policy>,
    arm_count: Option<usize>,
}

impl ExtremePointWrapper {
    pub fn new(inner: Box<dyn Policy>) -> Self {
        Self { inner, arm_count: None }
    }

    /// Number of arms exposed to the inner policy after `reset`.
    pub fn arm_count(&self) -> Option<usize> {
        self.arm_count
    }
}

impl Policy for ExtremePointWrapper {
    fn name(&self) -> String {
        format!("extreme+{}", self.inner.name())
    }

    fn reset(&mut self, arms: Arc<ArmSet>, seed: u64) -> Result<()> {
        if !matches!(arms.as_ref(), ArmSet::Polytope(_)) {
            return Err(Error::PolicyMismatch("extreme-point reduction requires a polytope".into()));
        }
        let finite = arms.extreme_points()?;
        self.arm_count = finite.arm_count();
        self.inner.reset(Arc::new(finite), seed)
    }

    fn select(&mut self, t: usize) -> Result<Selection> {
        self.inner.select(t)
    }

    fn observe(&mut self, arm: &Vector, reward: f64) -> Result<()> {
        self.inner.observe(arm, reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis;
    use nalgebra::dvector;

    #[test]
    fn ucb1_pulls_unplayed_first() {
        let set = Arc::new(ArmSet::finite(vec![basis(2, 0), basis(2, 1), dvector![0.6, 0.8]]).unwrap());
        let mut p = Ucb1::new();
        p.reset(set, 0).unwrap();
        for t in 1..=3 {
            let s = p.select(t).unwrap();
            assert_eq!(s.index, Some(t - 1));
            p.observe(&s.arm, 10.0).unwrap();
        }
        let s = p.select(4).unwrap();
        p.observe(&s.arm, 0.0).unwrap();
        assert_eq!(p.counts().unwrap().iter().sum::<u64>(), 4);
    }

    #[test]
    fn ucb1_rejects_continuous_sets() {
        let mut p = Ucb1::new();
        assert!(matches!(
            p.reset(Arc::new(ArmSet::unit_sphere(2).unwrap()), 0),
            Err(Error::PolicyMismatch(_))
        ));
    }

    #[test]
    fn wrapper_exposes_simplex_vertices() {
        let mut w = ExtremePointWrapper::new(Box::new(Ucb1::new()));
        w.reset(Arc::new(ArmSet::simplex(3).unwrap()), 0).unwrap();
        assert_eq!(w.arm_count(), Some(6));
        assert_eq!(w.name(), "extreme+ucb1");
        let mut seen = Vec::new();
        for t in 1..=6 {
            let s = w.select(t).unwrap();
            seen.push(s.index.unwrap());
            w.observe(&s.arm, 0.0).unwrap();
        }
        assert_eq!(seen, vec![0, 1, 2, 3, 4, 5]);
        let mut bad = ExtremePointWrapper::new(Box::new(Ucb1::new()));
        assert!(bad.reset(Arc::new(ArmSet::unit_sphere(2).unwrap()), 0).is_err());
    }

    #[test]
    fn noiseless_greedy_locks_on() {
        let set = Arc::new(ArmSet::unit_sphere(2).unwrap());
        let mut g = Greedy::new();
        g.reset(set.clone(), 0).unwrap();
        let z = dvector![3.0, 4.0];
        for t in 1..=50 {
            let s = g.select(t).unwrap();
            if t > 2 {
                assert!(set.gap(&z, &s.arm).unwrap() < 1e-12);
            }
            g.observe(&s.arm, s.arm.dot(&z)).unwrap();
        }
    }
}
