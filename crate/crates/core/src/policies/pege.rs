use std::sync::Arc;

use super::{unbound, Handshake, Policy, Selection};
use crate::environment::StepKind;
use crate::error::{Error, Result};
use crate::geometry::{ArmSet, SpannerArms};
use crate::linalg::{Matrix, Vector};

/// Position inside the current cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PegePhase {
    /// Next pull is spanner arm `k` (zero-based).
    Explore { k: usize },
    /// `remaining` greedy pulls left in this cycle, including the next one.
    Exploit { remaining: usize },
}

/// Total periods after `cycles` complete cycles: `rK + K(K+1)/2`.
pub fn pege_periods(dim: usize, cycles: usize) -> usize {
    dim * cycles + cycles * (cycles + 1) / 2
}

/// Phased exploration and greedy exploitation.
///
/// Cycle `c` plays the `r` spanner arms once each, refits the estimate from
/// exploration rewards only,
/// `Ẑ(c) = (1/c) (Σ bₖbₖ')⁻¹ Σₛ Σₖ bₖ X^{bₖ}(s)`,
/// and then plays `G(c) = u*(Ẑ(c))` for `c` periods. A horizon that ends
/// mid-cycle simply truncates it.
#[derive(Debug, Clone)]
pub struct Pege {
    bound: Option<Bound>,
    handshake: Handshake,
}

#[derive(Debug, Clone)]
struct Bound {
    arms: Arc<ArmSet>,
    spanner: SpannerArms,
    spanner_index: Vec<Option<usize>>,
    spanner_gram_inv: Matrix,
    reward_sums: Vec<f64>,
    cycle: usize,
    phase: PegePhase,
    estimate: Option<Vector>,
    greedy: Option<(Vector, Option<usize>)>,
}

impl Default for Pege {
    fn default() -> Self {
        Self::new()
    }
}

impl Pege {
    pub fn new() -> Self {
        Self { bound: None, handshake: Handshake::default() }
    }

    fn state(&self) -> Result<&Bound> {
        self.bound.as_ref().ok_or_else(unbound)
    }

    /// Current cycle `c ≥ 1`.
    pub fn cycle(&self) -> Option<usize> {
        self.bound.as_ref().map(|b| b.cycle)
    }

    pub fn phase(&self) -> Option<PegePhase> {
        self.bound.as_ref().map(|b| b.phase)
    }

    /// `Ẑ(c)` of the latest completed exploration phase.
    pub fn estimate(&self) -> Option<&Vector> {
        self.bound.as_ref().and_then(|b| b.estimate.as_ref())
    }

    pub fn greedy_arm(&self) -> Option<&Vector> {
        self.bound.as_ref().and_then(|b| b.greedy.as_ref().map(|(v, _)| v))
    }

    pub fn spanner(&self) -> Option<&SpannerArms> {
        self.bound.as_ref().map(|b| &b.spanner)
    }
}

impl Policy for Pege {
    fn name(&self) -> String {
        "pege".into()
    }

    fn reset(&mut self, arms: Arc<ArmSet>, _seed: u64) -> Result<()> {
        let spanner = arms.spanner()?;
        let spanner_gram_inv = spanner
            .gram()
            .try_inverse()
            .ok_or(Error::Singular { condition: f64::INFINITY })?;
        let spanner_index = spanner
            .arms
            .iter()
            .map(|b| match arms.as_ref() {
                ArmSet::Finite(v) => v.iter().position(|x| x == b),
                _ => None,
            })
            .collect();
        let dim = arms.dim();
        self.bound = Some(Bound {
            arms,
            spanner,
            spanner_index,
            spanner_gram_inv,
            reward_sums: vec![0.0; dim],
            cycle: 1,
            phase: PegePhase::Explore { k: 0 },
            estimate: None,
            greedy: None,
        });
        self.handshake.clear();
        Ok(())
    }

    fn select(&mut self, _t: usize) -> Result<Selection> {
        let b = self.state()?;
        let sel = match b.phase {
            PegePhase::Explore { k } => {
                Selection::plain(b.spanner.arms[k].clone(), b.spanner_index[k], StepKind::Explore)
            }
            PegePhase::Exploit { .. } => {
                let (arm, index) = b.greedy.clone().ok_or_else(|| Error::Protocol("greedy arm missing".into()))?;
                Selection::plain(arm, index, StepKind::Exploit)
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
        let dim = b.arms.dim();
        match b.phase {
            PegePhase::Explore { k } => {
                b.reward_sums[k] += reward;
                if k + 1 < dim {
                    b.phase = PegePhase::Explore { k: k + 1 };
                } else {
                    let weighted = b
                        .spanner
                        .arms
                        .iter()
                        .zip(&b.reward_sums)
                        .fold(Vector::zeros(dim), |acc, (bk, &s)| acc + bk * s);
                    let estimate = (&b.spanner_gram_inv * weighted) / b.cycle as f64;
                    let greedy = b.arms.best_arm(&estimate)?;
                    let index = b.arms.best_arm_index(&estimate)?;
                    b.estimate = Some(estimate);
                    b.greedy = Some((greedy, index));
                    b.phase = PegePhase::Exploit { remaining: b.cycle };
                }
            }
            PegePhase::Exploit { remaining } => {
                if remaining > 1 {
                    b.phase = PegePhase::Exploit { remaining: remaining - 1 };
                } else {
                    b.cycle += 1;
                    b.phase = PegePhase::Explore { k: 0 };
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis;
    use nalgebra::dvector;

    fn run_noiseless(p: &mut Pege, z: &Vector, steps: usize) -> Vec<Selection> {
        (1..=steps)
            .map(|t| {
                let s = p.select(t).unwrap();
                p.observe(&s.arm, s.arm.dot(z)).unwrap();
                s
            })
            .collect()
    }

    #[test]
    fn first_cycle_schedule_on_sphere() {
        let mut p = Pege::new();
        p.reset(Arc::new(ArmSet::unit_sphere(2).unwrap()), 0).unwrap();
        let z = dvector![3.0, 4.0];
        let sel = run_noiseless(&mut p, &z, 3);
        assert_eq!(sel[0].arm, basis(2, 0));
        assert_eq!(sel[1].arm, basis(2, 1));
        assert_eq!(sel[2].kind, StepKind::Exploit);
        assert!((&sel[2].arm - dvector![0.6, 0.8]).norm() < 1e-15);
    }

    #[test]
    fn noiseless_exploitation_has_zero_regret() {
        let set = Arc::new(ArmSet::unit_sphere(2).unwrap());
        let mut p = Pege::new();
        p.reset(set.clone(), 0).unwrap();
        let z = dvector![3.0, 4.0];
        for s in run_noiseless(&mut p, &z, 60) {
            if s.kind == StepKind::Exploit {
                assert!(set.gap(&z, &s.arm).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn period_count_after_ten_cycles() {
        assert_eq!(pege_periods(2, 10), 75);
        let mut p = Pege::new();
        p.reset(Arc::new(ArmSet::unit_sphere(2).unwrap()), 0).unwrap();
        let sel = run_noiseless(&mut p, &dvector![1.0, 0.0], 75);
        assert_eq!(sel.iter().filter(|s| s.kind == StepKind::Explore).count(), 20);
        assert_eq!(sel.iter().filter(|s| s.kind == StepKind::Exploit).count(), 55);
        assert_eq!(p.cycle(), Some(11));
        assert_eq!(p.phase(), Some(PegePhase::Explore { k: 0 }));
    }

    #[test]
    fn protocol_is_enforced() {
        let mut p = Pege::new();
        assert!(p.select(1).is_err());
        p.reset(Arc::new(ArmSet::unit_sphere(2).unwrap()), 0).unwrap();
        assert!(p.observe(&basis(2, 0), 1.0).is_err());
        let s = p.select(1).unwrap();
        assert!(p.select(2).is_err());
        assert!(p.observe(&basis(2, 1), 1.0).is_err());
        let _ = s;
    }

    #[test]
    fn finite_set_reports_indices() {
        let set = Arc::new(ArmSet::finite(vec![basis(2, 1), basis(2, 0)]).unwrap());
        let mut p = Pege::new();
        p.reset(set, 0).unwrap();
        let sel = run_noiseless(&mut p, &dvector![1.0, 0.2], 3);
        assert_eq!(sel[2].index, Some(1));
    }
}
