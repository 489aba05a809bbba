//! Implementing the policy trait: explore-then-commit on the sphere, driven
//! by hand against a bandit instance.
//!
//! ```bash
//! cargo run --release --example custom_policy
//! ```

use std::sync::Arc;

use linbandit::environment::{BanditInstance, NoiseModel, NoiseStream, StepKind};
use linbandit::estimation::OlsState;
use linbandit::policies::Selection;
use linbandit::{ArmSet, Policy, Result, Vector};

/// Pulls the spanner arms round-robin for `explore` periods, then commits to
/// the best arm for the least-squares estimate.
struct ExploreThenCommit {
    explore: usize,
    arms: Option<Arc<ArmSet>>,
    spanner: Vec<Vector>,
    seen: Vec<(Vector, f64)>,
    committed: Option<Vector>,
}

impl Policy for ExploreThenCommit {
    fn name(&self) -> String {
        format!("etc({})", self.explore)
    }

    fn reset(&mut self, arms: Arc<ArmSet>, _seed: u64) -> Result<()> {
        self.spanner = arms.spanner()?.arms;
        self.arms = Some(arms);
        self.seen.clear();
        self.committed = None;
        Ok(())
    }

    fn select(&mut self, t: usize) -> Result<Selection> {
        if let Some(arm) = &self.committed {
            return Ok(Selection::plain(arm.clone(), None, StepKind::Exploit));
        }
        let arm = self.spanner[(t - 1) % self.spanner.len()].clone();
        Ok(Selection::plain(arm, None, StepKind::Explore))
    }

    fn observe(&mut self, arm: &Vector, reward: f64) -> Result<()> {
        if self.committed.is_some() {
            return Ok(());
        }
        self.seen.push((arm.clone(), reward));
        if self.seen.len() == self.explore {
            let (xs, ys): (Vec<Vector>, Vec<f64>) = self.seen.iter().cloned().unzip();
            let ols = OlsState::init(&xs, &ys)?;
            let arms = self.arms.as_ref().expect("reset before use");
            self.committed = Some(arms.best_arm(ols.estimate())?);
        }
        Ok(())
    }
}

fn main() -> Result<()> {
    let arms = Arc::new(ArmSet::unit_sphere(3)?);
    let z = Vector::from_vec(vec![0.5, 0.5, -0.2]);
    let instance = BanditInstance::new(arms.clone(), z, NoiseModel::gaussian(1.0)?)?;
    for explore in [30, 120, 480] {
        let mut policy = ExploreThenCommit { explore, arms: None, spanner: vec![], seen: vec![], committed: None };
        policy.reset(arms.clone(), 0)?;
        let mut noise = NoiseStream::new(5, 0);
        let mut regret = 0.0;
        for t in 1..=5000 {
            let s = policy.select(t)?;
            let x = instance.pull(&s.arm, noise.at_step(t))?;
            policy.observe(&s.arm, x)?;
            regret += instance.regret(&s.arm)?;
        }
        println!("{:<10} regret over 5000 periods: {regret:.2}", policy.name());
    }
    Ok(())
}
