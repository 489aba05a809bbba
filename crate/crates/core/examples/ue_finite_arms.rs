//! UE on a two-arm set: how often the suboptimal arm gets pulled, with the
//! theoretical radius constant and with `alpha = 1`.
//!
//! ```bash
//! cargo run --release --example ue_finite_arms
//! ```

use linbandit::estimation::UncertaintyParams;
use linbandit::harness::{ArmSetSpec, Experiment, ExperimentConfig, PolicyConfig};
use linbandit::Vector;

fn main() -> linbandit::Result<()> {
    let z = Vector::from_vec(vec![1.0, 0.3]);
    let horizon = 4096;
    let replications = 100;
    let arm_set = ArmSetSpec::Finite { arms: vec![vec![1.0, 0.0], vec![0.0, 1.0]] };
    let gap = arm_set.build()?.gap(&z, &Vector::from_vec(vec![0.0, 1.0]))?;
    println!("z = (1, 0.3), gap of e2 = {gap}");

    let theory = UncertaintyParams::new(1.0, 1.0, 1.0, Some(2))?;
    println!("theoretical kappa0 = {:.4}, alpha = {:.4}", theory.kappa0(), theory.alpha());

    for alpha in [None, Some(1.0)] {
        let config = ExperimentConfig {
            horizon,
            replications,
            checkpoints: Some(vec![64, 256, 1024, horizon]),
            arm_set: arm_set.clone(),
            policy: PolicyConfig { name: "ue".into(), alpha, sigma0: None },
            ..ExperimentConfig::default()
        };
        let exp = Experiment::from_config(&config)?;
        let pulls = exp.map_replications(replications, Some(&z), |rec| {
            Ok(rec.steps.iter().filter(|s| s.arm_index == Some(1)).count() as f64)
        })?;
        let mean_pulls = pulls.iter().sum::<f64>() / pulls.len() as f64;
        let regret = exp.estimate_regret(&z, replications)?;
        println!("\n{}: mean pulls of e2 over {horizon} periods = {mean_pulls:.1}", exp.policy_name());
        for c in &regret.checkpoints {
            println!("  T={:<5} regret {:>8.2} ± {:.2}", c.t, c.estimate.mean, c.ci95);
        }
    }
    Ok(())
}
