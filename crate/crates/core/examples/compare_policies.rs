//! PEGE, UE, greedy and the extreme-point wrapper against one fixed parameter.
//! Noise is addressed by (seed, replication, step), so all policies see the
//! same noise sequence.
//!
//! ```bash
//! cargo run --release --example compare_policies
//! ```

use linbandit::harness::{ArmSetSpec, Experiment, ExperimentConfig, PolicyConfig};
use linbandit::Vector;

fn main() -> linbandit::Result<()> {
    let z = Vector::from_vec(vec![0.6, -0.3, 0.2]);
    let runs = [
        (ArmSetSpec::Sphere { dim: 3 }, "pege", None),
        (ArmSetSpec::Sphere { dim: 3 }, "ue", Some(1.0)),
        (ArmSetSpec::Sphere { dim: 3 }, "greedy", None),
        (ArmSetSpec::Simplex { dim: 3 }, "extreme+ue", Some(1.0)),
        (ArmSetSpec::Simplex { dim: 3 }, "extreme+ucb1", None),
    ];
    println!("{:<26} {:<10} {:>10} {:>8}", "policy", "arm set", "regret", "ci95");
    for (arm_set, name, alpha) in runs {
        let label = match &arm_set {
            ArmSetSpec::Simplex { .. } => "simplex",
            _ => "sphere",
        };
        let config = ExperimentConfig {
            horizon: 2048,
            arm_set,
            policy: PolicyConfig { name: name.into(), alpha, sigma0: None },
            ..ExperimentConfig::default()
        };
        let exp = Experiment::from_config(&config)?;
        let summary = exp.estimate_regret(&z, 100)?;
        let last = summary.checkpoints.last().expect("checkpoint grid is nonempty");
        println!("{:<26} {label:<10} {:>10.2} {:>8.2}", exp.policy_name(), last.estimate.mean, last.ci95);
    }
    Ok(())
}
