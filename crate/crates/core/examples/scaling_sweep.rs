//! Bayes risk against horizon and dimension for one policy, with the fitted
//! growth exponent per dimension.
//!
//! ```bash
//! cargo run --release --example scaling_sweep -- pege
//! cargo run --release --example scaling_sweep -- ue
//! ```

use linbandit::harness::{ArmSetSpec, Experiment, ExperimentConfig, PolicyConfig};

fn main() -> linbandit::Result<()> {
    let policy = std::env::args().nth(1).unwrap_or_else(|| "pege".into());
    // UE is run with alpha = 1; the theoretical constant explores for far longer than these horizons
    let alpha = (policy == "ue").then_some(1.0);
    let checkpoints = vec![1 << 8, 1 << 9, 1 << 10, 1 << 11, 1 << 12];
    println!("{:<14} {:>3} {}", "policy", "r", checkpoints.iter().map(|t| format!("{t:>10}")).collect::<String>());
    let mut at_end = Vec::new();
    for dim in [2usize, 4, 8] {
        let config = ExperimentConfig {
            horizon: *checkpoints.last().expect("nonempty"),
            checkpoints: Some(checkpoints.clone()),
            arm_set: ArmSetSpec::Sphere { dim },
            policy: PolicyConfig { name: policy.clone(), alpha, sigma0: None },
            ..ExperimentConfig::default()
        };
        let exp = Experiment::from_config(&config)?;
        let summary = exp.estimate_bayes_risk(100)?;
        let row: String = summary.checkpoints.iter().map(|c| format!("{:>10.2}", c.estimate.mean)).collect();
        let slope = summary.fit_over(&checkpoints)?;
        println!("{:<14} {dim:>3} {row}   slope {:.3}", exp.policy_name(), slope.slope);
        at_end.push(summary.checkpoints.last().expect("nonempty").estimate.mean);
    }
    println!("risk ratio r=8 / r=2 at the last horizon: {:.2}", at_end[2] / at_end[0]);
    Ok(())
}
