//! PEGE on the unit sphere: Bayes risk at each checkpoint and the log-log slope.
//!
//! ```bash
//! cargo run --release --example pege_sphere -- 4 200
//! ```

use linbandit::harness::{ArmSetSpec, Experiment, ExperimentConfig, PolicyConfig};

fn main() -> linbandit::Result<()> {
    let mut args = std::env::args().skip(1);
    let dim: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(2);
    let replications: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);

    let config = ExperimentConfig {
        horizon: 1 << 12,
        replications,
        arm_set: ArmSetSpec::Sphere { dim },
        policy: PolicyConfig { name: "pege".into(), alpha: None, sigma0: None },
        ..ExperimentConfig::default()
    };
    let summary = Experiment::from_config(&config)?.estimate_bayes_risk(replications)?;

    println!("PEGE, sphere r={dim}, {replications} replications");
    println!("{:>6}  {:>10}  {:>8}  {:>10}", "T", "risk", "ci95", "risk/sqrtT");
    for c in &summary.checkpoints {
        println!(
            "{:>6}  {:>10.3}  {:>8.3}  {:>10.4}",
            c.t,
            c.estimate.mean,
            c.ci95,
            c.estimate.mean / (c.t as f64).sqrt()
        );
    }
    if let Some(fit) = summary.fit {
        println!("slope over T >= 256: {:.3} ± {:.3} (square-root growth is 0.5)", fit.slope, fit.slope_ci);
    }
    Ok(())
}
