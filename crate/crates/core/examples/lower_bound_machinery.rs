//! The quantities behind the Bayes-risk lower bound, computed on one PEGE
//! trajectory and by Monte Carlo under the Gaussian prior.
//!
//! ```bash
//! cargo run --release --example lower_bound_machinery
//! ```

use linbandit::environment::{norm_band_lower_bound, norm_band_probability, norm_moments, stream_rng, StreamRole};
use linbandit::estimation::{directional_risk_terms, GaussianPosterior};
use linbandit::harness::{ArmSetSpec, Experiment, ExperimentConfig};
use linbandit::Vector;

fn main() -> linbandit::Result<()> {
    let dim = 3;
    let config = ExperimentConfig { horizon: 200, arm_set: ArmSetSpec::Sphere { dim }, ..ExperimentConfig::default() };
    let exp = Experiment::from_config(&config)?;
    let z = exp.draw_z(0);
    let rec = exp.run_trajectory(&z, 0)?;

    // conjugate posterior under N(0, I/r) and unit-variance noise
    let mut posterior = GaussianPosterior::isotropic_prior(dim);
    for s in &rec.steps {
        posterior.update(&s.arm, s.reward, 1.0)?;
    }
    let arms: Vec<Vector> = rec.steps.iter().map(|s| s.arm.clone()).collect();
    println!("after {} periods, regret {:.3}", rec.steps.len(), rec.cumulative_regret());
    println!("{:>4} {:>12} {:>12} {:>12}", "dir", "exploration", "variance", "1/(r+expl)");
    for (k, t) in directional_risk_terms(&arms, &posterior, &z)?.iter().enumerate() {
        println!(
            "{:>4} {:>12.3} {:>12.6} {:>12.6}",
            k + 1,
            t.exploration,
            t.variance,
            1.0 / (dim as f64 + t.exploration)
        );
    }

    let mut rng = stream_rng(11, 0, StreamRole::Aux);
    let band = norm_band_probability(0.09, 3.0, 2, 200_000, &mut rng)?;
    println!(
        "\nPr{{0.09 <= |Z| <= 3}} at r=2: {:.4} ± {:.4}, lower bound {:.4}",
        band.mean,
        band.ci_half_width(),
        norm_band_lower_bound(0.09, 3.0)
    );
    for r in [2usize, 8] {
        let (norm, inv) = norm_moments(r, 200_000, &mut rng);
        println!("r={r}: E|Z| = {:.4} (<= 1), E[1/|Z|] = {:.4} (<= sqrt(pi) = 1.7725)", norm.mean, inv.mean);
    }
    Ok(())
}
