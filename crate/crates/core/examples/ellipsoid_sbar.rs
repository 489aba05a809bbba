//! The smooth-best-arm-response constant of ellipsoids, checked by sampling.
//!
//! ```bash
//! cargo run --release --example ellipsoid_sbar
//! ```

use linbandit::environment::{stream_rng, StreamRole};
use linbandit::{ArmSet, Matrix, Vector};

fn main() -> linbandit::Result<()> {
    let mut rng = stream_rng(7, 0, StreamRole::Aux);
    for diag in [vec![1.0, 1.0], vec![4.0, 1.0], vec![9.0, 1.0, 0.25]] {
        let set = ArmSet::ellipsoid(Matrix::from_diagonal(&Vector::from_vec(diag.clone())))?;
        let j = set.sbar_constant().expect("ellipsoids have a closed-form constant");
        let report = set.sbar_check(j, 10_000, &mut rng)?;
        println!(
            "Q=diag{diag:?}: J = {j:.4}, sampled worst ratio {:.4}, {}",
            report.worst_ratio,
            if report.passed { "holds" } else { "violated" }
        );
    }

    // the best arm depends on the direction of z only
    let set = ArmSet::ellipsoid(Matrix::from_diagonal(&Vector::from_vec(vec![4.0, 1.0])))?;
    let z = Vector::from_vec(vec![0.3, 0.8]);
    let a = set.best_arm(&z)?;
    let b = set.best_arm(&(&z * 17.0))?;
    println!("best arm for z and 17z: {:?} vs {:?}", a.as_slice(), b.as_slice());
    println!("gap of the best arm: {:.2e}", set.gap(&z, &a)?);
    Ok(())
}
