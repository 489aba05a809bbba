//! Rank-one least squares: the Sherman-Morrison inverse against a direct
//! inverse, and the uncertainty radius along a few directions.
//!
//! ```bash
//! cargo run --release --example online_least_squares
//! ```

use linbandit::environment::{stream_rng, StreamRole};
use linbandit::estimation::{OlsState, UncertaintyParams};
use linbandit::linalg::{basis, random_normal_vector, random_unit_vector};
use linbandit::{Matrix, Vector};

fn main() -> linbandit::Result<()> {
    let dim = 4;
    let mut rng = stream_rng(3, 0, StreamRole::Aux);
    let z = random_normal_vector(&mut rng, dim);
    let noisy = |u: &Vector, rng: &mut rand_chacha::ChaCha8Rng| u.dot(&z) + 0.5 * random_normal_vector(rng, 1)[0];

    let spanner: Vec<Vector> = (0..dim).map(|k| basis(dim, k)).collect();
    let rewards: Vec<f64> = spanner.iter().map(|u| noisy(u, &mut rng)).collect();
    let mut ols = OlsState::init(&spanner, &rewards)?;
    let params = UncertaintyParams::new(0.5, 1.0, 1.0, None)?;

    for t in (dim + 1)..=2000 {
        let u = random_unit_vector(&mut rng, dim);
        let x = noisy(&u, &mut rng);
        ols.update(&u, x)?;
        if t.is_power_of_two() {
            let direct: Matrix = ols.gram().clone().try_inverse().expect("Gram matrix is invertible");
            let drift = (ols.gram_inverse() - direct).amax();
            let err = (ols.estimate() - &z).norm();
            let radius = ols.uncertainty_radius(&params, &basis(dim, 0))?;
            println!("t={t:<5} |Z_t - z| = {err:.4}  inverse drift {drift:.1e}  radius along e1 {radius:.3}");
        }
    }
    Ok(())
}
