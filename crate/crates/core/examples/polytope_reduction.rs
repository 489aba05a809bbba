//! Polyhedral arm sets reduce to their extreme points.
//!
//! ```bash
//! cargo run --release --example polytope_reduction
//! ```

use linbandit::geometry::linear_constraint_vertex_bound;
use linbandit::policies::{ExtremePointWrapper, UncertaintyEllipsoid};
use linbandit::{ArmSet, Matrix, Policy, Vector};
use std::sync::Arc;

fn main() -> linbandit::Result<()> {
    for dim in [2usize, 3, 5] {
        let simplex = ArmSet::simplex(dim)?;
        let cube = ArmSet::hypercube(dim)?;
        println!(
            "r={dim}: simplex has {} extreme points, cube has {}",
            simplex.extreme_point_count()?,
            cube.extreme_point_count()?
        );
    }
    println!("{{u >= 0 : Au <= b}} with r=4 and 3 rows has at most {} vertices", linear_constraint_vertex_bound(4, 3));

    // A u <= 1 with A = [I; -I] is recognised as the cube
    let dim = 3;
    let a = Matrix::from_fn(2 * dim, dim, |i, j| match (i < dim, i % dim == j) {
        (true, true) => 1.0,
        (false, true) => -1.0,
        _ => 0.0,
    });
    let cube = ArmSet::polytope_from_halfspaces(&a, &Vector::from_element(2 * dim, 1.0))?;
    println!("half-space form resolved to {} extreme points", cube.extreme_point_count()?);

    // linear objectives peak at a vertex, so the wrapper hands the inner policy a finite set
    let z = Vector::from_vec(vec![0.2, -0.9, 0.4]);
    println!("best cube vertex for z: {:?}", cube.best_arm(&z)?.as_slice());
    let mut wrapped = ExtremePointWrapper::new(Box::new(UncertaintyEllipsoid::new(1.0, Some(1.0))));
    wrapped.reset(Arc::new(cube), 0)?;
    println!("{} sees {} arms", wrapped.name(), wrapped.arm_count().unwrap_or(0));
    Ok(())
}
