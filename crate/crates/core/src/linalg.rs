//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Standard basis vector `e_k` (zero-based `k`).
pub fn basis(dim: usize, k: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[k] = 1.0;
    v
}

/// Extreme eigenvalues `(λmin, λmax)` of a symmetric matrix.
pub fn eigen_extremes(m: &Matrix) -> (f64, f64) {
    let eig = SymmetricEigen::new(m.clone());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

pub fn lambda_min(m: &Matrix) -> f64 {
    eigen_extremes(m).0
}

/// Replaces `m` by `(m + m') / 2`.
pub fn symmetrize(m: &mut Matrix) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Largest absolute entry of `m - m'`.
pub fn asymmetry(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn is_positive_definite(m: &Matrix) -> bool {
    m.clone().cholesky().is_some()
}

/// Spectral condition number of a symmetric matrix; infinite when singular.
pub fn condition_number(m: &Matrix) -> f64 {
    let (min, max) = eigen_extremes(m);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Symmetric square root `Q^{1/2}` of a symmetric positive definite matrix.
pub fn sqrt_spd(m: &Matrix) -> Matrix {
    let eig = SymmetricEigen::new(m.clone());
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let v = &eig.eigenvectors;
    let mut out = v * Matrix::from_diagonal(&roots) * v.transpose();
    symmetrize(&mut out);
    out
}

/// `u' A u`.
pub fn quad_form(a: &Matrix, u: &Vector) -> f64 {
    u.dot(&(a * u))
}

/// Relative Frobenius distance `‖a - b‖_F / ‖b‖_F`.
pub fn relative_frobenius(a: &Matrix, b: &Matrix) -> f64 {
    let denom = b.norm();
    if denom == 0.0 {
        a.norm()
    } else {
        (a - b).norm() / denom
    }
}

/// Uniformly distributed point on the unit sphere in `dim` dimensions.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v = Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Standard normal vector.
pub fn random_normal_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal))
}
