//! Arm sets, best-arm oracles, gaps and spanner arms.
//!
//! An [`ArmSet`] is one of four compact decision sets: the unit sphere, an
//! ellipsoid `{u : u' Q⁻¹ u ≤ 1}`, a finite list of vectors, or a polytope
//! given by its extreme points. Every variant answers the linear maximization
//! `max_{v ∈ U} v'z` exactly.
//!
//! Tie-breaking is deterministic everywhere: at `z = 0` the continuous sets
//! return the image of `e₁`, and argmaxes over stored vectors keep the lowest
//! index.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// Absolute tolerance on the defining quadratic form for membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Largest hypercube dimension whose vertices are enumerated.
pub const MAX_HYPERCUBE_DIM: usize = 20;

#[derive(Debug, Clone)]
pub struct Ellipsoid {
    shape: Matrix,
    shape_inv: Matrix,
    shape_sqrt: Matrix,
    lambda_min: f64,
    lambda_max: f64,
}

impl Ellipsoid {
    pub fn shape(&self) -> &Matrix {
        &self.shape
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn shape_sqrt(&self) -> &Matrix {
        &self.shape_sqrt
    }

    /// Maps a unit vector `w` onto the boundary point `Q^{1/2} w`.
    pub fn boundary_point(&self, w: &Vector) -> Vector {
        &self.shape_sqrt * w
    }
}

/// Polytopes are stored by extreme points; the two named families keep a
/// closed form so large dimensions never need enumeration for `best_arm`.
#[derive(Debug, Clone)]
pub enum Polytope {
    /// The ℓ₁ ball `{u : Σ|uᵢ| ≤ 1}` with extreme points `+e₁, −e₁, +e₂, …`.
    Simplex { dim: usize },
    /// `{u : |uᵢ| ≤ 1}`; vertex `k` has component `i` equal to −1 iff bit `i` of `k` is set.
    Hypercube { dim: usize },
    Vertices(Vec<Vector>),
}

#[derive(Debug, Clone)]
pub enum ArmSet {
    UnitSphere { dim: usize },
    Ellipsoid(Ellipsoid),
    Finite(Vec<Vector>),
    Polytope(Polytope),
}

#[derive(Debug, Clone)]
pub struct SpannerArms {
    pub arms: Vec<Vector>,
    /// `λmin(Σₖ bₖbₖ')`.
    pub lambda0: f64,
}

impl SpannerArms {
    pub fn gram(&self) -> Matrix {
        let dim = self.arms[0].len();
        self.arms
            .iter()
            .fold(Matrix::zeros(dim, dim), |acc, b| acc + b * b.transpose())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SbarReport {
    pub passed: bool,
    pub worst_ratio: f64,
}

fn check_vectors(vectors: &[Vector]) -> Result<usize> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidParameter("arm list must not be empty".into()))?;
    let dim = first.len();
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {dim}")));
    }
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("arm vectors must be finite".into()));
        }
    }
    Ok(dim)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        Err(Error::InvalidParameter(format!("dimension must be at least 2, got {dim}")))
    } else {
        Ok(())
    }
}

/// Lowest-index argmax of `v'z` over `vectors`.
fn argmax_inner(vectors: &[Vector], z: &Vector) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in vectors.iter().enumerate() {
        let val = v.dot(z);
        if val > best_val {
            best_val = val;
            best = i;
        }
    }
    best
}

fn contains_vector(vectors: &[Vector], u: &Vector) -> Option<f64> {
    vectors
        .iter()
        .map(|v| (v - u).amax())
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))))
}

impl ArmSet {
    pub fn unit_sphere(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(ArmSet::UnitSphere { dim })
    }

    /// Ellipsoid `{u : u' Q⁻¹ u ≤ 1}`; `Q` must be symmetric positive definite.
    pub fn ellipsoid(shape: Matrix) -> Result<Self> {
        let dim = shape.nrows();
        if shape.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: shape.ncols() });
        }
        check_dim(dim)?;
        if linalg::asymmetry(&shape) > 1e-12 {
            return Err(Error::InvalidParameter("ellipsoid shape matrix must be symmetric".into()));
        }
        let (lambda_min, lambda_max) = linalg::eigen_extremes(&shape);
        if !(lambda_min > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ellipsoid shape matrix must be positive definite (λmin = {lambda_min:.3e})"
            )));
        }
        let shape_inv = shape
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidParameter("ellipsoid shape matrix is not positive definite".into()))?
            .inverse();
        let shape_sqrt = linalg::sqrt_spd(&shape);
        Ok(ArmSet::Ellipsoid(Ellipsoid { shape, shape_inv, shape_sqrt, lambda_min, lambda_max }))
    }

    pub fn finite(vectors: Vec<Vector>) -> Result<Self> {
        check_vectors(&vectors)?;
        Ok(ArmSet::Finite(vectors))
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(ArmSet::Polytope(Polytope::Simplex { dim }))
    }

    pub fn hypercube(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(ArmSet::Polytope(Polytope::Hypercube { dim }))
    }

    /// Polytope from an explicit list of extreme points.
    pub fn polytope(vertices: Vec<Vector>) -> Result<Self> {
        check_vectors(&vertices)?;
        Ok(ArmSet::Polytope(Polytope::Vertices(vertices)))
    }

    /// Accepts `A u ≤ b` only when it is exactly the hypercube (`A = [I; −I]`,
    /// rows in any order) or the ℓ₁ simplex (`A` = all `2^r` sign rows), with
    /// `b = 1`. General vertex enumeration is not supported.
    pub fn polytope_from_halfspaces(a: &Matrix, b: &Vector) -> Result<Self> {
        let (rows, dim) = a.shape();
        if b.len() != rows {
            return Err(Error::DimensionMismatch { expected: rows, found: b.len() });
        }
        check_dim(dim)?;
        if b.iter().any(|&x| x != 1.0) {
            return Err(Error::UnsupportedPolytope("right-hand side must be all ones".into()));
        }
        let row_vecs: Vec<Vec<f64>> = (0..rows).map(|i| a.row(i).iter().copied().collect()).collect();
        let mut sorted = row_vecs.clone();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        sorted.dedup();

        if rows == 2 * dim && sorted.len() == rows {
            let is_cube = row_vecs.iter().all(|row| {
                row.iter().filter(|&&x| x != 0.0).count() == 1
                    && row.iter().all(|&x| x == 0.0 || x == 1.0 || x == -1.0)
            });
            if is_cube {
                return ArmSet::hypercube(dim);
            }
        }
        if dim <= MAX_HYPERCUBE_DIM && rows == 1 << dim && sorted.len() == rows {
            let is_simplex = row_vecs.iter().all(|row| row.iter().all(|&x| x == 1.0 || x == -1.0));
            if is_simplex {
                return ArmSet::simplex(dim);
            }
        }
        Err(Error::UnsupportedPolytope(
            "only the hypercube and ℓ₁-simplex constraint forms are recognized".into(),
        ))
    }

    pub fn dim(&self) -> usize {
        match self {
            ArmSet::UnitSphere { dim } => *dim,
            ArmSet::Ellipsoid(e) => e.shape.nrows(),
            ArmSet::Finite(v) => v[0].len(),
            ArmSet::Polytope(Polytope::Simplex { dim } | Polytope::Hypercube { dim }) => *dim,
            ArmSet::Polytope(Polytope::Vertices(v)) => v[0].len(),
        }
    }

    /// Number of arms, or `None` for an infinite set. Polytopes count as infinite.
    pub fn arm_count(&self) -> Option<usize> {
        match self {
            ArmSet::Finite(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, ArmSet::UnitSphere { .. } | ArmSet::Ellipsoid(_))
    }

    /// `ū = max_{u ∈ U} ‖u‖`.
    pub fn max_norm(&self) -> f64 {
        match self {
            ArmSet::UnitSphere { .. } => 1.0,
            ArmSet::Ellipsoid(e) => e.lambda_max.sqrt(),
            ArmSet::Finite(v) | ArmSet::Polytope(Polytope::Vertices(v)) => {
                v.iter().map(|x| x.norm()).fold(0.0, f64::max)
            }
            ArmSet::Polytope(Polytope::Simplex { .. }) => 1.0,
            ArmSet::Polytope(Polytope::Hypercube { dim }) => (*dim as f64).sqrt(),
        }
    }

    fn check_len(&self, v: &Vector) -> Result<()> {
        let dim = self.dim();
        if v.len() != dim {
            Err(Error::DimensionMismatch { expected: dim, found: v.len() })
        } else {
            Ok(())
        }
    }

    /// Amount by which `u` violates membership (≤ 0 means inside), measured on
    /// the defining form of each variant.
    pub fn membership_violation(&self, u: &Vector) -> Result<f64> {
        self.check_len(u)?;
        Ok(match self {
            ArmSet::UnitSphere { .. } => u.norm_squared() - 1.0,
            ArmSet::Ellipsoid(e) => linalg::quad_form(&e.shape_inv, u) - 1.0,
            ArmSet::Finite(v) | ArmSet::Polytope(Polytope::Vertices(v)) => {
                contains_vector(v, u).unwrap_or(f64::INFINITY)
            }
            ArmSet::Polytope(Polytope::Simplex { .. }) => u.lp_norm(1) - 1.0,
            ArmSet::Polytope(Polytope::Hypercube { .. }) => u.amax() - 1.0,
        })
    }

    pub fn contains(&self, u: &Vector) -> bool {
        matches!(self.membership_violation(u), Ok(v) if v <= MEMBERSHIP_TOL)
    }

    /// Errors unless `u` is a member within [`MEMBERSHIP_TOL`].
    pub fn ensure_member(&self, u: &Vector) -> Result<()> {
        let violation = self.membership_violation(u)?;
        if violation <= MEMBERSHIP_TOL {
            Ok(())
        } else {
            Err(Error::NotInSet { violation })
        }
    }

    /// Index of the best stored arm for finite sets and polytopes, in the
    /// enumeration order of [`ArmSet::extreme_points`].
    pub fn best_arm_index(&self, z: &Vector) -> Result<Option<usize>> {
        self.check_len(z)?;
        Ok(match self {
            ArmSet::UnitSphere { .. } | ArmSet::Ellipsoid(_) => None,
            ArmSet::Finite(v) | ArmSet::Polytope(Polytope::Vertices(v)) => Some(argmax_inner(v, z)),
            ArmSet::Polytope(Polytope::Simplex { .. }) => {
                let mut best = 0;
                for i in 1..z.len() {
                    if z[i].abs() > z[best].abs() {
                        best = i;
                    }
                }
                Some(2 * best + usize::from(z[best] < 0.0))
            }
            ArmSet::Polytope(Polytope::Hypercube { dim }) => {
                if *dim >= usize::BITS as usize {
                    None
                } else {
                    Some(z.iter().enumerate().fold(0usize, |k, (i, &x)| if x < 0.0 { k | (1 << i) } else { k }))
                }
            }
        })
    }

    /// `u*(z) = argmax_{v ∈ U} v'z`.
    pub fn best_arm(&self, z: &Vector) -> Result<Vector> {
        let mut out = Vector::zeros(self.dim());
        self.best_arm_into(z, &mut out)?;
        Ok(out)
    }

    /// [`ArmSet::best_arm`] written into `out`, which must have length `r`.
    pub fn best_arm_into(&self, z: &Vector, out: &mut Vector) -> Result<()> {
        self.check_len(z)?;
        self.check_len(out)?;
        match self {
            ArmSet::UnitSphere { .. } => {
                let n = z.norm();
                if n == 0.0 {
                    out.fill(0.0);
                    out[0] = 1.0;
                } else {
                    out.copy_from(z);
                    *out /= n;
                }
            }
            ArmSet::Ellipsoid(e) => {
                e.shape.mul_to(z, out);
                let s = z.dot(out);
                if s > 0.0 {
                    *out /= s.sqrt();
                } else {
                    out.copy_from(&e.shape.column(0));
                    *out /= e.shape[(0, 0)].sqrt();
                }
            }
            ArmSet::Finite(v) | ArmSet::Polytope(Polytope::Vertices(v)) => out.copy_from(&v[argmax_inner(v, z)]),
            ArmSet::Polytope(Polytope::Simplex { .. }) => {
                let k = self.best_arm_index(z)?.unwrap_or(0);
                out.fill(0.0);
                out[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
            }
            ArmSet::Polytope(Polytope::Hypercube { .. }) => {
                for (o, &x) in out.iter_mut().zip(z.iter()) {
                    *o = if x < 0.0 { -1.0 } else { 1.0 };
                }
            }
        }
        Ok(())
    }

    /// `max_{v ∈ U} v'z`.
    pub fn max_reward(&self, z: &Vector) -> Result<f64> {
        match self {
            ArmSet::UnitSphere { .. } => {
                self.check_len(z)?;
                Ok(z.norm())
            }
            ArmSet::Ellipsoid(e) => {
                self.check_len(z)?;
                Ok(linalg::quad_form(&e.shape, z).max(0.0).sqrt())
            }
            _ => Ok(self.best_arm(z)?.dot(z)),
        }
    }

    /// `Δᵘ(z) = max_{v} v'z − u'z`; `u` must be a member.
    pub fn gap(&self, z: &Vector, u: &Vector) -> Result<f64> {
        self.check_len(z)?;
        self.ensure_member(u)?;
        Ok((self.max_reward(z)? - u.dot(z)).max(0.0))
    }

    /// `r` linearly independent member arms together with `λmin` of their Gram sum.
    ///
    /// Sphere, simplex and hypercube use the standard basis; the ellipsoid uses
    /// the columns of `Q^{1/2}` (Gram sum `Q`); finite sets and vertex lists use
    /// greedy volume-maximizing selection.
    pub fn spanner(&self) -> Result<SpannerArms> {
        let dim = self.dim();
        let arms: Vec<Vector> = match self {
            ArmSet::UnitSphere { .. }
            | ArmSet::Polytope(Polytope::Simplex { .. } | Polytope::Hypercube { .. }) => {
                (0..dim).map(|k| linalg::basis(dim, k)).collect()
            }
            ArmSet::Ellipsoid(e) => (0..dim).map(|k| e.shape_sqrt.column(k).into_owned()).collect(),
            ArmSet::Finite(v) | ArmSet::Polytope(Polytope::Vertices(v)) => greedy_spanner(v, dim)?,
        };
        let gram = arms
            .iter()
            .fold(Matrix::zeros(dim, dim), |acc, b| acc + b * b.transpose());
        let lambda0 = linalg::lambda_min(&gram);
        if !(lambda0 > 0.0) {
            return Err(Error::RankDeficient { rank: dim - 1, dim });
        }
        Ok(SpannerArms { arms, lambda0 })
    }

    /// SBAR constant `J`: 1 for the sphere, `λmax(Q)/√λmin(Q)` for ellipsoids.
    pub fn sbar_constant(&self) -> Option<f64> {
        match self {
            ArmSet::UnitSphere { .. } => Some(1.0),
            ArmSet::Ellipsoid(e) => Some(e.lambda_max / e.lambda_min.sqrt()),
            _ => None,
        }
    }

    /// Samples `n_samples` pairs of unit vectors and reports the worst
    /// `‖u*(z) − u*(y)‖ / ‖z − y‖`.
    pub fn sbar_check<R: Rng + ?Sized>(&self, j: f64, n_samples: usize, rng: &mut R) -> Result<SbarReport> {
        if self.sbar_constant().is_none() {
            return Err(Error::SbarUndefined);
        }
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for _ in 0..n_samples {
            let z = linalg::random_unit_vector(rng, dim);
            let y = linalg::random_unit_vector(rng, dim);
            worst = worst.max(self.sbar_ratio(&z, &y)?);
        }
        Ok(SbarReport { passed: worst <= j * (1.0 + 1e-9), worst_ratio: worst })
    }

    /// One SBAR ratio; identical inputs give 0.
    pub fn sbar_ratio(&self, z: &Vector, y: &Vector) -> Result<f64> {
        let dz = (z - y).norm();
        if dz == 0.0 {
            return Ok(0.0);
        }
        Ok((self.best_arm(z)? - self.best_arm(y)?).norm() / dz)
    }

    /// Number of extreme points of a polytope (`2r` for the simplex, `2^r` for the cube).
    pub fn extreme_point_count(&self) -> Result<u128> {
        match self {
            ArmSet::Polytope(Polytope::Simplex { dim }) => Ok(2 * *dim as u128),
            ArmSet::Polytope(Polytope::Hypercube { dim }) => {
                if *dim >= 127 {
                    Err(Error::TooManyExtremePoints { dim: *dim })
                } else {
                    Ok(1u128 << dim)
                }
            }
            ArmSet::Polytope(Polytope::Vertices(v)) => Ok(v.len() as u128),
            _ => Err(Error::WrongArmSet { expected: "polytope" }),
        }
    }

    /// Enumerates the extreme points of a polytope as a finite arm set.
    pub fn extreme_points(&self) -> Result<ArmSet> {
        let vertices = match self {
            ArmSet::Polytope(Polytope::Simplex { dim }) => (0..2 * dim)
                .map(|k| {
                    let mut v = Vector::zeros(*dim);
                    v[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                    v
                })
                .collect(),
            ArmSet::Polytope(Polytope::Hypercube { dim }) => {
                if *dim > MAX_HYPERCUBE_DIM {
                    return Err(Error::TooManyExtremePoints { dim: *dim });
                }
                (0..1usize << dim)
                    .map(|k| Vector::from_fn(*dim, |i, _| if k & (1 << i) != 0 { -1.0 } else { 1.0 }))
                    .collect()
            }
            ArmSet::Polytope(Polytope::Vertices(v)) => v.clone(),
            _ => return Err(Error::WrongArmSet { expected: "polytope" }),
        };
        ArmSet::finite(vertices)
    }
}

/// Pivoted Gram–Schmidt: repeatedly take the arm with the largest residual
/// after projecting out the arms already chosen. Returned in original order.
fn greedy_spanner(vectors: &[Vector], dim: usize) -> Result<Vec<Vector>> {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = 1e-10 * scale.max(1.0);
    let mut chosen: Vec<usize> = Vec::with_capacity(dim);
    let mut basis: Vec<Vector> = Vec::with_capacity(dim);
    let mut residuals: Vec<Vector> = vectors.to_vec();
    while chosen.len() < dim {
        let mut best: Option<(usize, f64)> = None;
        for (i, res) in residuals.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let n = res.norm();
            if n > tol && best.is_none_or(|(_, bn)| n > bn) {
                best = Some((i, n));
            }
        }
        let Some((idx, n)) = best else {
            return Err(Error::RankDeficient { rank: chosen.len(), dim });
        };
        let q = &residuals[idx] / n;
        for res in residuals.iter_mut() {
            let c = res.dot(&q);
            res.axpy(-c, &q, 1.0);
        }
        basis.push(q);
        chosen.push(idx);
    }
    chosen.sort_unstable();
    Ok(chosen.into_iter().map(|i| vectors[i].clone()).collect())
}

/// Upper bound `C(r+p, p)` on the number of extreme points of
/// `{u ≥ 0 : A u ≤ b}` with `p` constraint rows.
pub fn linear_constraint_vertex_bound(dim: usize, constraints: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=constraints as u128 {
        acc = acc * (dim as u128 + i) / i;
    }
    acc
}

/// `‖w/‖w‖ − z/‖z‖‖` with `0/‖0‖ := e₁`.
pub fn normalized_difference(w: &Vector, z: &Vector) -> f64 {
    let unit = |v: &Vector| {
        let n = v.norm();
        if n == 0.0 {
            linalg::basis(v.len(), 0)
        } else {
            v / n
        }
    };
    (unit(w) - unit(z)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(dim: usize, k: usize) -> Vector {
        linalg::basis(dim, k)
    }

    fn diag41() -> ArmSet {
        ArmSet::ellipsoid(Matrix::from_diagonal(&dvector![4.0, 1.0])).unwrap()
    }

    /// Dense boundary grid for 2-d continuous sets.
    fn grid_max(set: &ArmSet, z: &Vector, n: usize) -> (Vector, f64) {
        let mut best = (Vector::zeros(2), f64::NEG_INFINITY);
        for i in 0..n {
            let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let w = dvector![th.cos(), th.sin()];
            let u = match set {
                ArmSet::Ellipsoid(e) => e.boundary_point(&w),
                _ => w,
            };
            let val = u.dot(z);
            if val > best.1 {
                best = (u, val);
            }
        }
        best
    }

    #[test]
    fn sphere_best_arm_normalizes() {
        let s = ArmSet::unit_sphere(2).unwrap();
        let u = s.best_arm(&dvector![3.0, 4.0]).unwrap();
        assert!((u - dvector![0.6, 0.8]).norm() < 1e-15);
        assert_eq!(s.max_reward(&dvector![3.0, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn ellipsoid_best_arm_matches_grid() {
        let s = diag41();
        let z = dvector![1.0, 0.0];
        let u = s.best_arm(&z).unwrap();
        assert!((&u - dvector![2.0, 0.0]).norm() < 1e-12);
        let ArmSet::Ellipsoid(e) = &s else { unreachable!() };
        assert!((linalg::quad_form(&e.shape_inv, &u) - 1.0).abs() < 1e-12);
        let (g, gv) = grid_max(&s, &z, 100_000);
        assert!((g - &u).norm() < 1e-4);
        assert!((gv - 2.0).abs() < 1e-4);
        assert!((s.max_reward(&z).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn finite_best_arm_and_reward() {
        let s = ArmSet::finite(vec![e(2, 0), e(2, 1)]).unwrap();
        let z = dvector![0.2, 0.7];
        assert_eq!(s.best_arm(&z).unwrap(), e(2, 1));
        assert!((s.max_reward(&z).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn finite_ties_pick_lowest_index() {
        let s = ArmSet::finite(vec![e(2, 0), e(2, 1)]).unwrap();
        assert_eq!(s.best_arm_index(&dvector![0.5, 0.5]).unwrap(), Some(0));
    }

    #[test]
    fn zero_vector_tie_break() {
        let s = ArmSet::unit_sphere(3).unwrap();
        assert_eq!(s.best_arm(&Vector::zeros(3)).unwrap(), e(3, 0));
        let el = diag41();
        assert!((el.best_arm(&Vector::zeros(2)).unwrap() - dvector![2.0, 0.0]).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_errors() {
        let s = ArmSet::unit_sphere(2).unwrap();
        assert!(matches!(s.best_arm(&Vector::zeros(3)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(s.max_reward(&Vector::zeros(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gap_examples() {
        let s = ArmSet::finite(vec![e(2, 0), e(2, 1)]).unwrap();
        let z = dvector![1.0, 0.3];
        assert!((s.gap(&z, &e(2, 1)).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(s.gap(&z, &e(2, 0)).unwrap(), 0.0);
        let sp = ArmSet::unit_sphere(2).unwrap();
        assert_eq!(sp.gap(&dvector![3.0, 4.0], &dvector![0.6, 0.8]).unwrap(), 0.0);
        assert!(matches!(sp.gap(&dvector![3.0, 4.0], &dvector![1.0, 1.0]), Err(Error::NotInSet { .. })));
        assert!(s.gap(&z, &dvector![0.5, 0.5]).is_err());
    }

    #[test]
    fn spanner_examples() {
        let s = ArmSet::unit_sphere(3).unwrap().spanner().unwrap();
        assert_eq!(s.arms, vec![e(3, 0), e(3, 1), e(3, 2)]);
        assert!((s.lambda0 - 1.0).abs() < 1e-12);

        let f = ArmSet::finite(vec![e(2, 0), e(2, 0), e(2, 1)]).unwrap().spanner().unwrap();
        assert_eq!(f.arms, vec![e(2, 0), e(2, 1)]);
        assert!((f.lambda0 - 1.0).abs() < 1e-12);

        let g = ArmSet::finite(vec![dvector![1.0, 0.0], dvector![1.0, 1.0]]).unwrap().spanner().unwrap();
        assert_eq!(g.arms.len(), 2);
        // eigenvalues of [[2,1],[1,1]] from t² − 3t + 1 = 0
        assert!((g.lambda0 - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((g.lambda0 - 0.381966).abs() < 1e-6);
    }

    #[test]
    fn spanner_rank_deficient_names_rank() {
        let err = ArmSet::finite(vec![dvector![1.0, 1.0, 0.0], dvector![2.0, 2.0, 0.0], dvector![0.0, 0.0, 1.0]])
            .unwrap()
            .spanner()
            .unwrap_err();
        assert!(matches!(err, Error::RankDeficient { rank: 2, dim: 3 }));
        assert!(err.to_string().contains("rank 2"));
    }

    #[test]
    fn ellipsoid_spanner_members_with_gram_q() {
        let s = diag41();
        let sp = s.spanner().unwrap();
        for b in &sp.arms {
            assert!(s.contains(b));
        }
        assert!((sp.lambda0 - 1.0).abs() < 1e-12);
        assert!((sp.arms[0].clone() - dvector![2.0, 0.0]).norm() < 1e-12);
    }

    #[test]
    fn extreme_points_counts() {
        let simplex = ArmSet::simplex(3).unwrap().extreme_points().unwrap();
        let ArmSet::Finite(v) = &simplex else { unreachable!() };
        assert_eq!(v.len(), 6);
        for k in 0..3 {
            assert!(v.contains(&e(3, k)));
            assert!(v.contains(&(-e(3, k))));
        }
        let cube = ArmSet::hypercube(2).unwrap().extreme_points().unwrap();
        let ArmSet::Finite(c) = &cube else { unreachable!() };
        assert_eq!(c.len(), 4);
        for s in [dvector![1.0, 1.0], dvector![-1.0, 1.0], dvector![1.0, -1.0], dvector![-1.0, -1.0]] {
            assert!(c.contains(&s));
        }
        assert!(matches!(
            ArmSet::hypercube(21).unwrap().extreme_points(),
            Err(Error::TooManyExtremePoints { dim: 21 })
        ));
        assert!(ArmSet::unit_sphere(2).unwrap().extreme_points().is_err());
    }

    #[test]
    fn closed_form_polytope_argmax_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for set in [ArmSet::simplex(4).unwrap(), ArmSet::hypercube(4).unwrap()] {
            let ArmSet::Finite(v) = set.extreme_points().unwrap() else { unreachable!() };
            for _ in 0..200 {
                let z = linalg::random_normal_vector(&mut rng, 4);
                let idx = set.best_arm_index(&z).unwrap().unwrap();
                assert_eq!(idx, argmax_inner(&v, &z));
                assert_eq!(set.best_arm(&z).unwrap(), v[idx]);
            }
        }
    }

    #[test]
    fn halfspace_recognition() {
        let mut a = Matrix::zeros(4, 2);
        a[(0, 0)] = 1.0;
        a[(1, 1)] = 1.0;
        a[(2, 0)] = -1.0;
        a[(3, 1)] = -1.0;
        let b = Vector::from_element(4, 1.0);
        assert!(matches!(
            ArmSet::polytope_from_halfspaces(&a, &b).unwrap(),
            ArmSet::Polytope(Polytope::Hypercube { dim: 2 })
        ));
        let s = Matrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]);
        assert!(matches!(
            ArmSet::polytope_from_halfspaces(&s, &b).unwrap(),
            ArmSet::Polytope(Polytope::Simplex { dim: 2 })
        ));
        let bad = Matrix::from_row_slice(4, 2, &[1.0, 0.5, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]);
        assert!(ArmSet::polytope_from_halfspaces(&bad, &b).is_err());
    }

    #[test]
    fn sbar_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sphere = ArmSet::unit_sphere(2).unwrap();
        assert_eq!(sphere.sbar_constant(), Some(1.0));
        assert!(sphere.sbar_check(1.0, 10_000, &mut rng).unwrap().passed);

        let el = diag41();
        assert_eq!(el.sbar_constant(), Some(4.0));
        let rep = el.sbar_check(4.0, 10_000, &mut rng).unwrap();
        assert!(rep.passed, "worst ratio {}", rep.worst_ratio);

        let z = dvector![0.0, 1.0];
        assert_eq!(sphere.sbar_ratio(&z, &z).unwrap(), 0.0);

        let finite = ArmSet::finite(vec![e(2, 0), e(2, 1)]).unwrap();
        assert!(matches!(finite.sbar_check(1.0, 10, &mut rng), Err(Error::SbarUndefined)));
    }

    #[test]
    fn ellipsoid_rejects_non_pd() {
        assert!(ArmSet::ellipsoid(Matrix::from_diagonal(&dvector![1.0, -1.0])).is_err());
        assert!(ArmSet::ellipsoid(Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0])).is_err());
    }

    #[test]
    fn vertex_bound_counts() {
        assert_eq!(linear_constraint_vertex_bound(3, 1), 4);
        assert_eq!(linear_constraint_vertex_bound(4, 2), 15);
        assert_eq!(linear_constraint_vertex_bound(5, 0), 1);
    }
}
