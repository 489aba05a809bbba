use std::sync::Arc;

use nalgebra::SymmetricEigen;

use super::{unbound, Handshake, Policy, Selection};
use crate::environment::StepKind;
use crate::error::{Error, Result};
use crate::estimation::{OlsState, UncertaintyParams};
use crate::geometry::{ArmSet, SpannerArms};
use crate::linalg::{self, Matrix, Vector};

fn index_value(v: &Vector, estimate: &Vector, gram_inverse: &Matrix, beta: f64) -> f64 {
    v.dot(estimate) + beta * linalg::quad_form(gram_inverse, v).max(0.0).sqrt()
}

/// Exact maximizer of `w'a + β‖w‖_C` over the unit sphere.
///
/// `β‖w‖_C = max_{‖y‖≤1} y'Bw` with `B = βC^{1/2}`, so the optimum value is
/// `max_{‖y‖=1} ‖a + By‖` and the optimal `w` is that vector normalized. In
/// the eigenbasis of `C` (`d` the eigenvalues of `B`) the stationary `y`
/// is `yᵢ = gᵢ/(μ − dᵢ²)` with `g = Da` and `μ ≥ max dᵢ²` fixed by `‖y‖ = 1`;
/// `‖y(μ)‖` is decreasing there, so bisection finds it.
fn sphere_argmax(a: &Vector, c: &Matrix, beta: f64) -> Vector {
    let dim = a.len();
    let eig = SymmetricEigen::new(c.clone());
    let d2: Vec<f64> = eig.eigenvalues.iter().map(|&l| beta * beta * l.max(0.0)).collect();
    let a_rot = eig.eigenvectors.transpose() * a;
    let g: Vec<f64> = (0..dim).map(|i| d2[i].sqrt() * a_rot[i]).collect();
    let top = d2.iter().copied().fold(0.0, f64::max);

    let direction = |y: &[f64]| {
        let rot = Vector::from_fn(dim, |i, _| a_rot[i] + d2[i].sqrt() * y[i]);
        &eig.eigenvectors * rot
    };
    if top == 0.0 {
        return normalize_or_first(a.clone());
    }

    // eigen-directions tied with the largest one, up to round-off
    let tied: Vec<bool> = d2.iter().map(|&x| x >= top * (1.0 - 1e-12)).collect();
    let g_scale = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let g_tied = (0..dim).filter(|&i| tied[i]).map(|i| g[i] * g[i]).sum::<f64>().sqrt();
    let y_at = |mu: f64| -> Vec<f64> {
        (0..dim).map(|i| if tied[i] && mu <= top { 0.0 } else { g[i] / (mu - d2[i]) }).collect()
    };
    let sq = |y: &[f64]| y.iter().map(|x| x * x).sum::<f64>();

    if g_tied <= 1e-14 * g_scale.max(top.sqrt()) {
        // hard case: the top eigen-direction gets whatever norm the rest leaves
        let mut y = y_at(top);
        let rest = sq(&y);
        if rest <= 1.0 {
            let k = (0..dim).find(|&i| tied[i]).expect("largest eigenvalue is tied with itself");
            y[k] = (1.0 - rest).sqrt();
            return normalize_or_first(direction(&y));
        }
    }

    // ‖y(top + g_scale)‖ ≤ 1 and ‖y‖ → ∞ (or past 1) as μ → top
    let (mut lo, mut hi) = (top, top + g_scale);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sq(&y_at(mid)) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    normalize_or_first(direction(&y_at(hi)))
}

fn normalize_or_first(v: Vector) -> Vector {
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        linalg::basis(v.len(), 0)
    }
}

/// `argmax_{v ∈ U} v'Ẑ + β ‖v‖_C`.
///
/// With `candidates` (finite sets, polytope extreme points) the maximum is
/// exact with lowest-index tie-breaking. The sphere is solved in closed form
/// up to a one-dimensional root, and an ellipsoid `v = Q^{1/2}w` reduces to
/// the sphere with `Q^{1/2}Ẑ` and `Q^{1/2}CQ^{1/2}`.
pub fn maximize_optimistic_index(
    arms: &ArmSet,
    candidates: Option<&[Vector]>,
    estimate: &Vector,
    gram_inverse: &Matrix,
    beta: f64,
) -> Result<(Vector, Option<usize>)> {
    if let Some(cands) = candidates {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, v) in cands.iter().enumerate() {
            let val = index_value(v, estimate, gram_inverse, beta);
            if val > best_val {
                best_val = val;
                best = i;
            }
        }
        return Ok((cands[best].clone(), Some(best)));
    }
    match arms {
        ArmSet::UnitSphere { .. } => Ok((sphere_argmax(estimate, gram_inverse, beta), None)),
        ArmSet::Ellipsoid(e) => {
            let root = e.shape_sqrt();
            let w = sphere_argmax(&(root * estimate), &(root * gram_inverse * root), beta);
            Ok((root * w, None))
        }
        _ => Err(Error::WrongArmSet { expected: "sphere or ellipsoid" }),
    }
}

/// Uncertainty-ellipsoid policy: after the `r` spanner pulls, plays
/// `argmax_v v'Ẑ_{t−1} + R_{t−1}^v`.
#[derive(Debug, Clone)]
pub struct UncertaintyEllipsoid {
    sigma0: f64,
    alpha: Option<f64>,
    bound: Option<Bound>,
    handshake: Handshake,
}

#[derive(Debug, Clone)]
struct Bound {
    arms: Arc<ArmSet>,
    spanner: SpannerArms,
    spanner_index: Vec<Option<usize>>,
    params: UncertaintyParams,
    candidates: Option<Vec<Vector>>,
    init_rewards: Vec<f64>,
    ols: Option<OlsState>,
}

impl UncertaintyEllipsoid {
    /// `sigma0` is the declared sub-Gaussian constant; `alpha` overrides `4σ₀κ₀²`.
    pub fn new(sigma0: f64, alpha: Option<f64>) -> Self {
        Self { sigma0, alpha, bound: None, handshake: Handshake::default() }
    }

    pub fn params(&self) -> Option<&UncertaintyParams> {
        self.bound.as_ref().map(|b| &b.params)
    }

    pub fn ols(&self) -> Option<&OlsState> {
        self.bound.as_ref().and_then(|b| b.ols.as_ref())
    }

    pub fn spanner(&self) -> Option<&SpannerArms> {
        self.bound.as_ref().map(|b| &b.spanner)
    }

    /// Current candidate arms when the arm set is finite or polyhedral.
    pub fn candidates(&self) -> Option<&[Vector]> {
        self.bound.as_ref().and_then(|b| b.candidates.as_deref())
    }
}

impl Policy for UncertaintyEllipsoid {
    fn name(&self) -> String {
        match self.alpha {
            Some(a) => format!("ue(alpha={a})"),
            None => "ue".into(),
        }
    }

    fn reset(&mut self, arms: Arc<ArmSet>, _seed: u64) -> Result<()> {
        let spanner = arms.spanner()?;
        let mut params = UncertaintyParams::new(self.sigma0, arms.max_norm(), spanner.lambda0, arms.arm_count())?;
        if let Some(a) = self.alpha {
            params = params.with_alpha(a)?;
        }
        let candidates = match arms.as_ref() {
            ArmSet::Finite(v) => Some(v.clone()),
            ArmSet::Polytope(_) => match arms.extreme_points()? {
                ArmSet::Finite(v) => Some(v),
                _ => unreachable!("extreme points form a finite set"),
            },
            _ => None,
        };
        let spanner_index = spanner
            .arms
            .iter()
            .map(|b| candidates.as_ref().and_then(|c| c.iter().position(|x| x == b)))
            .collect();
        self.bound = Some(Bound {
            arms,
            spanner,
            spanner_index,
            params,
            candidates,
            init_rewards: Vec::new(),
            ols: None,
        });
        self.handshake.clear();
        Ok(())
    }

    fn select(&mut self, t: usize) -> Result<Selection> {
        let b = self.bound.as_ref().ok_or_else(unbound)?;
        let dim = b.arms.dim();
        let played = b.ols.as_ref().map_or(b.init_rewards.len(), |o| o.t());
        if t != played + 1 {
            return Err(Error::Protocol(format!("expected period {}, got {t}", played + 1)));
        }
        let sel = match &b.ols {
            None => {
                let k = t - 1;
                Selection::plain(b.spanner.arms[k].clone(), b.spanner_index[k], StepKind::Explore)
            }
            Some(ols) => {
                let beta = b.params.radius_scale(t - 1, dim)?;
                let (arm, index) = maximize_optimistic_index(
                    &b.arms,
                    b.candidates.as_deref(),
                    ols.estimate(),
                    ols.gram_inverse(),
                    beta,
                )?;
                let w = ols.weighted_norm_sq(&arm)?;
                Selection {
                    arm,
                    index,
                    kind: StepKind::Optimistic,
                    weighted_norm_sq: Some(w),
                    radius: Some(beta * w.sqrt()),
                }
            }
        };
        self.handshake.begin(&sel.arm)?;
        Ok(sel)
    }

    fn observe(&mut self, arm: &Vector, reward: f64) -> Result<()> {
        if !reward.is_finite() {
            return Err(Error::NonFiniteReward(reward));
        }
        self.handshake.finish(arm)?;
        let b = self.bound.as_mut().ok_or_else(unbound)?;
        match b.ols.as_mut() {
            Some(ols) => ols.update(arm, reward)?,
            None => {
                b.init_rewards.push(reward);
                if b.init_rewards.len() == b.arms.dim() {
                    b.ols = Some(OlsState::init(&b.spanner.arms, &b.init_rewards)?);
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis;
    use nalgebra::dvector;

    #[test]
    fn finite_radius_tie_goes_to_estimate() {
        let set = ArmSet::finite(vec![basis(2, 0), basis(2, 1)]).unwrap();
        let ArmSet::Finite(c) = &set else { unreachable!() };
        let (arm, idx) =
            maximize_optimistic_index(&set, Some(c), &dvector![1.0, 0.0], &Matrix::identity(2, 2), 5.0).unwrap();
        assert_eq!(arm, basis(2, 0));
        assert_eq!(idx, Some(0));
    }

    #[test]
    fn finite_optimism_prefers_unexplored() {
        let set = ArmSet::finite(vec![basis(2, 0), basis(2, 1)]).unwrap();
        let ArmSet::Finite(c) = &set else { unreachable!() };
        let gram_inv = Matrix::from_diagonal(&dvector![1.0, 4.0]);
        let est = dvector![0.5, 0.5];
        let beta = 0.7;
        // index₁ = 0.5 + β·1, index₂ = 0.5 + β·2
        let i1 = index_value(&c[0], &est, &gram_inv, beta);
        let i2 = index_value(&c[1], &est, &gram_inv, beta);
        assert!((i2 - i1 - beta).abs() < 1e-15);
        let (arm, _) = maximize_optimistic_index(&set, Some(c), &est, &gram_inv, beta).unwrap();
        assert_eq!(arm, basis(2, 1));
    }

    #[test]
    fn isotropic_sphere_plays_estimate_direction() {
        let set = ArmSet::unit_sphere(3).unwrap();
        let est = dvector![0.3, -0.4, 1.2];
        let (arm, _) = maximize_optimistic_index(&set, None, &est, &(Matrix::identity(3, 3) * 0.25), 3.0).unwrap();
        assert!((arm - &est / est.norm()).norm() < 1e-10);
    }

    fn dense_grid_best(set: &ArmSet, a: &Vector, c: &Matrix, beta: f64) -> f64 {
        let n = 100_000;
        (0..n)
            .map(|i| {
                let (sn, cs) = (std::f64::consts::TAU * i as f64 / n as f64).sin_cos();
                let w = dvector![cs, sn];
                let v = match set {
                    ArmSet::Ellipsoid(e) => e.boundary_point(&w),
                    _ => w,
                };
                index_value(&v, a, c, beta)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn random_spd(rng: &mut rand_chacha::ChaCha8Rng, dim: usize) -> Matrix {
        let mut c = Matrix::identity(dim, dim) * 0.05;
        for _ in 0..dim {
            let m = linalg::random_normal_vector(rng, dim);
            c += &m * m.transpose();
        }
        c
    }

    #[test]
    fn planar_argmax_beats_dense_grid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let sets =
            [ArmSet::unit_sphere(2).unwrap(), ArmSet::ellipsoid(Matrix::from_diagonal(&dvector![4.0, 1.0])).unwrap()];
        for set in &sets {
            for beta in [0.0, 0.5, 2.0, 300.0] {
                for _ in 0..40 {
                    let a = linalg::random_normal_vector(&mut rng, 2);
                    let c = random_spd(&mut rng, 2);
                    let (arm, _) = maximize_optimistic_index(set, None, &a, &c, beta).unwrap();
                    assert!(set.contains(&arm));
                    let got = index_value(&arm, &a, &c, beta);
                    let grid = dense_grid_best(set, &a, &c, beta);
                    assert!(got >= grid - 1e-9 * grid.abs().max(1.0), "argmax {got} below grid {grid}");
                }
            }
        }
    }

    #[test]
    fn argmax_beats_sampling_in_higher_dimensions() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for dim in [3usize, 5] {
            let sets = [
                ArmSet::unit_sphere(dim).unwrap(),
                ArmSet::ellipsoid(Matrix::from_fn(dim, dim, |i, j| if i == j { 1.0 + i as f64 } else { 0.0 })).unwrap(),
            ];
            for set in &sets {
                for beta in [0.3, 5.0] {
                    let a = linalg::random_normal_vector(&mut rng, dim);
                    let c = random_spd(&mut rng, dim);
                    let (arm, _) = maximize_optimistic_index(set, None, &a, &c, beta).unwrap();
                    assert!(set.contains(&arm));
                    let got = index_value(&arm, &a, &c, beta);
                    // random boundary points
                    for _ in 0..20_000 {
                        let v = set.best_arm(&linalg::random_normal_vector(&mut rng, dim)).unwrap();
                        assert!(index_value(&v, &a, &c, beta) <= got + 1e-12 * got.abs().max(1.0));
                    }
                    // first-order optimality: no better arm against the gradient at the optimum
                    let cv = &c * &arm;
                    let grad = &a + &cv * (beta / arm.dot(&cv).sqrt());
                    let next = set.best_arm(&grad).unwrap();
                    assert!((next - &arm).norm() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn degenerate_uncertainty_cases() {
        let set = ArmSet::unit_sphere(3).unwrap();
        // zero estimate: the top eigen-direction of C wins
        let c = Matrix::from_diagonal(&dvector![1.0, 3.0, 2.0]);
        let (arm, _) = maximize_optimistic_index(&set, None, &Vector::zeros(3), &c, 2.0).unwrap();
        assert!((arm[1].abs() - 1.0).abs() < 1e-12);
        // estimate orthogonal to the top direction with a large radius: the hard case
        let a = dvector![0.01, 0.0, 0.0];
        let (arm, _) = maximize_optimistic_index(&set, None, &a, &c, 50.0).unwrap();
        let got = index_value(&arm, &a, &c, 50.0);
        assert!(got >= 50.0 * 3f64.sqrt() - 1e-9);
        // equal eigenvalues: plays the estimate direction
        let a = dvector![0.3, -0.4, 1.2];
        let (arm, _) = maximize_optimistic_index(&set, None, &a, &(Matrix::identity(3, 3) * 0.25), 3.0).unwrap();
        assert!((arm - &a / a.norm()).norm() < 1e-10);
    }

    #[test]
    fn ue_schedule_and_diagnostics() {
        let set = Arc::new(ArmSet::finite(vec![basis(2, 0), basis(2, 1)]).unwrap());
        let mut p = UncertaintyEllipsoid::new(1.0, Some(1.0));
        p.reset(set, 0).unwrap();
        let z = dvector![1.0, 0.3];
        for t in 1..=20 {
            let s = p.select(t).unwrap();
            if t <= 2 {
                assert_eq!(s.kind, StepKind::Explore);
                assert_eq!(s.index, Some(t - 1));
                assert!(s.weighted_norm_sq.is_none());
            } else {
                assert_eq!(s.kind, StepKind::Optimistic);
                assert!(s.weighted_norm_sq.unwrap() <= 1.0);
            }
            p.observe(&s.arm, s.arm.dot(&z)).unwrap();
        }
        assert!(p.select(5).is_err());
    }

    #[test]
    fn theoretical_alpha_by_default() {
        let set = Arc::new(ArmSet::unit_sphere(2).unwrap());
        let mut p = UncertaintyEllipsoid::new(1.0, None);
        p.reset(set, 0).unwrap();
        assert!((p.params().unwrap().alpha() - 16.0 * (1.0 + 37f64.ln())).abs() < 1e-10);
    }
}
