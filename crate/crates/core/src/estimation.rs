//! Online least squares, uncertainty radii and the conjugate Gaussian posterior.
//!
//! [`OlsState`] keeps the Gram inverse `C_t = (Σ UₛUₛ')⁻¹` current with
//! Sherman–Morrison rank-1 updates, together with `log det Υ_t` through the
//! matrix determinant lemma. [`GaussianPosterior`] is the Bayesian counterpart
//! for an `N(0, I/r)` prior and is what the lower-bound quantities are built on.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// Largest Gram condition number accepted at initialization.
pub const MAX_CONDITION: f64 = 1e12;

/// Round-off floor for weighted norms.
const NEGATIVE_NORM_FLOOR: f64 = -1e-12;

/// Debug builds re-invert the Gram from scratch every this many updates.
const REINVERSE_EVERY: usize = 1 << 10;

#[derive(Debug, Clone)]
pub struct OlsState {
    t: usize,
    gram: Matrix,
    gram_inverse: Matrix,
    response_acc: Vector,
    estimate: Vector,
    log_det_gram: f64,
}

impl OlsState {
    /// Direct solve on the `r` initialization pulls.
    pub fn init(arms: &[Vector], rewards: &[f64]) -> Result<Self> {
        let first = arms
            .first()
            .ok_or_else(|| Error::InvalidParameter("initialization needs at least one arm".into()))?;
        let dim = first.len();
        if arms.len() != rewards.len() {
            return Err(Error::DimensionMismatch { expected: arms.len(), found: rewards.len() });
        }
        let mut gram = Matrix::zeros(dim, dim);
        let mut response_acc = Vector::zeros(dim);
        for (u, &x) in arms.iter().zip(rewards) {
            if u.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: u.len() });
            }
            if !x.is_finite() {
                return Err(Error::NonFiniteReward(x));
            }
            gram += u * u.transpose();
            response_acc.axpy(x, u, 1.0);
        }
        let condition = linalg::condition_number(&gram);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::Singular { condition });
        }
        let chol = gram.clone().cholesky().ok_or(Error::Singular { condition })?;
        let mut gram_inverse = chol.inverse();
        linalg::symmetrize(&mut gram_inverse);
        let log_det_gram = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let estimate = &gram_inverse * &response_acc;
        Ok(Self { t: arms.len(), gram, gram_inverse, response_acc, estimate, log_det_gram })
    }

    /// Rank-1 update with one more `(arm, reward)` pair.
    pub fn update(&mut self, arm: &Vector, reward: f64) -> Result<()> {
        if !reward.is_finite() {
            return Err(Error::NonFiniteReward(reward));
        }
        let dim = self.dim();
        if arm.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: arm.len() });
        }
        let cu = &self.gram_inverse * arm;
        let w = clamp_weighted_norm(arm.dot(&cu))?;
        let denom = 1.0 + w;
        self.gram_inverse.ger(-1.0 / denom, &cu, &cu, 1.0);
        linalg::symmetrize(&mut self.gram_inverse);
        self.gram.ger(1.0, arm, arm, 1.0);
        self.log_det_gram += denom.ln();
        self.response_acc.axpy(reward, arm, 1.0);
        self.t += 1;
        self.estimate = &self.gram_inverse * &self.response_acc;
        if cfg!(debug_assertions) && self.t % REINVERSE_EVERY == 0 {
            if let Some(direct) = self.gram.clone().try_inverse() {
                debug_assert!(
                    linalg::relative_frobenius(&self.gram_inverse, &direct) < 1e-6,
                    "Sherman–Morrison drift exceeded 1e-6 at t = {}",
                    self.t
                );
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.estimate.len()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &Matrix {
        &self.gram_inverse
    }

    pub fn response_acc(&self) -> &Vector {
        &self.response_acc
    }

    pub fn estimate(&self) -> &Vector {
        &self.estimate
    }

    pub fn log_det_gram(&self) -> f64 {
        self.log_det_gram
    }

    /// `‖u‖²_{C_t} = u' C_t u`.
    pub fn weighted_norm_sq(&self, u: &Vector) -> Result<f64> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.len() });
        }
        clamp_weighted_norm(linalg::quad_form(&self.gram_inverse, u))
    }

    /// `R_t^u = β_t ‖u‖_{C_t}`.
    pub fn uncertainty_radius(&self, params: &UncertaintyParams, u: &Vector) -> Result<f64> {
        let scale = params.radius_scale(self.t, self.dim())?;
        Ok(scale * self.weighted_norm_sq(u)?.sqrt())
    }
}

fn clamp_weighted_norm(w: f64) -> Result<f64> {
    if w >= 0.0 {
        Ok(w)
    } else if w > NEGATIVE_NORM_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::NegativeWeightedNorm(w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyParams {
    pub sigma0: f64,
    pub u_bar: f64,
    pub lambda0: f64,
    /// Finite `|U_r|`, or `None` for an infinite set.
    pub arm_count: Option<usize>,
    kappa0: f64,
    alpha: f64,
}

impl UncertaintyParams {
    pub fn new(sigma0: f64, u_bar: f64, lambda0: f64, arm_count: Option<usize>) -> Result<Self> {
        for (name, v) in [("sigma0", sigma0), ("u_bar", u_bar), ("lambda0", lambda0)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and ≥ 0, got {v}")));
            }
        }
        if !(lambda0 > 0.0) {
            return Err(Error::InvalidParameter("lambda0 must be positive".into()));
        }
        let kappa0 = kappa0(u_bar, lambda0);
        let alpha = 4.0 * sigma0 * kappa0 * kappa0;
        Ok(Self { sigma0, u_bar, lambda0, arm_count, kappa0, alpha })
    }

    /// Replaces the theoretical `α = 4σ₀κ₀²` by a fixed value.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be finite and ≥ 0, got {alpha}")));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `β_t = α √(log t) √(min{r log t, |U_r|})`.
    pub fn radius_scale(&self, t: usize, dim: usize) -> Result<f64> {
        if t < 2 {
            return Err(Error::RadiusUndefined { t });
        }
        let log_t = (t as f64).ln();
        let count_term = match self.arm_count {
            Some(n) => (dim as f64 * log_t).min(n as f64),
            None => dim as f64 * log_t,
        };
        Ok(self.alpha * log_t.sqrt() * count_term.sqrt())
    }
}

/// `κ₀ = 2 √(1 + log(1 + 36 ū² / λ₀))`.
pub fn kappa0(u_bar: f64, lambda0: f64) -> f64 {
    2.0 * (1.0 + (1.0 + 36.0 * u_bar * u_bar / lambda0).ln()).sqrt()
}

#[derive(Debug, Clone)]
pub struct GaussianPosterior {
    pub mean: Vector,
    pub covariance: Matrix,
}

impl GaussianPosterior {
    /// Prior `N(0, I_r / r)`.
    pub fn isotropic_prior(dim: usize) -> Self {
        Self { mean: Vector::zeros(dim), covariance: Matrix::identity(dim, dim) / dim as f64 }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Conjugate update after observing `reward = arm'Z + N(0, noise_var)`.
    pub fn update(&mut self, arm: &Vector, reward: f64, noise_var: f64) -> Result<()> {
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise variance must be positive, got {noise_var}")));
        }
        if !reward.is_finite() {
            return Err(Error::NonFiniteReward(reward));
        }
        if arm.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: arm.len() });
        }
        let su = &self.covariance * arm;
        let denom = arm.dot(&su) + noise_var;
        let innovation = reward - arm.dot(&self.mean);
        self.mean.axpy(innovation / denom, &su, 1.0);
        self.covariance.ger(-1.0 / denom, &su, &su, 1.0);
        linalg::symmetrize(&mut self.covariance);
        Ok(())
    }
}

/// Per-direction exploration and estimation quantities along `S¹…S^{r−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalTerms {
    pub direction: Vector,
    /// `Ξₖ = Σₜ (Uₜ'Sᵏ)²`.
    pub exploration: f64,
    /// `Sᵏ' Σ Sᵏ`, the posterior variance along `Sᵏ`.
    pub variance: f64,
    /// `((z − mean)'Sᵏ)²` for the realized parameter.
    pub realized_sq_error: f64,
}

/// Orthonormal `S¹…S^{r−1}` orthogonal to `mean`; when `‖mean‖ < 1e-12` the
/// basis is `e₂…e_r`.
pub fn orthogonal_directions(mean: &Vector) -> Vec<Vector> {
    let dim = mean.len();
    let norm = mean.norm();
    if norm < 1e-12 {
        return (1..dim).map(|k| linalg::basis(dim, k)).collect();
    }
    let mut basis: Vec<Vector> = vec![mean / norm];
    let mut candidates: Vec<Vector> = (0..dim).map(|k| linalg::basis(dim, k)).collect();
    while basis.len() < dim {
        // take the candidate with the largest residual for numerical stability
        let mut best: Option<(usize, Vector, f64)> = None;
        for (i, c) in candidates.iter().enumerate() {
            let mut res = c.clone();
            for q in &basis {
                let coef = res.dot(q);
                res.axpy(-coef, q, 1.0);
            }
            let n = res.norm();
            if best.as_ref().is_none_or(|(_, _, bn)| n > *bn) {
                best = Some((i, res, n));
            }
        }
        let (i, res, n) = best.expect("candidate basis spans the space");
        candidates.remove(i);
        basis.push(res / n);
    }
    basis.remove(0);
    basis
}

/// Builds `S¹…S^{r−1}` orthogonal to the posterior mean and returns, per
/// direction, the exploration `Ξₖ`, the posterior variance and the realized
/// squared estimation error against `z`.
pub fn directional_risk_terms(
    arms: &[Vector],
    posterior: &GaussianPosterior,
    z: &Vector,
) -> Result<Vec<DirectionalTerms>> {
    let dim = posterior.dim();
    if z.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: z.len() });
    }
    if let Some(bad) = arms.iter().find(|u| u.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
    }
    let err = z - &posterior.mean;
    Ok(orthogonal_directions(&posterior.mean)
        .into_iter()
        .map(|s| {
            let exploration = arms.iter().map(|u| u.dot(&s).powi(2)).sum();
            let variance = linalg::quad_form(&posterior.covariance, &s);
            let realized_sq_error = err.dot(&s).powi(2);
            DirectionalTerms { direction: s, exploration, variance, realized_sq_error }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn e(k: usize) -> Vector {
        linalg::basis(2, k)
    }

    #[test]
    fn init_orthonormal_design() {
        let s = OlsState::init(&[e(0), e(1)], &[1.0, 2.0]).unwrap();
        assert_eq!(s.estimate(), &dvector![1.0, 2.0]);
        assert!((s.gram_inverse() - Matrix::identity(2, 2)).norm() < 1e-15);
        let s = OlsState::init(&[e(0), e(1)], &[3.0, -1.0]).unwrap();
        assert_eq!(s.estimate(), &dvector![3.0, -1.0]);
    }

    #[test]
    fn init_skewed_design() {
        // [[2,1],[1,1]] ẑ = (1·1 + 1·3, 0·1 + 1·3) = (4, 3) → ẑ = (1, 2)
        let s = OlsState::init(&[dvector![1.0, 0.0], dvector![1.0, 1.0]], &[1.0, 3.0]).unwrap();
        assert!((s.estimate() - dvector![1.0, 2.0]).norm() < 1e-12);
        assert!((s.weighted_norm_sq(&dvector![0.0, 1.0]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn init_rejects_singular() {
        let err = OlsState::init(&[dvector![1.0, 1.0], dvector![2.0, 2.0]], &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
    }

    #[test]
    fn diagonal_update() {
        let mut s = OlsState::init(&[e(0), e(1)], &[0.0, 0.0]).unwrap();
        let before = s.log_det_gram();
        s.update(&e(0), 5.0).unwrap();
        assert!((s.gram_inverse() - Matrix::from_diagonal(&dvector![0.5, 1.0])).norm() < 1e-15);
        assert!((s.log_det_gram() - before - 2f64.ln()).abs() < 1e-15);
        assert!((s.weighted_norm_sq(&e(0)).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(s.update(&e(0), f64::NAN), Err(Error::NonFiniteReward(_))));
    }

    #[test]
    fn radius_constants() {
        let p = UncertaintyParams::new(1.0, 1.0, 1.0, Some(2)).unwrap();
        let k = 2.0 * (1.0 + 37f64.ln()).sqrt();
        assert!((p.kappa0() - k).abs() < 1e-12);
        // the commonly quoted 4.29457 and 73.779 are rounded; exact values are 4.29461 and 73.7747
        assert!((p.kappa0() / 4.29457 - 1.0).abs() < 1e-4);
        assert!((p.alpha() - 4.0 * k * k).abs() < 1e-10);
        assert!((p.alpha() - 16.0 * (1.0 + 37f64.ln())).abs() < 1e-10);
        assert!((p.alpha() / 73.779 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn radius_rejects_small_t() {
        let p = UncertaintyParams::new(1.0, 1.0, 1.0, None).unwrap();
        assert!(matches!(p.radius_scale(1, 2), Err(Error::RadiusUndefined { t: 1 })));
        assert!(p.radius_scale(2, 2).is_ok());
    }

    #[test]
    fn radius_is_homogeneous() {
        let p = UncertaintyParams::new(1.0, 1.0, 1.0, Some(2)).unwrap();
        let mut s = OlsState::init(&[e(0), e(1)], &[0.3, 0.1]).unwrap();
        s.update(&dvector![0.6, 0.8], 0.2).unwrap();
        let u = dvector![0.3, -0.4];
        let r1 = s.uncertainty_radius(&p, &u).unwrap();
        let r2 = s.uncertainty_radius(&p, &(&u * 2.0)).unwrap();
        assert!((r2 - 2.0 * r1).abs() < 1e-12);
    }

    #[test]
    fn posterior_single_update() {
        let mut post = GaussianPosterior::isotropic_prior(2);
        post.update(&e(0), 0.7, 1.0).unwrap();
        assert!((&post.covariance - Matrix::from_diagonal(&dvector![1.0 / 3.0, 0.5])).norm() < 1e-15);
        let before = post.clone();
        post.update(&Vector::zeros(2), 3.0, 1.0).unwrap();
        assert_eq!(post.mean, before.mean);
        assert_eq!(post.covariance, before.covariance);
        assert!(post.update(&e(0), 1.0, 0.0).is_err());
    }

    #[test]
    fn directions_orthogonal_to_mean() {
        let mean = dvector![0.3, -1.2, 0.5, 2.0];
        let dirs = orthogonal_directions(&mean);
        assert_eq!(dirs.len(), 3);
        for (i, a) in dirs.iter().enumerate() {
            assert!(a.dot(&mean).abs() < 1e-12);
            assert!((a.norm() - 1.0).abs() < 1e-12);
            for b in &dirs[i + 1..] {
                assert!(a.dot(b).abs() < 1e-12);
            }
        }
        let degenerate = orthogonal_directions(&Vector::zeros(3));
        assert_eq!(degenerate, vec![linalg::basis(3, 1), linalg::basis(3, 2)]);
    }

    #[test]
    fn orthogonal_exploration_is_zero() {
        let arms = vec![e(0); 5];
        let mut post = GaussianPosterior::isotropic_prior(2);
        for a in &arms {
            post.update(a, 1.0, 1.0).unwrap();
        }
        let terms = directional_risk_terms(&arms, &post, &dvector![1.0, 0.0]).unwrap();
        assert_eq!(terms.len(), 1);
        assert!(terms[0].direction.dot(&e(1)).abs() > 1.0 - 1e-12);
        assert!(terms[0].exploration < 1e-24);
    }
}
