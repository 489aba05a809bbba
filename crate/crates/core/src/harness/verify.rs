//! Invariant suites. Every check runs on fixed seeds and reports its measured
//! value next to the bound it is held to.
//!
//! Statistical checks follow one convention: an upper bound `P ≤ b` passes
//! when `mean ≤ b + 3·stderr`, a lower bound `R ≥ b` when `mean − 2·stderr ≥ b`.
//! The reported bound already includes that slack.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::dvector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::{ArmSetSpec, ExperimentConfig, NoiseSpec, PolicyConfig, PriorSpec};
use super::runner::Experiment;
use crate::environment::{
    norm_band_lower_bound, norm_band_probability, norm_moments, sample_z, stream_rng, BanditInstance, NoiseModel,
    NoiseStream, Prior, StepKind, StreamRole,
};
use crate::error::{Error, Result};
use crate::estimation::{directional_risk_terms, GaussianPosterior, OlsState, UncertaintyParams};
use crate::geometry::{linear_constraint_vertex_bound, normalized_difference, ArmSet};
use crate::linalg::{self, Matrix, Vector};
use crate::policies::{
    maximize_optimistic_index, pege_periods, ExtremePointWrapper, Pege, Policy, PolicySpec, Ucb1,
    UncertaintyEllipsoid,
};
use crate::stats::{MeanEstimate, RunningMean};

pub const DEFAULT_SEED: u64 = 20_080_915;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Geometry,
    Environment,
    Estimation,
    Policies,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Geometry, Suite::Environment, Suite::Estimation, Suite::Policies];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Environment => "environment",
            Suite::Estimation => "estimation",
            Suite::Policies => "policies",
        }
    }

    /// `all` or a single suite name.
    pub fn select(selector: &str) -> Result<Vec<Suite>> {
        if selector == "all" {
            Ok(Suite::ALL.to_vec())
        } else {
            Ok(vec![selector.parse()?])
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    fn at_most(suite: Suite, name: &'static str, measured: f64, bound: f64) -> Self {
        Self { suite, name, measured, bound, relation: Relation::AtMost, passed: measured <= bound }
    }

    fn at_least(suite: Suite, name: &'static str, measured: f64, bound: f64) -> Self {
        Self { suite, name, measured, bound, relation: Relation::AtLeast, passed: measured >= bound }
    }

    /// `mean ≤ bound + 3·stderr`.
    fn mean_at_most(suite: Suite, name: &'static str, est: MeanEstimate, bound: f64) -> Self {
        Self::at_most(suite, name, est.mean, bound + 3.0 * est.stderr)
    }

    /// `mean − 2·stderr ≥ bound`.
    fn mean_at_least(suite: Suite, name: &'static str, est: MeanEstimate, bound: f64) -> Self {
        Self::at_least(suite, name, est.mean - 2.0 * est.stderr, bound)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        write!(f, "{status} {}/{} measured={:.6e} {rel} {:.6e}", self.suite, self.name, self.measured, self.bound)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} passed, {} failed", self.checks.len(), self.checks.len() - failed, failed)
    }
}

/// Runs the suites named by `selector` (`all` or one suite name).
pub fn verify(selector: &str, seed: u64) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    for suite in Suite::select(selector)? {
        report.checks.extend(run_suite(suite, seed)?);
    }
    Ok(report)
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    match suite {
        Suite::Geometry => geometry_suite(seed),
        Suite::Environment => environment_suite(seed),
        Suite::Estimation => estimation_suite(seed),
        Suite::Policies => policies_suite(seed),
    }
}

fn rng(seed: u64, tag: u64) -> ChaCha8Rng {
    stream_rng(seed, tag, StreamRole::Aux)
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

// ---------------------------------------------------------------- geometry

fn geometry_suite(seed: u64) -> Result<Vec<Check>> {
    const S: Suite = Suite::Geometry;
    let mut checks = Vec::new();

    // closed-form ellipse argmax against a 10⁵-angle boundary grid
    let ellipse = ArmSet::ellipsoid(Matrix::from_diagonal(&dvector![4.0, 1.0]))?;
    let ArmSet::Ellipsoid(shape) = &ellipse else { unreachable!() };
    let grid: Vec<Vector> = (0..100_000)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / 100_000.0;
            shape.boundary_point(&dvector![a.cos(), a.sin()])
        })
        .collect();
    let mut r = rng(seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let z = linalg::random_normal_vector(&mut r, 2);
        let closed = ellipse.max_reward(&z)?;
        let gridded = grid.iter().map(|u| u.dot(&z)).fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((closed - gridded).abs() / z.norm());
    }
    checks.push(Check::at_most(S, "ellipse_argmax_vs_grid", worst, 1e-6));

    // u*(cz) = u*(z) for c > 0
    let sets = [
        ArmSet::unit_sphere(3)?,
        ArmSet::ellipsoid(Matrix::from_diagonal(&dvector![4.0, 1.0, 0.25]))?,
        ArmSet::simplex(3)?,
        ArmSet::hypercube(3)?,
        ArmSet::finite((0..6).map(|_| linalg::random_normal_vector(&mut r, 3)).collect())?,
    ];
    let mut worst: f64 = 0.0;
    for set in &sets {
        for _ in 0..1_000 {
            let z = linalg::random_normal_vector(&mut r, 3);
            let c = 10f64.powf(r.random_range(-2.0..2.0));
            worst = worst.max((set.best_arm(&(&z * c))? - set.best_arm(&z)?).norm());
        }
    }
    checks.push(Check::at_most(S, "best_arm_scale_invariance", worst, 1e-12));

    // no member beats the best arm
    let mut worst = f64::NEG_INFINITY;
    for set in &sets[..2] {
        for _ in 0..1_000 {
            let z = linalg::random_normal_vector(&mut r, 3);
            let w = linalg::random_unit_vector(&mut r, 3);
            let u = match set {
                ArmSet::Ellipsoid(e) => e.boundary_point(&w),
                _ => w,
            };
            worst = worst.max(u.dot(&z) - set.max_reward(&z)?);
        }
    }
    checks.push(Check::at_most(S, "best_arm_dominates_members", worst, 1e-12));

    // ‖w/‖w‖ − z/‖z‖‖ ≤ 2‖w − z‖/‖z‖
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let dim = r.random_range(2..=6);
        let z = linalg::random_normal_vector(&mut r, dim);
        let w = &z + linalg::random_normal_vector(&mut r, dim) * 10f64.powf(r.random_range(-3.0..1.0));
        let rhs = 2.0 * (&w - &z).norm() / z.norm();
        worst = worst.max(normalized_difference(&w, &z) / rhs);
    }
    checks.push(Check::at_most(S, "normalized_difference_lemma", worst, 1.0));

    let sphere = ArmSet::unit_sphere(3)?;
    let rep = sphere.sbar_check(1.0, 10_000, &mut r)?;
    checks.push(Check::at_most(S, "sbar_sphere_j1", rep.worst_ratio, 1.0 * (1.0 + 1e-9)));
    let j = ellipse.sbar_constant().expect("ellipsoid has an SBAR constant");
    checks.push(Check::at_most(S, "sbar_ellipsoid_constant", (j - 4.0).abs(), 1e-12));
    let rep = ellipse.sbar_check(j, 10_000, &mut r)?;
    checks.push(Check::at_most(S, "sbar_ellipsoid_j4", rep.worst_ratio, j * (1.0 + 1e-9)));

    let mut mismatches = 0.0;
    for dim in 2..=8 {
        let simplex = ArmSet::simplex(dim)?;
        let cube = ArmSet::hypercube(dim)?;
        let simplex_n = simplex.extreme_points()?.arm_count().unwrap_or(0) as u128;
        let cube_n = cube.extreme_points()?.arm_count().unwrap_or(0) as u128;
        if simplex_n != 2 * dim as u128 || simplex.extreme_point_count()? != simplex_n {
            mismatches += 1.0;
        }
        if cube_n != 1 << dim || cube.extreme_point_count()? != cube_n {
            mismatches += 1.0;
        }
        // the cube is cut out by 2r halfspaces
        if linear_constraint_vertex_bound(dim, 2 * dim) < cube_n {
            mismatches += 1.0;
        }
    }
    checks.push(Check::at_most(S, "extreme_point_counts", mismatches, 0.0));

    let skewed = ArmSet::finite(vec![dvector![1.0, 0.0], dvector![1.0, 1.0]])?;
    let lambda0 = skewed.spanner()?.lambda0;
    checks.push(Check::at_most(S, "spanner_lambda0", (lambda0 - (3.0 - 5f64.sqrt()) / 2.0).abs(), 1e-12));
    Ok(checks)
}

// ------------------------------------------------------------- environment

fn environment_suite(seed: u64) -> Result<Vec<Check>> {
    const S: Suite = Suite::Environment;
    let mut checks = Vec::new();
    let mut r = rng(seed, 10);

    for (name, model) in [
        ("noise_mean_gaussian", NoiseModel::gaussian(1.0)?),
        ("noise_mean_uniform", NoiseModel::uniform(0.5)?),
    ] {
        let mut acc = RunningMean::default();
        for _ in 0..1_000_000 {
            acc.push(model.sample(&mut r));
        }
        let est = acc.estimate();
        checks.push(Check::at_most(S, name, est.mean.abs(), 5.0 * est.stderr));
    }

    // entrywise sample covariance of N(0, I/r) in standard errors
    let dim = 3;
    let prior = Prior::GaussianIsotropic { dim };
    let mut prods = vec![RunningMean::default(); dim * dim];
    for _ in 0..1_000_000 {
        let z = sample_z(&prior, &mut r);
        for i in 0..dim {
            for j in 0..dim {
                prods[i * dim + j].push(z[i] * z[j]);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let est = prods[i * dim + j].estimate();
            let target = if i == j { 1.0 / dim as f64 } else { 0.0 };
            worst = worst.max((est.mean - target).abs() / est.stderr);
        }
    }
    checks.push(Check::at_most(S, "prior_covariance_within_3se", worst, 3.0));

    for (dim, n1, n2) in [(2, "norm_mean_r2", "inverse_norm_mean_r2"), (8, "norm_mean_r8", "inverse_norm_mean_r8")] {
        let (norm, inv) = norm_moments(dim, 100_000, &mut r);
        checks.push(Check::mean_at_most(S, n1, norm, 1.0));
        checks.push(Check::mean_at_most(S, n2, inv, std::f64::consts::PI.sqrt()));
    }

    let est = norm_band_probability(0.09, 3.0, 2, 1_000_000, &mut r)?;
    checks.push(Check::at_least(
        S,
        "norm_band_theta009_beta3",
        est.mean + 3.0 * est.stderr,
        norm_band_lower_bound(0.09, 3.0),
    ));
    let mut worst = f64::INFINITY;
    for &dim in &[2, 4, 8] {
        for &(theta, beta) in &[(0.05, 2.0), (0.2, 1.5), (0.3, 5.0), (0.5, 1.01), (0.001, 1e3)] {
            let est = norm_band_probability(theta, beta, dim, 20_000, &mut r)?;
            worst = worst.min(est.mean + 3.0 * est.stderr - norm_band_lower_bound(theta, beta));
        }
    }
    checks.push(Check::at_least(S, "norm_band_grid_margin", worst, 0.0));

    // zero-noise pulls are exactly linear
    let sphere = Arc::new(ArmSet::unit_sphere(4)?);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let z = linalg::random_normal_vector(&mut r, 4);
        let inst = BanditInstance::new(sphere.clone(), z.clone(), NoiseModel::gaussian(0.0)?)?;
        let u = linalg::random_unit_vector(&mut r, 4);
        worst = worst.max((inst.pull(&u, &mut r)? - u.dot(&z)).abs());
    }
    checks.push(Check::at_most(S, "zero_noise_pull_linear", worst, 1e-12));

    let plane = Arc::new(ArmSet::unit_sphere(2)?);
    let inst = BanditInstance::new(plane.clone(), dvector![1.0, 0.0], NoiseModel::gaussian(1.0)?)?;
    let mut acc = RunningMean::default();
    let e1 = linalg::basis(2, 0);
    for _ in 0..100_000 {
        acc.push(inst.pull(&e1, &mut r)?);
    }
    checks.push(Check::at_most(S, "pull_sample_mean", (acc.estimate().mean - 1.0).abs(), 3.0 / 100_000f64.sqrt()));

    let exp = Experiment::from_config(&sphere_config("pege", 2, 512, seed))?;
    let z = dvector![0.4, -0.8];
    let a = exp.run_trajectory(&z, 3)?;
    let b = exp.run_trajectory(&z, 3)?;
    checks.push(Check::at_most(S, "trajectory_determinism", if a == b { 0.0 } else { 1.0 }, 0.0));

    let mut worst: f64 = 0.0;
    let mut acc = 0.0;
    let mut prev = 0.0;
    for (i, s) in a.steps.iter().enumerate() {
        acc += s.regret;
        worst = worst.max((s.regret - plane.gap(&z, &s.arm)?).abs());
        if let Some(v) = a.checkpoint(i + 1) {
            worst = worst.max((v - acc).abs());
            if v < prev {
                worst = f64::INFINITY;
            }
            prev = v;
        }
    }
    checks.push(Check::at_most(S, "regret_accumulation", worst, 1e-12));

    // common random numbers: identical arms at identical steps see identical rewards
    let greedy = Experiment::from_config(&sphere_config("greedy", 2, 512, seed))?.run_trajectory(&z, 3)?;
    let mut matched = 0usize;
    let mut worst: f64 = 0.0;
    for (x, y) in a.steps.iter().zip(&greedy.steps) {
        if x.arm == y.arm {
            matched += 1;
            worst = worst.max((x.reward - y.reward).abs());
        }
    }
    checks.push(Check::at_most(S, "common_random_numbers", if matched > 0 { worst } else { f64::INFINITY }, 0.0));
    let mut s1 = NoiseStream::new(seed, 7);
    let mut s2 = NoiseStream::new(seed, 7);
    let first: f64 = s1.at_step(40).random();
    let _: f64 = s2.at_step(12).random();
    let second: f64 = s2.at_step(40).random();
    checks.push(Check::at_most(S, "noise_addressed_by_step", (first - second).abs(), 0.0));
    Ok(checks)
}

fn sphere_config(policy: &str, dim: usize, horizon: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        horizon,
        replications: 1,
        seed,
        checkpoints: None,
        output: None,
        arm_set: ArmSetSpec::Sphere { dim },
        prior: PriorSpec::GaussianIsotropic,
        noise: NoiseSpec::Gaussian { sigma: 1.0 },
        policy: PolicyConfig { name: policy.into(), alpha: None, sigma0: None },
    }
}

// -------------------------------------------------------------- estimation

fn estimation_suite(seed: u64) -> Result<Vec<Check>> {
    const S: Suite = Suite::Estimation;
    let mut checks = Vec::new();
    let mut r = rng(seed, 20);

    // 10³ rank-one updates from the standard basis in r = 4
    let dim = 4;
    let z = linalg::random_normal_vector(&mut r, dim);
    let basis: Vec<Vector> = (0..dim).map(|k| linalg::basis(dim, k)).collect();
    let mut noisy = OlsState::init(&basis, &basis.iter().map(|b| b.dot(&z) + r.random::<f64>()).collect::<Vec<_>>())?;
    let mut exact = OlsState::init(&basis, &basis.iter().map(|b| b.dot(&z)).collect::<Vec<_>>())?;
    let mut gram = Matrix::identity(dim, dim);
    let mut increment_err: f64 = 0.0;
    let mut recovery_err: f64 = 0.0;
    let mut asym: f64 = 0.0;
    let mut estimate_err: f64 = 0.0;
    for _ in 0..1_000 {
        let u = linalg::random_unit_vector(&mut r, dim);
        let before = noisy.log_det_gram();
        let w = noisy.weighted_norm_sq(&u)?;
        noisy.update(&u, u.dot(&z) + r.sample::<f64, _>(rand_distr::StandardNormal))?;
        increment_err = increment_err.max((noisy.log_det_gram() - before - (1.0 + w).ln()).abs());
        exact.update(&u, u.dot(&z))?;
        recovery_err = recovery_err.max((exact.estimate() - &z).amax());
        gram += &u * u.transpose();
        asym = asym.max(linalg::asymmetry(noisy.gram_inverse()));
        estimate_err = estimate_err.max((noisy.gram_inverse() * noisy.response_acc() - noisy.estimate()).amax());
    }
    let direct = gram.clone().try_inverse().ok_or(Error::Singular { condition: f64::INFINITY })?;
    checks.push(Check::at_most(
        S,
        "sherman_morrison_vs_direct",
        linalg::relative_frobenius(noisy.gram_inverse(), &direct),
        1e-8,
    ));
    let det = gram.determinant();
    checks.push(Check::at_most(S, "determinant_recursion", (noisy.log_det_gram().exp() - det).abs() / det, 1e-6));
    checks.push(Check::at_most(S, "determinant_increment", increment_err, 1e-12));
    checks.push(Check::at_most(S, "zero_noise_ols_recovery", recovery_err, 1e-9));
    checks.push(Check::at_most(S, "gram_inverse_symmetry", asym, 1e-10));
    checks.push(Check::at_most(S, "estimate_consistency", estimate_err, 1e-9));
    checks.push(Check::at_least(
        S,
        "gram_inverse_positive_definite",
        if linalg::is_positive_definite(noisy.gram_inverse()) { 1.0 } else { 0.0 },
        1.0,
    ));

    // λmin(Υ_t) ≥ λ₀ after a spanner initialization
    let arms = ArmSet::finite(vec![dvector![1.0, 0.0], dvector![1.0, 1.0], dvector![0.0, 1.0]])?;
    let spanner = arms.spanner()?;
    let mut ols = OlsState::init(&spanner.arms, &[0.0, 0.0])?;
    let mut worst = f64::INFINITY;
    let ArmSet::Finite(list) = &arms else { unreachable!() };
    for _ in 0..200 {
        ols.update(&list[r.random_range(0..list.len())], 0.0)?;
        worst = worst.min(linalg::lambda_min(ols.gram()) - spanner.lambda0 * (1.0 - 1e-12));
    }
    checks.push(Check::at_least(S, "gram_lambda_min_after_init", worst, 0.0));

    let p = UncertaintyParams::new(1.0, 1.0, 1.0, Some(2))?;
    checks.push(Check::at_most(S, "kappa0_closed_form", (p.kappa0() - 2.0 * (1.0 + 37f64.ln()).sqrt()).abs(), 1e-12));
    checks.push(Check::at_most(S, "alpha_closed_form", (p.alpha() - 4.0 * p.kappa0().powi(2)).abs(), 1e-10));

    // posterior covariance and Lemma 3 on 10³ random trajectories
    let mut cov_err: f64 = 0.0;
    let mut lemma3_violation = f64::NEG_INFINITY;
    for _ in 0..1_000 {
        let dim = r.random_range(2..=5);
        let horizon = r.random_range(1..=60);
        let z = sample_z(&Prior::GaussianIsotropic { dim }, &mut r);
        let mut post = GaussianPosterior::isotropic_prior(dim);
        let mut gram = Matrix::identity(dim, dim) * dim as f64;
        let mut played = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let u = linalg::random_normal_vector(&mut r, dim) * r.random_range(0.1..2.0);
            let x = u.dot(&z) + r.sample::<f64, _>(rand_distr::StandardNormal);
            post.update(&u, x, 1.0)?;
            gram += &u * u.transpose();
            played.push(u);
        }
        let direct = gram.try_inverse().ok_or(Error::Singular { condition: f64::INFINITY })?;
        cov_err = cov_err.max((&post.covariance - direct).amax());
        for term in directional_risk_terms(&played, &post, &z)? {
            lemma3_violation = lemma3_violation.max(1.0 / (dim as f64 + term.exploration) - term.variance);
        }
    }
    checks.push(Check::at_most(S, "posterior_covariance_vs_direct", cov_err, 1e-10));
    checks.push(Check::at_most(S, "lemma3_inequality", lemma3_violation, 1e-10));

    // Fiedler: [(rI + A)⁻¹]ₖₖ ≥ 1/(rI + A)ₖₖ
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1_000 {
        let m = Matrix::from_fn(3, 3, |_, _| r.sample::<f64, _>(rand_distr::StandardNormal));
        let a = &m * m.transpose() + Matrix::identity(3, 3) * 3.0;
        let inv = a.clone().try_inverse().ok_or(Error::Singular { condition: f64::INFINITY })?;
        for k in 0..3 {
            worst = worst.max(1.0 / a[(k, k)] - inv[(k, k)]);
        }
    }
    checks.push(Check::at_most(S, "fiedler_inequality", worst, 1e-12));

    checks.extend(risk_decomposition_checks(seed)?);
    Ok(checks)
}

/// Lemma 2 pathwise step, Lemma 2 in expectation and Lemma 6 on sphere
/// trajectories under the Gaussian prior with unit noise.
fn risk_decomposition_checks(seed: u64) -> Result<Vec<Check>> {
    const S: Suite = Suite::Estimation;
    let dim = 2;
    let horizon = 64;
    let exp = Experiment::from_config(&sphere_config("pege", dim, horizon, seed))?;
    let rows = exp.map_replications(500, None, |rec| {
        let z = &rec.z;
        let znorm = z.norm();
        let mut post = GaussianPosterior::isotropic_prior(dim);
        let arms: Vec<Vector> = rec.steps.iter().map(|s| s.arm.clone()).collect();
        for s in &rec.steps {
            post.update(&s.arm, s.reward, 1.0)?;
        }
        let terms = directional_risk_terms(&arms, &post, z)?;
        let unit_z = z / znorm;
        // pathwise: regret ≥ ½‖z‖ Σₜ Σₖ ((Uₜ − z/‖z‖)'Sᵏ)²
        let pathwise: f64 = terms
            .iter()
            .map(|t| arms.iter().map(|u| (u - &unit_z).dot(&t.direction).powi(2)).sum::<f64>())
            .sum::<f64>()
            * znorm
            / 2.0;
        let directional: Vec<f64> = terms
            .iter()
            .map(|t| znorm * t.exploration + horizon as f64 * t.realized_sq_error / znorm)
            .collect();
        Ok((rec.cumulative_regret(), pathwise, directional))
    })?;
    let pathwise_gap = rows.iter().map(|(reg, path, _)| path - reg).fold(f64::NEG_INFINITY, f64::max);
    let diffs: Vec<f64> = rows.iter().map(|(reg, _, d)| reg - d.iter().sum::<f64>() / 2.0).collect();
    let lemma6: Vec<f64> = rows.iter().map(|(_, _, d)| d[0]).collect();
    Ok(vec![
        Check::at_most(S, "lemma2_pathwise", pathwise_gap, 1e-9),
        Check::at_least(S, "lemma2_risk_decomposition", {
            let e = MeanEstimate::from_samples(&diffs);
            e.mean + 3.0 * e.stderr
        }, 0.0),
        Check::mean_at_least(
            S,
            "lemma6_directional_risk",
            MeanEstimate::from_samples(&lemma6),
            0.027 * (horizon as f64).sqrt(),
        ),
    ])
}

// ---------------------------------------------------------------- policies

fn policies_suite(seed: u64) -> Result<Vec<Check>> {
    const S: Suite = Suite::Policies;
    let mut checks = Vec::new();
    let mut r = rng(seed, 30);

    // PEGE bookkeeping against rK + K(K+1)/2 at every cycle boundary, K ≤ 100
    let mut mismatches = 0.0;
    for dim in [2, 3] {
        let set = Arc::new(ArmSet::unit_sphere(dim)?);
        let mut p = Pege::new();
        p.reset(set, 0)?;
        let z = linalg::random_normal_vector(&mut r, dim);
        let (mut explore, mut exploit) = (0, 0);
        let mut cycle = 0;
        for t in 1..=pege_periods(dim, 100) {
            let s = p.select(t)?;
            match s.kind {
                StepKind::Explore => explore += 1,
                _ => exploit += 1,
            }
            p.observe(&s.arm, s.arm.dot(&z))?;
            if p.cycle() != Some(cycle + 1) {
                cycle += 1;
                let ok = t == pege_periods(dim, cycle) && explore == dim * cycle && exploit == cycle * (cycle + 1) / 2;
                if !ok {
                    mismatches += 1.0;
                }
            }
        }
        if cycle != 100 {
            mismatches += 1.0;
        }
    }
    checks.push(Check::at_most(S, "pege_schedule_arithmetic", mismatches, 0.0));

    // Ẑ(c) against the least-squares fit of all exploration rewards
    let dim = 3;
    let set = Arc::new(ArmSet::ellipsoid(Matrix::from_diagonal(&dvector![2.0, 1.0, 0.5]))?);
    let mut p = Pege::new();
    p.reset(set.clone(), 0)?;
    let z = linalg::random_normal_vector(&mut r, dim);
    let inst = BanditInstance::new(set.clone(), z.clone(), NoiseModel::gaussian(1.0)?)?;
    let (mut gram, mut acc) = (Matrix::zeros(dim, dim), Vector::zeros(dim));
    let mut worst: f64 = 0.0;
    for t in 1..=pege_periods(dim, 30) {
        let s = p.select(t)?;
        let x = inst.pull(&s.arm, &mut r)?;
        p.observe(&s.arm, x)?;
        if s.kind == StepKind::Explore {
            gram += &s.arm * s.arm.transpose();
            acc += &s.arm * x;
            if let (Some(crate::policies::PegePhase::Exploit { .. }), Some(est)) = (p.phase(), p.estimate()) {
                let direct = gram.clone().lu().solve(&acc).ok_or(Error::Singular { condition: f64::INFINITY })?;
                worst = worst.max((est - direct).amax());
            }
        }
    }
    checks.push(Check::at_most(S, "pege_estimate_closed_form", worst, 1e-10));

    // UE step bound and exploration budget on sphere, ellipsoid and finite sets
    let mut step_ratio: f64 = 0.0;
    let mut budget_ratio: f64 = 0.0;
    let mut optimality_gap: f64 = 0.0;
    let finite = ArmSet::finite(vec![
        dvector![1.0, 0.0],
        dvector![0.0, 1.0],
        dvector![0.6, 0.8],
        dvector![-0.5, 0.5],
    ])?;
    for (set, alpha) in [
        (ArmSet::unit_sphere(2)?, None),
        (ArmSet::unit_sphere(3)?, Some(1.0)),
        (ArmSet::ellipsoid(Matrix::from_diagonal(&dvector![4.0, 1.0]))?, Some(1.0)),
        (finite.clone(), None),
        (finite.clone(), Some(1.0)),
    ] {
        let set = Arc::new(set);
        let dim = set.dim();
        let mut p = UncertaintyEllipsoid::new(1.0, alpha);
        p.reset(set.clone(), 0)?;
        let params = *p.params().expect("bound after reset");
        let c0 = (params.u_bar.powi(2) / params.lambda0).max(1.0);
        let step_bound = params.u_bar.powi(2) / params.lambda0;
        let z = linalg::random_normal_vector(&mut r, dim) / (dim as f64).sqrt();
        let inst = BanditInstance::new(set.clone(), z, NoiseModel::gaussian(1.0)?)?;
        let mut cumulative = 0.0;
        for t in 1..=400 {
            let before = p.ols().cloned();
            let s = p.select(t)?;
            if let (Some(w), Some(ols)) = (s.weighted_norm_sq, before) {
                step_ratio = step_ratio.max(w / step_bound);
                cumulative += w;
                let budget = 2.0 * c0 * (dim as f64 * c0.ln() + (dim as f64 + 1.0) * ((t + 1) as f64).ln());
                budget_ratio = budget_ratio.max(cumulative / budget);
                if let Some(cands) = p.candidates() {
                    let beta = params.radius_scale(t - 1, dim)?;
                    let index = |v: &Vector| v.dot(ols.estimate()) + beta * linalg::quad_form(ols.gram_inverse(), v).max(0.0).sqrt();
                    let chosen = index(&s.arm);
                    optimality_gap = optimality_gap.max(max_of(cands.iter().map(|v| index(v) - chosen)));
                }
            }
            let x = inst.pull(&s.arm, &mut r)?;
            p.observe(&s.arm, x)?;
        }
    }
    checks.push(Check::at_most(S, "ue_weighted_norm_step_bound", step_ratio, 1.0 + 1e-12));
    checks.push(Check::at_most(S, "ue_exploration_budget", budget_ratio, 1.0));
    checks.push(Check::at_most(S, "ue_finite_selection_optimal", optimality_gap, 0.0));

    // continuous argmax at r = 2 against a 10⁴-point boundary grid
    let mut worst = f64::NEG_INFINITY;
    for set in [ArmSet::unit_sphere(2)?, ArmSet::ellipsoid(Matrix::from_diagonal(&dvector![4.0, 1.0]))?] {
        for _ in 0..200 {
            let est = linalg::random_normal_vector(&mut r, 2);
            let m = linalg::random_normal_vector(&mut r, 2);
            let c = Matrix::identity(2, 2) * 0.05 + &m * m.transpose();
            let beta = r.random_range(0.1..5.0);
            let index = |v: &Vector| v.dot(&est) + beta * linalg::quad_form(&c, v).max(0.0).sqrt();
            let (arm, _) = maximize_optimistic_index(&set, None, &est, &c, beta)?;
            let grid = (0..10_000)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / 10_000.0;
                    let w = dvector![a.cos(), a.sin()];
                    match &set {
                        ArmSet::Ellipsoid(e) => index(&e.boundary_point(&w)),
                        _ => index(&w),
                    }
                })
                .fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max(grid - index(&arm));
        }
    }
    checks.push(Check::at_most(S, "ue_continuous_argmax_vs_grid", worst, 1e-9));

    // UE finite examples
    let two = ArmSet::finite(vec![linalg::basis(2, 0), linalg::basis(2, 1)])?;
    let ArmSet::Finite(cands) = &two else { unreachable!() };
    let (_, tie) = maximize_optimistic_index(&two, Some(cands), &dvector![1.0, 0.0], &Matrix::identity(2, 2), 3.0)?;
    let (_, optimistic) =
        maximize_optimistic_index(&two, Some(cands), &dvector![0.5, 0.5], &Matrix::from_diagonal(&dvector![1.0, 4.0]), 3.0)?;
    let wrong = (tie != Some(0)) as u8 as f64 + (optimistic != Some(1)) as u8 as f64;
    checks.push(Check::at_most(S, "ue_finite_examples", wrong, 0.0));

    // zero-noise greedy stops paying after initialization
    let mut cfg = sphere_config("greedy", 2, 100, seed);
    cfg.noise = NoiseSpec::Gaussian { sigma: 0.0 };
    let rec = Experiment::from_config(&cfg)?.run_trajectory(&dvector![3.0, 4.0], 0)?;
    checks.push(Check::at_most(S, "greedy_zero_noise_lock_on", max_of(rec.steps[2..].iter().map(|s| s.regret)), 1e-12));

    // UCB1 and the extreme-point wrapper
    let mut w = ExtremePointWrapper::new(Box::new(Ucb1::new()));
    w.reset(Arc::new(ArmSet::simplex(3)?), 0)?;
    checks.push(Check::at_most(S, "wrapper_simplex_arm_count", (w.arm_count().unwrap_or(0) as f64 - 6.0).abs(), 0.0));
    let mismatch = PolicySpec::named("ucb1").build(1.0)?.reset(Arc::new(ArmSet::unit_sphere(2)?), 0).is_ok();
    checks.push(Check::at_most(S, "ucb1_rejects_sphere", mismatch as u8 as f64, 0.0));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(verify("numerics", 1), Err(Error::UnknownSuite(_))));
        assert_eq!(Suite::select("all").unwrap().len(), 4);
    }

    #[test]
    fn suite_membership() {
        let est = run_suite(Suite::Estimation, DEFAULT_SEED).unwrap();
        for name in ["sherman_morrison_vs_direct", "lemma3_inequality", "determinant_recursion"] {
            assert!(est.iter().any(|c| c.name == name), "{name}");
        }
        let pol = run_suite(Suite::Policies, DEFAULT_SEED).unwrap();
        for name in ["ue_weighted_norm_step_bound", "ue_exploration_budget"] {
            assert!(pol.iter().any(|c| c.name == name), "{name}");
        }
    }
}
