//! Experiment configuration: a TOML file with one table per component, and
//! compact `kind:params` strings for command-line overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::environment::{CustomPrior, NoiseModel, Prior};
use crate::error::{Error, Result};
use crate::geometry::ArmSet;
use crate::linalg::{Matrix, Vector};
use crate::policies::PolicySpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArmSetSpec {
    Sphere { dim: usize },
    /// Full symmetric shape matrix `Q`, row by row.
    Ellipsoid { shape: Vec<Vec<f64>> },
    Finite { arms: Vec<Vec<f64>> },
    Simplex { dim: usize },
    Hypercube { dim: usize },
    Polytope { vertices: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorSpec {
    GaussianIsotropic,
    Fixed { z: Vec<f64> },
    UniformSphere { radius: f64 },
    IidUniform { low: f64, high: f64 },
    IidNormal { mean: f64, std: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    Gaussian { sigma: f64 },
    Uniform { half_width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub horizon: usize,
    pub replications: usize,
    pub seed: u64,
    /// Checkpoints; defaults to powers of two plus the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub arm_set: ArmSetSpec,
    pub prior: PriorSpec,
    pub noise: NoiseSpec,
    pub policy: PolicyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            horizon: 1024,
            replications: 200,
            seed: 1,
            checkpoints: None,
            output: None,
            arm_set: ArmSetSpec::Sphere { dim: 2 },
            prior: PriorSpec::GaussianIsotropic,
            noise: NoiseSpec::Gaussian { sigma: 1.0 },
            policy: PolicyConfig { name: "pege".into(), alpha: None, sigma0: None },
        }
    }
}

fn vector(v: &[f64]) -> Vector {
    Vector::from_column_slice(v)
}

impl ArmSetSpec {
    pub fn build(&self) -> Result<ArmSet> {
        match self {
            ArmSetSpec::Sphere { dim } => ArmSet::unit_sphere(*dim),
            ArmSetSpec::Ellipsoid { shape } => {
                let n = shape.len();
                if shape.iter().any(|row| row.len() != n) {
                    return Err(Error::Config("ellipsoid shape must be square".into()));
                }
                ArmSet::ellipsoid(Matrix::from_fn(n, n, |i, j| shape[i][j]))
            }
            ArmSetSpec::Finite { arms } => ArmSet::finite(arms.iter().map(|a| vector(a)).collect()),
            ArmSetSpec::Simplex { dim } => ArmSet::simplex(*dim),
            ArmSetSpec::Hypercube { dim } => ArmSet::hypercube(*dim),
            ArmSetSpec::Polytope { vertices } => ArmSet::polytope(vertices.iter().map(|a| vector(a)).collect()),
        }
    }

    /// Same family in another dimension; only dimension-parametric families qualify.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        match self {
            ArmSetSpec::Sphere { .. } => Ok(ArmSetSpec::Sphere { dim }),
            ArmSetSpec::Simplex { .. } => Ok(ArmSetSpec::Simplex { dim }),
            ArmSetSpec::Hypercube { .. } => Ok(ArmSetSpec::Hypercube { dim }),
            _ => Err(Error::Config("only sphere, simplex and hypercube arm sets can be swept over r".into())),
        }
    }
}

impl PriorSpec {
    pub fn build(&self, dim: usize) -> Result<Prior> {
        Ok(match self {
            PriorSpec::GaussianIsotropic => Prior::GaussianIsotropic { dim },
            PriorSpec::Fixed { z } => {
                if z.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: z.len() });
                }
                Prior::FixedPoint(vector(z))
            }
            PriorSpec::UniformSphere { radius } => Prior::Custom(CustomPrior::UniformSphere { dim, radius: *radius }),
            PriorSpec::IidUniform { low, high } => {
                Prior::Custom(CustomPrior::IidUniform { dim, low: *low, high: *high })
            }
            PriorSpec::IidNormal { mean, std } => Prior::Custom(CustomPrior::IidNormal { dim, mean: *mean, std: *std }),
        })
    }
}

impl NoiseSpec {
    pub fn build(&self) -> Result<NoiseModel> {
        match *self {
            NoiseSpec::Gaussian { sigma } => NoiseModel::gaussian(sigma),
            NoiseSpec::Uniform { half_width } => NoiseModel::uniform(half_width),
        }
    }
}

impl From<&PolicyConfig> for PolicySpec {
    fn from(p: &PolicyConfig) -> Self {
        PolicySpec { name: p.name.clone(), alpha: p.alpha, sigma0: p.sigma0 }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(self.arm_set.build()?.dim())
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim()?;
        if self.horizon < dim + 1 {
            return Err(Error::Config(format!("horizon must be at least r + 1 = {}", dim + 1)));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if let Some(cps) = &self.checkpoints {
            if cps.iter().any(|&t| t == 0 || t > self.horizon) {
                return Err(Error::Config("checkpoints must lie in 1..=horizon".into()));
            }
        }
        self.prior.build(dim)?;
        self.noise.build()?;
        Ok(())
    }

    /// Sorted, deduplicated checkpoint grid.
    pub fn checkpoint_grid(&self) -> Vec<usize> {
        let mut grid = match &self.checkpoints {
            Some(c) => c.clone(),
            None => crate::environment::checkpoint_grid(self.horizon),
        };
        grid.sort_unstable();
        grid.dedup();
        grid
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad number `{x}`: {e}"))))
        .collect()
}

fn parse_rows(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').map(parse_list).collect()
}

fn split_kind(s: &str) -> (&str, &str) {
    s.split_once(':').unwrap_or((s, ""))
}

fn parse_one<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Config(format!("bad {what} `{s}`")))
}

/// `sphere:4`, `simplex:3`, `hypercube:3`, `ellipsoid:4,1` (diagonal) or
/// `ellipsoid:4,0;0,1`, `finite:1,0;0,1`, `polytope:1,0;0,1;-1,-1`.
impl FromStr for ArmSetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = split_kind(s);
        Ok(match kind {
            "sphere" => ArmSetSpec::Sphere { dim: parse_one(rest, "dimension")? },
            "simplex" => ArmSetSpec::Simplex { dim: parse_one(rest, "dimension")? },
            "hypercube" => ArmSetSpec::Hypercube { dim: parse_one(rest, "dimension")? },
            "ellipsoid" => {
                let rows = parse_rows(rest)?;
                let shape = if rows.len() == 1 {
                    let d = &rows[0];
                    (0..d.len())
                        .map(|i| (0..d.len()).map(|j| if i == j { d[i] } else { 0.0 }).collect())
                        .collect()
                } else {
                    rows
                };
                ArmSetSpec::Ellipsoid { shape }
            }
            "finite" => ArmSetSpec::Finite { arms: parse_rows(rest)? },
            "polytope" => ArmSetSpec::Polytope { vertices: parse_rows(rest)? },
            other => return Err(Error::Config(format!("unknown arm set `{other}`"))),
        })
    }
}

/// `gaussian`, `fixed:1,0.3`, `uniform-sphere:1`, `iid-uniform:0,1`, `iid-normal:0,1`.
impl FromStr for PriorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = split_kind(s);
        let pair = |rest: &str| -> Result<(f64, f64)> {
            match parse_list(rest)?.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(Error::Config(format!("expected two numbers, got `{rest}`"))),
            }
        };
        Ok(match kind {
            "gaussian" | "gaussian_isotropic" => PriorSpec::GaussianIsotropic,
            "fixed" => PriorSpec::Fixed { z: parse_list(rest)? },
            "uniform-sphere" => PriorSpec::UniformSphere { radius: parse_one(rest, "radius")? },
            "iid-uniform" => {
                let (low, high) = pair(rest)?;
                PriorSpec::IidUniform { low, high }
            }
            "iid-normal" => {
                let (mean, std) = pair(rest)?;
                PriorSpec::IidNormal { mean, std }
            }
            other => return Err(Error::Config(format!("unknown prior `{other}`"))),
        })
    }
}

/// `gaussian:1.0` or `uniform:0.5`.
impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = split_kind(s);
        Ok(match kind {
            "gaussian" => NoiseSpec::Gaussian { sigma: parse_one(rest, "sigma")? },
            "uniform" => NoiseSpec::Uniform { half_width: parse_one(rest, "half-width")? },
            other => return Err(Error::Config(format!("unknown noise model `{other}`"))),
        })
    }
}

/// Command-line overrides; every set field replaces the file value.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverrides {
    pub arm_set: Option<ArmSetSpec>,
    pub prior: Option<PriorSpec>,
    pub noise: Option<NoiseSpec>,
    pub policy: Option<String>,
    pub alpha: Option<f64>,
    pub sigma0: Option<f64>,
    pub horizon: Option<usize>,
    pub checkpoints: Option<Vec<usize>>,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

impl ConfigOverrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(v) = &self.arm_set {
            cfg.arm_set = v.clone();
        }
        if let Some(v) = &self.prior {
            cfg.prior = v.clone();
        }
        if let Some(v) = self.noise {
            cfg.noise = v;
        }
        if let Some(v) = &self.policy {
            cfg.policy.name = v.clone();
        }
        if let Some(v) = self.alpha {
            cfg.policy.alpha = Some(v);
        }
        if let Some(v) = self.sigma0 {
            cfg.policy.sigma0 = Some(v);
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = &self.checkpoints {
            cfg.checkpoints = Some(v.clone());
        }
        if let Some(v) = self.replications {
            cfg.replications = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.output {
            cfg.output = Some(v.clone());
        }
        cfg.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
horizon = 4096
replications = 50
seed = 7
checkpoints = [256, 1024, 4096]

[arm_set]
kind = "ellipsoid"
shape = [[4.0, 0.0], [0.0, 1.0]]

[prior]
kind = "gaussian_isotropic"

[noise]
kind = "gaussian"
sigma = 1.0

[policy]
name = "ue"
alpha = 1.0
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.horizon, 4096);
        assert_eq!(cfg.policy.alpha, Some(1.0));
        assert_eq!(cfg.dim().unwrap(), 2);
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn rejects_short_horizon_and_zero_replications() {
        let mut cfg = ExperimentConfig { horizon: 2, ..Default::default() };
        assert!(cfg.validate().is_err());
        cfg.horizon = 3;
        assert!(cfg.validate().is_ok());
        cfg.replications = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn flag_strings() {
        assert_eq!("sphere:4".parse::<ArmSetSpec>().unwrap(), ArmSetSpec::Sphere { dim: 4 });
        assert_eq!(
            "ellipsoid:4,1".parse::<ArmSetSpec>().unwrap(),
            ArmSetSpec::Ellipsoid { shape: vec![vec![4.0, 0.0], vec![0.0, 1.0]] }
        );
        assert_eq!(
            "finite:1,0;0,1".parse::<ArmSetSpec>().unwrap(),
            ArmSetSpec::Finite { arms: vec![vec![1.0, 0.0], vec![0.0, 1.0]] }
        );
        assert_eq!("fixed:1,0.3".parse::<PriorSpec>().unwrap(), PriorSpec::Fixed { z: vec![1.0, 0.3] });
        assert_eq!("uniform:0.5".parse::<NoiseSpec>().unwrap(), NoiseSpec::Uniform { half_width: 0.5 });
        assert!("torus:3".parse::<ArmSetSpec>().is_err());
    }

    #[test]
    fn overrides_win() {
        let mut cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        let ov = ConfigOverrides {
            policy: Some("pege".into()),
            horizon: Some(8192),
            checkpoints: Some(vec![1024, 8192]),
            seed: Some(99),
            ..Default::default()
        };
        ov.apply(&mut cfg).unwrap();
        assert_eq!(cfg.policy.name, "pege");
        assert_eq!(cfg.horizon, 8192);
        assert_eq!(cfg.seed, 99);
    }
}
