use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use linbandit::harness::{
    verify, ArmSetSpec, ConfigOverrides, CurveSet, Experiment, ExperimentConfig, NoiseSpec, PriorSpec, SummaryStats,
    DEFAULT_SEED,
};
use linbandit::{Error, Result};

/// Monte Carlo experiments for linearly parameterized bandits.
///
/// Replications run on `LINBANDIT_WORKERS` threads (default: all cores).
#[derive(Parser)]
#[command(name = "linbandit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV and summary.
    Run(RunArgs),
    /// Run a grid over dimension and policy; horizons come from the checkpoint grid.
    Sweep(SweepArgs),
    /// Run invariant suites and print one line per check.
    Verify(VerifyArgs),
    /// Summarize stored CSV files.
    Report(ReportArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML experiment file; flags override its values.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// sphere:R | simplex:R | hypercube:R | ellipsoid:D1,D2,.. | finite:A;B;.. | polytope:A;B;..
    #[arg(long)]
    arm_set: Option<ArmSetSpec>,
    /// gaussian | fixed:Z1,Z2,.. | uniform-sphere:RADIUS | iid-uniform:LO,HI | iid-normal:MEAN,STD
    #[arg(long)]
    prior: Option<PriorSpec>,
    /// gaussian:SIGMA | uniform:HALF_WIDTH
    #[arg(long)]
    noise: Option<NoiseSpec>,
    /// pege | ue | greedy | ucb1 | extreme+<policy>
    #[arg(long)]
    policy: Option<String>,
    /// Override the theoretical UE radius constant.
    #[arg(long)]
    alpha: Option<f64>,
    /// Declared sub-Gaussian constant of the noise.
    #[arg(long)]
    sigma0: Option<f64>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Comma-separated checkpoint periods.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<usize>>,
    #[arg(long, short = 'n')]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path (run) or directory (sweep).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Fix the hidden parameter instead of drawing it from the prior.
    #[arg(long, value_delimiter = ',')]
    z: Option<Vec<f64>>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "pege,ue,greedy")]
    policies: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// geometry | environment | estimation | policies | all
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct ReportArgs {
    /// CSV files written by `run` or `sweep`.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Comma-separated checkpoints for the slope fit.
    #[arg(long, value_delimiter = ',')]
    fit: Option<Vec<usize>>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides = ConfigOverrides {
            arm_set: self.arm_set.clone(),
            prior: self.prior.clone(),
            noise: self.noise,
            policy: self.policy.clone(),
            alpha: self.alpha,
            sigma0: self.sigma0,
            horizon: self.horizon,
            checkpoints: self.checkpoints.clone(),
            replications: self.replications,
            seed: self.seed,
            output: self.output.clone(),
        };
        overrides.apply(&mut cfg)?;
        Ok(cfg)
    }
}

fn file_stem(policy: &str, dim: usize) -> String {
    let clean: String = policy.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' }).collect();
    format!("{}_r{dim}", clean.trim_end_matches('_'))
}

fn write_outputs(curves: &CurveSet, csv_path: &Path) -> Result<SummaryStats> {
    curves.save_csv(csv_path)?;
    let summary = curves.summary()?;
    let summary_path = csv_path.with_extension("summary");
    summary.save(&summary_path)?;
    println!("wrote {} and {}", csv_path.display(), summary_path.display());
    Ok(summary)
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = args.config.load()?;
    let exp = Experiment::from_config(&cfg)?;
    let z = args.z.map(|v| linbandit::Vector::from_vec(v));
    let curves = exp.sample_curves(cfg.replications, z.as_ref())?;
    let path = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(format!("{}.csv", file_stem(exp.policy_name(), exp.dim()))));
    let summary = write_outputs(&curves, &path)?;
    print!("{}", summary.to_key_values());
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let base = args.config.load()?;
    let dir = base.output.clone().unwrap_or_else(|| PathBuf::from("results"));
    for &dim in &args.dims {
        for policy in &args.policies {
            let mut cfg = base.clone();
            cfg.arm_set = cfg.arm_set.with_dim(dim)?;
            cfg.policy.name = policy.clone();
            cfg.output = None;
            let exp = Experiment::from_config(&cfg)?;
            let curves = exp.sample_curves(cfg.replications, None)?;
            let summary = write_outputs(&curves, &dir.join(format!("{}.csv", file_stem(exp.policy_name(), dim))))?;
            let last = summary.checkpoints.last().expect("nonempty checkpoint grid");
            let slope = summary.fit.map_or("NA".to_string(), |f| format!("{:.3} ± {:.3}", f.slope, f.slope_ci));
            println!(
                "{:<14} r={dim:<3} T={:<6} mean={:.3} ± {:.3}  slope={slope}",
                summary.policy, last.t, last.estimate.mean, last.ci95
            );
        }
    }
    Ok(())
}

fn verify_cmd(args: VerifyArgs) -> Result<bool> {
    let report = verify(&args.suite, args.seed)?;
    println!("{report}");
    Ok(report.all_passed())
}

fn report(args: ReportArgs) -> Result<()> {
    for file in &args.files {
        for curves in CurveSet::load_csv(file)? {
            let mut summary = curves.summary()?;
            if let Some(ts) = &args.fit {
                summary.fit = Some(summary.fit_over(ts)?);
                summary.fit_checkpoints = ts.clone();
            }
            let path = file.with_file_name(format!("{}.summary", file_stem(&summary.policy, summary.dim)));
            summary.save(&path)?;
            println!("# {} ({})", file.display(), path.display());
            print!("{}", summary.to_key_values());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<bool> = match cli.command {
        Command::Run(a) => run(a).map(|_| true),
        Command::Sweep(a) => sweep(a).map(|_| true),
        Command::Verify(a) => verify_cmd(a),
        Command::Report(a) => report(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::UnknownSuite(_) | Error::Config(_) | Error::UnknownPolicy(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
