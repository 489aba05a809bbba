//! Per-replication checkpoint curves, their summaries, and the CSV and
//! key=value file formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::stats::{fit_scaling, MeanEstimate, ScalingFit};

pub const CSV_HEADER: [&str; 5] = ["policy", "r", "T_checkpoint", "replication", "cumulative_regret"];

/// Checkpoints at or above this horizon feed the default slope fit.
pub const DEFAULT_FIT_FROM: usize = 256;

/// Cumulative regret at every checkpoint for every replication.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    pub policy: String,
    pub dim: usize,
    pub checkpoints: Vec<usize>,
    /// `values[replication][checkpoint]`.
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointSummary {
    pub t: usize,
    pub estimate: MeanEstimate,
    /// 95% half-width, `1.96 · stderr`.
    pub ci95: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub policy: String,
    pub dim: usize,
    pub replications: usize,
    pub checkpoints: Vec<CheckpointSummary>,
    /// Log-log slope over the fit checkpoints, when at least four qualify.
    pub fit: Option<ScalingFit>,
    pub fit_checkpoints: Vec<usize>,
}

impl CurveSet {
    pub fn column(&self, t: usize) -> Option<Vec<f64>> {
        let i = self.checkpoints.iter().position(|&c| c == t)?;
        Some(self.values.iter().map(|row| row[i]).collect())
    }

    pub fn summary(&self) -> Result<SummaryStats> {
        let checkpoints: Vec<CheckpointSummary> = self
            .checkpoints
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let col: Vec<f64> = self.values.iter().map(|row| row[i]).collect();
                let estimate = MeanEstimate::from_samples(&col);
                CheckpointSummary { t, estimate, ci95: estimate.ci_half_width() }
            })
            .collect();
        let mut stats = SummaryStats {
            policy: self.policy.clone(),
            dim: self.dim,
            replications: self.values.len(),
            checkpoints,
            fit: None,
            fit_checkpoints: Vec::new(),
        };
        stats.fit_checkpoints = stats.default_fit_checkpoints();
        stats.fit = stats.fit_over(&stats.fit_checkpoints.clone()).ok();
        Ok(stats)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for (rep, row) in self.values.iter().enumerate() {
            for (&t, v) in self.checkpoints.iter().zip(row) {
                w.write_record([
                    self.policy.clone(),
                    self.dim.to_string(),
                    t.to_string(),
                    rep.to_string(),
                    format!("{v:?}"),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Parses a results CSV; one curve set per `(policy, r)` pair.
    pub fn read_csv<R: Read>(input: R) -> Result<Vec<CurveSet>> {
        let mut reader = csv::Reader::from_reader(input);
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header != CSV_HEADER {
            return Err(Error::Config(format!("unexpected CSV header {header:?}")));
        }
        // (policy, r) -> replication -> t -> value
        let mut groups: BTreeMap<(String, usize), BTreeMap<usize, BTreeMap<usize, f64>>> = BTreeMap::new();
        for row in reader.records() {
            let row = row?;
            let field = |i: usize| row.get(i).unwrap_or("");
            let bad = |what: &str| Error::Config(format!("bad {what} in row {:?}", row.position().map(|p| p.line())));
            let dim: usize = field(1).parse().map_err(|_| bad("r"))?;
            let t: usize = field(2).parse().map_err(|_| bad("T_checkpoint"))?;
            let rep: usize = field(3).parse().map_err(|_| bad("replication"))?;
            let v: f64 = field(4).parse().map_err(|_| bad("cumulative_regret"))?;
            groups.entry((field(0).to_string(), dim)).or_default().entry(rep).or_default().insert(t, v);
        }
        groups
            .into_iter()
            .map(|((policy, dim), reps)| {
                let checkpoints: Vec<usize> = reps.values().next().map(|m| m.keys().copied().collect()).unwrap_or_default();
                let values = reps
                    .into_values()
                    .map(|m| {
                        if m.keys().copied().ne(checkpoints.iter().copied()) {
                            return Err(Error::Config(format!("ragged checkpoints for {policy}, r={dim}")));
                        }
                        Ok(m.into_values().collect())
                    })
                    .collect::<Result<Vec<Vec<f64>>>>()?;
                Ok(CurveSet { policy, dim, checkpoints, values })
            })
            .collect()
    }

    pub fn load_csv(path: &Path) -> Result<Vec<CurveSet>> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

impl SummaryStats {
    pub fn at(&self, t: usize) -> Option<&CheckpointSummary> {
        self.checkpoints.iter().find(|c| c.t == t)
    }

    /// Checkpoints from [`DEFAULT_FIT_FROM`] on if there are at least four,
    /// else the last four.
    fn default_fit_checkpoints(&self) -> Vec<usize> {
        let late: Vec<usize> = self.checkpoints.iter().map(|c| c.t).filter(|&t| t >= DEFAULT_FIT_FROM).collect();
        if late.len() >= 4 {
            late
        } else {
            let n = self.checkpoints.len();
            self.checkpoints[n.saturating_sub(4)..].iter().map(|c| c.t).collect()
        }
    }

    /// Log-log fit of the mean against `T` over the listed checkpoints.
    pub fn fit_over(&self, ts: &[usize]) -> Result<ScalingFit> {
        let series = ts
            .iter()
            .map(|&t| {
                self.at(t)
                    .map(|c| (t as f64, c.estimate.mean))
                    .ok_or_else(|| Error::InvalidParameter(format!("no checkpoint at T={t}")))
            })
            .collect::<Result<Vec<_>>>()?;
        fit_scaling(&series)
    }

    /// Flat `key=value` lines.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "policy={}", self.policy);
        let _ = writeln!(s, "r={}", self.dim);
        let _ = writeln!(s, "replications={}", self.replications);
        let _ = writeln!(
            s,
            "checkpoints={}",
            self.checkpoints.iter().map(|c| c.t.to_string()).collect::<Vec<_>>().join(",")
        );
        for c in &self.checkpoints {
            let _ = writeln!(s, "T{}.mean={:?}", c.t, c.estimate.mean);
            let _ = writeln!(s, "T{}.stderr={:?}", c.t, c.estimate.stderr);
            let _ = writeln!(s, "T{}.ci95={:?}", c.t, c.ci95);
        }
        let fit_ts = self.fit_checkpoints.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(s, "slope.checkpoints={fit_ts}");
        match &self.fit {
            Some(f) => {
                let _ = writeln!(s, "slope={:?}", f.slope);
                let _ = writeln!(s, "slope.stderr={:?}", f.slope_stderr);
                let _ = writeln!(s, "slope.ci95={:?}", f.slope_ci);
                let _ = writeln!(s, "intercept={:?}", f.intercept);
            }
            None => {
                let _ = writeln!(s, "slope=NA");
            }
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_key_values())?;
        Ok(())
    }
}

/// Parses a key=value summary back into a map; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}
