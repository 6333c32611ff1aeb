//! Distinct-distance sweeps over point-set sizes.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::SubgroupSpec;
use crate::metrics::{self, SurfaceMetric};
use crate::sampling::{self, Sampler, SamplerConfig};

/// First line of every CSV written here.
pub const CSV_SCHEMA: &str = "# modsurf-experiment v1";
pub const CSV_COLUMNS: &str = "n,distinct,quadruples,cs_bound,n_over_mu_ln_n,ratio";
pub const PLOT_COLUMNS: &str =
    "n,distinct,quadruples,cs_bound,n_over_mu_ln_n,ratio,ln_n,ln_distinct,ln_quadruples";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Group string such as `full` or `gamma:2`.
    pub group: String,
    pub n_min: usize,
    pub n_max: usize,
    /// Geometric step between successive sizes.
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_sampler")]
    pub sampler: Sampler,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_y_cap")]
    pub y_cap: f64,
    pub output: Option<PathBuf>,
    pub plot_output: Option<PathBuf>,
}

fn default_step() -> f64 {
    2.0
}

fn default_sampler() -> Sampler {
    Sampler::Grid
}

fn default_y_cap() -> f64 {
    SamplerConfig::default().y_cap
}

impl ExperimentConfig {
    pub fn new(group: &str, n_min: usize, n_max: usize) -> Self {
        ExperimentConfig {
            group: group.to_string(),
            n_min,
            n_max,
            step: default_step(),
            sampler: default_sampler(),
            seed: 0,
            y_cap: default_y_cap(),
            output: None,
            plot_output: None,
        }
    }

    pub fn validate(&self) -> Result<SubgroupSpec> {
        if self.n_min < 2 {
            return Err(Error::InvalidArgument(format!(
                "n_min must be at least 2, got {}",
                self.n_min
            )));
        }
        if self.n_max < self.n_min {
            return Err(Error::InvalidArgument("n_max is below n_min".into()));
        }
        if !(self.step > 1.0) || !self.step.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "step must exceed 1, got {}",
                self.step
            )));
        }
        self.group.parse()
    }

    /// `n_min, ⌈n_min·step⌉, …` up to `n_max`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut n = self.n_min;
        while n <= self.n_max {
            out.push(n);
            let next = ((n as f64) * self.step).round() as usize;
            n = next.max(n + 1);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub distinct: usize,
    pub quadruples: u128,
    pub cs_bound: f64,
    /// `N / (μ ln N)`.
    pub n_over_mu_ln_n: f64,
    /// `distinct · μ · ln N / N`.
    pub ratio: f64,
}

impl ExperimentRow {
    fn new(n: usize, mu: usize, stats: &metrics::DistanceStats) -> Self {
        let ln_n = (n as f64).ln();
        ExperimentRow {
            n,
            distinct: stats.distinct,
            quadruples: stats.quadruples,
            cs_bound: stats.bound_f64(),
            n_over_mu_ln_n: n as f64 / (mu as f64 * ln_n),
            ratio: stats.distinct as f64 * mu as f64 * ln_n / n as f64,
        }
    }
}

/// One row per size; point sets for different sizes share the seed, so
/// smaller sets are prefixes of larger ones.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    let spec = config.validate()?;
    let metric = SurfaceMetric::new(&spec)?;
    let sampler = SamplerConfig {
        kind: config.sampler,
        y_cap: config.y_cap,
        ..SamplerConfig::default()
    };
    let sizes = config.sizes();
    let largest = *sizes.last().unwrap_or(&0);
    let points = sampling::sample_points(&spec, largest, &sampler, config.seed)?;
    sizes
        .into_iter()
        .map(|n| {
            let stats = metrics::distance_stats_with(&points[..n], &metric)?;
            Ok(ExperimentRow::new(stats.n, spec.index(), &stats))
        })
        .collect()
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.10e}")
}

/// CSV with the schema line, the column line and one line per row.
pub fn to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = format!("{CSV_SCHEMA}\n{CSV_COLUMNS}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.distinct,
            r.quadruples,
            fmt_f64(r.cs_bound),
            fmt_f64(r.n_over_mu_ln_n),
            fmt_f64(r.ratio)
        );
    }
    out
}

/// [`to_csv`] plus natural-log columns for plotting.
pub fn emit_plot_data(rows: &[ExperimentRow]) -> String {
    let mut out = format!("{CSV_SCHEMA}\n{PLOT_COLUMNS}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.distinct,
            r.quadruples,
            fmt_f64(r.cs_bound),
            fmt_f64(r.n_over_mu_ln_n),
            fmt_f64(r.ratio),
            fmt_f64((r.n as f64).ln()),
            fmt_f64((r.distinct as f64).ln()),
            fmt_f64((r.quadruples as f64).ln())
        );
    }
    out
}
