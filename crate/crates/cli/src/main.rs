//! `modsurf` command-line interface. Every subcommand prints one JSON document
//! on stdout.
//!
//! Exit codes: 0 on success, 1 when a verification fails or nothing was
//! found, 2 on bad input.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use modsurf::experiment::{emit_plot_data, to_csv};
use modsurf::metrics::SurfaceMetric;
use modsurf::search::SearchConfig;
use modsurf::{
    cover_fo, cover_fu, distance_stats, enumerate_ball, equilateral_search, run_experiment,
    sample_points, surface_distance_oracle, verify_cover, BallQuery, DistanceKey, ExperimentConfig,
    ModularElement, Sampler, SamplerConfig, SubgroupSpec, UHPoint,
};

#[derive(Parser)]
#[command(
    name = "modsurf",
    version,
    about = "Distances and distinct-distance counts on modular surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Surface distance between two points.
    Distance {
        #[arg(long, default_value = "full")]
        group: SubgroupSpec,
        #[arg(long)]
        p: UHPoint,
        #[arg(long)]
        q: UHPoint,
        #[arg(long, value_enum, default_value_t = Method::Cover)]
        method: Method,
    },
    /// Finite cover of a region of the fundamental domain.
    Cover {
        #[arg(long, default_value = "full")]
        group: SubgroupSpec,
        #[arg(long, value_enum)]
        region: RegionArg,
        /// Check the cover against the orbit search on this many random pairs.
        #[arg(long)]
        verify: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Group elements g with cosh d(center, g·source) ≤ H.
    Enumerate {
        #[arg(long, default_value = "full")]
        group: SubgroupSpec,
        #[arg(long)]
        center: UHPoint,
        #[arg(long)]
        source: UHPoint,
        #[arg(long = "cosh")]
        cosh_radius: f64,
    },
    /// Distinct-distance statistics of a point file (one `x,y` per line).
    Stats {
        #[arg(long, default_value = "full")]
        group: SubgroupSpec,
        #[arg(long)]
        points: PathBuf,
        /// Write the distance histogram as CSV.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Seeded random points of the fundamental domain.
    Sample {
        #[arg(long, default_value = "full")]
        group: SubgroupSpec,
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "grid")]
        sampler: Sampler,
        #[arg(long)]
        y_cap: Option<f64>,
    },
    /// Search for k points at equal pairwise distance d.
    Equilateral {
        #[arg(long, default_value = "full")]
        group: SubgroupSpec,
        #[arg(short = 'k', long)]
        k: usize,
        #[arg(short = 'd', long)]
        d: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Sweep point-set sizes as described by a TOML file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Cover,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionArg {
    Fu,
    Fo,
}

/// Marks a run that completed but did not verify.
#[derive(Debug)]
struct Unverified(String);

impl std::fmt::Display for Unverified {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Unverified {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            emit(&serde_json::to_string_pretty(&out).expect("json"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let Some(Unverified(out)) = e.downcast_ref::<Unverified>() {
                emit(out);
                return ExitCode::from(1);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Ignores a closed stdout.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn elements_json(elements: &[ModularElement]) -> Value {
    elements
        .iter()
        .map(|g| Value::String(g.to_string()))
        .collect()
}

fn key_json(k: &DistanceKey) -> Value {
    json!({
        "distance": k.distance(),
        "cosh": k.cosh(),
        "two_cosh": k.two_cosh(),
        "exact_two_cosh": k.exact().map(|e| e.to_string()),
    })
}

fn fail(value: Value) -> anyhow::Error {
    Unverified(serde_json::to_string_pretty(&value).expect("json")).into()
}

fn run(command: Command) -> Result<Value> {
    match command {
        Command::Distance {
            group,
            p,
            q,
            method,
        } => {
            let key = match method {
                Method::Cover => SurfaceMetric::new(&group)?.distance(&p, &q)?,
                Method::Oracle => surface_distance_oracle(&p, &q, &group)?,
            };
            let mut out = key_json(&key);
            out["group"] = json!(group);
            Ok(out)
        }
        Command::Cover {
            group,
            region,
            verify,
            seed,
        } => {
            let cover = match region {
                RegionArg::Fu => cover_fu(&group),
                RegionArg::Fo => cover_fo(&group)?,
            };
            let mut out = json!({
                "group": group,
                "region": cover.region.name(),
                "size": cover.len(),
                "elements": elements_json(&cover.elements),
            });
            if let Some(samples) = verify {
                let report = verify_cover(&cover, samples, seed)?;
                let pass = report.pass;
                out["verification"] = serde_json::to_value(report)?;
                if !pass {
                    return Err(fail(out));
                }
            }
            Ok(out)
        }
        Command::Enumerate {
            group,
            center,
            source,
            cosh_radius,
        } => {
            let elements =
                enumerate_ball(&BallQuery::new(group.clone(), center, source, cosh_radius))?;
            Ok(
                json!({ "group": group, "count": elements.len(), "elements": elements_json(&elements) }),
            )
        }
        Command::Stats {
            group,
            points,
            histogram,
        } => {
            let pts = read_points(&points)?;
            let stats = distance_stats(&pts, &group)?;
            if stats.duplicates > 0 {
                eprintln!(
                    "warning: {} duplicate points on the surface were dropped",
                    stats.duplicates
                );
            }
            if let Some(path) = histogram {
                let mut csv = String::from("two_cosh,exact_two_cosh,ordered_pairs\n");
                for (k, m) in &stats.multiplicities {
                    let exact = k.exact().map(|e| e.to_string()).unwrap_or_default();
                    csv.push_str(&format!("{:.15e},{exact},{m}\n", k.two_cosh()));
                }
                write(&path, &csv)?;
            }
            let mut out = serde_json::to_value(&stats)?;
            out["group"] = json!(group);
            out["cauchy_schwarz"] = json!(stats.cauchy_schwarz_holds());
            Ok(out)
        }
        Command::Sample {
            group,
            n,
            seed,
            sampler,
            y_cap,
        } => {
            let mut config = SamplerConfig::new(sampler);
            if let Some(cap) = y_cap {
                config.y_cap = cap;
            }
            let pts = sample_points(&group, n, &config, seed)?;
            Ok(json!({ "group": group, "seed": seed, "points": pts }))
        }
        Command::Equilateral {
            group,
            k,
            d,
            seed,
            budget,
        } => {
            let mut config = SearchConfig {
                seed,
                ..SearchConfig::default()
            };
            if let Some(b) = budget {
                config.budget = b;
            }
            match equilateral_search(&group, k, d, &config)? {
                Some(c) => Ok(json!({ "group": group, "found": true, "candidate": c })),
                None => Err(fail(
                    json!({ "group": group, "found": false, "k": k, "d": d }),
                )),
            }
        }
        Command::Experiment { config } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg: ExperimentConfig =
                toml::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
            let rows = run_experiment(&cfg)?;
            if let Some(path) = &cfg.output {
                write(path, &to_csv(&rows))?;
            }
            if let Some(path) = &cfg.plot_output {
                write(path, &emit_plot_data(&rows))?;
            }
            Ok(json!({ "group": cfg.group, "seed": cfg.seed, "rows": rows }))
        }
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_points(path: &Path) -> Result<Vec<UHPoint>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p = line
            .parse()
            .with_context(|| format!("{}:{}: bad point `{line}`", path.display(), i + 1))?;
        out.push(p);
    }
    if out.len() < 2 {
        bail!("{} holds fewer than two points", path.display());
    }
    Ok(out)
}
