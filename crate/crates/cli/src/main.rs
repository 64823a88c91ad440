mod bundled;
mod config;
mod output;
mod runner;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rankone_core::{BuilderParams, Limits};

use config::{Construction, ExperimentConfig};
use runner::{AuditParams, ConfigReport, Status};

#[derive(Debug, Parser)]
#[command(
    name = "rankone",
    version,
    about = "Exact multiple recurrence experiments on rank-one towers"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Deepest column any computation may build.
    #[arg(long, global = true)]
    depth_cap: Option<usize>,
    /// Largest descendant set a single measure may enumerate.
    #[arg(long, global = true)]
    cardinality_budget: Option<u64>,
    /// Worker threads (all cores by default).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiments of a config file or of bundled configs.
    Run {
        /// Path to a JSON config.
        config: Option<PathBuf>,
        /// Name of a bundled config.
        #[arg(long, conflicts_with = "config")]
        bundled: Option<String>,
        /// Run every bundled config.
        #[arg(long, conflicts_with_all = ["config", "bundled"])]
        all_bundled: bool,
        /// Output directory (default `out/<name>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled configs.
    List,
    /// Decide both orders between two vectors, given as comma lists.
    Order {
        #[arg(allow_hyphen_values = true)]
        v: String,
        #[arg(allow_hyphen_values = true)]
        w: String,
    },
    /// Cross-check the exact kernel against the interval oracle.
    Audit {
        /// Config whose construction to audit.
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        bundled: Option<String>,
        #[arg(long, default_value_t = 5)]
        max_depth: usize,
        #[arg(long, default_value_t = 3)]
        max_column: usize,
        #[arg(long, default_value_t = 4096)]
        height_cap: u64,
        #[arg(long, default_value_t = 16)]
        level_sample: u64,
    },
}

fn limits(global: &Global, config: Option<&ExperimentConfig>) -> Limits {
    let mut l = Limits::default();
    if let Some(c) = config {
        if let Some(d) = c.limits.depth_cap {
            l.depth_cap = d;
        }
        if let Some(b) = c.limits.cardinality_budget {
            l.cardinality_budget = b;
        }
    }
    if let Some(d) = global.depth_cap {
        l.depth_cap = d;
    }
    if let Some(b) = global.cardinality_budget {
        l.cardinality_budget = b;
    }
    l
}

fn load(path: Option<&Path>, bundled: Option<&str>) -> Result<(ExperimentConfig, String)> {
    match (path, bundled) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let config = ExperimentConfig::parse(&text).with_context(|| format!("in {}", p.display()))?;
            Ok((config, p.display().to_string()))
        }
        (None, Some(name)) => Ok((bundled::load(name)?, format!("bundled:{name}"))),
        (None, None) => bail!("give a config path or --bundled NAME"),
    }
}

/// Prints a line; a closed pipe (`rankone list | head`) is not an error.
fn say(line: impl std::fmt::Display) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn print_report(report: &ConfigReport) {
    say(format_args!("{} [{}]", report.name, status_word(report.status)));
    for e in &report.experiments {
        say(format_args!(
            "  {:<5} {} ({}): {}",
            status_word(e.status),
            e.id,
            e.kind,
            e.summary
        ));
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Error => "ERROR",
    }
}

fn run_one(global: &Global, config: &ExperimentConfig, source: &str, out: &Path) -> Result<ConfigReport> {
    let limits = limits(global, Some(config));
    let started = output::now();
    let clock = Instant::now();
    let report = runner::run_config(config, &limits)?;
    output::write(out, config, &report, &limits, source, &started, clock.elapsed())?;
    print_report(&report);
    Ok(report)
}

fn execute(cli: Cli) -> Result<u8> {
    if let Some(t) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Run {
            config,
            bundled,
            all_bundled,
            out,
        } => {
            let mut reports = Vec::new();
            if all_bundled {
                let root = out.unwrap_or_else(|| PathBuf::from("out"));
                for name in bundled::NAMES {
                    let config = bundled::load(name)?;
                    reports.push(run_one(
                        &cli.global,
                        &config,
                        &format!("bundled:{name}"),
                        &root.join(name),
                    )?);
                }
            } else {
                let (config, source) = load(config.as_deref(), bundled.as_deref())?;
                let dir = out
                    .or_else(|| config.output.dir.clone())
                    .unwrap_or_else(|| Path::new("out").join(&config.name));
                reports.push(run_one(&cli.global, &config, &source, &dir)?);
            }
            Ok(reports.iter().map(|r| r.exit_code()).max().unwrap_or(0) as u8)
        }
        Command::List => {
            for name in bundled::NAMES {
                let config = bundled::load(name)?;
                say(format_args!(
                    "{name:<24} {:<24} {}",
                    config.construction.label(),
                    config.claim
                ));
            }
            Ok(0)
        }
        Command::Order { v, w } => {
            let parse = |s: &str| -> Result<Vec<i64>> {
                s.split(',')
                    .map(|x| x.trim().parse::<i64>().with_context(|| format!("bad component `{x}`")))
                    .collect()
            };
            let data = runner::compare(&parse(&v)?, &parse(&w)?)?;
            say(serde_json::to_string_pretty(&data)?);
            Ok(0)
        }
        Command::Audit {
            config,
            bundled,
            max_depth,
            max_column,
            height_cap,
            level_sample,
        } => {
            let (construction, limits) = if config.is_none() && bundled.is_none() {
                (
                    Construction::Builder(BuilderParams::Example42 {}),
                    limits(&cli.global, None),
                )
            } else {
                let (c, _) = load(config.as_deref(), bundled.as_deref())?;
                let l = limits(&cli.global, Some(&c));
                (c.construction, l)
            };
            let spec = construction.build()?;
            let params = AuditParams {
                max_depth,
                max_column,
                height_cap,
                level_sample,
                shifts: None,
            };
            let (cases, mismatches) = runner::oracle_audit(&spec, &limits, &params)?;
            for m in &mismatches {
                say(format_args!("disagreement: {m}"));
            }
            say(format_args!(
                "{}: {cases} cases, {} disagreements",
                spec.name(),
                mismatches.len()
            ));
            Ok(if mismatches.is_empty() { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
