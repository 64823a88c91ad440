//! Result files. `results.json` and the CSVs depend only on the config and
//! limits; timings and thread counts go to `run-meta.json`.

use std::fs;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use rankone_core::Limits;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::runner::ConfigReport;

/// Seconds since the Unix epoch.
pub fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn write(
    dir: &Path,
    config: &ExperimentConfig,
    report: &ConfigReport,
    limits: &Limits,
    source: &str,
    started: &u64,
    elapsed: Duration,
) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let results = json!({
        "name": report.name,
        "description": config.description,
        "claim": report.claim,
        "construction": {
            "label": config.construction.label(),
            "name": report.construction["name"],
            "metadata": report.construction["metadata"],
        },
        "limits": { "depth_cap": limits.depth_cap, "cardinality_budget": limits.cardinality_budget },
        "status": report.status,
        "experiments": report.experiments,
    });
    let path = dir.join("results.json");
    fs::write(&path, serde_json::to_string_pretty(&results)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;

    for e in &report.experiments {
        let Some(rows) = &e.series else { continue };
        let path = dir.join(format!("{}.csv", e.id));
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        if rows.is_empty() {
            w.write_record(["n", "shifts", "mu_lower", "mu_upper"])?;
        }
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }

    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "source": source,
        "threads": rayon::current_num_threads(),
        "started_unix": started,
        "elapsed_ms": elapsed.as_millis() as u64,
        "experiments": report.experiments.iter().map(|e| json!({ "id": e.id, "elapsed_ms": e.elapsed_ms as u64 })).collect::<Vec<_>>(),
    });
    let path = dir.join("run-meta.json");
    fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
