use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::json;

use crate::config::RunConfig;
use crate::experiments::{scheme_params, Outcome};

/// Write `<experiment>.jsonl` and `<experiment>.csv` into `dir`.
pub fn write(dir: &Path, config: &RunConfig, outcome: &Outcome) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let name = config.experiment.name();
    let provenance = json!({
        "experiment": name,
        "seed": config.seed,
        "epsilon": config.epsilon,
        "trials": config.trials,
        "scheme": scheme_params(config),
        "config_hash": config.content_hash(),
        "version": env!("CARGO_PKG_VERSION"),
    });

    let mut jsonl = String::new();
    for (game, body) in &outcome.records {
        let line = json!({ "game": game, "provenance": provenance, "result": body });
        jsonl.push_str(&serde_json::to_string(&line)?);
        jsonl.push('\n');
    }

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(&outcome.csv_header)?;
    for row in &outcome.csv_rows {
        csv.write_record(row)?;
    }
    let csv = csv.into_inner().context("cannot flush CSV")?;

    let jsonl_path = dir.join(format!("{name}.jsonl"));
    let csv_path = dir.join(format!("{name}.csv"));
    fs::write(&jsonl_path, jsonl).with_context(|| format!("cannot write {}", jsonl_path.display()))?;
    fs::write(&csv_path, csv).with_context(|| format!("cannot write {}", csv_path.display()))?;
    Ok((jsonl_path, csv_path))
}
