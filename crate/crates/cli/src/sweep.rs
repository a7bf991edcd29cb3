//! Parallel sweeps over one config key and/or seeded random starts.
//!
//! ```toml
//! [sweep]
//! key = "controller.delta"
//! values = [0.02, 0.05, 0.1]
//! seeds = 4
//! ```
//!
//! Every combination runs in its own `run-NNN` directory. With `seeds`, each
//! run draws its start from the start band and any `[initial]` pose is ignored.

use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use crate::config::{set_dotted, ConfigError, RunConfig};
use crate::runner::{simulate, Failure, RunOptions};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SweepSpec {
    key: Option<String>,
    values: Option<Vec<toml::Value>>,
    seeds: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct PlannedRun {
    pub index: usize,
    pub value: Option<toml::Value>,
    pub seed: Option<u64>,
    pub table: toml::Table,
    pub config: RunConfig,
}

/// Expands the `[sweep]` table into validated run configs.
pub fn plan(
    mut table: toml::Table,
    seed_override: Option<u64>,
) -> Result<Vec<PlannedRun>, ConfigError> {
    let spec: SweepSpec = match table.remove("sweep") {
        Some(v) => v
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(format!("sweep: {e}")))?,
        None => SweepSpec::default(),
    };
    let values: Vec<Option<toml::Value>> = match (&spec.key, spec.values) {
        (Some(_), Some(vals)) if !vals.is_empty() => vals.into_iter().map(Some).collect(),
        (None, None) => vec![None],
        (Some(_), _) => return Err(ConfigError::Missing(vec!["sweep.values".into()])),
        (None, Some(_)) => return Err(ConfigError::Missing(vec!["sweep.key".into()])),
    };
    let base_seed = seed_override
        .or_else(|| {
            table
                .get("sim")
                .and_then(|s| s.get("seed"))
                .and_then(toml::Value::as_integer)
                .map(|s| s as u64)
        })
        .unwrap_or(0);
    let seeds: Vec<Option<u64>> = match spec.seeds {
        Some(0) => {
            return Err(ConfigError::Invalid(
                "sweep.seeds must be at least 1".into(),
            ))
        }
        Some(n) => (0..n).map(|i| Some(base_seed + i)).collect(),
        None => vec![seed_override],
    };

    let mut runs = Vec::new();
    for value in &values {
        for &seed in &seeds {
            let mut t = table.clone();
            if let (Some(key), Some(v)) = (&spec.key, value) {
                set_dotted(&mut t, key, v.clone())?;
            }
            if let Some(s) = seed {
                if spec.seeds.is_some() {
                    t.remove("initial");
                }
                set_dotted(&mut t, "sim.seed", toml::Value::Integer(s as i64))?;
            }
            let config = RunConfig::from_table(t.clone())?;
            runs.push(PlannedRun {
                index: runs.len(),
                value: value.clone(),
                seed,
                table: t,
                config,
            });
        }
    }
    Ok(runs)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub index: usize,
    pub value: String,
    pub seed: Option<u64>,
    pub status: &'static str,
    pub exit_code: i32,
    pub feasible: Option<bool>,
    pub converged: Option<bool>,
    pub first_entry: Option<f64>,
    pub in_band_fraction: Option<f64>,
    pub final_error: Option<f64>,
    pub stayed_in_zone: Option<bool>,
}

pub fn run_dir(out: &Path, index: usize) -> std::path::PathBuf {
    out.join(format!("run-{index:03}"))
}

fn execute_one(run: &PlannedRun, out: &Path, opts: RunOptions) -> SweepRow {
    let dir = run_dir(out, run.index);
    let mut row = SweepRow {
        index: run.index,
        value: run
            .value
            .as_ref()
            .map_or_else(String::new, |v| v.to_string()),
        seed: run.seed,
        status: "ok",
        exit_code: 0,
        feasible: None,
        converged: None,
        first_entry: None,
        in_band_fraction: None,
        final_error: None,
        stayed_in_zone: None,
    };
    let saved = std::fs::create_dir_all(&dir).and_then(|_| {
        std::fs::write(
            dir.join("config.toml"),
            toml::to_string(&run.table).unwrap_or_default(),
        )
    });
    if saved.is_err() {
        row.status = "io-error";
        row.exit_code = 1;
        return row;
    }
    match simulate(&run.config, &dir, opts) {
        Ok((v, s)) => {
            row.feasible = Some(v.report.satisfied);
            row.converged = Some(s.converged);
            row.first_entry = s.first_entry;
            row.in_band_fraction = Some(s.in_band_fraction);
            row.final_error = Some(s.final_error);
            row.stayed_in_zone = Some(s.stayed_in_zone);
        }
        Err(f) => {
            row.exit_code = f.exit_code();
            row.status = match f {
                Failure::Config(_) => "config-error",
                Failure::Build(_) => "build-error",
                Failure::Abort(_) => "aborted",
                Failure::Infeasible(_) => "infeasible",
                Failure::Other(_) => "io-error",
            };
            if matches!(f, Failure::Infeasible(_) | Failure::Abort(_)) {
                row.feasible = Some(!matches!(f, Failure::Infeasible(_)));
            }
        }
    }
    row
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Runs every planned config in parallel and writes `sweep.csv` in `out`.
pub fn execute(runs: &[PlannedRun], out: &Path, opts: RunOptions) -> anyhow::Result<Vec<SweepRow>> {
    std::fs::create_dir_all(out)?;
    let rows: Vec<SweepRow> = runs.par_iter().map(|r| execute_one(r, out, opts)).collect();
    let mut w = csv::Writer::from_path(out.join("sweep.csv"))?;
    w.write_record([
        "run",
        "value",
        "seed",
        "status",
        "exit_code",
        "feasible",
        "converged",
        "first_entry",
        "in_band_fraction",
        "final_error",
        "stayed_in_zone",
    ])?;
    for r in &rows {
        w.write_record([
            r.index.to_string(),
            r.value.clone(),
            opt(r.seed),
            r.status.to_string(),
            r.exit_code.to_string(),
            opt(r.feasible),
            opt(r.converged),
            opt(r.first_entry),
            opt(r.in_band_fraction),
            opt(r.final_error),
            opt(r.stayed_in_zone),
        ])?;
    }
    w.flush()?;
    Ok(rows)
}
