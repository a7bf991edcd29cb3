//! One run: build, verify, simulate, write artifacts.

use std::fmt;
use std::path::Path;

use isotrack::scenario::Scenario;
use isotrack::sim::{run_with, ClosedLoop, SimAbort, Summary};
use isotrack::verify::FeasibilityReport;

use crate::config::{ConfigError, RunConfig};
use crate::output::{metadata, report_json, summary_json, write_json, TrajectoryWriter};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const REPORT_FILE: &str = "report.json";

/// A failed command, mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Build(isotrack::Error),
    Abort(SimAbort),
    Infeasible(Vec<String>),
    Other(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Other(_) => 1,
            Failure::Config(_) => 2,
            Failure::Build(_) => 3,
            Failure::Abort(_) => 4,
            Failure::Infeasible(_) => 5,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "{e}"),
            Failure::Build(e) => write!(f, "scenario build failed: {e}"),
            Failure::Abort(a) => write!(f, "{a}"),
            Failure::Infeasible(keys) => {
                write!(f, "verifier reports infeasible: {}", keys.join(", "))
            }
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub require_feasible: bool,
    pub diagnostics: bool,
}

pub struct Verified {
    pub scenario: Scenario,
    pub report: FeasibilityReport,
}

pub fn verify(cfg: &RunConfig) -> Result<Verified, Failure> {
    let scenario = cfg.build().map_err(Failure::Build)?;
    let report = scenario.verify().map_err(Failure::Build)?;
    Ok(Verified { scenario, report })
}

fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| anyhow::anyhow!("cannot create output directory {}: {e}", dir.display()))
}

pub fn write_report(dir: &Path, v: &Verified) -> Result<(), Failure> {
    ensure_dir(dir)?;
    write_json(&dir.join(REPORT_FILE), &report_json(&v.scenario, &v.report))?;
    Ok(())
}

/// Runs the closed loop into `dir`. On an in-run abort the rows produced so far
/// and a summary naming the abort are still written.
pub fn simulate(
    cfg: &RunConfig,
    dir: &Path,
    opts: RunOptions,
) -> Result<(Verified, Summary), Failure> {
    let v = verify(cfg)?;
    write_report(dir, &v)?;
    if opts.require_feasible && !v.report.satisfied {
        let keys = v
            .report
            .violations()
            .iter()
            .map(|k| k.to_string())
            .collect();
        return Err(Failure::Infeasible(keys));
    }
    let mut sim = cfg.sim;
    sim.diagnostics |= opts.diagnostics;
    let meta = metadata(&v.scenario, &sim, cfg.seed);
    let mut writer = TrajectoryWriter::create(&dir.join(TRAJECTORY_FILE), &meta, sim.diagnostics)?;
    let setup = ClosedLoop::for_scenario(&v.scenario, sim.dt);
    let mut write_error = None;
    let outcome = run_with(&setup, &sim, |row| {
        if write_error.is_none() {
            if let Err(e) = writer.write(row) {
                write_error = Some(e);
            }
        }
    });
    if let Some(e) = write_error {
        return Err(Failure::Other(e));
    }
    writer.finish()?;
    let summary_path = dir.join(SUMMARY_FILE);
    match outcome {
        Ok(summary) => {
            write_json(
                &summary_path,
                &summary_json(&v.scenario, &v.report, Some(&summary), None, cfg.seed),
            )?;
            Ok((v, summary))
        }
        Err(abort) => {
            write_json(
                &summary_path,
                &summary_json(&v.scenario, &v.report, None, Some(&abort), cfg.seed),
            )?;
            Err(Failure::Abort(abort))
        }
    }
}
