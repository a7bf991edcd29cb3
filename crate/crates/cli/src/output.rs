//! Trajectory CSV files and run summaries.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use isotrack::control::MeasureMode;
use isotrack::scenario::Scenario;
use isotrack::sim::{Diagnostics, SimAbort, SimConfig, Summary, TrajectoryRow};
use isotrack::verify::FeasibilityReport;

pub const FORMAT_VERSION: u32 = 1;
pub const COLUMNS: [&str; 8] = ["t", "x", "y", "theta", "d", "d_dot", "u", "s"];
pub const DIAGNOSTIC_COLUMNS: [&str; 4] = ["lambda", "rho", "kappa", "omega"];

/// `#` comment lines written ahead of the CSV header.
pub fn metadata(scenario: &Scenario, sim: &SimConfig, seed: Option<u64>) -> Vec<(String, String)> {
    let (mode, h) = match sim.measure {
        MeasureMode::Exact => ("exact", "none".to_string()),
        MeasureMode::FiniteDifference { h } => ("difference", h.to_string()),
    };
    vec![
        ("format_version".into(), FORMAT_VERSION.to_string()),
        ("scenario".into(), scenario.name.clone()),
        ("dt".into(), sim.dt.to_string()),
        ("horizon".into(), sim.horizon.to_string()),
        ("measure".into(), mode.into()),
        ("h".into(), h),
        ("d0".into(), scenario.ctrl.d0.to_string()),
        ("gamma".into(), scenario.ctrl.gamma.to_string()),
        ("delta".into(), scenario.ctrl.delta.to_string()),
        ("u_bar".into(), scenario.robot.u_bar.to_string()),
        (
            "seed".into(),
            seed.map_or_else(|| "none".into(), |s| s.to_string()),
        ),
    ]
}

pub struct TrajectoryWriter {
    csv: csv::Writer<BufWriter<File>>,
    diagnostics: bool,
    record: Vec<String>,
}

impl TrajectoryWriter {
    pub fn create(path: &Path, meta: &[(String, String)], diagnostics: bool) -> Result<Self> {
        let file =
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut out = BufWriter::new(file);
        for (k, v) in meta {
            writeln!(out, "# {k} = {v}")?;
        }
        let mut csv = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = COLUMNS.to_vec();
        if diagnostics {
            header.extend(DIAGNOSTIC_COLUMNS);
        }
        csv.write_record(&header)?;
        Ok(Self {
            csv,
            diagnostics,
            record: Vec::with_capacity(12),
        })
    }

    /// Floats are written in shortest round-trip form, so reading them back
    /// gives the same bits.
    pub fn write(&mut self, row: &TrajectoryRow) -> Result<()> {
        self.record.clear();
        let base = [
            row.t, row.x, row.y, row.theta, row.d, row.d_dot, row.u, row.s,
        ];
        self.record.extend(base.iter().map(f64::to_string));
        if self.diagnostics {
            let d = row.diagnostics.unwrap_or(Diagnostics {
                lambda: f64::NAN,
                rho: f64::NAN,
                kappa: f64::NAN,
                omega: f64::NAN,
            });
            let extra = [d.lambda, d.rho, d.kappa, d.omega];
            self.record.extend(extra.iter().map(f64::to_string));
        }
        self.csv.write_record(&self.record)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.csv.flush()?;
        Ok(())
    }
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let diagnostics = match header.len() {
        8 => false,
        12 => true,
        n => bail!("{}: expected 8 or 12 columns, found {n}", path.display()),
    };
    let expected =
        COLUMNS.iter().chain(
            DIAGNOSTIC_COLUMNS
                .iter()
                .take(if diagnostics { 4 } else { 0 }),
        );
    if !header.iter().map(String::as_str).eq(expected.copied()) {
        bail!("{}: unexpected header {header:?}", path.display());
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let v = record
            .iter()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("{}: bad number in data row {}", path.display(), line + 1))?;
        rows.push(TrajectoryRow {
            t: v[0],
            x: v[1],
            y: v[2],
            theta: v[3],
            d: v[4],
            d_dot: v[5],
            u: v[6],
            s: v[7],
            diagnostics: diagnostics.then(|| Diagnostics {
                lambda: v[8],
                rho: v[9],
                kappa: v[10],
                omega: v[11],
            }),
        });
    }
    Ok(rows)
}

pub fn summary_json(
    scenario: &Scenario,
    report: &FeasibilityReport,
    summary: Option<&Summary>,
    abort: Option<&SimAbort>,
    seed: Option<u64>,
) -> serde_json::Value {
    serde_json::json!({
        "scenario": scenario.name,
        "kind": scenario.kind,
        "d0": scenario.ctrl.d0,
        "zone": scenario.zone,
        "initial": scenario.initial,
        "seed": seed,
        "feasible": report.satisfied,
        "violations": report.violations(),
        "summary": summary,
        "aborted": abort.map(|a| serde_json::json!({ "t": a.t, "error": a.error.to_string() })),
    })
}

pub fn report_json(scenario: &Scenario, report: &FeasibilityReport) -> serde_json::Value {
    serde_json::json!({
        "scenario": scenario.name,
        "kind": scenario.kind,
        "checks": scenario.checks,
        "provenance": scenario.provenance,
        "report": report,
    })
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}
