//! Sample-and-hold closed loop: measure, steer, integrate.

use serde::Serialize;

use crate::control::{
    control, sliding_surface, ControllerParams, DifferenceSensor, MeasureMode, Measurement,
};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::quantities;
use crate::scenario::Scenario;
use crate::vehicle::{step, RobotParams, RobotState};
use crate::verify::OperationalZone;

/// Fraction of post-entry samples that must lie in the band for a run to
/// count as converged.
pub const CONVERGED_FRACTION: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub horizon: f64,
    pub dt: f64,
    pub measure: MeasureMode,
    /// Log lambda, rho, kappa, omega at the robot.
    pub diagnostics: bool,
}

impl SimConfig {
    pub fn new(horizon: f64, dt: f64) -> Result<Self> {
        let cfg = Self {
            horizon,
            dt,
            measure: MeasureMode::Exact,
            diagnostics: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step must be positive, got {}",
                self.dt
            )));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return Err(Error::InvalidParameter(format!(
                "horizon {} must be finite and at least one step {}",
                self.horizon, self.dt
            )));
        }
        if let MeasureMode::FiniteDifference { h } = self.measure {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "difference step must be positive, got {h}"
                )));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

/// Isoline characteristics logged at the robot's position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub lambda: f64,
    pub rho: f64,
    pub kappa: f64,
    pub omega: f64,
}

/// One logged sample. `u` is the turn rate held over `[t, t + dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub d: f64,
    pub d_dot: f64,
    pub u: f64,
    pub s: f64,
    pub diagnostics: Option<Diagnostics>,
}

/// Everything the loop needs.
#[derive(Debug, Clone, Copy)]
pub struct ClosedLoop<'a> {
    pub field: &'a dyn ScalarField,
    pub robot: RobotParams,
    pub ctrl: ControllerParams,
    pub initial: RobotState,
    pub zone: Option<OperationalZone>,
    /// Allowed `|d - d0|` once converged.
    pub band: f64,
}

impl<'a> ClosedLoop<'a> {
    pub fn for_scenario(scenario: &'a Scenario, dt: f64) -> Self {
        Self {
            field: scenario.field.as_ref(),
            robot: scenario.robot,
            ctrl: scenario.ctrl,
            initial: scenario.initial,
            zone: Some(scenario.zone),
            band: scenario.level_band(dt),
        }
    }
}

/// Entry into a band and how well the signal stays there afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandStats {
    pub first_entry: Option<f64>,
    /// Share of samples from the first entry on that are inside the band.
    pub in_band_fraction: f64,
    pub final_error: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BandTracker {
    first_entry: Option<f64>,
    after: usize,
    inside: usize,
    last_error: f64,
}

impl BandTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, t: f64, error: f64, band: f64) {
        let inside = error.abs() <= band;
        if self.first_entry.is_none() && inside {
            self.first_entry = Some(t);
        }
        if self.first_entry.is_some() {
            self.after += 1;
            self.inside += inside as usize;
        }
        self.last_error = error.abs();
    }

    pub fn stats(&self) -> BandStats {
        BandStats {
            first_entry: self.first_entry,
            in_band_fraction: if self.after == 0 {
                0.0
            } else {
                self.inside as f64 / self.after as f64
            },
            final_error: self.last_error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub final_error: f64,
    pub first_entry: Option<f64>,
    pub in_band_fraction: f64,
    pub band: f64,
    pub stayed_in_zone: bool,
    pub zone_exit: Option<f64>,
    /// Entered the band and spent at least [`CONVERGED_FRACTION`] of the
    /// remaining samples in it.
    pub converged: bool,
    pub rows: usize,
}

/// A run stopped early by a field or integration error.
#[derive(Debug, Clone, PartialEq)]
pub struct SimAbort {
    pub t: f64,
    pub error: Error,
}

impl std::fmt::Display for SimAbort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "run aborted at t = {}: {}", self.t, self.error)
    }
}

impl std::error::Error for SimAbort {}

/// Runs the loop, handing each row to `on_row` as it is produced.
pub fn run_with<F>(
    setup: &ClosedLoop,
    config: &SimConfig,
    mut on_row: F,
) -> std::result::Result<Summary, SimAbort>
where
    F: FnMut(&TrajectoryRow),
{
    let abort = |t: f64| move |error: Error| SimAbort { t, error };
    config.validate().map_err(abort(0.0))?;
    let mut sensor = match config.measure {
        MeasureMode::Exact => None,
        MeasureMode::FiniteDifference { h } => Some(DifferenceSensor::new(h).map_err(abort(0.0))?),
    };
    let (v, dt) = (setup.robot.v, config.dt);
    let mut state = setup.initial;
    let mut band = BandTracker::new();
    let mut zone_exit = None;
    let n = config.steps();
    for k in 0..=n {
        let t = k as f64 * dt;
        let jet = setup
            .field
            .eval_jet(t, state.position())
            .map_err(abort(t))?;
        let d = jet.value;
        let d_dot = match sensor.as_mut() {
            None => jet.dt + v * jet.grad.dot(&state.heading()),
            Some(s) => s.update(t, d),
        };
        let m = Measurement { d, d_dot };
        let s = sliding_surface(&m, &setup.ctrl);
        let u = control(&m, &setup.ctrl, setup.robot.u_bar);
        let diagnostics = if config.diagnostics {
            let q = quantities(&jet).map_err(abort(t))?;
            Some(Diagnostics {
                lambda: q.lambda,
                rho: q.rho,
                kappa: q.kappa,
                omega: q.omega,
            })
        } else {
            None
        };
        on_row(&TrajectoryRow {
            t,
            x: state.x,
            y: state.y,
            theta: state.theta,
            d,
            d_dot,
            u,
            s,
            diagnostics,
        });
        band.record(t, d - setup.ctrl.d0, setup.band);
        if zone_exit.is_none() && setup.zone.is_some_and(|z| !z.contains(d)) {
            zone_exit = Some(t);
        }
        if k < n {
            state = step(&state, u, &setup.robot, dt).map_err(abort(t))?;
        }
    }
    let stats = band.stats();
    Ok(Summary {
        final_error: stats.final_error,
        first_entry: stats.first_entry,
        in_band_fraction: stats.in_band_fraction,
        band: setup.band,
        stayed_in_zone: zone_exit.is_none(),
        zone_exit,
        converged: stats.first_entry.is_some() && stats.in_band_fraction >= CONVERGED_FRACTION,
        rows: n + 1,
    })
}

/// Runs the loop and keeps every row.
pub fn run(
    setup: &ClosedLoop,
    config: &SimConfig,
) -> std::result::Result<(Vec<TrajectoryRow>, Summary), SimAbort> {
    let mut rows = Vec::with_capacity(config.steps() + 1);
    let summary = run_with(setup, config, |r| rows.push(*r))?;
    Ok((rows, summary))
}
