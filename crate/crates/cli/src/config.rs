//! Run configuration: one TOML file per run, `key = value` under dotted sections.

use std::fmt;
use std::path::Path;

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use isotrack::control::MeasureMode;
use isotrack::field::{AdvectionSpec, CenterPath, Point2, Profile};
use isotrack::scenario::{
    build_advection, build_escort, build_radial, PlumeUncertainty, RadialScenarioSpec, Scenario,
    TargetPath, Tuning,
};
use isotrack::sim::SimConfig;
use isotrack::vehicle::{RobotParams, RobotState};

/// Why a configuration could not be turned into a run.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Read(String),
    Parse(String),
    /// Required keys that are absent, as dotted paths.
    Missing(Vec<String>),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Read(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse(m) => write!(f, "malformed config: {m}"),
            ConfigError::Missing(keys) => {
                write!(f, "config is missing required fields: {}", keys.join(", "))
            }
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Raw {
    scenario: RawScenario,
    robot: RawRobot,
    controller: RawController,
    sim: RawSim,
    initial: RawInitial,
    target: RawTarget,
    field: RawField,
    escort: RawEscort,
    plume: RawPlume,
    bounds: RawBounds,
    // Read by the sweep driver.
    #[allow(dead_code)]
    sweep: Option<toml::Value>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawScenario {
    kind: Option<String>,
    name: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawRobot {
    v: Option<f64>,
    u_bar: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawController {
    gamma: Option<f64>,
    delta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawSim {
    horizon: Option<f64>,
    dt: Option<f64>,
    measure: Option<String>,
    h: Option<f64>,
    seed: Option<u64>,
    diagnostics: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawInitial {
    x: Option<f64>,
    y: Option<f64>,
    theta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawTarget {
    kind: Option<String>,
    position: Option<[f64; 2]>,
    origin: Option<[f64; 2]>,
    velocity: Option<[f64; 2]>,
    center: Option<[f64; 2]>,
    radius: Option<f64>,
    rate: Option<f64>,
    phase: Option<f64>,
    heading: Option<f64>,
    speed: Option<f64>,
    amplitude: Option<f64>,
    frequency: Option<f64>,
    v0: Option<f64>,
    a0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawField {
    profile: Option<String>,
    sigma: Option<f64>,
    intensity: Option<f64>,
    d0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawEscort {
    range: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawPlume {
    center: Option<[f64; 2]>,
    sigma: Option<f64>,
    intensity: Option<f64>,
    flow: Option<[f64; 2]>,
    d0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawBounds {
    start: Option<[f64; 2]>,
    intensity: Option<[f64; 2]>,
    sigma: Option<[f64; 2]>,
    c_minus: Option<f64>,
    c_plus: Option<f64>,
    flow_speed: Option<f64>,
}

/// Collects absent keys so they can all be reported at once.
#[derive(Default)]
struct Required(Vec<String>);

impl Required {
    fn get<T: Clone + Default>(&mut self, value: &Option<T>, key: &str) -> T {
        match value {
            Some(v) => v.clone(),
            None => {
                self.0.push(key.to_string());
                T::default()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSpec {
    Radial {
        profile: Profile,
        intensity: f64,
        d0: f64,
        target: TargetSpec,
        intensity_bounds: Option<(f64, f64)>,
    },
    Escort {
        target: TargetSpec,
        range: f64,
    },
    Advection {
        plume: AdvectionSpec,
        known: PlumeUncertainty,
        d0: f64,
    },
}

/// A center path with optional declared speed and acceleration bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    pub path: CenterPath,
    pub v0: Option<f64>,
    pub a0: Option<f64>,
}

impl TargetSpec {
    fn bind(&self, horizon: f64) -> isotrack::Result<TargetPath> {
        match (self.v0, self.a0) {
            (None, None) => TargetPath::with_path_bounds(self.path.clone(), horizon),
            (v0, a0) => TargetPath::new(
                self.path.clone(),
                v0.unwrap_or(self.path.speed_bound()),
                a0.unwrap_or(self.path.accel_bound()),
                horizon,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialPose {
    Given(RobotState),
    /// Drawn from the start band with the run seed.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub scenario: ScenarioSpec,
    /// Bounds on the initial distance to the field center.
    pub start_bounds: (f64, f64),
    pub robot: RobotParams,
    pub tuning: Tuning,
    pub sim: SimConfig,
    pub initial: InitialPose,
    pub seed: Option<u64>,
}

pub fn read_table(path: &Path) -> Result<toml::Table, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Read(format!("{}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| ConfigError::Parse(e.to_string()))
}

/// Sets `key` (dotted path) in `table`, creating sections as needed.
pub fn set_dotted(
    table: &mut toml::Table,
    key: &str,
    value: toml::Value,
) -> Result<(), ConfigError> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| ConfigError::Invalid(format!("empty key in override `{key}`")))?;
    let mut cur = table;
    for p in parts {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| ConfigError::Invalid(format!("`{p}` in `{key}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn pair(v: [f64; 2]) -> (f64, f64) {
    (v[0], v[1])
}

fn target_spec(t: &RawTarget, need: &mut Required) -> Result<TargetSpec, ConfigError> {
    let kind = need.get(&t.kind, "target.kind");
    let path = match kind.as_str() {
        "static" => CenterPath::Static {
            position: need.get(&t.position, "target.position"),
        },
        "constant-velocity" => CenterPath::ConstantVelocity {
            origin: need.get(&t.origin, "target.origin"),
            velocity: need.get(&t.velocity, "target.velocity"),
        },
        "orbit" => CenterPath::CircularOrbit {
            center: need.get(&t.center, "target.center"),
            radius: need.get(&t.radius, "target.radius"),
            rate: need.get(&t.rate, "target.rate"),
            phase: t.phase.unwrap_or(0.0),
        },
        "slalom" => CenterPath::Slalom {
            origin: need.get(&t.origin, "target.origin"),
            heading: need.get(&t.heading, "target.heading"),
            speed: need.get(&t.speed, "target.speed"),
            amplitude: need.get(&t.amplitude, "target.amplitude"),
            frequency: need.get(&t.frequency, "target.frequency"),
        },
        "" => CenterPath::fixed(Vector2::zeros()),
        other => {
            return Err(ConfigError::Invalid(format!(
                "target.kind `{other}` is not one of static, constant-velocity, orbit, slalom"
            )))
        }
    };
    Ok(TargetSpec {
        path,
        v0: t.v0,
        a0: t.a0,
    })
}

fn measure_mode(sim: &RawSim, need: &mut Required) -> Result<MeasureMode, ConfigError> {
    match sim.measure.as_deref().unwrap_or("exact") {
        "exact" => Ok(MeasureMode::Exact),
        "difference" => Ok(MeasureMode::FiniteDifference {
            h: need.get(&sim.h, "sim.h"),
        }),
        other => Err(ConfigError::Invalid(format!(
            "sim.measure `{other}` is not one of exact, difference"
        ))),
    }
}

impl RunConfig {
    pub fn from_table(table: toml::Table) -> Result<Self, ConfigError> {
        let raw: Raw = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        let mut need = Required::default();

        let kind = need.get(&raw.scenario.kind, "scenario.kind");
        let v = need.get(&raw.robot.v, "robot.v");
        let u_bar = need.get(&raw.robot.u_bar, "robot.u_bar");
        let gamma = need.get(&raw.controller.gamma, "controller.gamma");
        let delta = need.get(&raw.controller.delta, "controller.delta");
        let horizon = need.get(&raw.sim.horizon, "sim.horizon");
        let dt = need.get(&raw.sim.dt, "sim.dt");
        let measure = measure_mode(&raw.sim, &mut need)?;
        let start = need.get(&raw.bounds.start, "bounds.start");

        let init = &raw.initial;
        let initial = match (init.x, init.y, init.theta) {
            (Some(x), Some(y), Some(theta)) => InitialPose::Given(RobotState::new(x, y, theta)),
            (None, None, None) if raw.sim.seed.is_some() => InitialPose::Random,
            (None, None, None) => {
                need.0.push(
                    "initial.x, initial.y, initial.theta (or sim.seed for a random start)".into(),
                );
                InitialPose::Random
            }
            _ => {
                need.get(&init.x, "initial.x");
                need.get(&init.y, "initial.y");
                need.get(&init.theta, "initial.theta");
                InitialPose::Random
            }
        };

        let scenario = match kind.as_str() {
            "radial" => {
                let f = &raw.field;
                let profile = match f.profile.as_deref() {
                    Some("gaussian") => Profile::gaussian(need.get(&f.sigma, "field.sigma")).ok(),
                    Some("linear") => Some(Profile::LinearDecay),
                    Some(other) => {
                        return Err(ConfigError::Invalid(format!(
                            "field.profile `{other}` is not one of gaussian, linear"
                        )))
                    }
                    None => {
                        need.0.push("field.profile".into());
                        None
                    }
                };
                let spec = ScenarioSpec::Radial {
                    profile: profile.unwrap_or(Profile::LinearDecay),
                    intensity: f.intensity.unwrap_or(1.0),
                    d0: need.get(&f.d0, "field.d0"),
                    target: target_spec(&raw.target, &mut need)?,
                    intensity_bounds: raw.bounds.intensity.map(pair),
                };
                if f.profile.as_deref() == Some("gaussian")
                    && f.sigma.is_some_and(|s| !(s > 0.0 && s.is_finite()))
                {
                    return Err(ConfigError::Invalid("field.sigma must be positive".into()));
                }
                spec
            }
            "escort" => ScenarioSpec::Escort {
                target: target_spec(&raw.target, &mut need)?,
                range: need.get(&raw.escort.range, "escort.range"),
            },
            "advection" => {
                let p = &raw.plume;
                let b = &raw.bounds;
                ScenarioSpec::Advection {
                    plume: AdvectionSpec {
                        center: p.center.unwrap_or([0.0, 0.0]),
                        sigma: need.get(&p.sigma, "plume.sigma"),
                        intensity: need.get(&p.intensity, "plume.intensity"),
                        flow: need.get(&p.flow, "plume.flow"),
                    },
                    known: PlumeUncertainty {
                        sigma_bounds: pair(need.get(&b.sigma, "bounds.sigma")),
                        c_minus: need.get(&b.c_minus, "bounds.c_minus"),
                        c_plus: b.c_plus,
                        flow_speed: need.get(&b.flow_speed, "bounds.flow_speed"),
                        start_bounds: b.start.map(pair),
                    },
                    d0: need.get(&p.d0, "plume.d0"),
                }
            }
            "" => ScenarioSpec::Escort {
                target: target_spec(&raw.target, &mut Required::default())?,
                range: 0.0,
            },
            other => {
                return Err(ConfigError::Invalid(format!(
                    "scenario.kind `{other}` is not one of radial, escort, advection"
                )))
            }
        };

        if !need.0.is_empty() {
            return Err(ConfigError::Missing(need.0));
        }

        let invalid = |e: isotrack::Error| ConfigError::Invalid(e.to_string());
        let robot = RobotParams::new(v, u_bar).map_err(invalid)?;
        let sim = SimConfig {
            measure,
            diagnostics: raw.sim.diagnostics.unwrap_or(false),
            ..SimConfig::new(horizon, dt).map_err(invalid)?
        };
        sim.validate().map_err(invalid)?;
        if !(gamma > 0.0 && delta > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "controller.gamma and controller.delta must be positive, got {gamma} and {delta}"
            )));
        }
        let start_bounds = pair(start);
        if !(0.0 <= start_bounds.0 && start_bounds.0 <= start_bounds.1) {
            return Err(ConfigError::Invalid(format!(
                "bounds.start must be an ordered pair of distances, got {start:?}"
            )));
        }
        Ok(Self {
            name: raw.scenario.name.unwrap_or_else(|| kind.clone()),
            scenario,
            start_bounds,
            robot,
            tuning: Tuning { gamma, delta },
            sim,
            initial,
            seed: raw.sim.seed,
        })
    }

    /// Field center at `t = 0`.
    pub fn center_at_start(&self) -> Point2 {
        match &self.scenario {
            ScenarioSpec::Radial { target, .. } | ScenarioSpec::Escort { target, .. } => {
                target.path.state(0.0).position
            }
            ScenarioSpec::Advection { plume, .. } => Vector2::from(plume.center),
        }
    }

    pub fn initial_state(&self) -> RobotState {
        match self.initial {
            InitialPose::Given(s) => s,
            InitialPose::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed.unwrap_or(0));
                let (lo, hi) = self.start_bounds;
                let radius = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
                let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                let c = self.center_at_start();
                RobotState::new(
                    c.x + radius * phi.cos(),
                    c.y + radius * phi.sin(),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            }
        }
    }

    pub fn build(&self) -> isotrack::Result<Scenario> {
        let initial = self.initial_state();
        let start = Some(self.start_bounds);
        match &self.scenario {
            ScenarioSpec::Radial {
                profile,
                intensity,
                d0,
                target,
                intensity_bounds,
            } => build_radial(
                RadialScenarioSpec {
                    name: self.name.clone(),
                    profile: profile.clone(),
                    intensity: *intensity,
                    center: target.bind(self.sim.horizon)?,
                    intensity_bounds: *intensity_bounds,
                    start_bounds: start,
                    d0: *d0,
                },
                self.robot,
                self.tuning,
                initial,
            ),
            ScenarioSpec::Escort { target, range } => build_escort(
                target.bind(self.sim.horizon)?,
                *range,
                self.robot,
                self.tuning,
                initial,
                start,
            ),
            ScenarioSpec::Advection { plume, known, d0 } => build_advection(
                *plume,
                PlumeUncertainty {
                    start_bounds: start,
                    ..*known
                },
                *d0,
                self.robot,
                self.tuning,
                initial,
            ),
        }
        .map(|mut s| {
            s.name = self.name.clone();
            s
        })
    }
}
