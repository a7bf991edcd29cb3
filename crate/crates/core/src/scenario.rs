//! Ready-made tracking problems: a generic radial field, range-only escort of
//! a moving target, and a gaussian plume carried by a uniform flow.

use nalgebra::Vector2;
use serde::Serialize;

use crate::control::ControllerParams;
use crate::error::{Error, Result};
use crate::field::{
    make_advected_field, make_radial_field, AdvectionSpec, CenterPath, FieldHandle, Point2,
    Profile, RadialSpec,
};
use crate::vehicle::{RobotParams, RobotState};
use crate::verify::{
    advection_parameters, check_initial_discs, necessary_radial, sufficient_radial,
    sup_radial_turn_demand, AdvectionBounds, AdvectionDerived, DiscCheckOptions, FeasibilityReport,
    FieldBounds, OperationalZone, ProfileKnowledge, RadialBounds, Relation,
};

/// Samples used to check declared path bounds and profile extremes.
const DENSE_SAMPLES: usize = 20_001;

/// A center path together with declared bounds on its speed and acceleration,
/// checked on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetPath {
    pub path: CenterPath,
    pub v0: f64,
    pub a0: f64,
    pub horizon: f64,
}

impl TargetPath {
    pub fn new(path: CenterPath, v0: f64, a0: f64, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) || !(v0 >= 0.0) || !(a0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "target bounds need v0, a0 >= 0 and a positive horizon, got v0 = {v0}, a0 = {a0}, horizon = {horizon}"
            )));
        }
        let slack = 1.0 + 1e-12;
        for i in 0..DENSE_SAMPLES {
            let t = horizon * i as f64 / (DENSE_SAMPLES - 1) as f64;
            let s = path.state(t);
            if s.velocity.norm() > v0 * slack {
                return Err(Error::BoundViolation(format!(
                    "target speed {} exceeds declared v0 = {v0} at t = {t}",
                    s.velocity.norm()
                )));
            }
            if s.acceleration.norm() > a0 * slack {
                return Err(Error::BoundViolation(format!(
                    "target acceleration {} exceeds declared a0 = {a0} at t = {t}",
                    s.acceleration.norm()
                )));
            }
        }
        Ok(Self {
            path,
            v0,
            a0,
            horizon,
        })
    }

    /// Uses the path's own analytic bounds.
    pub fn with_path_bounds(path: CenterPath, horizon: f64) -> Result<Self> {
        let (v0, a0) = (path.speed_bound(), path.accel_bound());
        Self::new(path, v0, a0, horizon)
    }
}

/// Gain and linear-zone half-width of the steering law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tuning {
    pub gamma: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Radial,
    Escort,
    Advection,
}

/// Verifier operation bound to a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Necessary condition at the smallest isoline radius.
    NecessaryRadial,
    /// The same condition at the inner radius of the sufficient condition.
    EnhancedNecessary,
    SufficientRadial,
    AdvectionParameters,
    InitialDiscs,
}

/// Where a bound used by the checks comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub symbol: String,
    pub value: f64,
    pub source: String,
}

/// The radial structure behind a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSetup {
    pub profile: Profile,
    pub intensity: f64,
    pub center: CenterPath,
    pub bounds: RadialBounds,
    pub knowledge: ProfileKnowledge,
    /// Inner and outer radius of the annulus the robot must stay in.
    pub r_minus: f64,
    pub r_plus: f64,
    /// Smallest radius of the tracked isoline over the intensity bounds.
    pub level_radius_lo: f64,
    pub advection: Option<(AdvectionBounds, AdvectionDerived)>,
}

impl RadialSetup {
    /// Distance from `r` to the field center at time `t`.
    pub fn range(&self, t: f64, r: Point2) -> f64 {
        (r - self.center.state(t).position).norm()
    }

    /// Closed-form bounds on the isoline characteristics over the annulus.
    pub fn field_bounds(&self, robot: &RobotParams) -> FieldBounds {
        let (v0, a0) = (self.bounds.v0, self.bounds.a0);
        let (slope, ratio) = profile_extremes(&self.knowledge, self.r_minus, self.r_plus);
        let (sup, _) = sup_radial_turn_demand(robot.v, v0, a0, self.r_minus);
        FieldBounds {
            b_rho: 1.0 / (self.bounds.c_minus * slope),
            delta_lambda: robot.v - v0,
            delta_u: robot.u_bar - sup,
            b_lambda: v0,
            b_tau: 0.0,
            b_n: ratio,
            b_kappa: 1.0 / self.r_minus,
            b_v: 0.0,
            b_alpha: a0 + v0 * v0 / self.r_minus,
        }
    }
}

fn profile_extremes(knowledge: &ProfileKnowledge, lo: f64, hi: f64) -> (f64, f64) {
    match knowledge {
        ProfileKnowledge::Exact(profile) => {
            let (mut slope, mut ratio) = (f64::INFINITY, 0.0f64);
            for i in 0..DENSE_SAMPLES {
                let z = lo + (hi - lo) * i as f64 / (DENSE_SAMPLES - 1) as f64;
                if let Some(p) = profile.eval(z) {
                    slope = slope.min(p.df.abs());
                    ratio = ratio.max(p.d2f.abs() / p.df.abs());
                }
            }
            (slope, ratio)
        }
        ProfileKnowledge::Estimates {
            slope_lower,
            ratio_upper,
            ..
        } => (*slope_lower, *ratio_upper),
    }
}

/// A complete tracking problem. Immutable once built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub field: FieldHandle,
    pub zone: OperationalZone,
    pub robot: RobotParams,
    pub ctrl: ControllerParams,
    pub initial: RobotState,
    pub checks: Vec<Check>,
    pub provenance: Vec<Provenance>,
    pub radial: RadialSetup,
    /// Largest isoline density over the zone.
    pub rho_max: f64,
}

impl Scenario {
    /// Level offset one held full turn can cause in one step:
    /// `rho_max v u_bar dt / gamma`.
    pub fn chattering_quantum(&self, dt: f64) -> f64 {
        self.rho_max * self.robot.v * self.robot.u_bar * dt / self.ctrl.gamma
    }

    /// Allowed `|d - d0|` once converged.
    pub fn level_band(&self, dt: f64) -> f64 {
        self.ctrl.delta + self.chattering_quantum(dt)
    }

    /// Radii whose level lies within [`Scenario::level_band`] of `d0`.
    pub fn range_band(&self, dt: f64) -> (f64, f64) {
        let band = self.level_band(dt);
        let c = self.radial.intensity;
        let d0 = self.ctrl.d0;
        let profile = &self.radial.profile;
        let (dom_lo, dom_hi) = profile.domain();
        // Higher level -> smaller radius for a decreasing profile.
        let inner = profile.inverse((d0 + band) / c).unwrap_or(dom_lo);
        let outer = profile.inverse((d0 - band) / c).unwrap_or(dom_hi);
        (inner, outer)
    }

    /// Radius of the tracked isoline at the true intensity.
    pub fn tracked_radius(&self) -> f64 {
        self.radial
            .profile
            .inverse(self.ctrl.d0 / self.radial.intensity)
            .expect("checked at build time")
    }

    pub fn field_bounds(&self) -> FieldBounds {
        self.radial.field_bounds(&self.robot)
    }

    /// Runs every bound check and merges the reports.
    pub fn verify(&self) -> Result<FeasibilityReport> {
        let setup = &self.radial;
        let rb = &setup.bounds;
        let (v, u_bar) = (self.robot.v, self.robot.u_bar);
        let mut report = FeasibilityReport::new();
        for check in &self.checks {
            match check {
                Check::NecessaryRadial => {
                    report.absorb(
                        "necessary",
                        necessary_radial(v, rb.v0, rb.a0, u_bar, setup.level_radius_lo),
                    );
                }
                Check::EnhancedNecessary => {
                    report.absorb(
                        "enhanced",
                        necessary_radial(v, rb.v0, rb.a0, u_bar, setup.r_minus),
                    );
                }
                Check::SufficientRadial => {
                    report.absorb(
                        "",
                        sufficient_radial(
                            rb,
                            &self.robot,
                            &self.ctrl,
                            &setup.knowledge,
                            self.ctrl.d0,
                        )?,
                    );
                }
                Check::AdvectionParameters => {
                    if let Some((_, derived)) = &setup.advection {
                        let mut sub = FeasibilityReport::new();
                        sub.derive("level_radius_lo", derived.level_radius_lo)
                            .derive("r_minus", derived.r_minus)
                            .derive("r_plus", derived.r_plus)
                            .derive("slope_lower", derived.slope_lower)
                            .derive("b_n", derived.b_n)
                            .derive("delta_u", derived.delta_u)
                            .derive("mu_star", derived.mu_star(self.ctrl.mu, rb.c_minus));
                        report.absorb("advection", sub);
                    }
                }
                Check::InitialDiscs => {
                    if u_bar > 0.0 {
                        report.absorb(
                            "",
                            check_initial_discs(
                                self.field.as_ref(),
                                &self.initial,
                                &self.robot,
                                &self.zone,
                                &DiscCheckOptions::default(),
                            )?,
                        );
                    } else {
                        report
                            .check("init.turning", u_bar, Relation::Greater, 0.0)
                            .note("a robot that cannot turn has no initial discs");
                    }
                }
            }
        }
        Ok(report)
    }
}

/// Description of a radial field whose center follows `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialScenarioSpec {
    pub name: String,
    pub profile: Profile,
    pub intensity: f64,
    pub center: TargetPath,
    /// Known bounds `c- <= c <= c+`; defaults to the true intensity.
    pub intensity_bounds: Option<(f64, f64)>,
    /// Known bounds on the initial distance to the center; defaults to the
    /// true initial distance.
    pub start_bounds: Option<(f64, f64)>,
    pub d0: f64,
}

fn start_bounds(declared: Option<(f64, f64)>, actual: f64) -> Result<(f64, f64)> {
    let (lo, hi) = declared.unwrap_or((actual, actual));
    if !(lo > 0.0 && lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "initial distance bounds [{lo}, {hi}] must be positive and ordered"
        )));
    }
    // Relative slack for bounds computed from the same geometry.
    let eps = 1e-12 * hi;
    if actual < lo - eps || actual > hi + eps {
        return Err(Error::BoundViolation(format!(
            "initial distance {actual} outside declared [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi))
}

struct Parts {
    name: String,
    kind: ScenarioKind,
    field: FieldHandle,
    profile: Profile,
    intensity: f64,
    center: CenterPath,
    bounds: RadialBounds,
    knowledge: ProfileKnowledge,
    advection: Option<(AdvectionBounds, AdvectionDerived)>,
    checks: Vec<Check>,
    provenance: Vec<Provenance>,
}

fn assemble(
    parts: Parts,
    d0: f64,
    robot: RobotParams,
    tuning: Tuning,
    initial: RobotState,
) -> Result<Scenario> {
    let ctrl = ControllerParams::new(d0, tuning.gamma, tuning.delta)?;
    let Parts {
        name,
        kind,
        field,
        profile,
        intensity,
        center,
        bounds,
        knowledge,
        advection,
        checks,
        mut provenance,
    } = parts;
    // The true level must be reachable.
    profile.inverse(d0 / intensity)?;
    let report = sufficient_radial(&bounds, &robot, &ctrl, &knowledge, d0)?;
    let get = |k: &str| {
        report
            .derived_value(k)
            .expect("sufficient_radial derives it")
    };
    let (r_minus, r_plus) = (get("r_minus"), get("r_plus"));
    let level_radius_lo = get("level_radius_lo");

    let (dom_lo, _) = profile.domain();
    let value_at = |z: f64| profile.eval(z).map(|p| intensity * p.f);
    let d_minus = value_at(r_plus).unwrap_or(f64::NEG_INFINITY).min(d0);
    let d_plus = value_at(r_minus.max(dom_lo))
        .unwrap_or(f64::INFINITY)
        .max(d0);
    let zone = OperationalZone::new(d_minus, d_plus)?;

    let (lo, hi) = (r_minus.max(dom_lo).max(1e-9), r_plus);
    let slope_max = (0..DENSE_SAMPLES)
        .filter_map(|i| profile.eval(lo + (hi - lo) * i as f64 / (DENSE_SAMPLES - 1) as f64))
        .map(|p| p.df.abs())
        .fold(0.0f64, f64::max);
    let rho_max = intensity * slope_max;

    for (symbol, value) in [
        ("r_minus", r_minus),
        ("r_plus", r_plus),
        ("d_minus", d_minus),
        ("d_plus", d_plus),
        ("rho_max", rho_max),
    ] {
        provenance.push(Provenance {
            symbol: symbol.into(),
            value,
            source: "derived".into(),
        });
    }
    Ok(Scenario {
        name,
        kind,
        field,
        zone,
        robot,
        ctrl,
        initial,
        checks,
        provenance,
        radial: RadialSetup {
            profile,
            intensity,
            center,
            bounds,
            knowledge,
            r_minus,
            r_plus,
            level_radius_lo,
            advection,
        },
        rho_max,
    })
}

fn declared(symbol: &str, value: f64) -> Provenance {
    Provenance {
        symbol: symbol.into(),
        value,
        source: "declared".into(),
    }
}

/// Generic radial field `c f(|r - r0(t)|)` tracked at level `d0`.
pub fn build_radial(
    spec: RadialScenarioSpec,
    robot: RobotParams,
    tuning: Tuning,
    initial: RobotState,
) -> Result<Scenario> {
    build_radial_as(spec, ScenarioKind::Radial, robot, tuning, initial)
}

fn build_radial_as(
    spec: RadialScenarioSpec,
    kind: ScenarioKind,
    robot: RobotParams,
    tuning: Tuning,
    initial: RobotState,
) -> Result<Scenario> {
    let (c_minus, c_plus) = spec
        .intensity_bounds
        .unwrap_or((spec.intensity, spec.intensity));
    if !(c_minus <= spec.intensity && spec.intensity <= c_plus) {
        return Err(Error::BoundViolation(format!(
            "intensity {} outside declared [{c_minus}, {c_plus}]",
            spec.intensity
        )));
    }
    // Well-posed only if the level is attained for every admissible intensity.
    spec.profile.inverse(spec.d0 / c_minus)?;
    spec.profile.inverse(spec.d0 / c_plus)?;
    let field = make_radial_field(RadialSpec {
        profile: spec.profile.clone(),
        intensity: spec.intensity,
        center: spec.center.path.clone(),
        working_interval: None,
    })?;
    let actual = (initial.position() - spec.center.path.state(0.0).position).norm();
    let (r_in_minus, r_in_plus) = start_bounds(spec.start_bounds, actual)?;
    let bounds = RadialBounds {
        r_in_minus,
        r_in_plus,
        v0: spec.center.v0,
        a0: spec.center.a0,
        c_minus,
        c_plus,
    };
    let provenance = vec![
        declared("v0", spec.center.v0),
        declared("a0", spec.center.a0),
        declared("c_minus", c_minus),
        declared("c_plus", c_plus),
        declared("r_in_minus", r_in_minus),
        declared("r_in_plus", r_in_plus),
    ];
    assemble(
        Parts {
            name: spec.name,
            kind,
            field,
            profile: spec.profile.clone(),
            intensity: spec.intensity,
            center: spec.center.path,
            bounds,
            knowledge: ProfileKnowledge::Exact(spec.profile),
            advection: None,
            checks: vec![
                Check::NecessaryRadial,
                Check::EnhancedNecessary,
                Check::SufficientRadial,
                Check::InitialDiscs,
            ],
            provenance,
        },
        spec.d0,
        robot,
        tuning,
        initial,
    )
}

/// Keep range `range` to a moving target using range readings only:
/// `D = -|r - r0(t)|`, `d0 = -range`.
pub fn build_escort(
    target: TargetPath,
    range: f64,
    robot: RobotParams,
    tuning: Tuning,
    initial: RobotState,
    start_bounds: Option<(f64, f64)>,
) -> Result<Scenario> {
    if !(range > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "escort range must be positive, got {range}"
        )));
    }
    build_radial_as(
        RadialScenarioSpec {
            name: "escort".into(),
            profile: Profile::LinearDecay,
            intensity: 1.0,
            center: target,
            intensity_bounds: None,
            start_bounds,
            d0: -range,
        },
        ScenarioKind::Escort,
        robot,
        tuning,
        initial,
    )
}

/// What is known about an advected plume besides its true parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlumeUncertainty {
    pub sigma_bounds: (f64, f64),
    pub c_minus: f64,
    pub c_plus: Option<f64>,
    /// Bound on the flow speed.
    pub flow_speed: f64,
    /// Known bounds on the initial distance to the plume center; defaults to
    /// the true initial distance.
    pub start_bounds: Option<(f64, f64)>,
}

impl PlumeUncertainty {
    /// No uncertainty: every bound equals the true value.
    pub fn exact(spec: &AdvectionSpec) -> Self {
        Self {
            sigma_bounds: (spec.sigma, spec.sigma),
            c_minus: spec.intensity,
            c_plus: Some(spec.intensity),
            flow_speed: Vector2::from(spec.flow).norm(),
            start_bounds: None,
        }
    }
}

/// Track the boundary `D = d0` of a gaussian plume transported by a uniform flow.
pub fn build_advection(
    spec: AdvectionSpec,
    known: PlumeUncertainty,
    d0: f64,
    robot: RobotParams,
    tuning: Tuning,
    initial: RobotState,
) -> Result<Scenario> {
    if !(d0 > 0.0 && d0 < known.c_minus) {
        return Err(Error::NonsensicalLevel {
            d0,
            c_lo: known.c_minus,
        });
    }
    let flow = Vector2::from(spec.flow);
    let (s_lo, s_hi) = known.sigma_bounds;
    let consistent = s_lo <= spec.sigma
        && spec.sigma <= s_hi
        && known.c_minus <= spec.intensity
        && known.c_plus.is_none_or(|c| spec.intensity <= c)
        && flow.norm() <= known.flow_speed * (1.0 + 1e-12);
    if !consistent {
        return Err(Error::BoundViolation(format!(
            "plume {spec:?} violates its declared bounds {known:?}"
        )));
    }
    let field = make_advected_field(spec)?;
    let radial = spec.radial_spec()?;
    let actual = (initial.position() - Vector2::from(spec.center)).norm();
    let (r_in_minus, r_in_plus) = start_bounds(known.start_bounds, actual)?;
    let plume = AdvectionBounds {
        sigma_minus: s_lo,
        sigma_plus: s_hi,
        c_minus: known.c_minus,
        c_plus: known.c_plus,
        flow_speed: known.flow_speed,
        r_in_minus,
        r_in_plus,
    };
    let derived = advection_parameters(&plume, &robot, d0)?;
    let provenance = vec![
        declared("sigma_minus", s_lo),
        declared("sigma_plus", s_hi),
        declared("c_minus", known.c_minus),
        declared("c_plus", known.c_plus.unwrap_or(f64::INFINITY)),
        declared("flow_speed", known.flow_speed),
        declared("r_in_minus", r_in_minus),
        declared("r_in_plus", r_in_plus),
    ];
    assemble(
        Parts {
            name: "advection".into(),
            kind: ScenarioKind::Advection,
            field,
            profile: radial.profile,
            intensity: spec.intensity,
            center: radial.center,
            bounds: derived.radial_bounds(&plume),
            knowledge: derived.knowledge(),
            advection: Some((plume, derived)),
            checks: vec![
                Check::NecessaryRadial,
                Check::AdvectionParameters,
                Check::SufficientRadial,
                Check::InitialDiscs,
            ],
            provenance,
        },
        d0,
        robot,
        tuning,
        initial,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn robot() -> RobotParams {
        RobotParams::new(1.0, 2.0).unwrap()
    }

    fn tuning() -> Tuning {
        Tuning {
            gamma: 1.0,
            delta: 0.06,
        }
    }

    fn moving_target(horizon: f64) -> TargetPath {
        TargetPath::new(
            CenterPath::linear(Vector2::zeros(), Vector2::new(0.5, 0.0)),
            0.5,
            0.0,
            horizon,
        )
        .unwrap()
    }

    #[test]
    fn declared_bounds_are_checked() {
        let path = CenterPath::CircularOrbit {
            center: [0.0, 0.0],
            radius: 2.0,
            rate: 0.5,
            phase: 0.0,
        };
        assert!(TargetPath::new(path.clone(), 1.0, 0.5, 20.0).is_ok());
        assert!(matches!(
            TargetPath::new(path.clone(), 0.9, 0.5, 20.0),
            Err(Error::BoundViolation(_))
        ));
        assert!(matches!(
            TargetPath::new(path, 1.0, 0.4, 20.0),
            Err(Error::BoundViolation(_))
        ));
    }

    #[test]
    fn escort_field_is_minus_distance() {
        let s = build_escort(
            moving_target(100.0),
            5.0,
            robot(),
            tuning(),
            RobotState::new(6.5, 0.0, 0.0),
            None,
        )
        .unwrap();
        assert_eq!(s.ctrl.d0, -5.0);
        for k in 0..50 {
            let t = 0.7 * k as f64;
            let r = Vector2::new((k as f64).sin() * 9.0, (k as f64 * 0.3).cos() * 7.0);
            let dist = (r - Vector2::new(0.5 * t, 0.0)).norm();
            assert!((s.field.value(t, r).unwrap() + dist).abs() < 1e-12);
        }
        assert_eq!(s.tracked_radius(), 5.0);
        assert!(s.zone.contains(-5.0));
    }

    #[test]
    fn escort_reduces_to_unit_density() {
        let s = build_escort(
            moving_target(100.0),
            5.0,
            robot(),
            tuning(),
            RobotState::new(6.5, 0.0, 0.0),
            Some((6.0, 7.0)),
        )
        .unwrap();
        let b = s.field_bounds();
        assert_eq!(b.b_rho, 1.0);
        assert_eq!(b.b_n, 0.0);
        assert_eq!(s.rho_max, 1.0);
        let offset = (2.0 + 4.0 * PI * 0.5) / 2.0;
        assert_eq!(s.radial.r_minus, 6.0 - offset);
        assert_eq!(s.radial.r_plus, 7.0 + offset);
        let (lo, hi) = s.range_band(1e-3);
        let band = 0.06 + 1.0 * 1.0 * 2.0 * 1e-3;
        assert!((lo - (5.0 - band)).abs() < 1e-12 && (hi - (5.0 + band)).abs() < 1e-12);
        let report = s.verify().unwrap();
        assert!(report.satisfied, "{report}");
    }

    #[test]
    fn start_outside_declared_bounds() {
        let err = build_escort(
            moving_target(100.0),
            5.0,
            robot(),
            tuning(),
            RobotState::new(8.0, 0.0, 0.0),
            Some((6.0, 7.0)),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BoundViolation(_)));
    }

    #[test]
    fn radial_level_out_of_range() {
        let spec = RadialScenarioSpec {
            name: "g".into(),
            profile: Profile::gaussian(1.0).unwrap(),
            intensity: 1.0,
            center: TargetPath::new(CenterPath::fixed(Vector2::zeros()), 0.0, 0.0, 1.0).unwrap(),
            intensity_bounds: None,
            start_bounds: None,
            d0: 1.5,
        };
        let err =
            build_radial(spec, robot(), tuning(), RobotState::new(2.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::LevelOutOfRange { .. }));
    }

    #[test]
    fn radial_linear_profile_matches_escort() {
        let target = moving_target(100.0);
        let start = RobotState::new(6.5, 0.0, 0.0);
        let escort = build_escort(target.clone(), 5.0, robot(), tuning(), start, None).unwrap();
        let radial = build_radial(
            RadialScenarioSpec {
                name: "r".into(),
                profile: Profile::LinearDecay,
                intensity: 1.0,
                center: target,
                intensity_bounds: None,
                start_bounds: None,
                d0: -5.0,
            },
            robot(),
            tuning(),
            start,
        )
        .unwrap();
        assert_eq!(escort.zone, radial.zone);
        assert_eq!(escort.radial, radial.radial);
        assert_eq!(
            escort.verify().unwrap().margins,
            radial.verify().unwrap().margins
        );
    }

    #[test]
    fn still_plume_isoline_radius() {
        let spec = AdvectionSpec {
            center: [0.0, 0.0],
            sigma: 1.0,
            intensity: 1.0,
            flow: [0.0, 0.0],
        };
        let s = build_advection(
            spec,
            PlumeUncertainty::exact(&spec),
            (-0.5f64).exp(),
            robot(),
            tuning(),
            RobotState::new(3.0, 0.0, 0.0),
        )
        .unwrap();
        assert!((s.tracked_radius() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plume_level_above_intensity() {
        let spec = AdvectionSpec {
            center: [0.0, 0.0],
            sigma: 1.0,
            intensity: 1.0,
            flow: [0.1, 0.0],
        };
        let err = build_advection(
            spec,
            PlumeUncertainty::exact(&spec),
            1.0,
            robot(),
            tuning(),
            RobotState::new(3.0, 0.0, 0.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonsensicalLevel { .. }));
    }
}
