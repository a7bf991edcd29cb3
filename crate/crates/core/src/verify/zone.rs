//! Sampling-based estimates over the operational zone.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use rayon::prelude::*;
use serde::Serialize;

use super::limits::FieldBounds;
use super::{FeasibilityReport, OperationalZone, Relation};
use crate::error::{Error, Result};
use crate::field::{Point2, ScalarField};
use crate::geometry::{quantities, turn_demand, Side, GRAD_EPS};
use crate::vehicle::{initial_circle_disc, RobotParams, RobotState, TurnSign};

/// Names of the sampled magnitudes, in [`ZoneScan::extremes`] order. `rho` is
/// a minimum, the rest are maxima of absolute values; `turn` is the larger of
/// the two side turn demands.
pub const SCAN_NAMES: [&str; 9] = [
    "lambda", "rho", "kappa", "omega", "alpha", "v_rho", "tau_rho", "n_rho", "turn",
];

const RHO: usize = 1;

/// Regular space-time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZoneGrid {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub t: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
}

impl ZoneGrid {
    fn axis(range: (f64, f64), n: usize, i: usize) -> f64 {
        if n == 1 {
            range.0
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
        }
    }

    pub fn point(&self, i: usize, j: usize) -> Point2 {
        Vector2::new(
            Self::axis(self.x, self.nx, i),
            Self::axis(self.y, self.ny, j),
        )
    }

    pub fn time(&self, k: usize) -> f64 {
        Self::axis(self.t, self.nt, k)
    }
}

/// Sampled extremes of the isoline characteristics over the zone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZoneScan {
    /// Estimated bounds built from the raw extremes.
    pub bounds: FieldBounds,
    /// Per [`SCAN_NAMES`] entry: minimum for `rho`, maximum otherwise.
    pub extremes: [f64; 9],
    /// Largest change of each magnitude between neighbouring in-zone grid
    /// points. The true extreme can exceed the sampled one by about this much.
    pub tolerance: [f64; 9],
    pub rho_max: f64,
    pub samples: usize,
}

impl ZoneScan {
    fn bounds_from(extremes: &[f64; 9], robot: &RobotParams) -> FieldBounds {
        FieldBounds {
            b_rho: 1.0 / extremes[RHO],
            delta_lambda: robot.v - extremes[0],
            delta_u: robot.u_bar - extremes[8],
            b_lambda: extremes[0],
            b_tau: extremes[6],
            b_n: extremes[7],
            b_kappa: extremes[2],
            b_v: extremes[5],
            b_alpha: extremes[4],
        }
    }

    /// Bounds widened by the grid tolerance.
    pub fn padded_bounds(&self, robot: &RobotParams) -> FieldBounds {
        let mut padded = self.extremes;
        for (k, e) in padded.iter_mut().enumerate() {
            if k == RHO {
                *e = (*e - self.tolerance[k]).max(0.0);
            } else {
                *e += self.tolerance[k];
            }
        }
        Self::bounds_from(&padded, robot)
    }

    /// Compares requested bounds with what the samples show; a requested
    /// density bound below the sampled minimum density is flagged.
    pub fn check_requested(&self, requested: &FieldBounds) -> FeasibilityReport {
        let mut r = FeasibilityReport::new();
        let e = &self.extremes;
        r.check(
            "scan.rho",
            e[RHO],
            Relation::GreaterEq,
            1.0 / requested.b_rho,
        )
        .check("scan.lambda", e[0], Relation::LessEq, requested.b_lambda)
        .check("scan.kappa", e[2], Relation::LessEq, requested.b_kappa)
        .check("scan.alpha", e[4], Relation::LessEq, requested.b_alpha)
        .check("scan.v_rho", e[5], Relation::LessEq, requested.b_v)
        .check("scan.tau_rho", e[6], Relation::LessEq, requested.b_tau)
        .check("scan.n_rho", e[7], Relation::LessEq, requested.b_n)
        .note("sampled extremes are estimates, not guarantees");
        r
    }
}

type Sample = Option<[f64; 9]>;

fn sample_point(
    field: &dyn ScalarField,
    zone: &OperationalZone,
    robot: &RobotParams,
    t: f64,
    r: Point2,
) -> Result<Sample> {
    let jet = match field.eval_jet(t, r) {
        Ok(jet) => jet,
        Err(Error::DomainViolation { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if !zone.contains(jet.value) {
        return Ok(None);
    }
    if !(jet.grad.norm() >= GRAD_EPS) {
        return Err(Error::CriticalPointInZone { t, x: r.x, y: r.y });
    }
    let q = quantities(&jet)?;
    let v = robot.v;
    let turn = if q.lambda.abs() < v {
        let v_t = (v * v - q.lambda * q.lambda).sqrt();
        turn_demand(&q, v_t, Side::Plus).max(turn_demand(&q, v_t, Side::Minus))
    } else {
        f64::INFINITY
    };
    Ok(Some([
        q.lambda.abs(),
        q.rho,
        q.kappa.abs(),
        q.omega.abs(),
        q.alpha.abs(),
        q.v_rho.abs(),
        q.tau_rho.abs(),
        q.n_rho.abs(),
        turn,
    ]))
}

fn widen_jump(tol: &mut [f64; 9], a: &Sample, b: &Sample) {
    if let (Some(a), Some(b)) = (a, b) {
        for k in 0..9 {
            let jump = (a[k] - b[k]).abs();
            if jump.is_finite() {
                tol[k] = tol[k].max(jump);
            }
        }
    }
}

/// Time slices evaluated in parallel per batch; reduction order is fixed.
const SLICE_BATCH: usize = 16;

/// Samples the characteristics over the in-zone points of `grid`.
///
/// Points outside the field's domain are skipped. A critical point inside the
/// zone is an error.
pub fn scan_zone(
    field: &dyn ScalarField,
    zone: &OperationalZone,
    robot: &RobotParams,
    grid: &ZoneGrid,
) -> Result<ZoneScan> {
    if grid.nx == 0 || grid.ny == 0 || grid.nt == 0 {
        return Err(Error::EmptyGrid);
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let slice = |k: usize| -> Result<Vec<Sample>> {
        let t = grid.time(k);
        (0..nx * ny)
            .map(|idx| sample_point(field, zone, robot, t, grid.point(idx % nx, idx / nx)))
            .collect()
    };

    let mut extremes = [0.0f64; 9];
    extremes[RHO] = f64::INFINITY;
    let mut rho_max: f64 = 0.0;
    let mut tolerance = [0.0f64; 9];
    let mut samples = 0usize;
    let mut previous: Option<Vec<Sample>> = None;
    for start in (0..grid.nt).step_by(SLICE_BATCH) {
        let end = (start + SLICE_BATCH).min(grid.nt);
        let batch: Vec<Vec<Sample>> = (start..end)
            .into_par_iter()
            .map(slice)
            .collect::<Result<_>>()?;
        for current in batch {
            for (idx, s) in current.iter().enumerate() {
                let Some(values) = s else { continue };
                samples += 1;
                for k in 0..9 {
                    if k == RHO {
                        extremes[k] = extremes[k].min(values[k]);
                    } else {
                        extremes[k] = extremes[k].max(values[k]);
                    }
                }
                rho_max = rho_max.max(values[RHO]);
                let (i, j) = (idx % nx, idx / nx);
                if i + 1 < nx {
                    widen_jump(&mut tolerance, s, &current[idx + 1]);
                }
                if j + 1 < ny {
                    widen_jump(&mut tolerance, s, &current[idx + nx]);
                }
                if let Some(prev) = &previous {
                    widen_jump(&mut tolerance, s, &prev[idx]);
                }
            }
            previous = Some(current);
        }
    }
    if samples == 0 {
        return Err(Error::EmptyGrid);
    }
    Ok(ZoneScan {
        bounds: ZoneScan::bounds_from(&extremes, robot),
        extremes,
        tolerance,
        rho_max,
        samples,
    })
}

/// Total variation and net change of the gradient direction at a fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientRotation {
    pub total: f64,
    pub net: f64,
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Rotation of `grad D(t, r)` over `[t0, t1]`, sampled every `step`.
pub fn rotation_of_gradient(
    field: &dyn ScalarField,
    r: Point2,
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<GradientRotation> {
    let angle = |t: f64| -> Result<f64> {
        let g = field.eval_jet(t, r)?.grad;
        if !(g.norm() >= GRAD_EPS) {
            return Err(Error::CriticalPoint {
                grad_norm: g.norm(),
            });
        }
        Ok(g.y.atan2(g.x))
    };
    let n = ((t1 - t0) / step).ceil().max(1.0) as usize;
    let mut prev = angle(t0)?;
    let (mut total, mut net) = (0.0, 0.0);
    for i in 1..=n {
        let t = if i == n { t1 } else { t0 + step * i as f64 };
        let a = angle(t)?;
        let d = wrap_angle(a - prev);
        total += d.abs();
        net += d;
        prev = a;
    }
    Ok(GradientRotation { total, net })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscCheckOptions {
    /// Smallest number of revolutions tried.
    pub k_min: usize,
    pub k_max: usize,
    /// Sampling step for the gradient direction.
    pub rotation_step: f64,
    /// Concentric rings and spokes sampling each closed disc (plus its center).
    pub rings: usize,
    pub spokes: usize,
    /// Time samples per saturated revolution.
    pub samples_per_turn: usize,
}

impl Default for DiscCheckOptions {
    fn default() -> Self {
        Self {
            k_min: 1,
            k_max: 8,
            rotation_step: 1e-3,
            rings: 6,
            spokes: 24,
            samples_per_turn: 64,
        }
    }
}

/// Field range over both initial discs during one time window.
fn disc_range(
    field: &dyn ScalarField,
    points: &[Point2],
    times: impl Iterator<Item = f64>,
) -> (f64, f64, bool) {
    let (mut lo, mut hi, mut in_domain) = (f64::INFINITY, f64::NEG_INFINITY, true);
    for t in times {
        for p in points {
            match field.value(t, *p) {
                Ok(d) => {
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
                Err(_) => in_domain = false,
            }
        }
    }
    (lo, hi, in_domain)
}

/// Finds the smallest number `k` of saturated revolutions, `T_k = 2 pi k / u_bar`,
/// such that the gradient at the start point turns by at most `2 pi (k - 1)` on
/// `[0, T_k]` and both initial discs stay in the zone throughout.
pub fn check_initial_discs(
    field: &dyn ScalarField,
    start: &RobotState,
    robot: &RobotParams,
    zone: &OperationalZone,
    options: &DiscCheckOptions,
) -> Result<FeasibilityReport> {
    if options.k_min == 0 || options.k_max < options.k_min {
        return Err(Error::InvalidParameter(format!(
            "revolution range [{}, {}] is empty",
            options.k_min, options.k_max
        )));
    }
    let mut points = Vec::new();
    for sign in [TurnSign::Left, TurnSign::Right] {
        let disc = initial_circle_disc(start, robot, sign)?;
        points.push(disc.center);
        for ring in 1..=options.rings {
            let rad = disc.radius * ring as f64 / options.rings as f64;
            for s in 0..options.spokes {
                let a = TAU * s as f64 / options.spokes as f64;
                points.push(disc.center + Vector2::new(a.cos(), a.sin()) * rad);
            }
        }
    }
    let period = TAU / robot.u_bar;
    let r_in = start.position();
    let m = options.samples_per_turn.max(1);

    let (mut lo, mut hi, mut in_domain) = disc_range(field, &points, std::iter::once(0.0));
    let mut rotation = GradientRotation {
        total: 0.0,
        net: 0.0,
    };
    let mut last = None;
    for k in 1..=options.k_max {
        let (a, b) = (period * (k - 1) as f64, period * k as f64);
        let window = (1..=m).map(|i| a + (b - a) * i as f64 / m as f64);
        let (l, h, ok) = disc_range(field, &points, window);
        lo = lo.min(l);
        hi = hi.max(h);
        in_domain &= ok;
        let turn = rotation_of_gradient(field, r_in, a, b, options.rotation_step)?;
        rotation.total += turn.total;
        rotation.net += turn.net;
        if k < options.k_min {
            continue;
        }
        let mut report = FeasibilityReport::new();
        report
            .check(
                "init.rotation",
                rotation.total,
                Relation::LessEq,
                TAU * (k - 1) as f64,
            )
            .check("init.disc_lower", lo, Relation::GreaterEq, zone.d_minus)
            .check("init.disc_upper", hi, Relation::LessEq, zone.d_plus)
            .derive("k", k as f64)
            .derive("t_k", b)
            .derive("rotation_total", rotation.total)
            .derive("rotation_net", rotation.net);
        if !in_domain {
            report
                .check("init.disc_in_domain", 0.0, Relation::GreaterEq, 1.0)
                .note("an initial disc leaves the field's domain");
        }
        if report.satisfied {
            return Ok(report);
        }
        last = Some(report);
    }
    let mut report = last.expect("at least one k tried");
    report.note(format!("no k <= {} qualifies", options.k_max));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CenterPath, Profile, RadialField, RadialSpec};

    fn distance_field(center: CenterPath) -> RadialField {
        RadialField::new(RadialSpec {
            profile: Profile::LinearDecay,
            intensity: 1.0,
            center,
            working_interval: None,
        })
        .unwrap()
    }

    fn grid(n: usize) -> ZoneGrid {
        ZoneGrid {
            x: (-10.0, 10.0),
            y: (-10.0, 10.0),
            t: (0.0, 0.0),
            nx: n,
            ny: n,
            nt: 1,
        }
    }

    #[test]
    fn static_distance_field_bounds() {
        let f = distance_field(CenterPath::fixed(Vector2::zeros()));
        let zone = OperationalZone::new(-8.0, -2.0).unwrap();
        let robot = RobotParams::new(1.0, 1.0).unwrap();
        let scan = scan_zone(&f, &zone, &robot, &grid(201)).unwrap();
        assert!((scan.bounds.b_rho - 1.0).abs() < 1e-12);
        assert_eq!(scan.bounds.delta_lambda, 1.0);
        // Closest in-zone grid point to the inner ring r = 2.
        assert!((scan.bounds.b_kappa - 0.5).abs() < 0.03);
        assert!(scan.bounds.b_kappa <= 0.5 + 1e-12);
        assert!(scan.tolerance[2] > 0.0);
    }

    #[test]
    fn empty_grids() {
        let f = distance_field(CenterPath::fixed(Vector2::zeros()));
        let zone = OperationalZone::new(-8.0, -2.0).unwrap();
        let robot = RobotParams::new(1.0, 1.0).unwrap();
        assert!(matches!(
            scan_zone(&f, &zone, &robot, &grid(0)),
            Err(Error::EmptyGrid)
        ));
        let far = OperationalZone::new(-100.0, -90.0).unwrap();
        assert!(matches!(
            scan_zone(&f, &far, &robot, &grid(11)),
            Err(Error::EmptyGrid)
        ));
    }

    #[test]
    fn requested_density_bound_is_flagged() {
        let f = distance_field(CenterPath::fixed(Vector2::zeros()));
        let zone = OperationalZone::new(-8.0, -2.0).unwrap();
        let robot = RobotParams::new(1.0, 1.0).unwrap();
        let scan = scan_zone(&f, &zone, &robot, &grid(41)).unwrap();
        let mut wanted = scan.bounds;
        wanted.b_rho = 0.5;
        let rep = scan.check_requested(&wanted);
        assert_eq!(rep.violations(), vec!["scan.rho"]);
    }

    #[test]
    fn static_field_needs_one_revolution() {
        let f = distance_field(CenterPath::fixed(Vector2::zeros()));
        let zone = OperationalZone::new(-12.0, -2.0).unwrap();
        let robot = RobotParams::new(1.0, 1.0).unwrap();
        let start = RobotState::new(6.0, 0.0, 0.3);
        let rep =
            check_initial_discs(&f, &start, &robot, &zone, &DiscCheckOptions::default()).unwrap();
        assert!(rep.satisfied, "{rep}");
        assert_eq!(rep.derived_value("k"), Some(1.0));
        assert_eq!(rep.derived_value("rotation_total"), Some(0.0));
        let two = DiscCheckOptions {
            k_min: 2,
            ..Default::default()
        };
        let rep = check_initial_discs(&f, &start, &robot, &zone, &two).unwrap();
        assert!(rep.satisfied);
        assert_eq!(rep.derived_value("k"), Some(2.0));
    }

    #[test]
    fn protruding_disc_fails() {
        let f = distance_field(CenterPath::fixed(Vector2::zeros()));
        // Upper level -5.5: the disc around (6, 0) reaches range 4.
        let zone = OperationalZone::new(-12.0, -5.5).unwrap();
        let robot = RobotParams::new(1.0, 1.0).unwrap();
        let start = RobotState::new(6.0, 0.0, 0.3);
        let rep =
            check_initial_discs(&f, &start, &robot, &zone, &DiscCheckOptions::default()).unwrap();
        assert!(!rep.satisfied);
        assert!(rep.violations().contains(&"init.disc_upper"));
    }

    #[test]
    fn rotation_of_orbiting_center() {
        // Center circling the origin once every 2 pi / 0.5 seconds; the
        // gradient at the origin turns with it.
        let f = distance_field(CenterPath::CircularOrbit {
            center: [0.0, 0.0],
            radius: 1.0,
            rate: 0.5,
            phase: 0.0,
        });
        let rot = rotation_of_gradient(&f, Vector2::zeros(), 0.0, 2.0 * TAU, 1e-3).unwrap();
        assert!((rot.total - TAU).abs() < 1e-9);
        assert!((rot.net - TAU).abs() < 1e-9);
    }
}
