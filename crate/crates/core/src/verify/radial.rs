//! Conditions for radial fields `D = c f(|r - r0(t)|)` with a moving center.

use std::f64::consts::PI;

use serde::Serialize;

use super::limits::{limit_margins, TurnTerms};
use super::{FeasibilityReport, Relation};
use crate::control::ControllerParams;
use crate::error::{Error, Result};
use crate::field::Profile;
use crate::vehicle::RobotParams;

/// Grid size for the supremum over the center's normal speed.
pub const SUP_GRID_POINTS: usize = 1000;

/// Samples used to bound the profile derivatives on `[R-, R+]`.
const PROFILE_SAMPLES: usize = 4001;

/// Known bounds on the uncertain parts of a radial field and its center motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialBounds {
    /// Bounds on the initial distance from the robot to the center.
    pub r_in_minus: f64,
    pub r_in_plus: f64,
    /// Bounds on the center's speed and acceleration.
    pub v0: f64,
    pub a0: f64,
    /// Bounds on the intensity `c`.
    pub c_minus: f64,
    pub c_plus: f64,
}

impl RadialBounds {
    pub fn validate(&self) -> Result<()> {
        let ok = self.r_in_minus > 0.0
            && self.r_in_minus <= self.r_in_plus
            && self.v0 >= 0.0
            && self.a0 >= 0.0
            && self.c_minus > 0.0
            && self.c_minus <= self.c_plus;
        if ok && self.r_in_plus.is_finite() && self.v0.is_finite() && self.a0.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "inconsistent radial bounds {self:?}"
            )))
        }
    }

    /// `(2 v + 4 pi v0) / u_bar`: how far the center can get from its initial
    /// distance while the robot completes its initial manoeuvre.
    pub fn drift_allowance(&self, robot: &RobotParams) -> f64 {
        (2.0 * robot.v + 4.0 * PI * self.v0) / robot.u_bar
    }
}

/// Turn rate needed to ride a circle of radius `r` about a center whose
/// velocity has normal part `v_n`, in the worst case over the tangential part.
pub fn radial_turn_demand(v: f64, v0: f64, a0: f64, r: f64, v_n: f64) -> f64 {
    if !(r > 0.0) {
        return f64::INFINITY;
    }
    let w_sq = v * v - v_n * v_n;
    let w0 = (v0 * v0 - v_n * v_n).max(0.0).sqrt();
    if w_sq > 0.0 {
        let w = w_sq.sqrt();
        return a0 / w + (w + w0) * (w + w0) / (r * w);
    }
    if w_sq < 0.0 {
        return f64::INFINITY;
    }
    // w = 0: finite only as the limit with w0 = w and no acceleration.
    if a0 == 0.0 && w0 == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Supremum of [`radial_turn_demand`] over `v_n` on an evenly spaced grid of
/// `points` values covering `[0, v0]`, and the maximizing `v_n`.
fn grid_sup(v: f64, v0: f64, a0: f64, r: f64, points: usize) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, 0.0);
    let n = if v0 > 0.0 { points } else { 1 };
    for i in 0..n {
        let v_n = if n == 1 {
            0.0
        } else {
            v0 * i as f64 / (n - 1) as f64
        };
        let value = radial_turn_demand(v, v0, a0, r, v_n);
        if value > best.0 {
            best = (value, v_n);
        }
    }
    best
}

/// Supremum over `v_n in [0, v0]` on the standard grid: `(value, argmax)`.
pub fn sup_radial_turn_demand(v: f64, v0: f64, a0: f64, r: f64) -> (f64, f64) {
    grid_sup(v, v0, a0, r, SUP_GRID_POINTS)
}

/// Closed-form upper bound on the supremum; when it is within `u_bar`, so is
/// the necessary condition.
pub fn simplified_radial_bound(v: f64, v0: f64, a0: f64, r_minus: f64) -> f64 {
    // Only meaningful for a robot at least as fast as the center.
    if v0 > v {
        return f64::INFINITY;
    }
    let w0 = v * v - v0 * v0;
    let accel = if a0 == 0.0 {
        0.0
    } else if w0 > 0.0 {
        a0 / w0.sqrt()
    } else {
        f64::INFINITY
    };
    accel + (v + v0) * (v + v0) / (v * r_minus)
}

/// Necessary conditions for staying on the isoline of radius `r_minus` or
/// more: `v >= v0` and the turn demand within `u_bar` for every `v_n`.
pub fn necessary_radial(v: f64, v0: f64, a0: f64, u_bar: f64, r_minus: f64) -> FeasibilityReport {
    let mut report = FeasibilityReport::new();
    let (sup, arg) = sup_radial_turn_demand(v, v0, a0, r_minus);
    let (coarse, _) = grid_sup(v, v0, a0, r_minus, SUP_GRID_POINTS / 2);
    let sensitivity = (sup - coarse).abs();
    report
        .check("nec.speed", v, Relation::GreaterEq, v0)
        .check("nec.radial", sup, Relation::LessEq, u_bar)
        .derive("argmax_v_n", arg)
        .derive("grid_points", SUP_GRID_POINTS as f64)
        .derive("grid_sensitivity", sensitivity);
    let slack = u_bar - sup;
    if slack >= 0.0 && slack < sensitivity {
        report.note(format!(
            "nec.radial marginal: slack {slack:.3e} below grid sensitivity {sensitivity:.3e}"
        ));
    }
    report
}

/// What is known about the profile `f`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKnowledge {
    /// `f` itself: level radii by inversion, derivative bounds by dense sampling.
    Exact(Profile),
    /// Bounds only.
    Estimates {
        /// Bounds on the radius of the tracked isoline.
        radius_lo: f64,
        radius_hi: f64,
        /// Lower bound on `|f'|` over `[R-, R+]`.
        slope_lower: f64,
        /// Upper bound on `|f''| / |f'|` over `[R-, R+]`.
        ratio_upper: f64,
    },
}

fn level_radii(knowledge: &ProfileKnowledge, rb: &RadialBounds, d0: f64) -> Result<(f64, f64)> {
    match knowledge {
        ProfileKnowledge::Exact(profile) => {
            let a = profile.inverse(d0 / rb.c_minus)?;
            let b = profile.inverse(d0 / rb.c_plus)?;
            Ok((a.min(b), a.max(b)))
        }
        ProfileKnowledge::Estimates {
            radius_lo,
            radius_hi,
            ..
        } => {
            if !(*radius_lo > 0.0 && radius_lo <= radius_hi) {
                return Err(Error::InvalidParameter(format!(
                    "isoline radius estimates [{radius_lo}, {radius_hi}] are not ordered"
                )));
            }
            Ok((*radius_lo, *radius_hi))
        }
    }
}

/// `(min |f'|, max |f''| / |f'|)` over `[lo, hi]`.
fn profile_extrema(knowledge: &ProfileKnowledge, lo: f64, hi: f64) -> Result<(f64, f64)> {
    match knowledge {
        ProfileKnowledge::Exact(profile) => {
            let mut slope = f64::INFINITY;
            let mut ratio: f64 = 0.0;
            for i in 0..PROFILE_SAMPLES {
                let z = lo + (hi - lo) * i as f64 / (PROFILE_SAMPLES - 1) as f64;
                let p = profile.eval(z).ok_or_else(|| {
                    Error::InvalidParameter(format!("profile undefined at radius {z}"))
                })?;
                slope = slope.min(p.df.abs());
                ratio = ratio.max(p.d2f.abs() / p.df.abs());
            }
            Ok((slope, ratio))
        }
        ProfileKnowledge::Estimates {
            slope_lower,
            ratio_upper,
            ..
        } => Ok((*slope_lower, *ratio_upper)),
    }
}

/// Sufficient conditions for the steering law to bring the robot to the
/// isoline `D = d0` of a radial field and keep it there.
pub fn sufficient_radial(
    rb: &RadialBounds,
    robot: &RobotParams,
    ctrl: &ControllerParams,
    knowledge: &ProfileKnowledge,
    d0: f64,
) -> Result<FeasibilityReport> {
    rb.validate()?;
    let v = robot.v;
    let (v0, a0) = (rb.v0, rb.a0);
    let offset = rb.drift_allowance(robot);
    let r_prime_minus = rb.r_in_minus - offset;
    let r_prime_plus = rb.r_in_plus + offset;
    let (level_lo, level_hi) = level_radii(knowledge, rb, d0)?;
    let r_minus = r_prime_minus.min(level_lo);
    let r_plus = r_prime_plus.max(level_hi);

    let mut report = FeasibilityReport::new();
    report
        .check("far.init", rb.r_in_minus, Relation::Greater, offset)
        .check("radial.speed", v, Relation::Greater, v0);

    let (mu_star, b_n, delta_u, slope) = if r_minus > 0.0 {
        let (slope, b_n) = profile_extrema(knowledge, r_minus, r_plus)?;
        let (sup, _) = sup_radial_turn_demand(v, v0, a0, r_minus);
        (
            ctrl.mu / (rb.c_minus * slope),
            b_n,
            robot.u_bar - sup,
            slope,
        )
    } else {
        report.note(format!(
            "inner radius {r_minus:.6e} is not positive; profile bounds are undefined"
        ));
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NAN)
    };
    let delta_lambda = v - v0;
    limit_margins(
        &mut report,
        "radial.limit",
        mu_star,
        v,
        delta_lambda,
        delta_u,
        TurnTerms {
            b_tau: 0.0,
            b_kappa: 1.0 / r_minus,
            b_v: 0.0,
            b_alpha: a0 + v0 * v0 / r_minus,
            b_n,
            gamma: ctrl.gamma,
        },
    );
    report
        .derive("offset", offset)
        .derive("r_prime_minus", r_prime_minus)
        .derive("r_prime_plus", r_prime_plus)
        .derive("level_radius_lo", level_lo)
        .derive("level_radius_hi", level_hi)
        .derive("r_minus", r_minus)
        .derive("r_plus", r_plus)
        .derive("slope_lower", slope)
        .derive("b_n", b_n)
        .derive("delta_u", delta_u);
    Ok(report)
}

/// Uncertainty bounds for a gaussian plume carried by a uniform flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdvectionBounds {
    pub sigma_minus: f64,
    pub sigma_plus: f64,
    pub c_minus: f64,
    /// Upper intensity bound, if known.
    pub c_plus: Option<f64>,
    /// Bound on the flow speed.
    pub flow_speed: f64,
    pub r_in_minus: f64,
    pub r_in_plus: f64,
}

/// Quantities entering the sufficient condition for the plume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdvectionDerived {
    pub level_radius_lo: f64,
    pub level_radius_hi: f64,
    pub offset: f64,
    pub r_prime_minus: f64,
    pub r_prime_plus: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    /// Lower bound on `|f'|` over `[R-, R+]` for every admissible sigma.
    pub slope_lower: f64,
    pub b_n: f64,
    pub delta_u: f64,
}

impl AdvectionDerived {
    /// `mu / (c- b-)`.
    pub fn mu_star(&self, mu: f64, c_minus: f64) -> f64 {
        mu / (c_minus * self.slope_lower)
    }

    pub fn knowledge(&self) -> ProfileKnowledge {
        ProfileKnowledge::Estimates {
            radius_lo: self.level_radius_lo,
            radius_hi: self.level_radius_hi,
            slope_lower: self.slope_lower,
            ratio_upper: self.b_n,
        }
    }

    /// The same bounds in the generic radial form, center speed = flow speed.
    pub fn radial_bounds(&self, b: &AdvectionBounds) -> RadialBounds {
        RadialBounds {
            r_in_minus: b.r_in_minus,
            r_in_plus: b.r_in_plus,
            v0: b.flow_speed,
            a0: 0.0,
            c_minus: b.c_minus,
            c_plus: b.c_plus.unwrap_or(f64::MAX),
        }
    }
}

pub fn advection_parameters(
    b: &AdvectionBounds,
    robot: &RobotParams,
    d0: f64,
) -> Result<AdvectionDerived> {
    if !(d0 > 0.0 && d0 < b.c_minus) {
        return Err(Error::NonsensicalLevel {
            d0,
            c_lo: b.c_minus,
        });
    }
    let ok = b.sigma_minus > 0.0
        && b.sigma_minus <= b.sigma_plus
        && b.flow_speed >= 0.0
        && b.r_in_minus > 0.0
        && b.r_in_minus <= b.r_in_plus
        && b.c_plus.is_none_or(|c| c >= b.c_minus);
    if !ok {
        return Err(Error::InvalidParameter(format!(
            "inconsistent plume bounds {b:?}"
        )));
    }
    let level_radius_lo = b.sigma_minus * (2.0 * (b.c_minus / d0).ln()).sqrt();
    let level_radius_hi = match b.c_plus {
        Some(c_plus) => b.sigma_plus * (2.0 * (c_plus / d0).ln()).sqrt(),
        None => level_radius_lo,
    };
    let offset = (2.0 * robot.v + 4.0 * PI * b.flow_speed) / robot.u_bar;
    let r_prime_minus = b.r_in_minus - offset;
    let r_prime_plus = b.r_in_plus + offset;
    let r_minus = level_radius_lo.min(r_prime_minus);
    let r_plus = level_radius_hi.max(r_prime_plus);

    let (s_lo, s_hi) = (b.sigma_minus, b.sigma_plus);
    let slope_at = |r: f64| r * (-r * r / (2.0 * s_lo * s_lo)).exp() / (s_hi * s_hi);
    let slope_lower = slope_at(r_minus).min(slope_at(r_plus));
    let mut b_n: f64 = 0.0;
    for r in [r_minus, r_plus] {
        for s in [s_lo, s_hi] {
            b_n = b_n.max((s * s - r * r).abs() / (s * s * r));
        }
    }
    let v = robot.v;
    let delta_u = robot.u_bar - (v + b.flow_speed).powi(2) / (v * r_minus);
    Ok(AdvectionDerived {
        level_radius_lo,
        level_radius_hi,
        offset,
        r_prime_minus,
        r_prime_plus,
        r_minus,
        r_plus,
        slope_lower,
        b_n,
        delta_u,
    })
}
