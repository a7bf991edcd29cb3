use serde::Serialize;

use super::{FeasibilityReport, Relation};
use crate::control::ControllerParams;
use crate::error::{Error, Result};
use crate::geometry::{turn_demand, IsolineQuantities, Side};
use crate::vehicle::RobotParams;

/// Bounds on the isoline characteristics over the operational zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldBounds {
    /// Upper bound on `1 / rho`.
    pub b_rho: f64,
    /// `v - sup |lambda|`.
    pub delta_lambda: f64,
    /// `u_bar` minus the largest turn rate needed to ride an isoline.
    pub delta_u: f64,
    pub b_lambda: f64,
    pub b_tau: f64,
    pub b_n: f64,
    pub b_kappa: f64,
    pub b_v: f64,
    pub b_alpha: f64,
}

impl FieldBounds {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("b_rho", self.b_rho),
            ("delta_lambda", self.delta_lambda),
            ("delta_u", self.delta_u),
            ("b_lambda", self.b_lambda),
            ("b_tau", self.b_tau),
            ("b_n", self.b_n),
            ("b_kappa", self.b_kappa),
            ("b_v", self.b_v),
            ("b_alpha", self.b_alpha),
        ];
        for (name, value) in named {
            if !(value >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Coefficients of the turn-rate inequality.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TurnTerms {
    pub b_tau: f64,
    pub b_kappa: f64,
    pub b_v: f64,
    pub b_alpha: f64,
    pub b_n: f64,
    pub gamma: f64,
}

/// Appends the pair of tuning inequalities under `prefix` and records
/// `mu_star` and `sigma`.
pub(crate) fn limit_margins(
    report: &mut FeasibilityReport,
    prefix: &str,
    mu_star: f64,
    v: f64,
    delta_lambda: f64,
    delta_u: f64,
    terms: TurnTerms,
) {
    let radicand = delta_lambda * delta_lambda - 2.0 * v * mu_star - mu_star * mu_star;
    let sigma = if radicand > 0.0 {
        radicand.sqrt()
    } else {
        f64::NAN
    };
    let turn = if sigma > 0.0 {
        (3.0 * terms.b_tau
            + (terms.b_kappa + 2.0 * terms.b_v + terms.gamma + terms.b_n * mu_star) / sigma
            + terms.b_alpha / sigma.powi(3))
            * mu_star
    } else {
        f64::INFINITY
    };
    let cap = (v * v + delta_lambda * delta_lambda).sqrt() - v;
    report
        .check(
            &format!("{prefix}.mu_positive"),
            mu_star,
            Relation::Greater,
            0.0,
        )
        .check(&format!("{prefix}.mu_cap"), mu_star, Relation::Less, cap)
        .check(
            &format!("{prefix}.sigma_real"),
            radicand,
            Relation::Greater,
            0.0,
        )
        .check(
            &format!("{prefix}.turn_margin"),
            turn,
            Relation::Less,
            delta_u,
        )
        .derive("mu_star", mu_star)
        .derive("sigma", sigma);
}

/// Both tuning inequalities for a law with saturation `mu` acting on a field
/// with the given bounds, using `mu_star = b_rho * mu`.
pub fn check_tuning_limits(
    bounds: &FieldBounds,
    robot: &RobotParams,
    ctrl: &ControllerParams,
) -> FeasibilityReport {
    let mut report = FeasibilityReport::new();
    let mu_star = bounds.b_rho * ctrl.mu;
    limit_margins(
        &mut report,
        "limit",
        mu_star,
        robot.v,
        bounds.delta_lambda,
        bounds.delta_u,
        TurnTerms {
            b_tau: bounds.b_tau,
            b_kappa: bounds.b_kappa,
            b_v: bounds.b_v,
            b_alpha: bounds.b_alpha,
            b_n: bounds.b_n,
            gamma: ctrl.gamma,
        },
    );
    report
}

/// Largest `mu_star` admitted by the conservative version of the turn-rate
/// inequality on the semi-strip `mu_star <= sqrt(v^2 + zeta dl^2) - v`, where
/// `sigma` is replaced by its lower bound `dl sqrt(1 - zeta)` there.
pub fn semistrip_bound(
    zeta: f64,
    bounds: &FieldBounds,
    robot: &RobotParams,
    gamma: f64,
) -> Result<f64> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "zeta must lie in (0, 1), got {zeta}"
        )));
    }
    let dl = bounds.delta_lambda;
    let du = bounds.delta_u;
    if !(du > 0.0 && dl > 0.0) {
        return Ok(0.0);
    }
    let v = robot.v;
    let s = dl * (1.0 - zeta).sqrt();
    let a = 3.0 * bounds.b_tau
        + (bounds.b_kappa + 2.0 * bounds.b_v + gamma) / s
        + bounds.b_alpha / s.powi(3);
    let b = bounds.b_n / s;
    // Positive root of b x^2 + a x - du, in the cancellation-free form.
    let root = 2.0 * du / (a + (a * a + 4.0 * b * du).sqrt());
    let cap = (v * v + zeta * dl * dl).sqrt() - v;
    Ok(root.min(cap))
}

/// Pointwise necessary conditions for riding the isoline through one point:
/// `|lambda| <= v` and, on both sides, the turn demand within `u_bar`.
pub fn check_pointwise_necessary(q: &IsolineQuantities, robot: &RobotParams) -> FeasibilityReport {
    let mut report = FeasibilityReport::new();
    let v = robot.v;
    report.check("speed", q.lambda.abs(), Relation::LessEq, v);
    let v_t = (v * v - q.lambda * q.lambda).max(0.0).sqrt();
    for (key, side) in [("accel+", Side::Plus), ("accel-", Side::Minus)] {
        let demand = if v_t > 0.0 {
            turn_demand(q, v_t, side)
        } else if q.lambda.abs() > v || q.alpha != 0.0 {
            f64::INFINITY
        } else {
            // Front exactly as fast as the robot and not accelerating.
            2.0 * q.omega.abs()
        };
        report.check(key, demand, Relation::LessEq, robot.u_bar);
    }
    report
}
