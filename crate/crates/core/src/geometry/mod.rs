//! Differential geometry of moving isolines.
//!
//! [`quantities`] evaluates the closed-form expressions of every isoline
//! characteristic from a [`FieldJet`]. The [`oracle`] submodule recomputes the
//! same characteristics from their geometric limit definitions (displaced
//! isoline intersections found by root finding), so the two routes can be
//! checked against each other.

mod identities;
pub mod oracle;

use nalgebra::Vector2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldJet;

pub use identities::{identity_residuals, IdentityResiduals};

/// Gradients shorter than this are treated as critical points.
pub const GRAD_EPS: f64 = 1e-9;

/// Counter-clockwise rotation by 90 degrees.
pub fn rotate_ccw(v: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-v.y, v.x)
}

/// Frenet frame of the isoline through a point.
///
/// `normal` points up the gradient; `tangent` is oriented so that larger
/// field values lie to its left, i.e. `normal = rotate_ccw(tangent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub tangent: Vector2<f64>,
    pub normal: Vector2<f64>,
}

pub fn frenet_frame(jet: &FieldJet) -> Result<Frame> {
    let grad_norm = jet.grad.norm();
    if !(grad_norm >= GRAD_EPS) {
        return Err(Error::CriticalPoint { grad_norm });
    }
    let normal = jet.grad / grad_norm;
    Ok(Frame {
        tangent: Vector2::new(normal.y, -normal.x),
        normal,
    })
}

/// Local characteristics of the isoline through `(t, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolineQuantities {
    /// Front velocity (m/s), positive when the isoline advances along `normal`.
    pub lambda: f64,
    /// Isoline density `|grad D|`.
    pub rho: f64,
    /// Signed curvature (1/m).
    pub kappa: f64,
    /// Angular velocity of the isoline (rad/s).
    pub omega: f64,
    /// Front acceleration (m/s^2).
    pub alpha: f64,
    /// Proportional growth rate of the density following the front (1/s).
    pub v_rho: f64,
    /// Proportional growth rate of the density along the tangent (1/m).
    pub tau_rho: f64,
    /// Proportional growth rate of the density along the normal (1/m).
    pub n_rho: f64,
    pub frame: Frame,
}

impl IsolineQuantities {
    /// The eight scalars in a fixed order: lambda, rho, kappa, omega, alpha,
    /// v_rho, tau_rho, n_rho.
    pub fn scalars(&self) -> [f64; 8] {
        [
            self.lambda,
            self.rho,
            self.kappa,
            self.omega,
            self.alpha,
            self.v_rho,
            self.tau_rho,
            self.n_rho,
        ]
    }

    pub const NAMES: [&'static str; 8] = [
        "lambda", "rho", "kappa", "omega", "alpha", "v_rho", "tau_rho", "n_rho",
    ];
}

pub fn quantities(jet: &FieldJet) -> Result<IsolineQuantities> {
    let frame = frenet_frame(jet)?;
    let (t, n) = (frame.tangent, frame.normal);
    let rho = jet.grad.norm();
    let hn = jet.hess * n;
    let ht = jet.hess * t;

    let lambda = -jet.dt / rho;
    // Rate of change of the gradient seen from a point riding the front.
    let drift = jet.grad_dt + hn * lambda;
    let v_rho = drift.dot(&n) / rho;
    let omega = -drift.dot(&t) / rho;
    let alpha = -(jet.dtt + lambda * jet.grad_dt.dot(&n)) / rho - lambda * v_rho;

    Ok(IsolineQuantities {
        lambda,
        rho,
        kappa: -ht.dot(&t) / rho,
        omega,
        alpha,
        v_rho,
        tau_rho: hn.dot(&t) / rho,
        n_rho: hn.dot(&n) / rho,
        frame,
    })
}

/// Which way the robot circulates along the isoline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// Larger values on the robot's left.
    Plus,
    /// Larger values on the robot's right.
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// Velocity of a robot that stays on the moving isoline and the turn rate it
/// needs to do so.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolineRide {
    pub velocity: Vector2<f64>,
    pub required_turn_rate: f64,
}

/// Velocity `lambda N +/- v_T T` with `v_T = sqrt(v^2 - lambda^2)` and the
/// turn-rate demand `|+/-2 omega + alpha / v_T + kappa v_T|`.
pub fn on_isoline_kinematics(q: &IsolineQuantities, v: f64, side: Side) -> Result<IsolineRide> {
    if !(q.lambda.abs() < v) {
        return Err(Error::FrontTooFast {
            lambda: q.lambda,
            v,
        });
    }
    let v_t = (v * v - q.lambda * q.lambda).sqrt();
    let s = side.sign();
    Ok(IsolineRide {
        velocity: q.frame.normal * q.lambda + q.frame.tangent * (s * v_t),
        required_turn_rate: turn_demand(q, v_t, side),
    })
}

pub(crate) fn turn_demand(q: &IsolineQuantities, v_t: f64, side: Side) -> f64 {
    (side.sign() * 2.0 * q.omega + q.alpha / v_t + q.kappa * v_t).abs()
}
