//! Constant-speed unicycle `x' = v cos(theta), y' = v sin(theta), theta' = u`.

use std::f64::consts::TAU;

use nalgebra::Vector2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Point2;

/// Pose of the robot. `theta` is kept unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl RobotState {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn position(&self) -> Point2 {
        Vector2::new(self.x, self.y)
    }

    pub fn heading(&self) -> Vector2<f64> {
        Vector2::new(self.theta.cos(), self.theta.sin())
    }

    /// Heading reduced to `[0, 2 pi)`.
    pub fn theta_wrapped(&self) -> f64 {
        self.theta.rem_euclid(TAU)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobotParams {
    /// Forward speed (m/s).
    pub v: f64,
    /// Turn-rate bound (rad/s).
    pub u_bar: f64,
}

impl RobotParams {
    /// `u_bar = 0` is accepted: the robot then drives straight.
    pub fn new(v: f64, u_bar: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "speed must be positive, got {v}"
            )));
        }
        if !(u_bar >= 0.0 && u_bar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "turn-rate bound must be nonnegative, got {u_bar}"
            )));
        }
        Ok(Self { v, u_bar })
    }

    /// Radius of the tightest circle, `v / u_bar`.
    pub fn min_turn_radius(&self) -> f64 {
        self.v / self.u_bar
    }
}

/// One fixed step of classical RK4 with the turn rate held over the step.
pub fn step(state: &RobotState, u: f64, params: &RobotParams, dt: f64) -> Result<RobotState> {
    if u.abs() > params.u_bar * (1.0 + 1e-12) || !u.is_finite() {
        return Err(Error::TurnRateExceeded {
            u,
            u_bar: params.u_bar,
        });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {dt}"
        )));
    }
    let v = params.v;
    let rate = |theta: f64| Vector2::new(v * theta.cos(), v * theta.sin());
    let k1 = rate(state.theta);
    let k2 = rate(state.theta + 0.5 * dt * u);
    let k4 = rate(state.theta + dt * u);
    // k3 == k2: the heading does not depend on position.
    let dp = (k1 + k2 * 4.0 + k4) * (dt / 6.0);
    Ok(RobotState {
        x: state.x + dp.x,
        y: state.y + dp.y,
        theta: state.theta + u * dt,
    })
}

/// Exact pose after holding turn rate `u` for `dt`.
pub fn exact_arc(state: &RobotState, u: f64, v: f64, dt: f64) -> RobotState {
    let theta = state.theta + u * dt;
    if u == 0.0 {
        return RobotState {
            x: state.x + v * dt * state.theta.cos(),
            y: state.y + v * dt * state.theta.sin(),
            theta,
        };
    }
    let radius = v / u;
    RobotState {
        x: state.x + radius * (theta.sin() - state.theta.sin()),
        y: state.y - radius * (theta.cos() - state.theta.cos()),
        theta,
    }
}

/// Turning direction of the saturated control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurnSign {
    Left,
    Right,
}

/// Circle traced from `state` when the turn rate is held at `+u_bar` (left)
/// or `-u_bar` (right). Its closed disc is the initial disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: Point2,
    pub radius: f64,
}

pub fn initial_circle_disc(
    state: &RobotState,
    params: &RobotParams,
    sign: TurnSign,
) -> Result<Disc> {
    if params.u_bar == 0.0 {
        return Err(Error::InvalidParameter(
            "a robot that cannot turn has no initial circle".into(),
        ));
    }
    let radius = params.min_turn_radius();
    let s = match sign {
        TurnSign::Left => 1.0,
        TurnSign::Right => -1.0,
    };
    let left = Vector2::new(-state.theta.sin(), state.theta.cos());
    Ok(Disc {
        center: state.position() + left * (s * radius),
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn straight_line() {
        let p = RobotParams::new(1.0, 1.0).unwrap();
        let s = step(&RobotState::new(0.0, 0.0, 0.0), 0.0, &p, 1.0).unwrap();
        assert_eq!(s, RobotState::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn half_circle() {
        let p = RobotParams::new(1.0, 1.0).unwrap();
        let n = 10_000;
        let dt = PI / n as f64;
        let mut s = RobotState::new(0.0, 0.0, 0.0);
        for _ in 0..n {
            s = step(&s, 1.0, &p, dt).unwrap();
        }
        assert!(s.x.abs() < 1e-10);
        assert!((s.y - 2.0).abs() < 1e-10);
        assert!((s.theta - PI).abs() < 1e-10);
    }

    #[test]
    fn over_limit_turn_is_an_error() {
        let p = RobotParams::new(1.0, 0.5).unwrap();
        let s = RobotState::new(0.0, 0.0, 0.0);
        assert!(matches!(
            step(&s, 0.51, &p, 0.1),
            Err(Error::TurnRateExceeded { .. })
        ));
        assert!(step(&s, 0.5 * (1.0 + 1e-13), &p, 0.1).is_ok());
        assert!(step(&s, 0.1, &p, 0.0).is_err());
    }

    #[test]
    fn theta_is_reported_wrapped() {
        let s = RobotState::new(0.0, 0.0, -PI / 2.0);
        assert!((s.theta_wrapped() - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn initial_discs() {
        let p = RobotParams::new(1.0, 1.0).unwrap();
        let d = initial_circle_disc(&RobotState::new(0.0, 0.0, 0.0), &p, TurnSign::Left).unwrap();
        assert!((d.center - Vector2::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(d.radius, 1.0);
        let p = RobotParams::new(2.0, 1.0).unwrap();
        let d =
            initial_circle_disc(&RobotState::new(0.0, 0.0, PI / 2.0), &p, TurnSign::Right).unwrap();
        assert!((d.center - Vector2::new(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(d.radius, 2.0);
    }

    #[test]
    fn saturated_revolution_stays_on_its_disc() {
        let p = RobotParams::new(1.3, 0.7).unwrap();
        for sign in [TurnSign::Left, TurnSign::Right] {
            let start = RobotState::new(2.0, -1.0, 0.8);
            let disc = initial_circle_disc(&start, &p, sign).unwrap();
            let u = if sign == TurnSign::Left {
                p.u_bar
            } else {
                -p.u_bar
            };
            let dt = 1e-3;
            let n = (2.0 * PI / p.u_bar / dt).ceil() as usize;
            let mut s = start;
            for _ in 0..n {
                s = step(&s, u, &p, dt).unwrap();
                assert!((s.position() - disc.center).norm() <= disc.radius + 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn matches_closed_form_arc(
            x in -10.0..10.0f64, y in -10.0..10.0f64, th in -7.0..7.0f64,
            frac in -1.0..1.0f64, v in 0.1..3.0f64,
        ) {
            let p = RobotParams::new(v, 2.0).unwrap();
            let s = RobotState::new(x, y, th);
            let u = frac * p.u_bar;
            let rk = step(&s, u, &p, 1e-2).unwrap();
            let ex = exact_arc(&s, u, v, 1e-2);
            prop_assert!((rk.x - ex.x).abs() < 1e-9);
            prop_assert!((rk.y - ex.y).abs() < 1e-9);
            prop_assert!((rk.theta - ex.theta).abs() < 1e-15);
        }

        #[test]
        fn step_never_exceeds_speed(th in -7.0..7.0f64, frac in -1.0..1.0f64, dt in 1e-4..0.5f64) {
            let p = RobotParams::new(1.7, 1.2).unwrap();
            let s = RobotState::new(0.3, 0.1, th);
            let n = step(&s, frac * p.u_bar, &p, dt).unwrap();
            let moved = (n.position() - s.position()).norm();
            prop_assert!(moved <= p.v * dt + 1e-9);
            if frac == 0.0 {
                prop_assert!((moved - p.v * dt).abs() < 1e-9);
            }
        }

        #[test]
        fn rotation_equivariance(rot in -3.0..3.0f64, seq in proptest::collection::vec(-1.0..1.0f64, 1..40)) {
            let p = RobotParams::new(1.0, 1.5).unwrap();
            let (c, s) = (rot.cos(), rot.sin());
            let mut a = RobotState::new(1.0, 2.0, 0.3);
            let mut b = RobotState::new(c * 1.0 - s * 2.0, s * 1.0 + c * 2.0, 0.3 + rot);
            let mut total = 0.0;
            for frac in &seq {
                let u = frac * p.u_bar;
                a = step(&a, u, &p, 0.05).unwrap();
                b = step(&b, u, &p, 0.05).unwrap();
                total += u * 0.05;
            }
            prop_assert!((c * a.x - s * a.y - b.x).abs() < 1e-9);
            prop_assert!((s * a.x + c * a.y - b.y).abs() < 1e-9);
            prop_assert!((a.theta - 0.3 - total).abs() < 1e-9);
        }
    }
}
