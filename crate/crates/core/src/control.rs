//! Sliding-mode steering law `u = -sgn(d' + chi(d - d0)) u_bar`.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ControllerParams {
    /// Target level.
    pub d0: f64,
    /// Slope of the linear part of the saturation.
    pub gamma: f64,
    /// Half-width of the linear zone.
    pub delta: f64,
    /// Saturation level, always `gamma * delta`.
    pub mu: f64,
}

impl ControllerParams {
    pub fn new(d0: f64, gamma: f64, delta: f64) -> Result<Self> {
        if !d0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "target level must be finite, got {d0}"
            )));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {delta}"
            )));
        }
        Ok(Self {
            d0,
            gamma,
            delta,
            mu: gamma * delta,
        })
    }

    /// Parameters with a prescribed saturation level `mu`.
    pub fn from_mu(d0: f64, gamma: f64, mu: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Self::new(d0, gamma, mu / gamma)
    }
}

/// Linear with slope `gamma` on `[-delta, delta]`, saturated at `+/-mu` outside.
pub fn chi(p: f64, params: &ControllerParams) -> f64 {
    if p.abs() <= params.delta {
        params.gamma * p
    } else if p > 0.0 {
        params.mu
    } else {
        -params.mu
    }
}

/// `sgn` with `sgn(0) = 0`.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// What the robot measures at one instant: the field value at its position
/// and the time derivative of that reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measurement {
    pub d: f64,
    pub d_dot: f64,
}

/// Sliding variable `d' + chi(d - d0)`.
pub fn sliding_surface(m: &Measurement, params: &ControllerParams) -> f64 {
    m.d_dot + chi(m.d - params.d0, params)
}

/// Turn rate commanded by the law. Exactly `0.0` on the surface.
pub fn control(m: &Measurement, params: &ControllerParams, u_bar: f64) -> f64 {
    let s = sgn(sliding_surface(m, params));
    if s == 0.0 {
        0.0
    } else {
        -s * u_bar
    }
}

/// How the reading's time derivative is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureMode {
    /// Chain rule on the field jet: `D_t + v <grad D, heading>`.
    Exact,
    /// Backward difference of past readings at least `h` seconds apart.
    FiniteDifference { h: f64 },
}

/// Backward-difference estimator of `d'` from timestamped readings.
#[derive(Debug, Clone)]
pub struct DifferenceSensor {
    h: f64,
    history: VecDeque<(f64, f64)>,
}

impl DifferenceSensor {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "difference step must be positive, got {h}"
            )));
        }
        Ok(Self {
            h,
            history: VecDeque::new(),
        })
    }

    /// Records `d` at time `t` and returns the estimate of `d'`. Uses the
    /// newest reading at least `h` old; returns 0 until one exists.
    pub fn update(&mut self, t: f64, d: f64) -> f64 {
        // Keep only one reading older than the window.
        while self.history.len() >= 2 && t - self.history[1].0 >= self.h {
            self.history.pop_front();
        }
        let estimate = match self.history.front() {
            Some(&(t_old, d_old)) if t - t_old >= self.h => (d - d_old) / (t - t_old),
            _ => 0.0,
        };
        self.history.push_back((t, d));
        estimate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> ControllerParams {
        ControllerParams::new(1.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn saturation_shape() {
        let p = params();
        assert_eq!(p.mu, 1.0);
        assert_eq!(chi(0.25, &p), 0.5);
        assert_eq!(chi(0.5, &p), 1.0);
        assert_eq!(chi(-0.5, &p), -1.0);
        assert_eq!(chi(3.0, &p), 1.0);
        assert_eq!(chi(-3.0, &p), -1.0);
    }

    #[test]
    fn control_signs() {
        let p = params();
        // Above the level and still rising: turn right.
        let m = Measurement { d: 1.2, d_dot: 0.1 };
        assert_eq!(control(&m, &p, 0.7), -0.7);
        let m = Measurement {
            d: 0.8,
            d_dot: -0.1,
        };
        assert_eq!(control(&m, &p, 0.7), 0.7);
    }

    #[test]
    fn zero_on_the_surface() {
        let p = params();
        let m = Measurement {
            d: 1.25,
            d_dot: -0.5,
        };
        assert_eq!(sliding_surface(&m, &p), 0.0);
        let u = control(&m, &p, 0.7);
        assert_eq!(u, 0.0);
        assert!(u.is_sign_positive());
        let m = Measurement { d: 1.0, d_dot: 0.0 };
        assert_eq!(control(&m, &p, 0.7).to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ControllerParams::new(1.0, 0.0, 0.5).is_err());
        assert!(ControllerParams::new(1.0, 1.0, -0.5).is_err());
        assert!(ControllerParams::new(f64::NAN, 1.0, 0.5).is_err());
        assert!(DifferenceSensor::new(0.0).is_err());
    }

    #[test]
    fn difference_sensor_on_a_ramp() {
        let mut s = DifferenceSensor::new(0.05).unwrap();
        let dt = 0.01;
        let mut out = Vec::new();
        for k in 0..20 {
            let t = k as f64 * dt;
            out.push(s.update(t, 3.0 * t + 1.0));
        }
        assert_eq!(out[0], 0.0);
        assert_eq!(out[4], 0.0);
        for v in &out[5..] {
            assert!((v - 3.0).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn chi_is_odd_bounded_and_monotone(
            a in -10.0..10.0f64, b in -10.0..10.0f64,
            gamma in 0.01..10.0f64, delta in 0.001..5.0f64,
        ) {
            let p = ControllerParams::new(0.0, gamma, delta).unwrap();
            prop_assert_eq!(chi(-a, &p), -chi(a, &p));
            prop_assert!(chi(a, &p).abs() <= p.mu * (1.0 + 1e-15));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(chi(lo, &p) <= chi(hi, &p));
        }

        #[test]
        fn control_is_bang_bang(d in -5.0..5.0f64, d_dot in -5.0..5.0f64, u_bar in 0.0..4.0f64) {
            let p = params();
            let u = control(&Measurement { d, d_dot }, &p, u_bar);
            prop_assert!(u == 0.0 || u.abs() == u_bar);
        }
    }
}
