//! Smooth center trajectories `t -> (r0, r0', r0'')` for radial fields and targets.

use nalgebra::Vector2;
use serde::Serialize;

use super::Point2;

/// Position, velocity and acceleration of a moving center at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    pub position: Point2,
    pub velocity: Vector2<f64>,
    pub acceleration: Vector2<f64>,
}

/// Built-in center paths, each with analytic derivatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CenterPath {
    Static {
        position: [f64; 2],
    },
    ConstantVelocity {
        origin: [f64; 2],
        velocity: [f64; 2],
    },
    /// Uniform motion on a circle of `radius` about `center` at `rate` rad/s.
    CircularOrbit {
        center: [f64; 2],
        radius: f64,
        rate: f64,
        phase: f64,
    },
    /// Steady drift at `speed` along `heading` with a sinusoidal sideways weave.
    Slalom {
        origin: [f64; 2],
        heading: f64,
        speed: f64,
        amplitude: f64,
        frequency: f64,
    },
}

impl CenterPath {
    pub fn fixed(p: Point2) -> Self {
        CenterPath::Static {
            position: [p.x, p.y],
        }
    }

    pub fn linear(origin: Point2, velocity: Vector2<f64>) -> Self {
        CenterPath::ConstantVelocity {
            origin: [origin.x, origin.y],
            velocity: [velocity.x, velocity.y],
        }
    }

    pub fn is_static(&self) -> bool {
        matches!(self, CenterPath::Static { .. })
    }

    pub fn state(&self, t: f64) -> PathState {
        match *self {
            CenterPath::Static { position } => PathState {
                position: position.into(),
                velocity: Vector2::zeros(),
                acceleration: Vector2::zeros(),
            },
            CenterPath::ConstantVelocity { origin, velocity } => {
                let v = Vector2::from(velocity);
                PathState {
                    position: Vector2::from(origin) + v * t,
                    velocity: v,
                    acceleration: Vector2::zeros(),
                }
            }
            CenterPath::CircularOrbit {
                center,
                radius,
                rate,
                phase,
            } => {
                let (s, c) = (rate * t + phase).sin_cos();
                PathState {
                    position: Vector2::from(center) + radius * Vector2::new(c, s),
                    velocity: radius * rate * Vector2::new(-s, c),
                    acceleration: -radius * rate * rate * Vector2::new(c, s),
                }
            }
            CenterPath::Slalom {
                origin,
                heading,
                speed,
                amplitude,
                frequency,
            } => {
                let (hs, hc) = heading.sin_cos();
                let along = Vector2::new(hc, hs);
                let side = Vector2::new(-hs, hc);
                let (s, c) = (frequency * t).sin_cos();
                PathState {
                    position: Vector2::from(origin) + along * (speed * t) + side * (amplitude * s),
                    velocity: along * speed + side * (amplitude * frequency * c),
                    acceleration: side * (-amplitude * frequency * frequency * s),
                }
            }
        }
    }

    /// Supremum of `|r0'(t)|` over all t.
    pub fn speed_bound(&self) -> f64 {
        match *self {
            CenterPath::Static { .. } => 0.0,
            CenterPath::ConstantVelocity { velocity, .. } => Vector2::from(velocity).norm(),
            CenterPath::CircularOrbit { radius, rate, .. } => (radius * rate).abs(),
            CenterPath::Slalom {
                speed,
                amplitude,
                frequency,
                ..
            } => speed.hypot(amplitude * frequency),
        }
    }

    /// Supremum of `|r0''(t)|` over all t.
    pub fn accel_bound(&self) -> f64 {
        match *self {
            CenterPath::Static { .. } | CenterPath::ConstantVelocity { .. } => 0.0,
            CenterPath::CircularOrbit { radius, rate, .. } => (radius * rate * rate).abs(),
            CenterPath::Slalom {
                amplitude,
                frequency,
                ..
            } => (amplitude * frequency * frequency).abs(),
        }
    }

    pub fn is_finite(&self) -> bool {
        let vals: Vec<f64> = match *self {
            CenterPath::Static { position } => position.to_vec(),
            CenterPath::ConstantVelocity { origin, velocity } => {
                vec![origin[0], origin[1], velocity[0], velocity[1]]
            }
            CenterPath::CircularOrbit {
                center,
                radius,
                rate,
                phase,
            } => vec![center[0], center[1], radius, rate, phase],
            CenterPath::Slalom {
                origin,
                heading,
                speed,
                amplitude,
                frequency,
            } => vec![origin[0], origin[1], heading, speed, amplitude, frequency],
        };
        vals.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(path: &CenterPath) {
        let h = 1e-5;
        for &t in &[0.0, 0.7, 3.1, 10.0] {
            let s = path.state(t);
            let (p, m) = (path.state(t + h), path.state(t - h));
            let vel = (p.position - m.position) / (2.0 * h);
            let acc = (p.velocity - m.velocity) / (2.0 * h);
            assert!((vel - s.velocity).norm() < 1e-8, "{path:?} velocity at {t}");
            assert!(
                (acc - s.acceleration).norm() < 1e-8,
                "{path:?} accel at {t}"
            );
            assert!(s.velocity.norm() <= path.speed_bound() * (1.0 + 1e-12));
            assert!(s.acceleration.norm() <= path.accel_bound() * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        fd_check(&CenterPath::fixed(Vector2::new(1.0, 2.0)));
        fd_check(&CenterPath::linear(
            Vector2::new(1.0, 2.0),
            Vector2::new(0.3, -0.4),
        ));
        fd_check(&CenterPath::CircularOrbit {
            center: [0.0, 1.0],
            radius: 2.0,
            rate: 0.3,
            phase: 0.5,
        });
        fd_check(&CenterPath::Slalom {
            origin: [0.0, 0.0],
            heading: 0.4,
            speed: 0.5,
            amplitude: 1.5,
            frequency: 0.2,
        });
    }

    #[test]
    fn slalom_speed_bound_is_attained() {
        let path = CenterPath::Slalom {
            origin: [0.0, 0.0],
            heading: 0.0,
            speed: 0.3,
            amplitude: 2.0,
            frequency: 0.2,
        };
        assert!((path.state(0.0).velocity.norm() - path.speed_bound()).abs() < 1e-15);
    }
}
