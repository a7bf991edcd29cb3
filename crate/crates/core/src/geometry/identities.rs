use nalgebra::Vector2;

use super::{frenet_frame, oracle, quantities};
use crate::error::Result;
use crate::field::{Point2, ScalarField};

/// Remainders of the first-order expansions of the front velocity and the
/// frame under small displacements. Each entry is the norm of
/// `actual - (value + derivative * step)` and should shrink like `step^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `lambda(t, r + T ds) = lambda + omega ds`
    pub lambda_along_tangent: f64,
    /// `lambda(t, r + N ds) = lambda - v_rho ds`
    pub lambda_along_normal: f64,
    /// `N(t, r + T ds) = N - kappa T ds`
    pub normal_along_tangent: f64,
    /// `T(t, r + T ds) = T + kappa N ds`
    pub tangent_along_tangent: f64,
    /// `N(t, r + N ds) = N + tau_rho T ds`
    pub normal_along_normal: f64,
    /// `T(t, r + N ds) = T - tau_rho N ds`
    pub tangent_along_normal: f64,
    /// `N(t + dt, r_+(dt)) = N - omega T dt`
    pub normal_in_time: f64,
    /// `T(t + dt, r_+(dt)) = T + omega N dt`
    pub tangent_in_time: f64,
}

impl IdentityResiduals {
    pub const NAMES: [&'static str; 8] = [
        "lambda_along_tangent",
        "lambda_along_normal",
        "normal_along_tangent",
        "tangent_along_tangent",
        "normal_along_normal",
        "tangent_along_normal",
        "normal_in_time",
        "tangent_in_time",
    ];

    pub fn values(&self) -> [f64; 8] {
        [
            self.lambda_along_tangent,
            self.lambda_along_normal,
            self.normal_along_tangent,
            self.tangent_along_tangent,
            self.normal_along_normal,
            self.tangent_along_normal,
            self.normal_in_time,
            self.tangent_in_time,
        ]
    }
}

/// Evaluates every first-order expansion at spatial step `ds` and time step `dt`.
///
/// Derivatives come from the closed forms; the displaced front point
/// `r_+(dt)` is located by root finding.
pub fn identity_residuals(
    field: &dyn ScalarField,
    t: f64,
    r: Point2,
    ds: f64,
    dt: f64,
) -> Result<IdentityResiduals> {
    let q = quantities(&field.eval_jet(t, r)?)?;
    let (tan, nor) = (q.frame.tangent, q.frame.normal);
    let at = |time: f64, point: Point2| -> Result<_> { quantities(&field.eval_jet(time, point)?) };

    let along_t = at(t, r + tan * ds)?;
    let along_n = at(t, r + nor * ds)?;
    let moved = oracle::front_point(field, t, r, dt)?;
    let in_time = frenet_frame(&field.eval_jet(t + dt, moved)?)?;

    let gap = |a: Vector2<f64>, b: Vector2<f64>| (a - b).norm();
    Ok(IdentityResiduals {
        lambda_along_tangent: (along_t.lambda - (q.lambda + q.omega * ds)).abs(),
        lambda_along_normal: (along_n.lambda - (q.lambda - q.v_rho * ds)).abs(),
        normal_along_tangent: gap(along_t.frame.normal, nor - tan * (q.kappa * ds)),
        tangent_along_tangent: gap(along_t.frame.tangent, tan + nor * (q.kappa * ds)),
        normal_along_normal: gap(along_n.frame.normal, nor + tan * (q.tau_rho * ds)),
        tangent_along_normal: gap(along_n.frame.tangent, tan - nor * (q.tau_rho * ds)),
        normal_in_time: gap(in_time.normal, nor - tan * (q.omega * dt)),
        tangent_in_time: gap(in_time.tangent, tan + nor * (q.omega * dt)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CenterPath, Profile, RadialField, RadialSpec};

    fn radial(profile: Profile, center: CenterPath) -> RadialField {
        RadialField::new(RadialSpec {
            profile,
            intensity: 1.0,
            center,
            working_interval: None,
        })
        .unwrap()
    }

    #[test]
    fn static_field_front_velocity_is_flat() {
        let f = radial(
            Profile::gaussian(1.0).unwrap(),
            CenterPath::fixed(Vector2::zeros()),
        );
        let res = identity_residuals(&f, 0.0, Vector2::new(0.8, 0.3), 1e-3, 1e-3).unwrap();
        assert_eq!(res.lambda_along_tangent, 0.0);
        assert_eq!(res.lambda_along_normal, 0.0);
    }

    #[test]
    fn curvature_expansion_on_gaussian_unit_circle() {
        let f = radial(
            Profile::gaussian(1.0).unwrap(),
            CenterPath::fixed(Vector2::zeros()),
        );
        let res = identity_residuals(&f, 0.0, Vector2::new(1.0, 0.0), 1e-3, 1e-3).unwrap();
        assert!(res.normal_along_tangent < 1e-6);
    }

    #[test]
    fn radial_normal_does_not_drift_along_itself() {
        let f = radial(
            Profile::LinearDecay,
            CenterPath::linear(Vector2::new(0.5, 0.0), Vector2::new(0.2, 0.1)),
        );
        let res = identity_residuals(&f, 1.0, Vector2::new(3.0, -2.0), 1e-3, 1e-3).unwrap();
        assert!(res.normal_along_normal < 1e-8);
        assert!(res.tangent_along_normal < 1e-8);
    }
}
