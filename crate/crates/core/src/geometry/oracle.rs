//! Isoline characteristics recomputed from their geometric definitions.
//!
//! Nothing here uses the closed forms of [`super::quantities`]. Each oracle
//! locates displaced isolines by one-dimensional root finding along the normal
//! axis of the local frame and forms symmetric difference quotients of the
//! resulting ordinates, with one Richardson extrapolation. Quantities whose
//! definition itself involves another limit (front acceleration, density
//! growth rates) evaluate the inner quantity with the same oracle machinery.
//!
//! Only field values and the gradient direction (which defines the frame) are
//! read from the field.

use nalgebra::Vector2;

use super::{frenet_frame, Frame};
use crate::error::{Error, Result};
use crate::field::{Point2, ScalarField};

/// Base time / arc-length step of first-level difference quotients.
pub const ORACLE_STEP: f64 = 1e-4;

/// Outer step for nested limits and for the second difference behind the
/// curvature. Inner limits keep [`ORACLE_STEP`]; the larger outer step keeps
/// root-finder rounding (amplified by two divisions) below the checked tolerance.
pub const NESTED_STEP: f64 = 1e-3;

/// Number of cells each half-bracket is split into when scanning outward for
/// the intersection nearest to the origin of the axis.
const SCAN_CELLS: usize = 32;

/// Root of `g` nearest to zero inside `[-half_width, half_width]`.
///
/// Scans outward cell by cell from the origin on both sides and bisects the
/// first sign change to full double precision.
pub fn nearest_root<G>(g: G, half_width: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let g0 = g(0.0)?;
    if g0 == 0.0 {
        return Ok(0.0);
    }
    let cell = half_width / SCAN_CELLS as f64;
    let (mut right_prev, mut left_prev) = (g0, g0);
    for k in 1..=SCAN_CELLS {
        let b = cell * k as f64;
        let a = cell * (k - 1) as f64;
        let right = g(b)?;
        let left = g(-b)?;
        let right_root = if right_prev * right <= 0.0 {
            Some(bisect(&g, a, b, right_prev)?)
        } else {
            None
        };
        let left_root = if left_prev * left <= 0.0 {
            Some(bisect(&g, -a, -b, left_prev)?)
        } else {
            None
        };
        match (right_root, left_root) {
            (Some(p), Some(m)) => return Ok(if p.abs() <= m.abs() { p } else { m }),
            (Some(p), None) => return Ok(p),
            (None, Some(m)) => return Ok(m),
            (None, None) => {}
        }
        right_prev = right;
        left_prev = left;
    }
    Err(Error::NoIntersection { half_width })
}

// Bisection between `a` (where g = ga) and `b`, until the bracket cannot shrink.
fn bisect<G>(g: &G, mut a: f64, mut b: f64, mut ga: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    if ga == 0.0 {
        return Ok(a);
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// `(4 F(h/2) - F(h)) / 3` for a quotient whose error expands in even powers of `h`.
fn richardson<F>(quotient: F, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let coarse = quotient(h)?;
    let fine = quotient(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn frame_at(field: &dyn ScalarField, t: f64, r: Point2) -> Result<(Frame, f64)> {
    let jet = field.eval_jet(t, r)?;
    Ok((frenet_frame(&jet)?, jet.grad.norm()))
}

/// Ordinate, on the normal axis of the frame at `(t, r)`, of the nearest
/// intersection with the isoline `D(t + dt, .) = level(t + dt)`.
///
/// `level` must satisfy `level(t) = D(t, r)`.
pub fn front_ordinate(
    field: &dyn ScalarField,
    t: f64,
    r: Point2,
    dt: f64,
    level: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    let (frame, rho) = frame_at(field, t, r)?;
    let target = level(t + dt);
    let g = |p: f64| Ok(field.value(t + dt, r + frame.normal * p)? - target);
    // First-order speed guess from two values only, used to size the bracket.
    let crude_speed = if dt == 0.0 {
        0.0
    } else {
        (g(0.0)? / (rho * dt)).abs()
    };
    let v_search = (10.0 * crude_speed).max(1.0);
    nearest_root(g, 10.0 * v_search * dt.abs().max(f64::MIN_POSITIVE))
}

/// Point where the normal axis at `(t, r)` meets the isoline of the same level
/// at time `t + dt`.
pub fn front_point(field: &dyn ScalarField, t: f64, r: Point2, dt: f64) -> Result<Point2> {
    let d = field.value(t, r)?;
    let p = front_ordinate(field, t, r, dt, &|_| d)?;
    let (frame, _) = frame_at(field, t, r)?;
    Ok(r + frame.normal * p)
}

/// Front velocity for a time-varying target level `level(.)`.
pub fn oracle_lambda_with_level(
    field: &dyn ScalarField,
    t: f64,
    r: Point2,
    level: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    richardson(
        |h| {
            let ahead = front_ordinate(field, t, r, h, level)?;
            let behind = front_ordinate(field, t, r, -h, level)?;
            Ok((ahead - behind) / (2.0 * h))
        },
        ORACLE_STEP,
    )
}

pub fn oracle_lambda(field: &dyn ScalarField, t: f64, r: Point2) -> Result<f64> {
    let d = field.value(t, r)?;
    oracle_lambda_with_level(field, t, r, &|_| d)
}

/// Isoline density: limit of `dd / q(dd)` where `q` is the normal ordinate of
/// the isoline at level `D(t, r) + dd`.
pub fn oracle_rho(field: &dyn ScalarField, t: f64, r: Point2) -> Result<f64> {
    let (frame, rho_scale) = frame_at(field, t, r)?;
    let d = field.value(t, r)?;
    let ordinate = |dd: f64| {
        let g = |q: f64| Ok(field.value(t, r + frame.normal * q)? - (d + dd));
        nearest_root(g, 10.0 * dd.abs() / rho_scale)
    };
    let inv_rho = richardson(
        |dd| Ok((ordinate(dd)? - ordinate(-dd)?) / (2.0 * dd)),
        ORACLE_STEP * rho_scale,
    )?;
    Ok(1.0 / inv_rho)
}

/// Signed curvature from the second difference of the isoline ordinate over
/// the tangent axis.
pub fn oracle_kappa(field: &dyn ScalarField, t: f64, r: Point2) -> Result<f64> {
    let (frame, _) = frame_at(field, t, r)?;
    let d = field.value(t, r)?;
    let ordinate = |s: f64| {
        let base = r + frame.tangent * s;
        let g = |q: f64| Ok(field.value(t, base + frame.normal * q)? - d);
        nearest_root(g, 10.0 * s.abs())
    };
    richardson(
        |s| Ok((ordinate(s)? + ordinate(-s)?) / (s * s)),
        NESTED_STEP,
    )
}

/// Angle of the tangent at the displaced front point, measured in the frame at
/// `(t, r)`. Lies in (-pi, pi] and tends to zero with `dt`.
fn tangent_turn(field: &dyn ScalarField, t: f64, r: Point2, base: &Frame, dt: f64) -> Result<f64> {
    let moved = front_point(field, t, r, dt)?;
    let (frame, _) = frame_at(field, t + dt, moved)?;
    Ok(frame
        .tangent
        .dot(&base.normal)
        .atan2(frame.tangent.dot(&base.tangent)))
}

pub fn oracle_omega(field: &dyn ScalarField, t: f64, r: Point2) -> Result<f64> {
    let (base, _) = frame_at(field, t, r)?;
    richardson(
        |h| {
            let ahead = tangent_turn(field, t, r, &base, h)?;
            let behind = tangent_turn(field, t, r, &base, -h)?;
            Ok((ahead - behind) / (2.0 * h))
        },
        ORACLE_STEP,
    )
}

/// Rate of change of the front velocity following the front.
pub fn oracle_alpha(field: &dyn ScalarField, t: f64, r: Point2) -> Result<f64> {
    richardson(
        |h| {
            let ahead = oracle_lambda(field, t + h, front_point(field, t, r, h)?)?;
            let behind = oracle_lambda(field, t - h, front_point(field, t, r, -h)?)?;
            Ok((ahead - behind) / (2.0 * h))
        },
        NESTED_STEP,
    )
}

pub fn oracle_v_rho(field: &dyn ScalarField, t: f64, r: Point2) -> Result<f64> {
    let rho = oracle_rho(field, t, r)?;
    richardson(
        |h| {
            let ahead = oracle_rho(field, t + h, front_point(field, t, r, h)?)?;
            let behind = oracle_rho(field, t - h, front_point(field, t, r, -h)?)?;
            Ok((ahead - behind) / (2.0 * h * rho))
        },
        NESTED_STEP,
    )
}

fn density_growth_along(
    field: &dyn ScalarField,
    t: f64,
    r: Point2,
    direction: Vector2<f64>,
) -> Result<f64> {
    let rho = oracle_rho(field, t, r)?;
    richardson(
        |s| {
            let ahead = oracle_rho(field, t, r + direction * s)?;
            let behind = oracle_rho(field, t, r - direction * s)?;
            Ok((ahead - behind) / (2.0 * s * rho))
        },
        NESTED_STEP,
    )
}

pub fn oracle_tau_rho(field: &dyn ScalarField, t: f64, r: Point2) -> Result<f64> {
    let (frame, _) = frame_at(field, t, r)?;
    density_growth_along(field, t, r, frame.tangent)
}

pub fn oracle_n_rho(field: &dyn ScalarField, t: f64, r: Point2) -> Result<f64> {
    let (frame, _) = frame_at(field, t, r)?;
    density_growth_along(field, t, r, frame.normal)
}

/// All eight oracles, in the order of [`super::IsolineQuantities::scalars`].
pub fn oracle_scalars(field: &dyn ScalarField, t: f64, r: Point2) -> Result<[f64; 8]> {
    Ok([
        oracle_lambda(field, t, r)?,
        oracle_rho(field, t, r)?,
        oracle_kappa(field, t, r)?,
        oracle_omega(field, t, r)?,
        oracle_alpha(field, t, r)?,
        oracle_v_rho(field, t, r)?,
        oracle_tau_rho(field, t, r)?,
        oracle_n_rho(field, t, r)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{
        make_advected_field, AdvectionSpec, CenterPath, Profile, RadialField, RadialSpec,
    };

    fn static_gaussian() -> RadialField {
        RadialField::new(RadialSpec {
            profile: Profile::gaussian(2.0).unwrap(),
            intensity: 1.0,
            center: CenterPath::fixed(Vector2::zeros()),
            working_interval: None,
        })
        .unwrap()
    }

    #[test]
    fn nearest_root_prefers_the_closer_crossing() {
        // Roots at -0.3 and 0.5.
        let root = nearest_root(|x| Ok((x + 0.3) * (x - 0.5)), 1.0).unwrap();
        assert!((root + 0.3).abs() < 1e-15);
        let root = nearest_root(|x| Ok((x - 0.2) * (x + 0.9)), 1.0).unwrap();
        assert!((root - 0.2).abs() < 1e-15);
        assert!(matches!(
            nearest_root(|x| Ok(x * x + 1.0), 1.0),
            Err(Error::NoIntersection { .. })
        ));
    }

    #[test]
    fn static_field_ordinate_is_zero() {
        let f = static_gaussian();
        let r = Vector2::new(1.0, 2.0);
        let d = f.value(0.0, r).unwrap();
        for &dt in &[1e-3, 0.1, 1.0] {
            assert_eq!(front_ordinate(&f, 0.0, r, dt, &|_| d).unwrap(), 0.0);
        }
        assert!(oracle_lambda(&f, 0.0, r).unwrap().abs() < 1e-8);
        assert!(oracle_omega(&f, 0.0, r).unwrap().abs() < 1e-8);
    }

    #[test]
    fn advected_ordinate_tracks_the_flow() {
        let v = 0.4;
        let f = make_advected_field(AdvectionSpec {
            center: [0.0, 0.0],
            sigma: 1.0,
            intensity: 1.0,
            flow: [v, 0.0],
        })
        .unwrap();
        // On the -x side of the plume the normal is +x, along the flow.
        let r = Vector2::new(-1.3, 0.0);
        let d = f.value(0.0, r).unwrap();
        let dt = 1e-3;
        let p = front_ordinate(f.as_ref(), 0.0, r, dt, &|_| d).unwrap();
        // The level circle translates rigidly: exactly v dt along the x axis.
        assert!((p - v * dt).abs() < 1e-12);
    }

    #[test]
    fn rising_level_moves_the_front_inward() {
        let f = static_gaussian();
        let r = Vector2::new(1.5, 0.0);
        let d = f.value(0.0, r).unwrap();
        let p = front_ordinate(&f, 0.0, r, 1e-2, &|s| d + 0.01 * s).unwrap();
        let frame = frenet_frame(&f.eval_jet(0.0, r).unwrap()).unwrap();
        assert!(p > 0.0, "front ordinate measured along the inward normal");
        // ... which points toward the center, so the isoline shrinks.
        assert!((r + frame.normal * p).norm() < r.norm());
    }
}
