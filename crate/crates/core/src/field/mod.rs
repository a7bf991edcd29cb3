//! Dynamic scalar fields `D(t, r)` with exact derivatives up to second order.
//!
//! Every built-in field returns a [`FieldJet`]: the value together with the
//! spatial gradient and Hessian, the time derivative, its gradient, and the
//! second time derivative. All jets are hand-derived chain-rule expressions.
//!
//! Three constructions are provided:
//! - radial fields `c f(|r - r0(t)|)` with a moving center ([`RadialField`]),
//! - fields transported by a uniform flow, `D(t, r) = D(0, r - V t)`
//!   ([`AdvectedField`]),
//! - weighted sums of other fields ([`ComposedField`]), used to build fields
//!   that deliberately break the standing assumptions.

mod path;
mod profile;

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};

pub use path::{CenterPath, PathState};
pub use profile::{Profile, ProfileValue, TabulatedProfile};

/// A point of the plane, in meters.
pub type Point2 = Vector2<f64>;

/// Value and derivatives of a field at one `(t, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet {
    pub value: f64,
    pub grad: Vector2<f64>,
    pub hess: Matrix2<f64>,
    /// Partial derivative in time.
    pub dt: f64,
    /// Spatial gradient of the time derivative.
    pub grad_dt: Vector2<f64>,
    /// Second partial derivative in time.
    pub dtt: f64,
}

impl FieldJet {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            grad: Vector2::zeros(),
            hess: Matrix2::zeros(),
            dt: 0.0,
            grad_dt: Vector2::zeros(),
            dtt: 0.0,
        }
    }

    pub fn scaled(&self, w: f64) -> Self {
        Self {
            value: w * self.value,
            grad: self.grad * w,
            hess: self.hess * w,
            dt: w * self.dt,
            grad_dt: self.grad_dt * w,
            dtt: w * self.dtt,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            value: self.value + other.value,
            grad: self.grad + other.grad,
            hess: self.hess + other.hess,
            dt: self.dt + other.dt,
            grad_dt: self.grad_dt + other.grad_dt,
            dtt: self.dtt + other.dtt,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|v| v.is_finite())
            && self.hess.iter().all(|v| v.is_finite())
            && self.dt.is_finite()
            && self.grad_dt.iter().all(|v| v.is_finite())
            && self.dtt.is_finite()
    }
}

/// A dynamic scalar field. Implementations are immutable and thread-safe.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn eval_jet(&self, t: f64, r: Point2) -> Result<FieldJet>;

    fn value(&self, t: f64, r: Point2) -> Result<f64> {
        Ok(self.eval_jet(t, r)?.value)
    }
}

/// Shared, immutable handle to any field.
pub type FieldHandle = Arc<dyn ScalarField>;

fn domain_error(t: f64, r: Point2, reason: impl Into<String>) -> Error {
    Error::DomainViolation {
        t,
        x: r.x,
        y: r.y,
        reason: reason.into(),
    }
}

/// Construction data for `D(t, r) = c f(|r - r0(t)|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSpec {
    pub profile: Profile,
    pub intensity: f64,
    pub center: CenterPath,
    /// Radius interval on which the profile must be smooth and strictly
    /// decreasing. Defaults to the whole profile domain (minus the center).
    pub working_interval: Option<(f64, f64)>,
}

/// Radial field with a moving center.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    profile: Profile,
    intensity: f64,
    center: CenterPath,
}

const DECREASE_SAMPLES: usize = 257;

impl RadialField {
    pub fn new(spec: RadialSpec) -> Result<Self> {
        let RadialSpec {
            profile,
            intensity,
            center,
            working_interval,
        } = spec;
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radial intensity must be positive, got {intensity}"
            )));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter("center path is not finite".into()));
        }
        if let Profile::Gaussian { sigma } = profile {
            Profile::gaussian(sigma)?;
        }
        let (dom_lo, dom_hi) = profile.domain();
        let (lo, hi) = match working_interval {
            Some((lo, hi)) => {
                if !(lo > 0.0 && hi >= lo) {
                    return Err(Error::InvalidParameter(format!(
                        "working interval [{lo}, {hi}] must be positive and ordered"
                    )));
                }
                if lo < dom_lo || hi > dom_hi {
                    return Err(Error::InvalidParameter(format!(
                        "profile is not differentiable on [{lo}, {hi}]: defined on [{dom_lo}, {dom_hi}]"
                    )));
                }
                (lo, hi)
            }
            None => (dom_lo, dom_hi),
        };
        // Analytic profiles decrease on (0, inf); tables are checked by sampling.
        if let Profile::Tabulated(_) = profile {
            for i in 0..DECREASE_SAMPLES {
                let z = lo + (hi - lo) * i as f64 / (DECREASE_SAMPLES - 1) as f64;
                if z <= 0.0 {
                    continue;
                }
                let p = profile.eval(z).expect("inside domain");
                if !(p.df < 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "profile is not strictly decreasing at z = {z} (f' = {})",
                        p.df
                    )));
                }
            }
        }
        Ok(Self {
            profile,
            intensity,
            center,
        })
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn center(&self) -> &CenterPath {
        &self.center
    }
}

impl ScalarField for RadialField {
    fn eval_jet(&self, t: f64, r: Point2) -> Result<FieldJet> {
        let c = self.intensity;
        let path = self.center.state(t);
        let offset = r - path.position;
        let dist = offset.norm();
        if dist == 0.0 {
            return Err(domain_error(t, r, "radial field evaluated at its center"));
        }
        let p = self
            .profile
            .eval(dist)
            .ok_or_else(|| domain_error(t, r, format!("radius {dist} outside profile domain")))?;
        let e = offset / dist;
        let eet = e * e.transpose();
        let grad = e * (c * p.df);
        let hess = (eet * p.d2f + (Matrix2::identity() - eet) * (p.df / dist)) * c;
        // D = g(r - r0(t)): time derivatives follow from the spatial ones.
        let v0 = path.velocity;
        Ok(FieldJet {
            value: c * p.f,
            grad,
            hess,
            dt: -grad.dot(&v0),
            grad_dt: -(hess * v0),
            dtt: v0.dot(&(hess * v0)) - grad.dot(&path.acceleration),
        })
    }

    fn value(&self, t: f64, r: Point2) -> Result<f64> {
        let dist = (r - self.center.state(t).position).norm();
        if dist == 0.0 {
            return Err(domain_error(t, r, "radial field evaluated at its center"));
        }
        self.profile
            .eval(dist)
            .map(|p| self.intensity * p.f)
            .ok_or_else(|| domain_error(t, r, format!("radius {dist} outside profile domain")))
    }
}

pub fn make_radial_field(spec: RadialSpec) -> Result<FieldHandle> {
    Ok(Arc::new(RadialField::new(spec)?))
}

/// Gaussian plume transported by a uniform flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdvectionSpec {
    /// Plume center at `t = 0`.
    pub center: [f64; 2],
    pub sigma: f64,
    pub intensity: f64,
    pub flow: [f64; 2],
}

impl AdvectionSpec {
    /// The equivalent radial description: a gaussian whose center moves with the flow.
    pub fn radial_spec(&self) -> Result<RadialSpec> {
        Ok(RadialSpec {
            profile: Profile::gaussian(self.sigma)?,
            intensity: self.intensity,
            center: CenterPath::linear(self.center.into(), self.flow.into()),
            working_interval: None,
        })
    }
}

/// `D(t, r) = D0(0, r - V t)` for an arbitrary initial field `D0`.
#[derive(Debug, Clone)]
pub struct AdvectedField {
    initial: FieldHandle,
    flow: Vector2<f64>,
}

impl AdvectedField {
    pub fn new(initial: FieldHandle, flow: Vector2<f64>) -> Result<Self> {
        if !flow.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "flow velocity is not finite".into(),
            ));
        }
        Ok(Self { initial, flow })
    }

    pub fn flow(&self) -> Vector2<f64> {
        self.flow
    }
}

impl ScalarField for AdvectedField {
    fn eval_jet(&self, t: f64, r: Point2) -> Result<FieldJet> {
        let base = self.initial.eval_jet(0.0, r - self.flow * t)?;
        let v = self.flow;
        Ok(FieldJet {
            value: base.value,
            grad: base.grad,
            hess: base.hess,
            dt: -v.dot(&base.grad),
            grad_dt: -(base.hess * v),
            dtt: v.dot(&(base.hess * v)),
        })
    }

    fn value(&self, t: f64, r: Point2) -> Result<f64> {
        self.initial.value(0.0, r - self.flow * t)
    }
}

pub fn make_advected_field(spec: AdvectionSpec) -> Result<FieldHandle> {
    if !(spec.sigma > 0.0 && spec.intensity > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "advected plume needs sigma > 0 and c > 0, got sigma = {}, c = {}",
            spec.sigma, spec.intensity
        )));
    }
    let initial = RadialField::new(RadialSpec {
        profile: Profile::gaussian(spec.sigma)?,
        intensity: spec.intensity,
        center: CenterPath::fixed(spec.center.into()),
        working_interval: None,
    })?;
    Ok(Arc::new(AdvectedField::new(
        Arc::new(initial),
        spec.flow.into(),
    )?))
}

/// Weighted sum `sum_i w_i D_i(t, r)`; jets combine linearly.
#[derive(Debug, Clone, Default)]
pub struct ComposedField {
    terms: Vec<(f64, FieldHandle)>,
}

impl ComposedField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, weight: f64, field: FieldHandle) -> Self {
        self.terms.push((weight, field));
        self
    }
}

impl ScalarField for ComposedField {
    fn eval_jet(&self, t: f64, r: Point2) -> Result<FieldJet> {
        self.terms.iter().try_fold(FieldJet::zero(), |acc, (w, f)| {
            Ok(acc.plus(&f.eval_jet(t, r)?.scaled(*w)))
        })
    }

    fn value(&self, t: f64, r: Point2) -> Result<f64> {
        self.terms
            .iter()
            .try_fold(0.0, |acc, (w, f)| Ok(acc + w * f.value(t, r)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn static_radial(profile: Profile, c: f64) -> RadialField {
        RadialField::new(RadialSpec {
            profile,
            intensity: c,
            center: CenterPath::fixed(Vector2::zeros()),
            working_interval: None,
        })
        .unwrap()
    }

    #[test]
    fn distance_field_has_unit_gradient() {
        let f = static_radial(Profile::LinearDecay, 1.0);
        let jet = f.eval_jet(0.0, Vector2::new(3.0, 4.0)).unwrap();
        assert_eq!(jet.value, -5.0);
        assert!((jet.grad - Vector2::new(-0.6, -0.8)).norm() < 1e-15);
    }

    #[test]
    fn gaussian_symmetry_and_circle_value() {
        let f = static_radial(Profile::gaussian(1.0).unwrap(), 1.0);
        // The gaussian is smooth at its center but the radial construction is not.
        assert!(matches!(
            f.eval_jet(3.0, Vector2::zeros()),
            Err(Error::DomainViolation { .. })
        ));
        let near = f.eval_jet(3.0, Vector2::new(1e-9, 0.0)).unwrap();
        assert!(near.grad.norm() < 1e-8);
        let on_circle = f.eval_jet(0.0, Vector2::new(0.6, 0.8)).unwrap();
        assert!((on_circle.value - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_gradient_norm_matches_central_difference() {
        let f = static_radial(Profile::gaussian(1.0).unwrap(), 1.0);
        let r = Vector2::new(1.0, 0.0);
        let h = 1e-5;
        let dx = (f.value(0.0, r + Vector2::new(h, 0.0)).unwrap()
            - f.value(0.0, r - Vector2::new(h, 0.0)).unwrap())
            / (2.0 * h);
        let dy = (f.value(0.0, r + Vector2::new(0.0, h)).unwrap()
            - f.value(0.0, r - Vector2::new(0.0, h)).unwrap())
            / (2.0 * h);
        let fd_norm = dx.hypot(dy);
        // Oracle value frozen from the finite difference above: 0.606530659...
        assert!((fd_norm - 0.606_530_66).abs() < 1e-8);
        let jet = f.eval_jet(0.0, r).unwrap();
        assert!((jet.grad.norm() - fd_norm).abs() < 1e-9);
        assert!((jet.grad.norm() - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn linear_profile_is_minus_distance() {
        let f = static_radial(Profile::LinearDecay, 1.0);
        let r = Vector2::new(-2.0, 7.0);
        assert_eq!(f.value(1.0, r).unwrap(), -r.norm());
    }

    #[test]
    fn moving_center_time_derivative_sign() {
        // Center moving along +x at v0; query point ahead of it on +x.
        let (v0, big_r, c) = (0.7, 2.0, 1.5);
        let f = RadialField::new(RadialSpec {
            profile: Profile::LinearDecay,
            intensity: c,
            center: CenterPath::linear(Vector2::zeros(), Vector2::new(v0, 0.0)),
            working_interval: None,
        })
        .unwrap();
        let r = Vector2::new(big_r, 0.0);
        let h = 1e-5;
        let fd = (f.value(h, r).unwrap() - f.value(-h, r).unwrap()) / (2.0 * h);
        let jet = f.eval_jet(0.0, r).unwrap();
        assert!((jet.dt - fd).abs() < 1e-9);
        // f'(R) = -1: the approaching center raises the reading, D'_t = -c f'(R) v0 > 0.
        assert!((jet.dt - c * v0).abs() < 1e-15);
    }

    #[test]
    fn advection_with_zero_flow_is_static() {
        let spec = AdvectionSpec {
            center: [1.0, -1.0],
            sigma: 2.0,
            intensity: 3.0,
            flow: [0.0, 0.0],
        };
        let adv = make_advected_field(spec).unwrap();
        let stat = static_radial(Profile::gaussian(2.0).unwrap(), 3.0);
        for &t in &[0.0, 5.0, 100.0] {
            let r = Vector2::new(2.5, 0.5);
            let a = adv.eval_jet(t, r).unwrap();
            let s = stat.eval_jet(0.0, r - Vector2::new(1.0, -1.0)).unwrap();
            assert_eq!(a.value, s.value);
            assert_eq!(a.grad, s.grad);
            assert_eq!(a.dt, 0.0);
        }
    }

    #[test]
    fn advection_is_pure_translation() {
        let adv = make_advected_field(AdvectionSpec {
            center: [0.0, 0.0],
            sigma: 1.0,
            intensity: 1.0,
            flow: [1.0, 0.0],
        })
        .unwrap();
        let (a, b) = (0.3, -0.4);
        assert_eq!(
            adv.value(2.0, Vector2::new(2.0 + a, b)).unwrap(),
            adv.value(0.0, Vector2::new(a, b)).unwrap()
        );
    }

    #[test]
    fn composed_field_jets_are_linear() {
        let g: FieldHandle = Arc::new(static_radial(Profile::gaussian(1.0).unwrap(), 1.0));
        let l: FieldHandle = Arc::new(static_radial(Profile::LinearDecay, 1.0));
        let sum = ComposedField::new()
            .with(2.0, g.clone())
            .with(-0.5, l.clone());
        let r = Vector2::new(0.4, 1.1);
        let j = sum.eval_jet(0.2, r).unwrap();
        let jg = g.eval_jet(0.2, r).unwrap();
        let jl = l.eval_jet(0.2, r).unwrap();
        assert!((j.value - (2.0 * jg.value - 0.5 * jl.value)).abs() < 1e-15);
        assert!((j.hess - (jg.hess * 2.0 - jl.hess * 0.5)).norm() < 1e-15);
    }

    #[test]
    fn tabulated_working_interval_outside_table_is_rejected() {
        let table = TabulatedProfile::new(vec![1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0]).unwrap();
        let spec = RadialSpec {
            profile: Profile::Tabulated(table),
            intensity: 1.0,
            center: CenterPath::fixed(Vector2::zeros()),
            working_interval: Some((0.5, 2.5)),
        };
        assert!(matches!(
            RadialField::new(spec),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn increasing_table_is_rejected() {
        let table = TabulatedProfile::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]).unwrap();
        let spec = RadialSpec {
            profile: Profile::Tabulated(table),
            intensity: 1.0,
            center: CenterPath::fixed(Vector2::zeros()),
            working_interval: None,
        };
        assert!(RadialField::new(spec).is_err());
    }
}
