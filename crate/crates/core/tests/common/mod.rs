#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isotrack::field::{
    make_advected_field, make_radial_field, AdvectionSpec, CenterPath, ComposedField, FieldHandle,
    Point2, Profile, RadialSpec, ScalarField,
};
use isotrack::verify::OperationalZone;

/// Agreement required between an oracle value and its closed form.
pub fn within_oracle_tolerance(oracle: f64, formula: f64) -> bool {
    (oracle - formula).abs() <= (1e-4 * formula.abs()).max(1e-6)
}

pub struct SuiteField {
    pub name: &'static str,
    pub field: FieldHandle,
    pub zone: OperationalZone,
}

fn gaussian(sigma: f64, c: f64, center: CenterPath) -> FieldHandle {
    make_radial_field(RadialSpec {
        profile: Profile::gaussian(sigma).unwrap(),
        intensity: c,
        center,
        working_interval: None,
    })
    .unwrap()
}

fn zone(lo: f64, hi: f64) -> OperationalZone {
    OperationalZone::new(lo, hi).unwrap()
}

/// The four built-in field families.
pub fn oracle_suite() -> Vec<SuiteField> {
    let orbit = CenterPath::CircularOrbit {
        center: [1.0, -0.5],
        radius: 2.0,
        rate: 0.3,
        phase: 0.4,
    };
    let target = CenterPath::Slalom {
        origin: [0.0, 0.0],
        heading: 0.7,
        speed: 0.5,
        amplitude: 1.0,
        frequency: 0.4,
    };
    vec![
        SuiteField {
            name: "static-gaussian",
            field: gaussian(2.0, 1.0, CenterPath::fixed(Vector2::zeros())),
            zone: zone(0.05, 0.9),
        },
        SuiteField {
            name: "orbiting-gaussian",
            field: gaussian(1.5, 2.0, orbit),
            zone: zone(0.1, 1.8),
        },
        SuiteField {
            name: "advected-gaussian",
            field: make_advected_field(AdvectionSpec {
                center: [0.5, 0.0],
                sigma: 2.0,
                intensity: 1.0,
                flow: [0.3, -0.2],
            })
            .unwrap(),
            zone: zone(0.05, 0.9),
        },
        SuiteField {
            name: "distance-to-target",
            field: make_radial_field(RadialSpec {
                profile: Profile::LinearDecay,
                intensity: 1.0,
                center: target,
                working_interval: None,
            })
            .unwrap(),
            zone: zone(-6.0, -1.0),
        },
    ]
}

/// Two overlapping plumes, one drifting: a field with no radial symmetry, so
/// every characteristic is generically nonzero.
pub fn two_plumes() -> SuiteField {
    let composed = ComposedField::new()
        .with(
            1.0,
            gaussian(
                2.0,
                1.0,
                CenterPath::linear(Vector2::zeros(), Vector2::new(0.2, 0.1)),
            ),
        )
        .with(
            0.6,
            gaussian(1.5, 1.0, CenterPath::fixed(Vector2::new(2.0, 1.0))),
        );
    SuiteField {
        name: "two-plumes",
        field: Arc::new(composed),
        zone: zone(0.05, 1.2),
    }
}

/// Deterministic in-zone sample of `(t, r)` with `|grad D| > 1e-2`.
pub fn sample_points(
    field: &dyn ScalarField,
    zone: &OperationalZone,
    count: usize,
    seed: u64,
) -> Vec<(f64, Point2)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let t = rng.gen_range(0.0..5.0);
        let r = Vector2::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
        let Ok(jet) = field.eval_jet(t, r) else {
            continue;
        };
        if zone.contains(jet.value) && jet.grad.norm() > 1e-2 {
            out.push((t, r));
        }
    }
    out
}
