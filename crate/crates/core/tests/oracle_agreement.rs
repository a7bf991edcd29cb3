//! Closed-form isoline characteristics against the root-finding oracles.

mod common;

use isotrack::geometry::{
    identity_residuals, oracle::oracle_scalars, quantities, IsolineQuantities,
};

use common::{oracle_suite, sample_points, two_plumes, within_oracle_tolerance};

#[test]
fn closed_forms_match_oracles_off_symmetry() {
    let f = two_plumes();
    let mut failures = Vec::new();
    let mut nonzero = [false; 8];
    for (t, r) in sample_points(f.field.as_ref(), &f.zone, 30, 7) {
        let formula = quantities(&f.field.eval_jet(t, r).unwrap())
            .unwrap()
            .scalars();
        let oracle = oracle_scalars(f.field.as_ref(), t, r).unwrap();
        for k in 0..8 {
            nonzero[k] |= formula[k].abs() > 1e-3;
            if !within_oracle_tolerance(oracle[k], formula[k]) {
                failures.push(format!(
                    "{} at t={t:.3} r=({:.3},{:.3}): oracle {:.9e} formula {:.9e}",
                    IsolineQuantities::NAMES[k],
                    r.x,
                    r.y,
                    oracle[k],
                    formula[k]
                ));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
    // The composite exercises every characteristic, including the two that
    // vanish for radial fields.
    assert_eq!(nonzero, [true; 8]);
}

#[test]
fn static_field_oracles_see_no_motion() {
    let f = &oracle_suite()[0];
    for (t, r) in sample_points(f.field.as_ref(), &f.zone, 5, 3) {
        let o = oracle_scalars(f.field.as_ref(), t, r).unwrap();
        assert!(o[0].abs() < 1e-12, "lambda {}", o[0]);
        assert!(o[3].abs() < 1e-12, "omega {}", o[3]);
    }
}

#[test]
fn expansion_remainders_are_second_order_off_symmetry() {
    let f = two_plumes();
    for (t, r) in sample_points(f.field.as_ref(), &f.zone, 5, 11) {
        let coarse = identity_residuals(f.field.as_ref(), t, r, 1e-2, 1e-2).unwrap();
        let fine = identity_residuals(f.field.as_ref(), t, r, 5e-3, 5e-3).unwrap();
        for (k, (c, h)) in coarse.values().iter().zip(fine.values()).enumerate() {
            let ratio = c / h;
            assert!(
                (3.5..=4.5).contains(&ratio),
                "{} ratio {ratio} ({c:e} / {h:e})",
                isotrack::geometry::IdentityResiduals::NAMES[k]
            );
        }
    }
}
