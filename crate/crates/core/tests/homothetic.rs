use schubart_core::homothetic::*;
use std::f64::consts::PI;

#[test]
fn trichotomy_by_mass() {
    assert_eq!(classify_trichotomy(0.05, 1.0).unwrap().regime, Regime::BelowNinth);
    assert_eq!(classify_trichotomy(0.05, 1.0).unwrap().outer_motion, OuterMotion::CollisionAntipodal);
    let r = classify_trichotomy(0.2, 0.2).unwrap();
    assert_eq!(r.outer_motion, OuterMotion::Periodic);
    assert!((r.h0.unwrap() - 0.16).abs() < 1e-15);
    assert_eq!(classify_trichotomy(0.2, 0.16).unwrap().outer_motion, OuterMotion::Equilibrium);
}

#[test]
fn light_middle_body_reaches_collision_antipodal_point() {
    let s = IsoscelesState::from_energy(1.9 * PI, 0.0, 0.05, -1.0).unwrap();
    let tr = integrate_iso(s, 0.05, 50.0).unwrap();
    // launched towards pi, it turns back at the repelling mid-segment first
    assert_eq!(tr.ending, IsoEnding::CollisionAntipodal);
    assert!(tr.blowup);
    assert!(tr.states.last().unwrap().x1 > 2.0 * PI - 1e-9);
}

#[test]
fn heavy_middle_body_oscillates() {
    let s = IsoscelesState::from_energy(1.5 * PI, 0.2, 0.2, 1.0).unwrap();
    let tr = integrate_iso(s, 0.2, 20.0).unwrap();
    assert_eq!(tr.ending, IsoEnding::Periodic);
    assert!(tr.turning_points.len() >= 2);
    assert!(tr.max_energy_drift() <= 1e-10);
    assert!(tr.states.iter().all(|s| s.x1 > PI && s.x1 < 2.0 * PI));
}

#[test]
fn equilibrium_stays_put() {
    let s = IsoscelesState::from_energy(1.5 * PI, 0.16, 0.2, 1.0).unwrap();
    let tr = integrate_iso(s, 0.2, 20.0).unwrap();
    assert_eq!(tr.ending, IsoEnding::Equilibrium);
    assert!(tr.max_excursion() <= 1e-6);
}

#[test]
fn inner_branch_ends_in_triple_collision() {
    let s = IsoscelesState::from_energy(1.0, 10.0, 1.0 / 3.0, -1.0).unwrap();
    let tr = integrate_iso(s, 1.0 / 3.0, 10.0).unwrap();
    assert_eq!(tr.ending, IsoEnding::TripleCollision);
    assert!(tr.blowup);
}
