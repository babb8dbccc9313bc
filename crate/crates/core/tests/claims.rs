use schubart_core::claims::*;
use schubart_core::MassContext;

#[test]
fn report_round_trips_through_json() {
    let c = MassContext::new(0.5).unwrap();
    let r = verify_all(&c, &ClaimGrid::default()).unwrap();
    assert!(r.all_pass());
    let text = serde_json::to_string(&r).unwrap();
    let back: ClaimReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.claims.len(), 6);
    assert_eq!(back.claim(3).status, ClaimStatus::Pass);
}

#[test]
fn refinement_never_flips_a_pass() {
    for m in [0.15, 1.0 / 3.0, 0.85] {
        let c = MassContext::new(m).unwrap();
        let mut g = ClaimGrid { n_r: 11, n_u: 11, u0: 0.05 };
        for _ in 0..3 {
            assert!(verify_all(&c, &g).unwrap().all_pass(), "m = {m}, grid {g:?}");
            g = g.doubled();
        }
    }
}

#[test]
fn claim4_constant_is_recorded_not_asserted() {
    let c = MassContext::new(1.0 / 3.0).unwrap();
    let r = verify_all(&c, &ClaimGrid::default()).unwrap();
    let k = &r.constants;
    assert!((k.claim4_limit - k.claim4_closed_form).abs() <= 1e-12);
    assert!(k.claim4_reference_constant < k.claim4_limit);
    assert!((k.claim5_c3_scaled - c.theta_star * k.claim5_c3).abs() <= 1e-15);
}
