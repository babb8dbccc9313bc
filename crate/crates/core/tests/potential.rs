use proptest::prelude::*;
use schubart_core::model::EnergyLevel;
use schubart_core::potential::*;
use schubart_core::MassContext;
use std::f64::consts::FRAC_PI_2;

fn third() -> MassContext {
    MassContext::new(1.0 / 3.0).unwrap()
}

// Reference values computed independently in extended precision.
const RU_AT_0_1: f64 = 0.22498561071506331;
const R_A_THIRD: f64 = 0.11008708901468894;
const RU_THETA_THETA_THIRD: f64 = 1.3154667137168919;
const RU_THETA_THETA_FIFTH: f64 = 1.645_746_031_439_845;
const ZVC_AXIS_X1: f64 = 0.534_162_768_136_086_5;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn fields_are_even_in_u(r in 0.0f64..0.218, u in -1.57f64..1.57) {
        let c = third();
        let a = eval_fields(r, u, &c).unwrap();
        let b = eval_fields(r, -u, &c).unwrap();
        prop_assert!((a.ru_c2 - b.ru_c2).abs() <= 1e-12);
        prop_assert!((a.r2u_r_c2 - b.r2u_r_c2).abs() <= 1e-12);
        prop_assert!((a.ru_theta_c4 + b.ru_theta_c4).abs() <= 1e-12);
    }

    #[test]
    fn scaled_fields_are_finite(r in 0.0f64..0.218, u in -7.0f64..7.0) {
        let p = eval_fields(r, u, &third()).unwrap();
        prop_assert!(p.ru_c2.is_finite() && p.ru_theta_c4.is_finite() && p.r2u_r_c2.is_finite());
    }

    #[test]
    fn polar_fields_match_jacobi_potential(r in 0.01f64..0.2, q in -0.95f64..0.95) {
        let c = third();
        let theta = q * c.theta_star;
        let p = eval_fields_theta(r, theta, &c).unwrap();
        let x1 = r * theta.cos() / c.mu1.sqrt();
        let x2 = r * theta.sin() / c.mu2.sqrt();
        let u = jacobi_potential(x1, x2, &c);
        prop_assert!((p.ru - r * u).abs() <= 1e-11 * (1.0 + (r * u).abs()));
    }
}

#[test]
fn frozen_values() {
    let c = third();
    assert!((eval_fields(0.1, 0.0, &c).unwrap().ru - RU_AT_0_1).abs() <= 1e-14);
    assert!((ru_theta_theta_origin(&c) - RU_THETA_THETA_THIRD).abs() <= 1e-12);
    let c5 = MassContext::new(0.2).unwrap();
    assert!((ru_theta_theta_origin(&c5) - RU_THETA_THETA_FIFTH).abs() <= 1e-12);
    let h = EnergyLevel::new(-1.0).unwrap();
    let ra = schubart_core::wazewski::f_zero_point_a(&c, h).unwrap();
    assert!((ra - R_A_THIRD).abs() <= 1e-13);
}

#[test]
fn f_signs_on_the_axis() {
    let c = third();
    let h = EnergyLevel::new(-1.0).unwrap();
    assert!(big_f(0.1, 0.0, &c, h).unwrap() > 0.0);
    assert!(big_f(c.r_star, 0.0, &c, h).unwrap() < 0.0);
    // increasing in u at fixed r
    let r = 0.5 * c.r_star;
    let mut prev = f64::NEG_INFINITY;
    for i in 1..100 {
        let v = big_f(r, FRAC_PI_2 * i as f64 / 100.0, &c, h).unwrap();
        assert!(v > prev);
        prev = v;
    }
}

#[test]
fn zero_velocity_curve_crosses_axis() {
    let c = third();
    let curves = zero_velocity_curve(-1.0, schubart_core::RegionLabel::I, GridSpec::default(), &c).unwrap();
    let hit = curves
        .iter()
        .flat_map(|p| p.points.windows(2))
        .find(|w| w[0].1 * w[1].1 <= 0.0)
        .map(|w| {
            let ((xa, ya), (xb, yb)) = (w[0], w[1]);
            if ya == yb { xa } else { xa + (xb - xa) * ya / (ya - yb) }
        })
        .expect("axis crossing");
    assert!((hit - ZVC_AXIS_X1).abs() < 1e-4);
    assert!((hit - c.r_star * c.a1).abs() < 1e-4);
}
