//! Numerical checks of the six inequalities and identities that the
//! Wazewski construction relies on, collected in a serializable report.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::Result;
use crate::model::{verify_estimates, EnergyLevel, MassContext};
use crate::potential::{big_f, collision_manifold_ru_cos2u, eval_fields, eval_fields_theta, f_aux, k_aux, ru_theta_theta_origin, xsin2};
use crate::roots::{bisect, golden_max};
use crate::wazewski::{f_zero_point_a, f_zero_point_b};

/// Strict inequalities must hold with at least this margin.
pub const STRICT_MARGIN: f64 = 1e-10;
/// Exact zeros must hold to this absolute tolerance.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaimGrid {
    pub n_r: usize,
    pub n_u: usize,
    /// Lower cutoff in `u` for the fifth claim.
    pub u0: f64,
}

impl Default for ClaimGrid {
    fn default() -> Self {
        Self { n_r: 41, n_u: 41, u0: 0.05 }
    }
}

impl ClaimGrid {
    pub fn doubled(self) -> Self {
        Self { n_r: 2 * self.n_r - 1, n_u: 2 * self.n_u - 1, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub passed: bool,
    /// `(r, u)` or `(x, y)` of the worst point, when meaningful.
    pub worst_at: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub id: u8,
    pub status: ClaimStatus,
    /// Smallest margin over the strict inequalities of this claim.
    pub margin: f64,
    pub checks: Vec<Check>,
}

impl ClaimResult {
    fn from_checks(id: u8, checks: Vec<Check>, margin: f64) -> Self {
        let status = if checks.iter().any(|c| !c.value.is_finite()) {
            ClaimStatus::Indeterminate
        } else if checks.iter().all(|c| c.passed) {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        };
        Self { id, status, margin, checks }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, value: f64, passed: bool, worst_at: Option<(f64, f64)>) -> Check {
    Check { name: name.to_string(), value, passed, worst_at }
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let n = n.max(2);
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

/// Running maximum of `f` over a grid, with its location.
fn worst<I: Iterator<Item = (f64, f64)>>(pts: I, mut f: impl FnMut(f64, f64) -> f64) -> (f64, Option<(f64, f64)>) {
    let mut best = (f64::NEG_INFINITY, None);
    for (a, b) in pts {
        let v = f(a, b);
        if v > best.0 || v.is_nan() {
            best = (v, Some((a, b)));
            if v.is_nan() {
                break;
            }
        }
    }
    best
}

fn product(ra: (f64, f64, usize), ub: (f64, f64, usize)) -> impl Iterator<Item = (f64, f64)> {
    let us: Vec<f64> = linspace(ub.0, ub.1, ub.2).collect();
    linspace(ra.0, ra.1, ra.2).flat_map(move |r| us.clone().into_iter().map(move |u| (r, u)))
}

/// Parity of the fields and the homogeneity limit at the origin.
pub fn verify_claim1(ctx: &MassContext, grid: &ClaimGrid) -> Result<ClaimResult> {
    let rect = || product((0.0, ctx.r_star, grid.n_r), (-FRAC_PI_2, FRAC_PI_2, grid.n_u));
    let e = |r: f64, u: f64| eval_fields(r, u, ctx).expect("inside the rectangle");
    let (pu, wu) = worst(rect(), |r, u| (e(r, u).ru_c2 - e(r, -u).ru_c2).abs());
    let (pr, wr) = worst(rect(), |r, u| (e(r, u).r2u_r_c2 - e(r, -u).r2u_r_c2).abs());
    let (pt, wt) = worst(rect(), |r, u| (e(r, u).ru_theta_c4 - e(-r, u).ru_theta_c4).abs());
    let axis = linspace(0.0, ctx.r_star, grid.n_r).map(|r| e(r, 0.0).ru_theta.abs()).fold(0.0, f64::max);

    let gap = |r: f64, u: f64| {
        let p = e(r, u);
        (-p.r2u_r - p.ru).abs()
    };
    let mut limit_max: f64 = 0.0;
    let mut rate_min = f64::INFINITY;
    for u in [0.0, 0.3, 1.0, FRAC_PI_2 - 0.1] {
        let (g3, g4) = (gap(1e-3, u), gap(1e-4, u));
        limit_max = limit_max.max(g4);
        rate_min = rate_min.min(g3 / g4);
    }
    let checks = vec![
        check("parity_ru_in_theta", pu, pu <= ZERO_TOL, wu),
        check("parity_r2ur_in_theta", pr, pr <= ZERO_TOL, wr),
        check("parity_ru_theta_in_r", pt, pt <= ZERO_TOL, wt),
        check("ru_theta_on_axis", axis, axis == 0.0, None),
        check("homogeneity_gap_at_1e-4", limit_max, limit_max <= 1e-7, None),
        // quadratic decay: one decade in r is two decades in the gap
        check("homogeneity_decay_ratio", rate_min, rate_min >= 50.0, None),
    ];
    Ok(ClaimResult::from_checks(1, checks, ZERO_TOL - pu.max(pr).max(pt)))
}

/// Convexity of the potential across the homothetic axis at the origin.
pub fn verify_claim2(ctx: &MassContext) -> Result<ClaimResult> {
    let analytic = ru_theta_theta_origin(ctx);
    let d = |h: f64| -> Result<f64> {
        let p = eval_fields_theta(0.0, h, ctx)?.ru_theta;
        let m = eval_fields_theta(0.0, -h, ctx)?.ru_theta;
        Ok((p - m) / (2.0 * h))
    };
    let h = 1e-5 * ctx.theta_star;
    let (d1, d2) = (d(h)?, d(0.5 * h)?);
    let richardson = (4.0 * d2 - d1) / 3.0;
    let first_term = 1.0 / ctx.a1;
    let checks = vec![
        check("analytic", analytic, analytic > STRICT_MARGIN, None),
        check("finite_difference_gap", (richardson - analytic).abs(), (richardson - analytic).abs() <= 1e-8, None),
        check("richardson_gap", (d1 - d2).abs(), (d1 - d2).abs() <= 1e-8, None),
        check("first_term_per_n2", first_term, first_term > 0.0, None),
    ];
    Ok(ClaimResult::from_checks(2, checks, analytic))
}

/// `cos^2 th - cos^2 th* - (1 - cos^2 th*) cos^2 u cos th` with
/// `cos^2 u = 1 - (th / th*)^2`.
pub fn j_function(theta_star: f64, theta: f64) -> f64 {
    let q = theta / theta_star;
    let cu2 = (1.0 - q) * (1.0 + q);
    let (ct, cs) = (theta.cos(), theta_star.cos());
    ct * ct - cs * cs - (1.0 - cs * cs) * cu2 * ct
}

/// Partial derivative of `j` in `theta*` at fixed `theta` and `u`.
pub fn j_partial_theta_star(theta_star: f64, theta: f64) -> f64 {
    let q = theta / theta_star;
    let cu2 = (1.0 - q) * (1.0 + q);
    2.0 * theta_star.sin() * theta_star.cos() * (1.0 - cu2 * theta.cos())
}

/// On `r = 0` the maximum of `2 rU cos^2 u` over `[0, pi/2]` sits at `u = 0`.
pub fn verify_claim3(ctx: &MassContext, grid: &ClaimGrid) -> Result<ClaimResult> {
    let v = |u: f64| 2.0 * collision_manifold_ru_cos2u(u, ctx);
    let v0 = v(0.0);
    let n = 50 * grid.n_u;
    let us: Vec<f64> = linspace(0.0, FRAC_PI_2, n).collect();
    let (excess, at) = worst(us.iter().skip(1).map(|&u| (u, 0.0)), |u, _| v(u) - v0);
    // refine around the grid maximum
    let ustar = at.map_or(0.0, |p| p.0);
    let du = FRAC_PI_2 / (n - 1) as f64;
    let (_, vref) = golden_max(v, (ustar - du).max(du * 1e-3), (ustar + du).min(FRAC_PI_2), 1e-12);
    let excess = excess.max(vref - v0);
    let (margin, mat) = worst(us.iter().filter(|&&u| u >= 0.1).map(|&u| (u, 0.0)), |u, _| -(v0 - v(u)));
    let margin = -margin;

    // J on the triangle 0 < th* <= pi/4, 0 <= th <= th*
    let tri = || {
        linspace(PI / 4.0 / grid.n_r as f64, PI / 4.0, grid.n_r)
            .flat_map(move |ts| linspace(0.0, ts, grid.n_u).map(move |t| (ts, t)))
    };
    let (jneg, jat) = worst(tri(), |ts, t| -j_function(ts, t));
    let corner = linspace(PI / 4.0 / grid.n_r as f64, PI / 4.0, grid.n_r)
        .map(|ts| j_function(ts, ts).abs())
        .fold(0.0, f64::max);
    let (dneg, dat) = worst(tri(), |ts, t| -j_partial_theta_star(ts, t));
    let checks = vec![
        check("max_excess_over_u0", excess, excess <= ZERO_TOL, at),
        check("margin_for_u_ge_0.1", margin, margin >= STRICT_MARGIN, mat),
        check("j_nonnegative", -jneg, jneg <= ZERO_TOL, jat),
        check("j_corner_zero", corner, corner <= ZERO_TOL, None),
        check("dj_dtheta_star_nonnegative", -dneg, dneg <= ZERO_TOL, dat),
    ];
    Ok(ClaimResult::from_checks(3, checks, margin))
}

/// The value of `2 rU cos^2 u` at `u = pi/2`, i.e. at the binary collision.
pub fn claim4_value(r: f64, u: f64, ctx: &MassContext) -> Result<f64> {
    Ok(2.0 * eval_fields(r, u, ctx)?.ru_c2)
}

/// Positivity and `r`-independence of `2 rU cos^2 u` at `u = pi/2`.
pub fn verify_claim4(ctx: &MassContext, grid: &ClaimGrid) -> Result<ClaimResult> {
    let mut vals = Vec::new();
    for r in linspace(0.0, ctx.r_star, grid.n_r) {
        vals.push((r, claim4_value(r, FRAC_PI_2, ctx)?));
    }
    let (rmin, lim) = vals.iter().copied().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let probes = [1e-3, 0.1_f64.min(ctx.r_star), ctx.r_star];
    let pv: Vec<f64> = probes.iter().map(|&r| claim4_value(r, FRAC_PI_2, ctx)).collect::<Result<_>>()?;
    let spread = pv.iter().fold(0.0_f64, |a, &v| a.max((v - pv[0]).abs()));
    let near = claim4_value(ctx.r_star * 0.5, FRAC_PI_2 - 1e-3, ctx)?;
    let rel = (near - lim).abs() / lim;
    let expected = 4.0 * ctx.m * ctx.n / (ctx.a2 * ctx.theta_star);
    let checks = vec![
        check("lower_bound", lim, lim > STRICT_MARGIN, Some((rmin, FRAC_PI_2))),
        check("r_independence", spread, spread <= 1e-8, None),
        check("convergence_at_1e-3", rel, rel <= 0.01, None),
        check("closed_form_gap", (lim - expected).abs(), (lim - expected).abs() <= 1e-12 * expected, None),
    ];
    Ok(ClaimResult::from_checks(4, checks, lim))
}

/// Pair part `g(r, theta)` of `rU_theta`.
pub fn g_pair(r: f64, theta: f64, ctx: &MassContext) -> f64 {
    let ts = ctx.theta_star;
    let (dm, dp) = (ts - theta, ts + theta);
    let xi = r * ctx.a2 * dm.sin();
    let eta = r * ctx.a2 * dp.sin();
    ctx.m * ctx.n / ctx.a2
        * (dm.cos() * xsin2(xi) / dm.sin().powi(2) - dp.cos() * xsin2(eta) / dp.sin().powi(2))
}

/// Lower bound of `rU_theta cos^4 u / sin u` on `[u0, pi/2] x [0, r*]`.
pub fn verify_claim5(ctx: &MassContext, grid: &ClaimGrid) -> Result<ClaimResult> {
    let q = |r: f64, u: f64| eval_fields(r, u, ctx).map(|p| p.ru_theta_c4 / u.sin()).unwrap_or(f64::NAN);
    let rect = product((0.0, ctx.r_star, grid.n_r), (grid.u0, FRAC_PI_2, grid.n_u));
    let (neg, at) = worst(rect, |r, u| -q(r, u));
    let c3 = -neg;
    let expected = 4.0 * ctx.m * ctx.n / (ctx.a2 * ctx.theta_star.powi(2));
    let lim = q(0.5 * ctx.r_star, FRAC_PI_2 - 1e-6);
    let rel = (lim - expected).abs() / expected;

    let ts = ctx.theta_star;
    let g_axis = linspace(0.0, ctx.r_star, grid.n_r).map(|r| g_pair(r, 0.0, ctx).abs()).fold(0.0, f64::max);
    let g_half = linspace(ctx.r_star / grid.n_r as f64, ctx.r_star, grid.n_r)
        .map(|r| g_pair(r, 0.5 * ts, ctx))
        .fold(f64::INFINITY, f64::min);
    let (gneg, gat) = worst(
        product((0.0, ctx.r_star, grid.n_r), (ts / grid.n_u as f64, ts * (1.0 - 1e-9), grid.n_u)),
        |r, t| -g_pair(r, t, ctx),
    );
    let est = verify_estimates(ctx);
    let checks = vec![
        check("lower_bound_c3", c3, c3 > STRICT_MARGIN, at),
        check("scaled_lower_bound_theta_star_c3", ts * c3, ts * c3 > STRICT_MARGIN, at),
        check("collision_limit_rel_gap", rel, rel <= 1e-6, None),
        check("g_zero_on_axis", g_axis, g_axis <= ZERO_TOL, None),
        check("g_positive_at_half_theta_star", g_half, g_half > STRICT_MARGIN, None),
        check("g_nonnegative", -gneg, gneg <= ZERO_TOL, gat),
        check("sin2_argument_below_pi_over_5", est.sin2_product, est.sin2_below_pi_over_5, None),
    ];
    Ok(ClaimResult::from_checks(5, checks, c3))
}

/// Points of the curve `F = 0` from `A` to `B`, as `(r, u)`.
pub fn f_zero_curve(ctx: &MassContext, h: EnergyLevel, n: usize) -> Result<Vec<(f64, f64)>> {
    let ra = f_zero_point_a(ctx, h)?;
    let mut out = vec![(ra, 0.0)];
    for r in linspace(ra, ctx.r_star, n).skip(1) {
        let u = bisect(|u| big_f(r, u, ctx, h).unwrap_or(f64::INFINITY), 0.0, FRAC_PI_2 - 1e-9, 1e-14)?;
        out.push((r, u));
    }
    Ok(out)
}

/// Monotonicity of `F` in `u` and the shape of `F = 0` near `u = 0`.
pub fn verify_claim6(ctx: &MassContext, grid: &ClaimGrid) -> Result<ClaimResult> {
    let h = EnergyLevel::new(-1.0)?;
    let f = |r: f64, u: f64| big_f(r, u, ctx, h).unwrap_or(f64::NAN);
    let du = 1e-5 * FRAC_PI_2;
    let fu = |r: f64, u: f64, d: f64| (f(r, u + d) - f(r, u - d)) / (2.0 * d);
    let umax = FRAC_PI_2 - 1e-3;
    let rect = || product((0.0, ctx.r_star, grid.n_r), (FRAC_PI_2 / grid.n_u as f64, umax, grid.n_u));
    // shrink the step near the singular edge u = pi/2
    let step = |u: f64| du.min(1e-4 * (FRAC_PI_2 - u));
    let (neg, at) = worst(rect(), |r, u| -fu(r, u, step(u)));
    let (rich, _) = worst(rect(), |r, u| {
        let (a, b) = (fu(r, u, step(u)), fu(r, u, 0.5 * step(u)));
        (a - b).abs() / a.abs().max(1.0)
    });

    let ra = f_zero_point_a(ctx, h)?;
    let alpha = f_zero_point_b(ctx, h)?;
    let fa = f(ra, 0.0);
    let fu_a = fu(ra, 0.0, du);
    let d2 = 1e-3;
    let fuu_a = (f(ra, d2) - 2.0 * f(ra, 0.0) + f(ra, -d2)) / (d2 * d2);
    let curve = f_zero_curve(ctx, h, grid.n_r)?;
    let curve_ok = curve.windows(2).all(|w| w[1].1 >= w[0].1) && (curve.last().map_or(0.0, |p| p.1) - alpha).abs() < 1e-9;

    let xs: Vec<f64> = linspace(PI / 5.0 / 400.0, PI / 5.0, 400).collect();
    let fmax_d1 = xs.iter().map(|&x| f_aux(x).map(|v| v.df).unwrap_or(f64::NAN)).fold(f64::NEG_INFINITY, f64::max);
    let fmin_d2 = xs.iter().map(|&x| f_aux(x).map(|v| v.d2f).unwrap_or(f64::NAN)).fold(f64::INFINITY, f64::min);
    let kmin = xs.iter().map(|&x| k_aux(x)).fold(f64::INFINITY, f64::min).min(k_aux(0.0));
    let rho_max = ctx.r_star * ctx.a1;
    let eta_max = ctx.r_star * ctx.a2 * (2.0 * ctx.theta_star).sin();
    let checks = vec![
        check("f_u_positive", -neg, -neg > STRICT_MARGIN, at),
        check("f_u_richardson_gap", rich, rich <= 1e-6, None),
        check("f_at_a", fa.abs(), fa.abs() <= ZERO_TOL, Some((ra, 0.0))),
        check("f_u_at_a", fu_a.abs(), fu_a.abs() <= ZERO_TOL, Some((ra, 0.0))),
        check("f_uu_at_a", fuu_a, fuu_a > STRICT_MARGIN, Some((ra, 0.0))),
        check("point_b_alpha", alpha, alpha > 0.0 && alpha < FRAC_PI_2, Some((ctx.r_star, alpha))),
        check("curve_a_to_b_monotone", curve.len() as f64, curve_ok, None),
        check("f_prime_negative", fmax_d1, fmax_d1 < 0.0, None),
        check("f_second_nonnegative", fmin_d2, fmin_d2 >= 0.0, None),
        check("k_nonnegative", kmin, kmin >= -ZERO_TOL, None),
        check("rho_at_most_pi_over_5", rho_max, rho_max <= PI / 5.0, None),
        check("eta_below_pi_over_5", eta_max, eta_max < PI / 5.0, None),
    ];
    Ok(ClaimResult::from_checks(6, checks, -neg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimConstants {
    pub ru_theta_theta_origin: f64,
    /// Measured `min_r 2 rU cos^2 u` at `u = pi/2`.
    pub claim4_limit: f64,
    /// `4 m n / (A2 theta*)`, the closed form of the limit above.
    pub claim4_closed_form: f64,
    /// `m n / (2 theta* A2)`, a commonly quoted form of the limit. Recorded
    /// for comparison only: it is 8 times smaller than the measured value.
    pub claim4_reference_constant: f64,
    pub claim5_c3: f64,
    pub claim5_c3_scaled: f64,
    pub claim5_collision_limit: f64,
    pub point_a_r: f64,
    pub point_b_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub m: f64,
    pub grid: ClaimGrid,
    pub claims: Vec<ClaimResult>,
    pub constants: ClaimConstants,
}

impl ClaimReport {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.status == ClaimStatus::Pass)
    }

    pub fn claim(&self, id: u8) -> &ClaimResult {
        &self.claims[(id - 1) as usize]
    }
}

pub fn verify_all(ctx: &MassContext, grid: &ClaimGrid) -> Result<ClaimReport> {
    let claims = vec![
        verify_claim1(ctx, grid)?,
        verify_claim2(ctx)?,
        verify_claim3(ctx, grid)?,
        verify_claim4(ctx, grid)?,
        verify_claim5(ctx, grid)?,
        verify_claim6(ctx, grid)?,
    ];
    let mn = ctx.m * ctx.n;
    let c5 = &claims[4];
    let constants = ClaimConstants {
        ru_theta_theta_origin: ru_theta_theta_origin(ctx),
        claim4_limit: claims[3].margin,
        claim4_closed_form: 4.0 * mn / (ctx.a2 * ctx.theta_star),
        claim4_reference_constant: mn / (2.0 * ctx.theta_star * ctx.a2),
        claim5_c3: c5.margin,
        claim5_c3_scaled: ctx.theta_star * c5.margin,
        claim5_collision_limit: 4.0 * mn / (ctx.a2 * ctx.theta_star.powi(2)),
        point_a_r: claims[5].check("f_at_a").and_then(|c| c.worst_at).map_or(f64::NAN, |p| p.0),
        point_b_alpha: claims[5].check("point_b_alpha").map_or(f64::NAN, |c| c.value),
    };
    Ok(ClaimReport { m: ctx.m, grid: *grid, claims, constants })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> MassContext {
        MassContext::new(1.0 / 3.0).unwrap()
    }

    #[test]
    fn all_claims_pass_for_one_third() {
        let r = verify_all(&third(), &ClaimGrid::default()).unwrap();
        for c in &r.claims {
            assert_eq!(c.status, ClaimStatus::Pass, "{c:#?}");
        }
    }

    #[test]
    fn claim4_constant_for_one_third() {
        let r = verify_claim4(&third(), &ClaimGrid::default()).unwrap();
        assert!(r.margin > 0.05);
        assert!((r.margin - 0.34653).abs() < 1e-5, "{}", r.margin);
    }

    #[test]
    fn claim5_limit_for_one_third() {
        let c = third();
        assert!((4.0 * c.m * c.n / (c.a2 * c.theta_star.powi(2)) - 0.661827).abs() < 1e-6);
    }

    #[test]
    fn j_corner_vanishes() {
        for ts in [0.1, 0.5, PI / 4.0] {
            assert!(j_function(ts, ts).abs() <= ZERO_TOL);
        }
    }

    #[test]
    fn doubling_the_grid_keeps_passes() {
        let c = MassContext::new(0.5).unwrap();
        let g = ClaimGrid { n_r: 21, n_u: 21, u0: 0.05 };
        let a = verify_all(&c, &g).unwrap();
        let b = verify_all(&c, &g.doubled()).unwrap();
        assert!(a.all_pass() && b.all_pass());
    }

    #[test]
    fn all_claims_pass_across_masses() {
        for i in 1..=9 {
            let c = MassContext::new(i as f64 / 10.0).unwrap();
            let r = verify_all(&c, &ClaimGrid::default()).unwrap();
            let bad: Vec<_> = r.claims.iter().filter(|c| c.status != ClaimStatus::Pass).collect();
            assert!(bad.is_empty(), "m = {}: {bad:#?}", c.m);
        }
    }
}
