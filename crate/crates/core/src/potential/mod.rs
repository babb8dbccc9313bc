//! The cotangent potential and the scalar fields derived from it.
//!
//! In region I the three arc distances are `rho = r A1 cos(theta)`,
//! `eta = r A2 sin(theta* + theta)` and `xi = r A2 sin(theta* - theta)`.
//! Every field is written through `x cot x` and `(x / sin x)^2`, both even
//! and analytic at zero, so `r = 0` gives the collision-manifold limits
//! exactly and negative `r` is the even extension.

pub mod contour;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::coords::sinc;
use crate::error::{Error, Result};
use crate::model::{EnergyLevel, MassContext};

pub use contour::{zero_velocity_curve, ContourPolyline, GridSpec};

/// Field values at one point of the blown-up configuration space.
///
/// The `*_c2` / `*_c4` members are multiplied by `cos^2 u` / `cos^4 u` and
/// remain finite at the binary collisions `u = pi/2 (mod pi)`. There
/// (`cos^2 u <= eps^2`) the unscaled members are NaN and `valid` is false.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub ru: f64,
    pub ru_theta: f64,
    pub r2u_r: f64,
    pub ru_c2: f64,
    pub ru_theta_c4: f64,
    pub r2u_r_c2: f64,
    pub valid: bool,
}

const XCOT_SERIES_BELOW: f64 = 1e-2;

/// `x cot x`, even, equal to 1 at the origin.
pub fn xcot(x: f64) -> f64 {
    if x.abs() < XCOT_SERIES_BELOW {
        let y = x * x;
        1.0 - y * (1.0 / 3.0
            + y * (1.0 / 45.0 + y * (2.0 / 945.0 + y * (1.0 / 4725.0 + y * (2.0 / 93555.0)))))
    } else {
        x / x.tan()
    }
}

/// `(x / sin x)^2`, even, equal to 1 at the origin.
pub fn xsin2(x: f64) -> f64 {
    let q = sinc(x);
    1.0 / (q * q)
}

/// Contribution of one `m1 m3` / `m2 m3` pair whose distance is
/// `r A2 sin(delta)`. `k` is `cos^2 u / sin(delta)` evaluated without
/// cancellation.
struct Pair {
    ru: f64,
    ru_theta_abs: f64,
    r2u_r: f64,
    ru_c2: f64,
    ru_theta_abs_c4: f64,
    r2u_r_c2: f64,
}

fn pair(r: f64, delta: f64, k: f64, ctx: &MassContext) -> Pair {
    let sd = delta.sin();
    let arg = r * ctx.a2 * sd;
    let xc = xcot(arg);
    let xs = xsin2(arg);
    let w = ctx.m * ctx.n / ctx.a2;
    let cd = delta.cos();
    Pair {
        ru: w * xc / sd,
        ru_theta_abs: w * cd * xs / (sd * sd),
        r2u_r: -w * xs / sd,
        ru_c2: w * xc * k,
        ru_theta_abs_c4: w * cd * xs * k * k,
        r2u_r_c2: -w * xs * k,
    }
}

/// Core evaluator in terms of `s = sin u` and `c2 = cos^2 u`.
fn eval_sc(r: f64, s: f64, c2: f64, ctx: &MassContext) -> Result<PotentialSample> {
    let ts = ctx.theta_star;
    let theta = ts * s;
    let (st, ct) = theta.sin_cos();
    let rho = r * ctx.a1 * ct;
    if rho.abs() > PI {
        return Err(Error::OutOfDomain { r, bound: PI / (ctx.a1 * ct) });
    }
    if rho.abs() == PI {
        return Err(Error::Singular("antipodal configuration"));
    }

    // Pair 2-3: delta = theta* - theta = theta* (1 - s).
    let (dm, km) = if s > 0.0 {
        let d = ts * c2 / (1.0 + s);
        (d, (1.0 + s) / (ts * sinc(d)))
    } else {
        let d = ts * (1.0 - s);
        (d, c2 / d.sin())
    };
    // Pair 1-3: delta = theta* + theta = theta* (1 + s).
    let (dp, kp) = if s < 0.0 {
        let d = ts * c2 / (1.0 - s);
        (d, (1.0 - s) / (ts * sinc(d)))
    } else {
        let d = ts * (1.0 + s);
        (d, c2 / d.sin())
    };
    let p23 = pair(r, dm, km, ctx);
    let p13 = pair(r, dp, kp, ctx);

    let n2 = ctx.n * ctx.n;
    let xc = xcot(rho);
    let xs = xsin2(rho);
    let t_ru = n2 * xc / (ctx.a1 * ct);
    let t_rut = n2 * st * xs / (ctx.a1 * ct * ct);
    let t_r2ur = -n2 * xs / (ctx.a1 * ct);

    let ru = t_ru + (p13.ru + p23.ru);
    let ru_theta = t_rut + (p23.ru_theta_abs - p13.ru_theta_abs);
    let r2u_r = t_r2ur + (p13.r2u_r + p23.r2u_r);
    let c4 = c2 * c2;
    let ru_c2 = t_ru * c2 + (p13.ru_c2 + p23.ru_c2);
    let ru_theta_c4 = t_rut * c4 + (p23.ru_theta_abs_c4 - p13.ru_theta_abs_c4);
    let r2u_r_c2 = t_r2ur * c2 + (p13.r2u_r_c2 + p23.r2u_r_c2);
    // At a binary collision only the scaled values carry information.
    let valid = c2 > f64::EPSILON * f64::EPSILON;
    let (ru, ru_theta, r2u_r) = if valid { (ru, ru_theta, r2u_r) } else { (f64::NAN, f64::NAN, f64::NAN) };
    Ok(PotentialSample { ru, ru_theta, r2u_r, ru_c2, ru_theta_c4, r2u_r_c2, valid })
}

/// Evaluates `rU`, `rU_theta` and `r^2 U_r` at `(r, theta* sin u)`.
pub fn eval_fields(r: f64, u: f64, ctx: &MassContext) -> Result<PotentialSample> {
    let (s, c) = u.sin_cos();
    eval_sc(r, s, c * c, ctx)
}

/// Evaluates the fields directly in the shape angle `theta`, `|theta| <= theta*`.
pub fn eval_fields_theta(r: f64, theta: f64, ctx: &MassContext) -> Result<PotentialSample> {
    let s = theta / ctx.theta_star;
    if s.abs() > 1.0 {
        return Err(Error::ShapeOutOfRange { theta: theta.abs(), theta_star: ctx.theta_star });
    }
    eval_sc(r, s, (1.0 - s) * (1.0 + s), ctx)
}

/// `rU cos^2 u` on the collision manifold `r = 0`; finite at `u = pi/2`.
pub fn collision_manifold_ru_cos2u(u: f64, ctx: &MassContext) -> f64 {
    eval_fields(0.0, u, ctx).map(|p| p.ru_c2).unwrap_or(f64::NAN)
}

/// Closed form of [`collision_manifold_ru_cos2u`] away from `u = pi/2`.
pub fn collision_manifold_ru_cos2u_closed(u: f64, ctx: &MassContext) -> f64 {
    let theta = ctx.theta(u);
    let (ct, cs) = (theta.cos(), ctx.theta_star.cos());
    let c2 = u.cos().powi(2);
    ctx.n * ctx.n * c2 / (ctx.a1 * ct)
        + 2.0 * ctx.m * ctx.n * ctx.theta_star.sin() / ctx.a2 * c2 * ct / (ct * ct - cs * cs)
}

/// Second shape derivative of `rU` at `r = 0, theta = 0`.
pub fn ru_theta_theta_origin(ctx: &MassContext) -> f64 {
    let s = ctx.theta_star.sin();
    let c = ctx.theta_star.cos();
    ctx.n * ctx.n / ctx.a1 + ctx.m * ctx.n / ctx.a2 * 2.0 * (1.0 + c * c) / (s * s * s)
}

/// `F = 2rU + r^2 U_r + 2rh`, the value of `nu'` at `nu = 0` up to the time
/// scale factor.
pub fn big_f(r: f64, u: f64, ctx: &MassContext, h: EnergyLevel) -> Result<f64> {
    let p = eval_fields(r, u, ctx)?;
    Ok(2.0 * p.ru + p.r2u_r + 2.0 * r * h.value())
}

/// `F cos^2 u`, finite through the binary collision.
pub fn big_f_c2(r: f64, u: f64, ctx: &MassContext, h: EnergyLevel) -> Result<f64> {
    let p = eval_fields(r, u, ctx)?;
    let c2 = u.cos().powi(2);
    Ok(2.0 * p.ru_c2 + p.r2u_r_c2 + 2.0 * r * h.value() * c2)
}

/// Auxiliary function `f(x) = 2 cot x - x / sin^2 x` with its first two
/// derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FAux {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

pub fn f_aux(x: f64) -> Result<FAux> {
    if !(x > 0.0 && x <= PI / 5.0) {
        return Err(Error::InvalidArgument(format!("f_aux requires 0 < x <= pi/5, got {x}")));
    }
    let (s, c) = x.sin_cos();
    let cot = c / s;
    let csc2 = 1.0 / (s * s);
    Ok(FAux {
        f: 2.0 * cot - x * csc2,
        df: -(3.0 - 2.0 * x * cot) * csc2,
        d2f: csc2 * (8.0 * cot - 2.0 * x * csc2 - 4.0 * x * cot * cot),
    })
}

/// `k(x) = 2 sin 2x - 3x`, nonnegative on `[0, pi/5]`.
pub fn k_aux(x: f64) -> f64 {
    2.0 * (2.0 * x).sin() - 3.0 * x
}

fn arc(d: f64) -> (f64, f64) {
    let d = d.rem_euclid(2.0 * PI);
    if d <= PI {
        (d, 1.0)
    } else {
        (2.0 * PI - d, -1.0)
    }
}

/// `U(x1, x2) = n^2 cot d12 + m n (cot d13 + cot d23)` on the whole
/// configuration triangle. Infinite at collisions, `-inf` at antipodes.
pub fn jacobi_potential(x1: f64, x2: f64, ctx: &MassContext) -> f64 {
    let (d12, _) = arc(x1);
    let (d13, _) = arc(x2 + ctx.alpha2 * x1);
    let (d23, _) = arc(ctx.alpha1 * x1 - x2);
    ctx.n * ctx.n / d12.tan() + ctx.m * ctx.n * (1.0 / d13.tan() + 1.0 / d23.tan())
}

/// Gradient `(U_x1, U_x2)` of [`jacobi_potential`].
pub fn jacobi_gradient(x1: f64, x2: f64, ctx: &MassContext) -> (f64, f64) {
    let dcot = |d: f64| -1.0 / d.sin().powi(2);
    let (d12, s12) = arc(x1);
    let (d13, s13) = arc(x2 + ctx.alpha2 * x1);
    let (d23, s23) = arc(ctx.alpha1 * x1 - x2);
    let g12 = ctx.n * ctx.n * dcot(d12) * s12;
    let g13 = ctx.m * ctx.n * dcot(d13) * s13;
    let g23 = ctx.m * ctx.n * dcot(d23) * s23;
    (g12 + ctx.alpha2 * g13 + ctx.alpha1 * g23, g13 - g23)
}

/// Largest value of `U` on thin strips `|d - pi| <= delta` around the three
/// antipodal mid-segments, keeping the other two pair arcs inside
/// `[eps, pi - eps]` so the collision-antipodal endpoints are excluded.
/// Each strip is sampled on an `n x n` grid.
pub fn mid_segment_strip_max(delta: f64, eps: f64, n: usize, ctx: &MassContext) -> f64 {
    let n = n.max(2);
    let lin = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (n - 1) as f64;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        let s = lin(-delta, delta, i);
        for j in 0..n {
            let t = lin(eps, PI - eps, j);
            // (a, b) = (phi2 - phi3, phi3 - phi1), x1 = a + b, x2 = alpha1 x1 - a
            for (a, b) in [(PI + s, t), (t, PI + s), (t, PI + s - t)] {
                let x1 = a + b;
                worst = worst.max(jacobi_potential(x1, ctx.alpha1 * x1 - a, ctx));
            }
        }
    }
    worst
}
