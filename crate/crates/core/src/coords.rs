//! Coordinate systems and the maps between them.
//!
//! Four charts are used: body angles on the circle, Jacobi variables,
//! McGehee polar variables `(r, theta, nu, tau)`, and the regularized
//! variables `(r, nu, u, gamma)` with `theta = theta* sin u` and
//! `gamma = tau cos^2 u`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::model::MassContext;

/// Body angles and angular velocities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularConfig {
    pub phi: [f64; 3],
    pub omega: [f64; 3],
}

impl AngularConfig {
    pub fn masses(ctx: &MassContext) -> [f64; 3] {
        [ctx.n, ctx.n, ctx.m]
    }

    /// Angular momentum `J = sum m_i omega_i`.
    pub fn angular_momentum(&self, ctx: &MassContext) -> f64 {
        let w = Self::masses(ctx);
        (0..3).map(|i| w[i] * self.omega[i]).sum()
    }

    /// Twice the kinetic energy, `sum m_i omega_i^2`.
    pub fn twice_kinetic(&self, ctx: &MassContext) -> f64 {
        let w = Self::masses(ctx);
        (0..3).map(|i| w[i] * self.omega[i] * self.omega[i]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiState {
    pub x1: f64,
    pub x2: f64,
    pub u1: f64,
    pub u2: f64,
}

impl JacobiState {
    pub fn new(x1: f64, x2: f64, u1: f64, u2: f64) -> Self {
        Self { x1, x2, u1, u2 }
    }

    pub fn twice_kinetic(&self, ctx: &MassContext) -> f64 {
        ctx.mu1 * self.u1 * self.u1 + ctx.mu2 * self.u2 * self.u2
    }
}

/// McGehee polar variables. `nu = sqrt(r) dr/dt`, `tau = r^{3/2} dtheta/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarState {
    pub r: f64,
    pub theta: f64,
    pub nu: f64,
    pub tau: f64,
}

/// Fully regularized state. `u` is unconstrained; each crossing of
/// `u = pi/2 (mod pi)` is a regularized binary collision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedState {
    pub r: f64,
    pub nu: f64,
    pub u: f64,
    pub gamma: f64,
}

impl RegularizedState {
    pub fn new(r: f64, nu: f64, u: f64, gamma: f64) -> Self {
        Self { r, nu, u, gamma }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.r, self.nu, self.u, self.gamma]
    }

    pub fn from_slice(y: &[f64]) -> Self {
        Self { r: y[0], nu: y[1], u: y[2], gamma: y[3] }
    }

    /// Branch index `k` with `u` in `[k pi - pi/2, k pi + pi/2]`.
    pub fn branch(&self) -> i64 {
        (self.u / PI).round() as i64
    }

    /// Largest coordinate difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        (0..4).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryKind {
    DoubleCollisionSide,
    AntipodalMidSegment,
    TotalCollisionVertex,
    CollisionAntipodalPoint,
}

/// Sub-triangle of the configuration triangle.
///
/// I is the corner at the origin (`x1 < pi`), II the central triangle that
/// contains the isosceles slice `x1 in (pi, 2pi), x2 = 0`, III the corner at
/// `(2pi, pi)` and IV the corner at `(2pi, -pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    I,
    II,
    III,
    IV,
    Boundary(BoundaryKind),
}

impl RegionLabel {
    pub fn is_open_region(&self) -> bool {
        !matches!(self, RegionLabel::Boundary(_))
    }
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegionLabel::I => write!(f, "I"),
            RegionLabel::II => write!(f, "II"),
            RegionLabel::III => write!(f, "III"),
            RegionLabel::IV => write!(f, "IV"),
            RegionLabel::Boundary(k) => write!(f, "boundary:{k:?}"),
        }
    }
}

impl std::str::FromStr for RegionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(RegionLabel::I),
            "II" | "2" => Ok(RegionLabel::II),
            "III" | "3" => Ok(RegionLabel::III),
            "IV" | "4" => Ok(RegionLabel::IV),
            other => Err(Error::InvalidArgument(format!("unknown region '{other}'"))),
        }
    }
}

/// Jacobi variables of an angular configuration.
///
/// The representative is lifted so that `phi1 <= phi3 <= phi2 <= phi1 + 2pi`;
/// configurations ordered the other way round the circle are rejected.
pub fn angles_to_jacobi(cfg: &AngularConfig, ctx: &MassContext) -> Result<JacobiState> {
    let [p1, p2, p3] = cfg.phi;
    let mut d2 = (p2 - p1).rem_euclid(TAU);
    let d3 = (p3 - p1).rem_euclid(TAU);
    if d2 == 0.0 && d3 > 0.0 {
        d2 = TAU;
    }
    if d3 > d2 {
        return Err(Error::BadOrdering);
    }
    let [v1, v2, v3] = cfg.omega;
    Ok(JacobiState {
        x1: d2,
        x2: d3 - ctx.alpha2 * d2,
        u1: v2 - v1,
        u2: v3 - ctx.alpha1 * v1 - ctx.alpha2 * v2,
    })
}

/// Inverse Jacobi map, normalized so that `sum m_i phi_i = 0` and `J = 0`.
pub fn jacobi_to_angles(js: &JacobiState, ctx: &MassContext) -> AngularConfig {
    let m3 = ctx.m;
    let m12 = 2.0 * ctx.n;
    let map = |a: f64, b: f64| [-ctx.alpha2 * a - m3 * b, ctx.alpha1 * a - m3 * b, m12 * b];
    AngularConfig { phi: map(js.x1, js.x2), omega: map(js.u1, js.u2) }
}

/// Arc distances `(d12, d13, d23)`, each in `[0, pi]`.
pub fn distances(js: &JacobiState, ctx: &MassContext) -> (f64, f64, f64) {
    let arc = |d: f64| {
        let d = d.rem_euclid(TAU);
        d.min(TAU - d)
    };
    (
        arc(js.x1),
        arc(js.x2 + ctx.alpha2 * js.x1),
        arc(ctx.alpha1 * js.x1 - js.x2),
    )
}

const REGION_TOL: f64 = 1e-12;

/// Classifies `(x1, x2)` against the triangular decomposition of the
/// configuration space.
pub fn classify_region(js: &JacobiState, ctx: &MassContext) -> Result<RegionLabel> {
    let a = ctx.alpha1 * js.x1 - js.x2; // phi2 - phi3
    let b = ctx.alpha2 * js.x1 + js.x2; // phi3 - phi1
    let c = js.x1; // phi2 - phi1
    let tol = REGION_TOL;
    if a < -tol || b < -tol || c > TAU + tol {
        return Err(Error::OutsideConfigurationSpace);
    }
    let near = |v: f64, t: f64| (v - t).abs() <= tol;
    let mids = [near(a, PI), near(b, PI), near(c, PI)].iter().filter(|&&x| x).count();
    if mids >= 2 {
        return Ok(RegionLabel::Boundary(BoundaryKind::CollisionAntipodalPoint));
    }
    let sides = [near(a, 0.0), near(b, 0.0), near(c, TAU)].iter().filter(|&&x| x).count();
    if sides >= 2 {
        return Ok(RegionLabel::Boundary(BoundaryKind::TotalCollisionVertex));
    }
    if sides == 1 {
        return Ok(RegionLabel::Boundary(BoundaryKind::DoubleCollisionSide));
    }
    if mids == 1 {
        return Ok(RegionLabel::Boundary(BoundaryKind::AntipodalMidSegment));
    }
    Ok(if c < PI {
        RegionLabel::I
    } else if b > PI {
        RegionLabel::III
    } else if a > PI {
        RegionLabel::IV
    } else {
        RegionLabel::II
    })
}

pub fn jacobi_to_polar(js: &JacobiState, ctx: &MassContext) -> Result<PolarState> {
    let (s1, s2) = (ctx.mu1.sqrt(), ctx.mu2.sqrt());
    let (q1, q2) = (s1 * js.x1, s2 * js.x2);
    let (dq1, dq2) = (s1 * js.u1, s2 * js.u2);
    let r = q1.hypot(q2);
    if r == 0.0 {
        return Ok(PolarState { r: 0.0, theta: 0.0, nu: 0.0, tau: 0.0 });
    }
    let theta = q2.atan2(q1);
    if theta.abs() > ctx.theta_star * (1.0 + 1e-12) {
        return Err(Error::ShapeOutOfRange { theta: theta.abs(), theta_star: ctx.theta_star });
    }
    let rdot = (q1 * dq1 + q2 * dq2) / r;
    let thdot = (q1 * dq2 - q2 * dq1) / (r * r);
    Ok(PolarState { r, theta, nu: r.sqrt() * rdot, tau: r * r.sqrt() * thdot })
}

pub fn polar_to_jacobi(ps: &PolarState, ctx: &MassContext) -> Result<JacobiState> {
    if ps.r < 0.0 {
        return Err(Error::NegativeRadius(ps.r));
    }
    let (s1, s2) = (ctx.mu1.sqrt(), ctx.mu2.sqrt());
    let (st, ct) = ps.theta.sin_cos();
    if ps.r == 0.0 {
        return Ok(JacobiState::new(0.0, 0.0, 0.0, 0.0));
    }
    let rdot = ps.nu / ps.r.sqrt();
    let r_thdot = ps.tau / ps.r.sqrt();
    Ok(JacobiState {
        x1: ps.r * ct / s1,
        x2: ps.r * st / s2,
        u1: (rdot * ct - r_thdot * st) / s1,
        u2: (rdot * st + r_thdot * ct) / s2,
    })
}

/// Regularizing map on branch `k`: `u = k pi + (-1)^k arcsin(theta / theta*)`.
pub fn polar_to_regularized(ps: &PolarState, ctx: &MassContext, branch: i64) -> Result<RegularizedState> {
    if ps.theta.abs() > ctx.theta_star * (1.0 + 1e-14) {
        return Err(Error::ShapeOutOfRange { theta: ps.theta.abs(), theta_star: ctx.theta_star });
    }
    let base = (ps.theta / ctx.theta_star).clamp(-1.0, 1.0).asin();
    let sign = if branch.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let u = branch as f64 * PI + sign * base;
    let c = u.cos();
    Ok(RegularizedState { r: ps.r, nu: ps.nu, u, gamma: ps.tau * c * c })
}

/// Inverse regularizing map. `tau` is infinite at a binary collision.
pub fn regularized_to_polar(rs: &RegularizedState, ctx: &MassContext) -> PolarState {
    let c = rs.u.cos();
    PolarState { r: rs.r, theta: ctx.theta(rs.u), nu: rs.nu, tau: rs.gamma / (c * c) }
}

/// Body angles of a regularized state (positions only).
pub fn regularized_positions(rs: &RegularizedState, ctx: &MassContext) -> AngularConfig {
    let theta = ctx.theta(rs.u);
    let js = JacobiState::new(
        rs.r * theta.cos() / ctx.mu1.sqrt(),
        rs.r * theta.sin() / ctx.mu2.sqrt(),
        0.0,
        0.0,
    );
    jacobi_to_angles(&js, ctx)
}

/// Angular velocity of body 1, evaluated in a form that stays finite at the
/// binary collision of bodies 2 and 3 (`u = pi/2 mod 2pi`).
///
/// With `a = 1/(2 sqrt(mu1))`, `b = m / sqrt(mu2)` one has
/// `-a sin(theta) + b cos(theta) = R sin(theta* - theta)`, and
/// `sin(theta* - theta) / cos^2 u` is finite when `sin u -> 1`.
pub fn body1_angular_velocity(rs: &RegularizedState, ctx: &MassContext) -> f64 {
    if rs.r == 0.0 {
        return 0.0;
    }
    let (s, c) = rs.u.sin_cos();
    let c2 = c * c;
    let theta = ctx.theta_star * s;
    let a = 0.5 / ctx.mu1.sqrt();
    let b = ctx.m / ctx.mu2.sqrt();
    let big_r = a.hypot(b);
    let sqrt_r = rs.r.sqrt();
    let rdot = rs.nu / sqrt_r;
    // r * dtheta/dt = tau / sqrt(r) = gamma / (c2 sqrt(r))
    let radial = -rdot * (theta.cos() * a + theta.sin() * b);
    let angular = if s > 0.0 {
        let delta = ctx.theta_star * c2 / (1.0 + s);
        big_r * ctx.theta_star * sinc(delta) / (1.0 + s) * rs.gamma / sqrt_r
    } else {
        big_r * (ctx.theta_star - theta).sin() / c2 * rs.gamma / sqrt_r
    };
    radial - angular
}

/// `sin(x) / x`, exact at zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}
