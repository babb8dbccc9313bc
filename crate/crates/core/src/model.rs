//! Mass parameters and the constants derived from them.
//!
//! Bodies 1 and 2 carry the common mass `n`, body 3 carries `m`, and the
//! total mass is normalized to one, so `n = (1 - m) / 2`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::roots::bisect;

/// Masses and every derived constant used by the dynamics.
///
/// Immutable after construction; `nu0` and `r_star` are computed eagerly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassContext {
    /// Mass of body 3.
    pub m: f64,
    /// Common mass of bodies 1 and 2.
    pub n: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Reduced masses of the Jacobi pair.
    pub mu1: f64,
    pub mu2: f64,
    /// Polar scale factors; in region I `x1 = r A1 cos(theta)`.
    pub a1: f64,
    pub a2: f64,
    /// Half-width of the shape sector, `arctan(sqrt(m))`.
    pub theta_star: f64,
    /// Speed of the triple-collision equilibrium on the homothetic axis.
    pub nu0: f64,
    /// Radius where `U = 1` on the axis `u = 0`.
    pub r_star: f64,
    /// Positive root of `(4mn + n^2) a^2 - 2a - n^2 = 0`, equal to `cot(r_star A1 / 2)`.
    pub cot_half: f64,
}

/// Total energy of the motion.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EnergyLevel(f64);

impl EnergyLevel {
    /// Any finite energy; used for plotting.
    pub fn new(h: f64) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::InvalidEnergy { h, reason: "must be finite" });
        }
        Ok(Self(h))
    }

    /// Energy admissible for the Wazewski construction (`h < 0`).
    pub fn bound(h: f64) -> Result<Self> {
        let e = Self::new(h)?;
        if h >= 0.0 {
            return Err(Error::InvalidEnergy { h, reason: "Wazewski set requires h < 0" });
        }
        Ok(e)
    }

    /// Energy admissible for shooting (`h <= -1`).
    pub fn shooting(h: f64) -> Result<Self> {
        let e = Self::new(h)?;
        if h > -1.0 {
            return Err(Error::InvalidEnergy { h, reason: "shooting requires h <= -1" });
        }
        Ok(e)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `arccot(a) = arctan(1/a)` for `a > 0`, valued in `(0, pi/2)`.
pub fn arccot(a: f64) -> f64 {
    (1.0 / a).atan()
}

impl MassContext {
    /// Builds the context for `m` in `(0, 1)`.
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::InvalidMass(m));
        }
        let n = 0.5 * (1.0 - m);
        let alpha1 = 0.5;
        let alpha2 = 0.5;
        let mu1 = 0.5 * n;
        let mu2 = 2.0 * n * m;
        let a1 = (2.0 / n).sqrt();
        let a2 = ((m + 1.0) / (2.0 * n * m)).sqrt();
        let theta_star = m.sqrt().atan();

        // r U at r = 0, theta = 0: n^2/A1 + 2 m n / (A2 sin theta*).
        let ru_axis = n * n / a1 + 2.0 * m * n / (a2 * theta_star.sin());
        let nu0 = (2.0 * ru_axis).sqrt();

        // (4mn + n^2) a^2 - 2a - n^2 = 0; the product of the roots is negative,
        // so exactly one is positive. Written in the cancellation-free form.
        let qa = 4.0 * m * n + n * n;
        let disc = 4.0 + 4.0 * qa * n * n;
        let cot_half = (2.0 + disc.sqrt()) / (2.0 * qa);
        let r_star = 2.0 / a1 * arccot(cot_half);

        let ctx = Self {
            m,
            n,
            alpha1,
            alpha2,
            mu1,
            mu2,
            a1,
            a2,
            theta_star,
            nu0,
            r_star,
            cot_half,
        };
        debug_assert!({
            let root = ctx.axis_radius(1.0).unwrap_or(f64::NAN);
            ((root - r_star) / r_star).abs() < 1e-12
        });
        Ok(ctx)
    }

    /// Potential `U(r, theta = 0)` on the homothetic axis.
    pub fn axis_potential(&self, r: f64) -> f64 {
        let x = r * self.a1;
        self.n * self.n / x.tan() + 2.0 * self.m * self.n / (0.5 * x).tan()
    }

    /// Radius on the axis `u = 0` where `U = level`, found by bisection.
    ///
    /// `U` decreases monotonically from `+inf` to `-inf` on `(0, pi / A1)`.
    pub fn axis_radius(&self, level: f64) -> Result<f64> {
        let hi = PI / self.a1;
        bisect(|r| self.axis_potential(r) - level, hi * 1e-12, hi * (1.0 - 1e-12), 0.0)
    }

    /// Largest radius on the axis reachable at energy `h`: `U(r, 0) = -h`.
    pub fn hill_radius(&self, h: EnergyLevel) -> Result<f64> {
        if h.value() == -1.0 {
            return Ok(self.r_star);
        }
        self.axis_radius(-h.value())
    }

    /// Outer radius of the blown-up configuration space at shape `u`.
    pub fn blowup_bound(&self, u: f64) -> f64 {
        (self.n / 2.0).sqrt() * PI / (self.theta_star * u.sin()).cos()
    }

    pub fn theta(&self, u: f64) -> f64 {
        self.theta_star * u.sin()
    }
}

/// Truth values of the inequalities that confine the Wazewski rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub cot_half: f64,
    pub half_angle: f64,
    pub sin2_product: f64,
    pub g_of_m: f64,
    /// `cot(r* A1 / 2) >= 7/2`.
    pub cot_at_least_seven_halves: bool,
    /// `r* A1 / 2 <= pi / 10`.
    pub half_angle_at_most_pi_over_10: bool,
    /// `r* A2 sin(2 theta*) < pi / 5`.
    pub sin2_below_pi_over_5: bool,
    /// `g(m) = -7m^4 + 20m^3 - 18m^2 + 4m + 17 >= 16`.
    pub g_at_least_16: bool,
}

impl EstimateReport {
    pub fn all(&self) -> bool {
        self.cot_at_least_seven_halves
            && self.half_angle_at_most_pi_over_10
            && self.sin2_below_pi_over_5
            && self.g_at_least_16
    }
}

pub fn g_of_m(m: f64) -> f64 {
    (((-7.0 * m + 20.0) * m - 18.0) * m + 4.0) * m + 17.0
}

pub fn verify_estimates(ctx: &MassContext) -> EstimateReport {
    let half_angle = ctx.r_star * ctx.a1 / 2.0;
    let cot_half = 1.0 / half_angle.tan();
    let sin2_product = ctx.r_star * ctx.a2 * (2.0 * ctx.theta_star).sin();
    let g = g_of_m(ctx.m);
    EstimateReport {
        cot_half,
        half_angle,
        sin2_product,
        g_of_m: g,
        cot_at_least_seven_halves: cot_half >= 3.5,
        half_angle_at_most_pi_over_10: half_angle <= PI / 10.0,
        sin2_below_pi_over_5: sin2_product < PI / 5.0,
        g_at_least_16: g >= 16.0,
    }
}
