//! The isosceles problem `x2 = 0`: one degree of freedom in `x1`.
//!
//! With `k = 4m/(1-m)` the potential is `U = n^2 V` where
//! `V = cot x1 + k cot(x1/2)` on `(0, pi)` and
//! `V = -cot x1 + k cot(x1/2)` on `(pi, 2pi)`. The second branch is
//! integrated in `y = 2pi - x1`, in which it reads `cot y - k cot(y/2)`, so
//! both branches share the form `cot z + s k cot(z/2)` on `(0, pi)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ode::{Dopri5, OdeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoscelesState {
    pub x1: f64,
    /// Momentum conjugate to `x1`, `mu1 dx1/dt`.
    pub p1: f64,
}

fn k_of(m: f64) -> f64 {
    4.0 * m / (1.0 - m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    /// `x1 in (0, pi)`, `z = x1`.
    Inner,
    /// `x1 in (pi, 2pi)`, `z = 2pi - x1`.
    Outer,
}

impl Branch {
    fn of(x1: f64) -> Result<Self> {
        if x1 > 0.0 && x1 < PI {
            Ok(Branch::Inner)
        } else if x1 > PI && x1 < 2.0 * PI {
            Ok(Branch::Outer)
        } else {
            Err(Error::InvalidArgument(format!("x1 = {x1} is not in (0, pi) or (pi, 2pi)")))
        }
    }

    fn sign(self) -> f64 {
        match self {
            Branch::Inner => 1.0,
            Branch::Outer => -1.0,
        }
    }

    fn to_z(self, x1: f64) -> f64 {
        match self {
            Branch::Inner => x1,
            Branch::Outer => 2.0 * PI - x1,
        }
    }

    fn to_x(self, z: f64) -> f64 {
        self.to_z(z)
    }
}

fn v_z(z: f64, s: f64, k: f64) -> f64 {
    1.0 / z.tan() + s * k / (0.5 * z).tan()
}

/// `V(x1)` without the `n^2` prefactor.
pub fn iso_potential(x1: f64, m: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::InvalidMass(m));
    }
    let b = Branch::of(x1)?;
    Ok(v_z(b.to_z(x1), b.sign(), k_of(m)))
}

/// The `(pi, 2pi)` branch in the form `tan(x1/2)/2 + (9m-1)/(2(1-m)) cot(x1/2)`.
pub fn iso_potential_outer_alt(x1: f64, m: f64) -> f64 {
    0.5 * (0.5 * x1).tan() + (9.0 * m - 1.0) / (2.0 * (1.0 - m)) / (0.5 * x1).tan()
}

/// Physical potential `U = n^2 V`.
pub fn iso_u(x1: f64, m: f64) -> Result<f64> {
    let n = 0.5 * (1.0 - m);
    Ok(n * n * iso_potential(x1, m)?)
}

pub fn iso_energy(s: &IsoscelesState, m: f64) -> Result<f64> {
    let mu1 = 0.25 * (1.0 - m);
    Ok(s.p1 * s.p1 / (2.0 * mu1) - iso_u(s.x1, m)?)
}

impl IsoscelesState {
    /// State at `x1` with energy `h`; `sign` selects the direction of `p1`.
    pub fn from_energy(x1: f64, h: f64, m: f64, sign: f64) -> Result<Self> {
        let mu1 = 0.25 * (1.0 - m);
        let q = 2.0 * mu1 * (h + iso_u(x1, m)?);
        if q < -1e-14 {
            return Err(Error::InvalidEnergy { h, reason: "x1 lies outside the Hill interval" });
        }
        Ok(Self { x1, p1: sign.signum() * q.max(0.0).sqrt() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    BelowNinth,
    Ninth,
    AboveNinth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OuterMotion {
    /// Reaches `x1 = 2pi` with unbounded velocity.
    CollisionAntipodal,
    Periodic,
    Equilibrium,
    /// The energy level has no admissible point on `(pi, 2pi)`.
    Forbidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrichotomyReport {
    pub m: f64,
    pub h: f64,
    pub regime: Regime,
    pub x1_eq: Option<f64>,
    pub h0: Option<f64>,
    pub outer_motion: OuterMotion,
}

/// Equilibrium of the `(pi, 2pi)` branch for `m > 1/9`.
pub fn outer_equilibrium(m: f64) -> Option<f64> {
    (9.0 * m > 1.0).then(|| 2.0 * (PI - ((9.0 * m - 1.0) / (1.0 - m)).sqrt().atan()))
}

pub fn classify_trichotomy(m: f64, h: f64) -> Result<TrichotomyReport> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::InvalidMass(m));
    }
    let d = 9.0 * m - 1.0;
    let regime = if d.abs() <= 1e-12 {
        Regime::Ninth
    } else if d < 0.0 {
        Regime::BelowNinth
    } else {
        Regime::AboveNinth
    };
    let (x1_eq, h0, outer_motion) = match regime {
        Regime::BelowNinth => (None, None, OuterMotion::CollisionAntipodal),
        // -U decreases from +inf to 0 on (pi, 2pi)
        Regime::Ninth => {
            let motion = if h >= 0.0 { OuterMotion::CollisionAntipodal } else { OuterMotion::Forbidden };
            (None, None, motion)
        }
        Regime::AboveNinth => {
            let xe = outer_equilibrium(m).expect("m > 1/9");
            let h0 = -iso_u(xe, m)?;
            let scale = h0.abs().max(1.0);
            let motion = if (h - h0).abs() <= 1e-12 * scale {
                OuterMotion::Equilibrium
            } else if h > h0 {
                OuterMotion::Periodic
            } else {
                OuterMotion::Forbidden
            };
            (Some(xe), Some(h0), motion)
        }
    };
    Ok(TrichotomyReport { m, h, regime, x1_eq, h0, outer_motion })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsoEnding {
    TripleCollision,
    CollisionAntipodal,
    Periodic,
    Equilibrium,
    /// Ran for the full duration without any of the above.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<IsoscelesState>,
    pub energy: Vec<f64>,
    pub turning_points: Vec<f64>,
    pub ending: IsoEnding,
    /// `|p1|` exceeded [`BLOWUP_MOMENTUM`].
    pub blowup: bool,
}

impl IsoTrajectory {
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }

    pub fn max_excursion(&self) -> f64 {
        let x0 = self.states[0].x1;
        self.states.iter().map(|s| (s.x1 - x0).abs()).fold(0.0, f64::max)
    }
}

pub const BLOWUP_MOMENTUM: f64 = 1e6;

/// Integrates the isosceles flow for `duration` units of physical time.
///
/// Uses the regularized time `dt = z^{3/2} ds` and `v = p_z sqrt(z)`, in which
/// the approach to `z = 0` is smooth: `z` decays exponentially in `s` while
/// `p = v / sqrt(z)` grows without bound. The run stops once `|p1|` passes
/// [`BLOWUP_MOMENTUM`].
pub fn integrate_iso(s0: IsoscelesState, m: f64, duration: f64) -> Result<IsoTrajectory> {
    let b = Branch::of(s0.x1)?;
    let (sg, k) = (b.sign(), k_of(m));
    let n = 0.5 * (1.0 - m);
    let mu1 = 0.5 * n;
    let f = |_s: f64, y: &[f64; 3]| {
        let z = y[0];
        let z2dv = -(z / z.sin()).powi(2) - 2.0 * sg * k * (0.5 * z / (0.5 * z).sin()).powi(2);
        Ok([z * y[1] / mu1, n * n * z2dv + y[1] * y[1] / (2.0 * mu1), z * z.sqrt()])
    };
    let z0 = b.to_z(s0.x1);
    let y0 = [z0, sg * s0.p1 * z0.sqrt(), 0.0];
    let cfg = OdeConfig { rtol: 1e-12, atol: 1e-14, h0: 1e-4, hmax: 0.05, hmin: 1e-14 };
    let mut solver = Dopri5::new(f, 0.0, y0, cfg)?;
    let to_state = |y: &[f64; 3]| IsoscelesState { x1: b.to_x(y[0]), p1: sg * y[1] / y[0].sqrt() };
    let energy = |y: &[f64; 3]| {
        let p = y[1] / y[0].sqrt();
        p * p / (2.0 * mu1) - n * n * v_z(y[0], sg, k)
    };
    let mut out = IsoTrajectory {
        times: vec![0.0],
        states: vec![s0],
        energy: vec![energy(&y0)],
        turning_points: vec![],
        ending: IsoEnding::Undetermined,
        blowup: false,
    };
    let collision = if b == Branch::Inner { IsoEnding::TripleCollision } else { IsoEnding::CollisionAntipodal };
    loop {
        let st = solver.step(f64::INFINITY)?;
        let mut y1 = st.y1;
        let done = y1[2] >= duration;
        if done {
            // cut the last step at t = duration
            let g = |s: f64| Ok(st.dense(s)[2] - duration);
            let (s_end, _) = crate::ode::illinois(g, st.t0, st.y0[2] - duration, st.t1, y1[2] - duration, 1e-13)?;
            y1 = st.dense(s_end);
        }
        if st.y0[1] != 0.0 && st.y0[1].signum() != y1[1].signum() {
            let frac = st.y0[1] / (st.y0[1] - y1[1]);
            out.turning_points.push(st.dense(st.t0 + frac * st.h())[2]);
        }
        out.times.push(y1[2]);
        out.states.push(to_state(&y1));
        out.energy.push(energy(&y1));
        if (y1[1] / y1[0].sqrt()).abs() > BLOWUP_MOMENTUM {
            out.blowup = true;
            out.ending = collision;
            return Ok(out);
        }
        if done {
            break;
        }
    }
    out.ending = if out.max_excursion() <= 1e-6 {
        IsoEnding::Equilibrium
    } else if out.turning_points.len() >= 2 {
        IsoEnding::Periodic
    } else {
        IsoEnding::Undetermined
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MassContext;
    use crate::potential::jacobi_potential;

    #[test]
    fn outer_forms_agree() {
        for m in [0.05, 1.0 / 9.0, 0.2, 0.6] {
            for i in 1..50 {
                let x = PI + PI * i as f64 / 50.0;
                let a = iso_potential(x, m).unwrap();
                let b = iso_potential_outer_alt(x, m);
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{m} {x}");
            }
        }
    }

    #[test]
    fn matches_full_potential() {
        let c = MassContext::new(1.0 / 3.0).unwrap();
        let v = iso_u(2.0, c.m).unwrap();
        assert!((v - jacobi_potential(2.0, 0.0, &c)).abs() < 1e-14);
        let v = iso_u(4.0, c.m).unwrap();
        assert!((v - jacobi_potential(4.0, 0.0, &c)).abs() < 1e-14);
    }

    #[test]
    fn inner_branch_decreasing() {
        for m in [0.05, 0.3, 0.8] {
            let mut prev = f64::INFINITY;
            for i in 1..200 {
                let v = iso_potential(PI * i as f64 / 200.0, m).unwrap();
                assert!(v < prev);
                prev = v;
            }
        }
        assert!(iso_potential(PI, 0.3).is_err());
        assert!(iso_potential(0.0, 0.3).is_err());
    }

    #[test]
    fn trichotomy_examples() {
        let r = classify_trichotomy(0.2, 0.0).unwrap();
        assert_eq!(r.regime, Regime::AboveNinth);
        assert!((r.x1_eq.unwrap() - 1.5 * PI).abs() < 1e-15);
        assert!((r.h0.unwrap() - 0.16).abs() < 1e-15);
        let r = classify_trichotomy(1.0 / 9.0, 0.5).unwrap();
        assert_eq!(r.regime, Regime::Ninth);
        assert_eq!(r.outer_motion, OuterMotion::CollisionAntipodal);
        assert_eq!(classify_trichotomy(1.0 / 9.0, -0.5).unwrap().outer_motion, OuterMotion::Forbidden);
        assert!(iso_u(2.0 * PI - 1e-9, 1.0 / 9.0).unwrap().abs() < 1e-8);
        assert_eq!(classify_trichotomy(0.05, -3.0).unwrap().outer_motion, OuterMotion::CollisionAntipodal);
    }

    #[test]
    fn equilibrium_is_a_minimum_of_minus_u() {
        for m in [0.15, 0.2, 0.5, 0.9] {
            let xe = outer_equilibrium(m).unwrap();
            let e = 1e-4;
            let g = |x: f64| -iso_u(x, m).unwrap();
            assert!(g(xe + e) - 2.0 * g(xe) + g(xe - e) > 0.0);
        }
    }

    #[test]
    fn inner_motion_collides() {
        let s = IsoscelesState { x1: 2.0, p1: 0.0 };
        let tr = integrate_iso(s, 0.3, 50.0).unwrap();
        assert_eq!(tr.ending, IsoEnding::TripleCollision);
        assert!(tr.states.windows(2).all(|w| w[1].x1 <= w[0].x1));
    }
}
