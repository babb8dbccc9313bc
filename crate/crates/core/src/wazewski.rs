//! The Wazewski set `W = {0 <= r <= r*, nu <= 0, 0 <= u <= pi/2, gamma >= 0}`
//! on an energy level, its exit faces, the equilibrium `P` and the branch of
//! its unstable manifold inside the collision manifold.
//!
//! `B1` is the face `u = pi/2`; `B2` is `nu = 0, u < pi/2, F >= 0`.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::coords::RegularizedState;
use crate::dynamics::{
    energy_residual, gamma_from_energy, integrate, nu_from_energy, vector_field, Direction, EventKind, EventSpec,
    IntegratorConfig, Termination, Trajectory,
};
use crate::error::{Error, Result};
use crate::model::{EnergyLevel, MassContext};
use crate::potential::{big_f_c2, ru_theta_theta_origin};
use crate::roots::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExitFace {
    B1,
    B2,
}

impl std::fmt::Display for ExitFace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExitFace::B1 => "B1",
            ExitFace::B2 => "B2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Face {
    GammaZero,
    NuZero,
    UZero,
    UHalfPi,
    RZero,
    RStar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WazewskiMembership {
    pub inside: bool,
    pub faces: Vec<Face>,
    pub immediate_exit: Option<ExitFace>,
    /// On the homothetic axis `u = gamma = 0`.
    pub on_homothetic: bool,
}

const FACE_TOL: f64 = 1e-12;
const ENERGY_TOL: f64 = 1e-9;

pub fn membership(s: &RegularizedState, ctx: &MassContext, h: EnergyLevel) -> WazewskiMembership {
    let on_energy = energy_residual(s, ctx, h).is_ok_and(|e| e.abs() <= ENERGY_TOL);
    let near = |v: f64, t: f64| (v - t).abs() <= FACE_TOL;
    let inside = on_energy
        && s.r >= -FACE_TOL
        && s.r <= ctx.r_star + FACE_TOL
        && s.nu <= FACE_TOL
        && s.u >= -FACE_TOL
        && s.u <= FRAC_PI_2 + FACE_TOL
        && s.gamma >= -FACE_TOL;
    let mut faces = Vec::new();
    for (hit, face) in [
        (near(s.gamma, 0.0), Face::GammaZero),
        (near(s.nu, 0.0), Face::NuZero),
        (near(s.u, 0.0), Face::UZero),
        (near(s.u, FRAC_PI_2), Face::UHalfPi),
        (near(s.r, 0.0), Face::RZero),
        (near(s.r, ctx.r_star), Face::RStar),
    ] {
        if hit {
            faces.push(face);
        }
    }
    let on_homothetic = near(s.u, 0.0) && near(s.gamma, 0.0);
    let immediate_exit = if !inside || on_homothetic {
        None
    } else if near(s.u, FRAC_PI_2) {
        Some(ExitFace::B1)
    } else if near(s.nu, 0.0) && big_f_c2(s.r, s.u, ctx, h).is_ok_and(|f| f >= 0.0) {
        Some(ExitFace::B2)
    } else {
        None
    };
    WazewskiMembership { inside, faces, immediate_exit, on_homothetic }
}

/// Where the orbit from `(r0, 0, 0, gamma0)` leaves `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitRecord {
    pub r0: f64,
    pub exit_state: RegularizedState,
    pub exit_sigma: f64,
    pub exit_t_phys: f64,
    pub face: ExitFace,
    /// Exit lies on the target edge `u = pi/2, nu = 0`.
    pub on_t: bool,
}

impl ExitRecord {
    /// Signed shooting residual: `nu` at exit through `B1` (nonpositive), and
    /// `pi/2 - u` at exit through `B2` (nonnegative). Continuous across the
    /// face change.
    pub fn residual(&self) -> f64 {
        match self.face {
            ExitFace::B1 => self.exit_state.nu,
            ExitFace::B2 => FRAC_PI_2 - self.exit_state.u,
        }
    }
}

pub const ON_T_TOL: f64 = 1e-8;

/// Initial point `(r0, 0, 0, gamma0)` of the shooting segment.
pub fn shooting_start(r0: f64, ctx: &MassContext, h: EnergyLevel) -> Result<RegularizedState> {
    let rmax = ctx.hill_radius(h)?;
    if !(r0 > 0.0 && r0 < rmax) {
        return Err(Error::InvalidArgument(format!("r0 = {r0} outside (0, {rmax})")));
    }
    let g = gamma_from_energy(r0, 0.0, 0.0, ctx, h)?;
    Ok(RegularizedState::new(r0, 0.0, 0.0, g))
}

/// Exit record together with the trajectory that produced it.
pub fn exit_map_trajectory(
    r0: f64,
    ctx: &MassContext,
    h: EnergyLevel,
    cfg: &IntegratorConfig,
) -> Result<(ExitRecord, Option<Trajectory>)> {
    let s0 = shooting_start(r0, ctx, h)?;
    if big_f_c2(r0, 0.0, ctx, h)? >= 0.0 {
        let rec = ExitRecord { r0, exit_state: s0, exit_sigma: 0.0, exit_t_phys: 0.0, face: ExitFace::B2, on_t: false };
        return Ok((rec, None));
    }
    let tr = integrate(s0, 0.0, ctx, h, cfg, &EventSpec::wazewski_exit())?;
    let hit = match tr.termination {
        Termination::SigmaLimit => return Err(Error::NoExit(cfg.sigma_max)),
        Termination::Event(_) => *tr.terminal_event().expect("terminal event recorded"),
    };
    // gamma = w cos u vanishes together with cos u at the B1 face, so only
    // a sign change strictly before it is an exit through gamma = 0.
    if tr.samples.iter().any(|s| s.state.gamma < 0.0 && s.state.u < FRAC_PI_2 - 1e-6) {
        return Err(Error::AnomalousExit("gamma reached zero inside W"));
    }
    let face = if hit.index == 1 { ExitFace::B1 } else { ExitFace::B2 };
    let st = hit.state;
    let on_t = st.nu.abs() <= ON_T_TOL && (st.u - FRAC_PI_2).abs() <= ON_T_TOL;
    let rec = ExitRecord { r0, exit_state: st, exit_sigma: hit.sigma, exit_t_phys: hit.t_phys, face, on_t };
    Ok((rec, Some(tr)))
}

/// Flow-defined map from the shooting segment to the exit set.
pub fn exit_map(r0: f64, ctx: &MassContext, h: EnergyLevel, cfg: &IntegratorConfig) -> Result<ExitRecord> {
    exit_map_trajectory(r0, ctx, h, cfg).map(|(rec, _)| rec)
}

/// Linearization at `P = (0, -nu0, 0, 0)` in the coordinates `(r, u, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumData {
    pub p: RegularizedState,
    pub ru_theta_theta: f64,
    pub jacobian: [[f64; 3]; 3],
    pub jacobian_fd: [[f64; 3]; 3],
    /// `(lambda1, lambda2, lambda3)` with `lambda1 = -theta* nu0` on the
    /// homothetic direction, `lambda2 < 0 < lambda3`.
    pub eigenvalues: [f64; 3],
    /// Eigenvalues of the finite-difference Jacobian, ascending.
    pub eigenvalues_fd: [f64; 3],
    pub eigenvectors: [[f64; 3]; 3],
}

impl EquilibriumData {
    pub fn max_jacobian_mismatch(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.jacobian[i][j] - self.jacobian_fd[i][j]).abs());
            }
        }
        worst
    }
}

/// Reduced field on the energy level: `nu` is eliminated with the negative
/// root, which is the branch through `P`.
fn reduced_field(y: [f64; 3], ctx: &MassContext, h: EnergyLevel) -> Result<[f64; 3]> {
    let nu = nu_from_energy(y[0], y[1], y[2], ctx, h)?;
    let f = vector_field(&RegularizedState::new(y[0], nu, y[1], y[2]), ctx, h)?;
    Ok([f.dr, f.du, f.dgamma])
}

pub fn linearize_p(ctx: &MassContext, h: EnergyLevel) -> Result<EquilibriumData> {
    let ts = ctx.theta_star;
    let nu0 = ctx.nu0;
    let k = ru_theta_theta_origin(ctx);
    let jac = [[-ts * nu0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, ts * ts * k, 0.5 * ts * nu0]];

    let step = 1e-6;
    let mut fd = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut yp = [0.0; 3];
        let mut ym = [0.0; 3];
        yp[j] = step;
        ym[j] = -step;
        let fp = reduced_field(yp, ctx, h)?;
        let fm = reduced_field(ym, ctx, h)?;
        for i in 0..3 {
            fd[i][j] = (fp[i] - fm[i]) / (2.0 * step);
        }
    }

    let tr = 0.5 * ts * nu0;
    let disc = (tr * tr + 4.0 * ts * ts * k).sqrt();
    let l2 = 0.5 * (tr - disc);
    let l3 = 0.5 * (tr + disc);
    let l1 = -ts * nu0;

    let m = Matrix3::from_fn(|i, j| fd[i][j]);
    let mut ev: Vec<f64> = m.complex_eigenvalues().iter().map(|c| c.re).collect();
    ev.sort_by(|a, b| a.total_cmp(b));

    Ok(EquilibriumData {
        p: RegularizedState::new(0.0, -nu0, 0.0, 0.0),
        ru_theta_theta: k,
        jacobian: jac,
        jacobian_fd: fd,
        eigenvalues: [l1, l2, l3],
        eigenvalues_fd: [ev[0], ev[1], ev[2]],
        eigenvectors: [[1.0, 0.0, 0.0], [0.0, 1.0, l2], [0.0, 1.0, l3]],
    })
}

#[derive(Debug, Clone)]
pub struct BranchResult {
    pub trajectory: Trajectory,
    pub exit: RegularizedState,
    /// Largest value of `dnu/du - theta* nu0 / 2` over the samples.
    pub max_slope_excess: f64,
    pub max_abs_r: f64,
}

/// Follows the branch of the unstable manifold of `P` inside `r = 0` that
/// enters `W`, until it reaches `u = pi/2`.
pub fn unstable_branch(ctx: &MassContext, h: EnergyLevel, eps: f64) -> Result<BranchResult> {
    if !(eps > 0.0 && eps < 0.1) {
        return Err(Error::InvalidArgument(format!("branch offset {eps} must lie in (0, 0.1)")));
    }
    let eq = linearize_p(ctx, h)?;
    let l3 = eq.eigenvalues[2];
    let (u, g) = (eps, eps * l3);
    let nu = nu_from_energy(0.0, u, g, ctx, h)?;
    let s0 = RegularizedState::new(0.0, nu, u, g);
    let cfg = IntegratorConfig { sigma_max: 400.0, ..Default::default() };
    let events = [
        EventSpec::terminal(EventKind::U(FRAC_PI_2), Direction::Rising),
        EventSpec::terminal(EventKind::Nu(0.0), Direction::Rising),
    ];
    let tr = integrate(s0, 0.0, ctx, h, &cfg, &events)?;
    match tr.termination {
        Termination::Event(0) => {}
        Termination::Event(_) => return Err(Error::BranchCrossedNuZero(tr.last().state.u)),
        Termination::SigmaLimit => return Err(Error::NoExit(cfg.sigma_max)),
    }
    let bound = 0.5 * ctx.theta_star * ctx.nu0;
    let mut excess = f64::NEG_INFINITY;
    let mut max_r: f64 = 0.0;
    for smp in &tr.samples {
        let f = vector_field(&smp.state, ctx, h)?;
        if f.du > 0.0 {
            excess = excess.max(f.dnu / f.du - bound);
        }
        max_r = max_r.max(smp.state.r.abs());
    }
    Ok(BranchResult { exit: tr.last().state, trajectory: tr, max_slope_excess: excess, max_abs_r: max_r })
}

/// Point `A = (r_A, 0)` where the curve `F = 0` meets `u = 0`.
pub fn f_zero_point_a(ctx: &MassContext, h: EnergyLevel) -> Result<f64> {
    bisect(|r| big_f_c2(r, 0.0, ctx, h).unwrap_or(f64::NAN), 1e-12, ctx.r_star, 1e-15)
}

/// `u`-coordinate of the point `B = (r*, alpha)` where `F = 0` meets `r = r*`.
pub fn f_zero_point_b(ctx: &MassContext, h: EnergyLevel) -> Result<f64> {
    bisect(|u| big_f_c2(ctx.r_star, u, ctx, h).unwrap_or(f64::NAN), 0.0, FRAC_PI_2 - 1e-9, 1e-15)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (MassContext, EnergyLevel) {
        (MassContext::new(1.0 / 3.0).unwrap(), EnergyLevel::new(-1.0).unwrap())
    }

    #[test]
    fn eigenvalues_frozen() {
        let (c, h) = setup();
        let e = linearize_p(&c, h).unwrap();
        let want = [-0.35264648144201964, -0.518_810_487_596_323_9, 0.695_133_728_317_333_7];
        for (got, want) in e.eigenvalues.iter().zip(want) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
        assert!(e.max_jacobian_mismatch() < 1e-6, "{}", e.max_jacobian_mismatch());
        let mut sorted = want;
        sorted.sort_by(|a, b| a.total_cmp(b));
        for (got, want) in e.eigenvalues_fd.iter().zip(sorted) {
            assert!((got - want).abs() < 1e-6);
        }
    }

    #[test]
    fn membership_examples() {
        let (c, h) = setup();
        // F(r, 0) changes sign at r_A = 0.1100870890...
        let g = gamma_from_energy(0.13, 0.0, 0.0, &c, h).unwrap();
        let m = membership(&RegularizedState::new(0.13, 0.0, 0.0, g), &c, h);
        assert!(m.inside && m.immediate_exit.is_none());
        let g = gamma_from_energy(0.1, 0.0, 0.0, &c, h).unwrap();
        assert_eq!(membership(&RegularizedState::new(0.1, 0.0, 0.0, g), &c, h).immediate_exit, Some(ExitFace::B2));
        let r = 1e-3;
        let g = gamma_from_energy(r, 0.0, 0.0, &c, h).unwrap();
        assert_eq!(membership(&RegularizedState::new(r, 0.0, 0.0, g), &c, h).immediate_exit, Some(ExitFace::B2));
        let g = gamma_from_energy(0.1, -0.2, FRAC_PI_2, &c, h).unwrap();
        assert_eq!(membership(&RegularizedState::new(0.1, -0.2, FRAC_PI_2, g), &c, h).immediate_exit, Some(ExitFace::B1));
        let nu = nu_from_energy(0.1, 0.0, 0.0, &c, h).unwrap();
        let m = membership(&RegularizedState::new(0.1, nu, 0.0, 0.0), &c, h);
        assert!(m.inside && m.on_homothetic && m.immediate_exit.is_none());
    }

    #[test]
    fn small_r0_exits_immediately() {
        let (c, h) = setup();
        let rec = exit_map(1e-3, &c, h, &IntegratorConfig::default()).unwrap();
        assert_eq!(rec.face, ExitFace::B2);
        assert_eq!(rec.exit_sigma, 0.0);
        assert_eq!(rec.exit_state.r, 1e-3);
    }

    #[test]
    fn large_r0_exits_through_b1() {
        let (c, h) = setup();
        let rec = exit_map(c.r_star * (1.0 - 1e-4), &c, h, &IntegratorConfig::default()).unwrap();
        assert_eq!(rec.face, ExitFace::B1);
        assert!(rec.exit_state.nu < 0.0);
    }

    #[test]
    fn branch_reaches_collision_with_negative_nu() {
        let (c, h) = setup();
        let b = unstable_branch(&c, h, 1e-8).unwrap();
        assert!(b.exit.nu < 0.0);
        assert!(b.exit.nu > -c.nu0);
        assert!(b.exit.nu < -c.nu0 + FRAC_PI_2 * 0.5 * c.theta_star * c.nu0);
        assert_eq!(b.max_abs_r, 0.0);
        assert!(b.max_slope_excess <= 1e-9);
    }

    #[test]
    fn f_zero_curve_endpoints() {
        let (c, h) = setup();
        let ra = f_zero_point_a(&c, h).unwrap();
        assert!((ra - 0.11008708901468894).abs() < 1e-14, "{ra}");
        let alpha = f_zero_point_b(&c, h).unwrap();
        assert!(alpha > 0.0 && alpha < FRAC_PI_2);
    }
}
