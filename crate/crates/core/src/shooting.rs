//! Shooting along `S = {nu = u = 0}` for the edge `T = {u = pi/2, nu = 0}`,
//! and assembly of the periodic orbit from the resulting quarter.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::coords::{body1_angular_velocity, distances, regularized_positions, JacobiState, RegularizedState};
use crate::dynamics::{integrate, IntegratorConfig, Sample, Termination, Trajectory};
use crate::error::{Error, Result};
use crate::model::{EnergyLevel, MassContext};
use crate::ode::illinois;
use crate::wazewski::{exit_map, exit_map_trajectory, ExitFace, ExitRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootConfig {
    /// Explicit bracket; found by scanning when `None`.
    pub bracket: Option<(f64, f64)>,
    /// Number of scan points over `(0, r_hill)`.
    pub scan_points: usize,
    /// Target for `|nu|` at `u = pi/2`.
    pub nu_tol: f64,
    pub max_bisections: usize,
    pub integrator: IntegratorConfig,
    /// Closure tolerance for the re-integrated period.
    pub closure_tol: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self {
            bracket: None,
            scan_points: 40,
            nu_tol: 1e-8,
            max_bisections: 200,
            integrator: IntegratorConfig::default(),
            closure_tol: 1e-5,
        }
    }
}

/// Outcome of one exit-map evaluation during a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScanCell {
    Exit(ExitRecord),
    NoExit { r0: f64 },
    Failed { r0: f64, error: String },
}

impl ScanCell {
    pub fn r0(&self) -> f64 {
        match self {
            ScanCell::Exit(e) => e.r0,
            ScanCell::NoExit { r0 } | ScanCell::Failed { r0, .. } => *r0,
        }
    }

    pub fn face(&self) -> Option<ExitFace> {
        match self {
            ScanCell::Exit(e) => Some(e.face),
            _ => None,
        }
    }
}

/// Exit map on `n` equally spaced points of `(0, r_hill)`.
pub fn scan(ctx: &MassContext, h: EnergyLevel, n: usize, cfg: &IntegratorConfig) -> Result<Vec<ScanCell>> {
    let rmax = ctx.hill_radius(h)?;
    let r0s: Vec<f64> = (1..=n).map(|i| rmax * i as f64 / (n + 1) as f64).collect();
    Ok(scan_at(ctx, h, &r0s, cfg))
}

/// Exit map at the given initial radii, in order.
pub fn scan_at(ctx: &MassContext, h: EnergyLevel, r0s: &[f64], cfg: &IntegratorConfig) -> Vec<ScanCell> {
    r0s.iter()
        .map(|&r0| match exit_map(r0, ctx, h, cfg) {
            Ok(rec) => ScanCell::Exit(rec),
            Err(Error::NoExit(_)) => ScanCell::NoExit { r0 },
            Err(e) => ScanCell::Failed { r0, error: e.to_string() },
        })
        .collect()
}

/// Consecutive classified cells with faces `B2` then `B1`.
pub fn face_transitions(cells: &[ScanCell]) -> Vec<(f64, f64)> {
    let classified: Vec<(f64, ExitFace)> = cells.iter().filter_map(|c| c.face().map(|f| (c.r0(), f))).collect();
    classified
        .windows(2)
        .filter(|w| w[0].1 == ExitFace::B2 && w[1].1 == ExitFace::B1)
        .map(|w| (w[0].0, w[1].0))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    pub r0: f64,
    pub face: ExitFace,
    pub residual: f64,
}

/// First quarter of the orbit, from `(r0, 0, 0, gamma0)` to `u = pi/2`.
#[derive(Debug, Clone)]
pub struct QuarterOrbit {
    pub r0: f64,
    pub gamma0: f64,
    pub r1: f64,
    pub gamma1: f64,
    /// `nu` at the `u = pi/2` event.
    pub nu_exit: f64,
    /// Regularized duration of the quarter.
    pub sigma1: f64,
    /// Physical duration of the quarter.
    pub t1: f64,
    pub trajectory: Trajectory,
    pub trace: Vec<BisectionStep>,
}

fn evaluate(r0: f64, ctx: &MassContext, h: EnergyLevel, cfg: &IntegratorConfig) -> Result<ExitRecord> {
    match exit_map(r0, ctx, h, cfg) {
        // a cell dwelling near P: step past it
        Err(Error::NoExit(_)) => exit_map(r0 * (1.0 + 1e-12) + 1e-12, ctx, h, cfg),
        other => other,
    }
}

/// Bisects on the exit face inside `(lo, hi)`, then sharpens with a secant
/// pass on the signed residual.
pub fn bisect_bracket(
    lo: f64,
    hi: f64,
    ctx: &MassContext,
    h: EnergyLevel,
    cfg: &ShootConfig,
) -> Result<QuarterOrbit> {
    let icfg = &cfg.integrator;
    let mut trace = Vec::new();
    let record = |rec: &ExitRecord, trace: &mut Vec<BisectionStep>| {
        trace.push(BisectionStep { r0: rec.r0, face: rec.face, residual: rec.residual() });
    };
    let (mut lo, mut hi) = (lo, hi);
    let mut elo = evaluate(lo, ctx, h, icfg)?;
    let mut ehi = evaluate(hi, ctx, h, icfg)?;
    record(&elo, &mut trace);
    record(&ehi, &mut trace);
    if elo.face != ExitFace::B2 || ehi.face != ExitFace::B1 {
        return Err(Error::NoFaceChange);
    }
    for _ in 0..cfg.max_bisections {
        if ehi.exit_state.nu.abs() <= cfg.nu_tol || hi - lo <= 1e-14 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let e = evaluate(mid, ctx, h, icfg)?;
        record(&e, &mut trace);
        match e.face {
            ExitFace::B2 => {
                lo = mid;
                elo = e;
            }
            ExitFace::B1 => {
                hi = mid;
                ehi = e;
            }
        }
    }

    // secant polish on the continuous residual, keeping the best B1 exit
    let mut best = ehi;
    let polish_tol = (cfg.nu_tol * 1e-3).max(1e-13);
    if best.exit_state.nu.abs() > polish_tol && hi > lo {
        let mut phi = |r0: f64| -> Result<f64> {
            let e = evaluate(r0, ctx, h, icfg)?;
            record(&e, &mut trace);
            if e.face == ExitFace::B1 && e.exit_state.nu.abs() < best.exit_state.nu.abs() {
                best = e;
            }
            Ok(e.residual())
        };
        illinois(&mut phi, lo, elo.residual(), hi, ehi.residual(), polish_tol)?;
    }

    let (rec, tr) = exit_map_trajectory(best.r0, ctx, h, icfg)?;
    let tr = tr.ok_or(Error::NoFaceChange)?;
    let s0 = tr.first().state;
    let end = rec.exit_state;
    Ok(QuarterOrbit {
        r0: best.r0,
        gamma0: s0.gamma,
        r1: end.r,
        gamma1: end.gamma,
        nu_exit: end.nu,
        sigma1: rec.exit_sigma,
        t1: rec.exit_t_phys,
        trajectory: tr,
        trace,
    })
}

/// All `B2 -> B1` transitions found by the scan, each polished.
pub fn shoot_all(ctx: &MassContext, h: EnergyLevel, cfg: &ShootConfig) -> Result<Vec<QuarterOrbit>> {
    if h.value() > -1.0 {
        return Err(Error::InvalidEnergy { h: h.value(), reason: "shooting requires h <= -1" });
    }
    let brackets = match cfg.bracket {
        Some(b) => vec![b],
        None => face_transitions(&scan(ctx, h, cfg.scan_points, &cfg.integrator)?),
    };
    if brackets.is_empty() {
        return Err(Error::NoFaceChange);
    }
    brackets.into_iter().map(|(lo, hi)| bisect_bracket(lo, hi, ctx, h, cfg)).collect()
}

/// Quarter orbit for the first face transition.
pub fn bracket_and_bisect(ctx: &MassContext, h: EnergyLevel, cfg: &ShootConfig) -> Result<QuarterOrbit> {
    let mut cfg = *cfg;
    if cfg.bracket.is_none() {
        if h.value() > -1.0 {
            return Err(Error::InvalidEnergy { h: h.value(), reason: "shooting requires h <= -1" });
        }
        let cells = scan(ctx, h, cfg.scan_points, &cfg.integrator)?;
        let first = *face_transitions(&cells).first().ok_or(Error::NoFaceChange)?;
        cfg.bracket = Some(first);
    }
    shoot_all(ctx, h, &cfg).map(|mut v| v.remove(0))
}

/// Reflection about `u = pi/2`: `(r, -nu, pi - u, -gamma)` at `2 sigma1 - sigma`.
pub fn reflect_half_pi(s: &RegularizedState) -> RegularizedState {
    RegularizedState::new(s.r, -s.nu, PI - s.u, -s.gamma)
}

/// Reflection about `u = pi`: `(r, -nu, 2 pi - u, gamma)` at `2 sigma2 - sigma`.
pub fn reflect_pi(s: &RegularizedState) -> RegularizedState {
    RegularizedState::new(s.r, -s.nu, 2.0 * PI - s.u, s.gamma)
}

#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub r0: f64,
    pub gamma0: f64,
    pub r1: f64,
    pub gamma1: f64,
    pub nu_exit: f64,
    pub sigma_period: f64,
    pub t_period: f64,
    /// Samples of the assembled period, `sigma` increasing.
    pub samples: Vec<Sample>,
    /// State reached by integrating one period from `Gamma(0)`.
    pub closure_state: RegularizedState,
    /// Largest coordinate difference between `closure_state` and
    /// `(r0, 0, 2 pi, gamma0)`.
    pub closure_error: f64,
}

/// Re-integrates `periods` periods from `Gamma(0)` and returns the end state
/// together with the largest coordinate mismatch against the start (with
/// `u` shifted by `2 pi` per period).
pub fn closure_run(
    q: &QuarterOrbit,
    periods: usize,
    ctx: &MassContext,
    h: EnergyLevel,
    cfg: &IntegratorConfig,
) -> Result<(RegularizedState, f64)> {
    let s0 = q.trajectory.first().state;
    let sigma = 4.0 * q.sigma1 * periods as f64;
    let run_cfg = IntegratorConfig { sigma_max: sigma, ..*cfg };
    let tr = integrate(s0, 0.0, ctx, h, &run_cfg, &[])?;
    debug_assert_eq!(tr.termination, Termination::SigmaLimit);
    let end = tr.last().state;
    let target = RegularizedState::new(s0.r, s0.nu, s0.u + 2.0 * PI * periods as f64, s0.gamma);
    Ok((end, end.max_abs_diff(&target)))
}

pub fn assemble_period(q: &QuarterOrbit, ctx: &MassContext, h: EnergyLevel, cfg: &ShootConfig) -> Result<PeriodicOrbit> {
    let quarter = &q.trajectory.samples;
    let (s1, t1) = (q.sigma1, q.t1);
    let mut half: Vec<Sample> = quarter.clone();
    for smp in quarter.iter().rev().skip(1) {
        half.push(Sample {
            sigma: 2.0 * s1 - smp.sigma,
            t_phys: 2.0 * t1 - smp.t_phys,
            state: reflect_half_pi(&smp.state),
            energy_residual: smp.energy_residual,
        });
    }
    let mut full = half.clone();
    for smp in half.iter().rev().skip(1) {
        full.push(Sample {
            sigma: 4.0 * s1 - smp.sigma,
            t_phys: 4.0 * t1 - smp.t_phys,
            state: reflect_pi(&smp.state),
            energy_residual: smp.energy_residual,
        });
    }
    let (closure_state, closure_error) = closure_run(q, 1, ctx, h, &cfg.integrator)?;
    if closure_error > cfg.closure_tol {
        return Err(Error::ClosureFailure { error: closure_error, tol: cfg.closure_tol });
    }
    Ok(PeriodicOrbit {
        r0: q.r0,
        gamma0: q.gamma0,
        r1: q.r1,
        gamma1: q.gamma1,
        nu_exit: q.nu_exit,
        sigma_period: 4.0 * s1,
        t_period: 4.0 * t1,
        samples: full,
        closure_state,
        closure_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSample {
    pub t_phys: f64,
    pub phi: [f64; 3],
    /// Angular velocity of body 1.
    pub phi1_dot: f64,
    pub d23: f64,
}

/// Body angles along the orbit in physical time.
pub fn render_physical(orbit: &PeriodicOrbit, ctx: &MassContext) -> Vec<PhysicalSample> {
    orbit
        .samples
        .iter()
        .map(|s| {
            let cfg = regularized_positions(&s.state, ctx);
            let [p1, p2, p3] = cfg.phi;
            let js = JacobiState::new(p2 - p1, p3 - ctx.alpha1 * p1 - ctx.alpha2 * p2, 0.0, 0.0);
            PhysicalSample {
                t_phys: s.t_phys,
                phi: cfg.phi,
                phi1_dot: body1_angular_velocity(&s.state, ctx),
                d23: distances(&js, ctx).2,
            }
        })
        .collect()
}

/// Index of the sample closest to the end of the first quarter.
pub fn quarter_end_index(orbit: &PeriodicOrbit) -> usize {
    orbit
        .samples
        .iter()
        .position(|s| (s.state.u - FRAC_PI_2).abs() < 1e-9)
        .unwrap_or(0)
}
