//! Regularized equations of motion, energy bookkeeping, event-driven
//! integration and an unregularized oracle flow for cross-checks.
//!
//! The integrated vector is `[r, nu, u, gamma, t]` where `t` is physical
//! time, `dt/dsigma = r^{3/2} theta* cos^2 u`.

use serde::{Deserialize, Serialize};

use crate::coords::{distances, polar_to_jacobi, regularized_to_polar, JacobiState, RegularizedState};
use crate::error::{Error, Result};
use crate::model::{EnergyLevel, MassContext};
use crate::ode::{illinois, Dopri5, OdeConfig, Step};
use crate::potential::{eval_fields, jacobi_gradient, jacobi_potential};

/// Below this `|cos u|` the shape velocity `w = gamma / cos u` is taken from
/// the energy relation instead of the quotient.
pub const W_FROM_ENERGY_BELOW: f64 = 0.25;

/// Derivatives with respect to the regularized time `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldEval {
    pub dr: f64,
    pub dnu: f64,
    pub du: f64,
    pub dgamma: f64,
    pub dt: f64,
}

impl FieldEval {
    pub fn to_array(self) -> [f64; 5] {
        [self.dr, self.dnu, self.du, self.dgamma, self.dt]
    }
}

/// `w^2 = gamma^2 / cos^2 u` from the energy relation, clamped at zero.
fn w2_energy(nu: f64, r: f64, ru_c2: f64, c2: f64, h: f64) -> f64 {
    (2.0 * (ru_c2 + r * h * c2) - nu * nu * c2).max(0.0)
}

/// Shape velocity `w = du/dsigma`.
fn shape_velocity(s: &RegularizedState, c: f64, ru_c2: f64, h: f64) -> (f64, f64) {
    if c.abs() >= W_FROM_ENERGY_BELOW {
        let w = s.gamma / c;
        (w, w * w)
    } else {
        let w2 = w2_energy(s.nu, s.r, ru_c2, c * c, h);
        let sign = s.gamma.signum() * c.signum();
        (sign * w2.sqrt(), w2)
    }
}

pub fn vector_field(s: &RegularizedState, ctx: &MassContext, h: EnergyLevel) -> Result<FieldEval> {
    let p = eval_fields(s.r, s.u, ctx)?;
    let (sn, c) = s.u.sin_cos();
    let c2 = c * c;
    let ts = ctx.theta_star;
    let hv = h.value();
    let (w, w2) = shape_velocity(s, c, p.ru_c2, hv);
    Ok(FieldEval {
        dr: ts * s.nu * s.r * c2,
        dnu: ts * (c2 * (-0.5 * s.nu * s.nu + 2.0 * s.r * hv) + 2.0 * p.ru_c2 + p.r2u_r_c2),
        du: w,
        dgamma: -0.5 * ts * s.nu * s.gamma * c2 + ts * p.ru_theta_c4 - 2.0 * sn * w2,
        dt: s.r.abs().powf(1.5) * ts * c2,
    })
}

/// `(nu^2 cos^2 u + gamma^2 / cos^2 u) / 2 - (rU + r h) cos^2 u`.
pub fn energy_residual(s: &RegularizedState, ctx: &MassContext, h: EnergyLevel) -> Result<f64> {
    let p = eval_fields(s.r, s.u, ctx)?;
    let c = s.u.cos();
    let c2 = c * c;
    let w = s.gamma / c;
    let w2 = if w.is_finite() { w * w } else { 0.0 };
    Ok(0.5 * (s.nu * s.nu * c2 + w2) - p.ru_c2 - s.r * h.value() * c2)
}

/// Nonnegative `gamma` putting `(r, nu, u, gamma)` on the energy manifold.
pub fn gamma_from_energy(r: f64, nu: f64, u: f64, ctx: &MassContext, h: EnergyLevel) -> Result<f64> {
    let p = eval_fields(r, u, ctx)?;
    let c = u.cos();
    let c2 = c * c;
    let radicand = 2.0 * (p.ru_c2 + r * h.value() * c2) - nu * nu * c2;
    if radicand < -1e-12 {
        return Err(Error::ImaginaryGamma(radicand));
    }
    Ok(c.abs() * radicand.max(0.0).sqrt())
}

/// `w = gamma / cos u` recovered from energy, with the sign of `gamma / cos u`.
pub fn shape_velocity_from_energy(s: &RegularizedState, ctx: &MassContext, h: EnergyLevel) -> Result<f64> {
    let p = eval_fields(s.r, s.u, ctx)?;
    let c = s.u.cos();
    let w2 = w2_energy(s.nu, s.r, p.ru_c2, c * c, h.value());
    Ok(s.gamma.signum() * c.signum() * w2.sqrt())
}

/// `nu <= 0` solving the energy relation at given `(r, u, gamma)`.
pub fn nu_from_energy(r: f64, u: f64, gamma: f64, ctx: &MassContext, h: EnergyLevel) -> Result<f64> {
    let p = eval_fields(r, u, ctx)?;
    let c2 = u.cos().powi(2);
    let rad = 2.0 * (p.ru_c2 / c2 + r * h.value()) - gamma * gamma / (c2 * c2);
    if rad < -1e-12 || !rad.is_finite() {
        return Err(Error::ImaginaryGamma(rad));
    }
    Ok(-rad.max(0.0).sqrt())
}

/// Moves the state back onto the energy manifold along whichever of `nu`
/// and `gamma` the residual is more sensitive to.
pub fn project_to_energy(s: &mut RegularizedState, ctx: &MassContext, h: EnergyLevel) -> Result<()> {
    let p = eval_fields(s.r, s.u, ctx)?;
    let c = s.u.cos();
    let c2 = c * c;
    let total = 2.0 * (p.ru_c2 + s.r * h.value() * c2);
    if s.nu.abs() * c2 >= s.gamma.abs() / c2 {
        let w = s.gamma / c;
        let rad = (total - w * w) / c2;
        if rad >= 0.0 && rad.is_finite() {
            s.nu = s.nu.signum() * rad.sqrt();
            return Ok(());
        }
    }
    let w2 = (total - s.nu * s.nu * c2).max(0.0);
    s.gamma = s.gamma.signum() * c.abs() * w2.sqrt();
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Rising,
    Falling,
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    U(f64),
    Nu(f64),
    R(f64),
    Gamma(f64),
}

impl EventKind {
    pub fn eval(&self, y: &[f64; 5]) -> f64 {
        match *self {
            EventKind::R(v) => y[0] - v,
            EventKind::Nu(v) => y[1] - v,
            EventKind::U(v) => y[2] - v,
            EventKind::Gamma(v) => y[3] - v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub kind: EventKind,
    pub direction: Direction,
    pub terminal: bool,
}

impl EventSpec {
    pub fn terminal(kind: EventKind, direction: Direction) -> Self {
        Self { kind, direction, terminal: true }
    }

    /// The two exit faces of the Wazewski set: `nu` rising through 0 and
    /// `u` rising through `pi/2`.
    pub fn wazewski_exit() -> [EventSpec; 2] {
        [
            EventSpec::terminal(EventKind::Nu(0.0), Direction::Rising),
            EventSpec::terminal(EventKind::U(std::f64::consts::FRAC_PI_2), Direction::Rising),
        ]
    }

    fn triggered(&self, g0: f64, g1: f64) -> bool {
        let up = g0 < 0.0 && g1 >= 0.0;
        let down = g0 > 0.0 && g1 <= 0.0;
        match self.direction {
            Direction::Rising => up,
            Direction::Falling => down,
            Direction::Either => up || down,
        }
    }
}

impl std::str::FromStr for EventKind {
    type Err = Error;

    /// Parses `u=1.57`, `nu=0`, `r=0.1` or `gamma=0`.
    fn from_str(s: &str) -> Result<Self> {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("event '{s}' must look like name=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad event value in '{s}'")))?;
        match k.trim() {
            "u" => Ok(EventKind::U(v)),
            "nu" => Ok(EventKind::Nu(v)),
            "r" => Ok(EventKind::R(v)),
            "gamma" => Ok(EventKind::Gamma(v)),
            other => Err(Error::InvalidArgument(format!("unknown event variable '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub energy_projection: bool,
    /// Integration stops at this regularized time if no terminal event fires.
    pub sigma_max: f64,
    /// Keep the dense output of every step (needed for `Trajectory::at`).
    pub keep_dense: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            initial_step: 1e-4,
            max_step: 0.05,
            energy_projection: true,
            sigma_max: 200.0,
            keep_dense: false,
        }
    }
}

impl IntegratorConfig {
    pub fn without_projection(mut self) -> Self {
        self.energy_projection = false;
        self
    }

    fn ode(&self) -> OdeConfig {
        OdeConfig { rtol: self.rel_tol, atol: self.abs_tol, h0: self.initial_step, hmax: self.max_step, hmin: 1e-14 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub sigma: f64,
    pub t_phys: f64,
    pub state: RegularizedState,
    pub energy_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventHit {
    /// Index into the event list passed to [`integrate`].
    pub index: usize,
    pub sigma: f64,
    pub t_phys: f64,
    pub state: RegularizedState,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Event(usize),
    SigmaLimit,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<EventHit>,
    pub termination: Termination,
    dense: Vec<Step<5>>,
}

impl Trajectory {
    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn max_energy_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.energy_residual.abs()).fold(0.0, f64::max)
    }

    pub fn terminal_event(&self) -> Option<&EventHit> {
        match self.termination {
            Termination::Event(i) => self.events.iter().rev().find(|e| e.index == i),
            Termination::SigmaLimit => None,
        }
    }

    /// State `[r, nu, u, gamma, t]` at `sigma` from the dense output.
    pub fn at(&self, sigma: f64) -> Option<[f64; 5]> {
        let i = self.dense.partition_point(|s| s.t1 < sigma);
        let st = self.dense.get(i)?;
        (sigma >= st.t0).then(|| st.dense(sigma))
    }

    pub fn has_dense(&self) -> bool {
        !self.dense.is_empty()
    }
}

fn state5(s: &RegularizedState, t: f64) -> [f64; 5] {
    [s.r, s.nu, s.u, s.gamma, t]
}

/// Integrates from `s0` at physical time `t0` until a terminal event or
/// `sigma_max`. Event roots are polished with exact Runge-Kutta sub-steps.
pub fn integrate(
    s0: RegularizedState,
    t0: f64,
    ctx: &MassContext,
    h: EnergyLevel,
    cfg: &IntegratorConfig,
    events: &[EventSpec],
) -> Result<Trajectory> {
    let res0 = energy_residual(&s0, ctx, h)?;
    if res0.abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("initial state is off the energy manifold by {res0:e}")));
    }
    let f = |_s: f64, y: &[f64; 5]| vector_field(&RegularizedState::from_slice(y), ctx, h).map(FieldEval::to_array);
    let mut solver = Dopri5::new(f, 0.0, state5(&s0, t0), cfg.ode())?;
    let mut samples = vec![Sample { sigma: 0.0, t_phys: t0, state: s0, energy_residual: res0 }];
    let mut hits = Vec::new();
    let mut dense = Vec::new();
    let sample = |sigma: f64, y: &[f64; 5]| -> Result<Sample> {
        let st = RegularizedState::from_slice(y);
        Ok(Sample { sigma, t_phys: y[4], state: st, energy_residual: energy_residual(&st, ctx, h)? })
    };
    let project = |y: &mut [f64; 5]| -> Result<()> {
        let mut st = RegularizedState::from_slice(y);
        project_to_energy(&mut st, ctx, h)?;
        y[..4].copy_from_slice(&st.to_array());
        Ok(())
    };

    loop {
        let step = solver.step(cfg.sigma_max)?;
        // earliest event inside this step
        let mut found: Option<(f64, usize, [f64; 5], f64)> = None;
        const PROBES: usize = 4;
        for (idx, ev) in events.iter().enumerate() {
            let mut ta = step.t0;
            let mut ga = ev.kind.eval(&step.y0);
            for k in 1..=PROBES {
                let tb = if k == PROBES { step.t1 } else { step.t0 + step.h() * k as f64 / PROBES as f64 };
                let yb = if k == PROBES { step.y1 } else { step.dense(tb) };
                let gb = ev.kind.eval(&yb);
                if ev.triggered(ga, gb) {
                    if found.is_none_or(|(t, ..)| ta < t) {
                        let (t0s, y0s, k1s) = (step.t0, step.y0, step.k1);
                        let mut phi = |t: f64| -> Result<f64> {
                            let y = solver.substep(t0s, &y0s, &k1s, t - t0s)?;
                            Ok(ev.kind.eval(&y))
                        };
                        let fa = phi(ta)?;
                        let fb = phi(tb)?;
                        let (troot, groot) = if ev.triggered(fa, fb) || (fa == 0.0) != (fb == 0.0) {
                            illinois(&mut phi, ta, fa, tb, fb, 1e-12)?
                        } else {
                            (tb, gb)
                        };
                        let y = solver.substep(t0s, &y0s, &k1s, troot - t0s)?;
                        if found.is_none_or(|(t, ..)| troot < t) {
                            found = Some((troot, idx, y, groot));
                        }
                    }
                    break;
                }
                ta = tb;
                ga = gb;
            }
        }

        if cfg.keep_dense {
            dense.push(step);
        }
        if let Some((troot, idx, mut y, g)) = found {
            if cfg.energy_projection {
                project(&mut y)?;
            }
            let hit = EventHit { index: idx, sigma: troot, t_phys: y[4], state: RegularizedState::from_slice(&y), g };
            hits.push(hit);
            samples.push(sample(troot, &y)?);
            if events[idx].terminal {
                if cfg.keep_dense {
                    if let Some(last) = dense.last_mut() {
                        last.t1 = last.t1.max(troot);
                    }
                }
                return Ok(Trajectory { samples, events: hits, termination: Termination::Event(idx), dense });
            }
        }

        let mut y1 = step.y1;
        if cfg.energy_projection {
            project(&mut y1)?;
            if y1 != step.y1 {
                solver.reset(step.t1, y1)?;
            }
        }
        samples.push(sample(step.t1, &y1)?);
        if step.t1 >= cfg.sigma_max {
            return Ok(Trajectory { samples, events: hits, termination: Termination::SigmaLimit, dense });
        }
    }
}

/// Guard band for the oracle flow: distances stay in `[g, pi - g]`.
pub const ORACLE_GUARD: f64 = 0.05;

/// One step of the oracle flow with its dense output over physical time.
#[derive(Debug, Clone)]
pub struct OracleTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<JacobiState>,
    pub energy: Vec<f64>,
    dense: Vec<Step<4>>,
}

impl OracleTrajectory {
    pub fn at(&self, t: f64) -> Option<JacobiState> {
        let i = self.dense.partition_point(|s| s.t1 < t);
        let st = self.dense.get(i)?;
        (t >= st.t0).then(|| {
            let y = st.dense(t);
            JacobiState::new(y[0], y[1], y[2], y[3])
        })
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }
}

/// `K - U` in Jacobi variables.
pub fn jacobi_energy(js: &JacobiState, ctx: &MassContext) -> f64 {
    0.5 * js.twice_kinetic(ctx) - jacobi_potential(js.x1, js.x2, ctx)
}

fn check_guard(js: &JacobiState, ctx: &MassContext) -> Result<()> {
    let (a, b, c) = distances(js, ctx);
    for d in [a, b, c] {
        if !(ORACLE_GUARD..=std::f64::consts::PI - ORACLE_GUARD).contains(&d) {
            return Err(Error::GuardBand(format!("arc distance {d:.6} within {ORACLE_GUARD} of a singularity")));
        }
    }
    Ok(())
}

/// Euler-Lagrange flow `mu_i x_i'' = dU/dx_i` in physical time, used only as an
/// independent check of the regularized flow.
pub fn oracle_flow(js0: JacobiState, ctx: &MassContext, duration: f64) -> Result<OracleTrajectory> {
    check_guard(&js0, ctx)?;
    let f = |_t: f64, y: &[f64; 4]| {
        let (g1, g2) = jacobi_gradient(y[0], y[1], ctx);
        Ok([y[2], y[3], g1 / ctx.mu1, g2 / ctx.mu2])
    };
    let cfg = OdeConfig { rtol: 1e-12, atol: 1e-14, h0: 1e-5, hmax: 0.01, hmin: 1e-15 };
    let mut solver = Dopri5::new(f, 0.0, [js0.x1, js0.x2, js0.u1, js0.u2], cfg)?;
    let mut out = OracleTrajectory { times: vec![0.0], states: vec![js0], energy: vec![jacobi_energy(&js0, ctx)], dense: vec![] };
    while solver.t() < duration {
        let st = solver.step(duration)?;
        let js = JacobiState::new(st.y1[0], st.y1[1], st.y1[2], st.y1[3]);
        check_guard(&js, ctx)?;
        out.times.push(st.t1);
        out.states.push(js);
        out.energy.push(jacobi_energy(&js, ctx));
        out.dense.push(st);
    }
    Ok(out)
}

/// Oracle states at the requested physical times (which must lie in the run).
pub fn oracle_flow_at(js0: JacobiState, ctx: &MassContext, times: &[f64]) -> Result<Vec<JacobiState>> {
    let tmax = times.iter().copied().fold(0.0, f64::max);
    let run = oracle_flow(js0, ctx, tmax)?;
    times
        .iter()
        .map(|&t| run.at(t).ok_or_else(|| Error::InvalidArgument(format!("time {t} outside oracle run"))))
        .collect()
}

/// Integrates the regularized flow from `s0` over `sigma_span`, maps every
/// sample back to Jacobi variables and compares it with [`oracle_flow`] at the
/// same physical time. Returns the largest absolute deviation in
/// `(x1, x2, x1', x2')` and the number of samples compared.
pub fn oracle_max_error(
    s0: RegularizedState,
    ctx: &MassContext,
    h: EnergyLevel,
    sigma_span: f64,
) -> Result<(f64, usize)> {
    let cfg = IntegratorConfig { sigma_max: sigma_span, ..Default::default() };
    let tr = integrate(s0, 0.0, ctx, h, &cfg, &[])?;
    let to_jacobi = |s: &RegularizedState| polar_to_jacobi(&regularized_to_polar(s, ctx), ctx);
    let js0 = to_jacobi(&s0)?;
    let oracle = oracle_flow(js0, ctx, tr.last().t_phys)?;
    let mut worst: f64 = 0.0;
    for smp in &tr.samples {
        let a = to_jacobi(&smp.state)?;
        let b = oracle
            .at(smp.t_phys)
            .ok_or_else(|| Error::InvalidArgument(format!("time {} outside oracle run", smp.t_phys)))?;
        for d in [a.x1 - b.x1, a.x2 - b.x2, a.u1 - b.u1, a.u2 - b.u2] {
            worst = worst.max(d.abs());
        }
    }
    Ok((worst, tr.samples.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn setup() -> (MassContext, EnergyLevel) {
        (MassContext::new(1.0 / 3.0).unwrap(), EnergyLevel::new(-1.0).unwrap())
    }

    #[test]
    fn equilibrium_is_fixed() {
        let (c, h) = setup();
        let p = RegularizedState::new(0.0, -c.nu0, 0.0, 0.0);
        let f = vector_field(&p, &c, h).unwrap();
        assert_eq!(f.dr, 0.0);
        assert_eq!(f.du, 0.0);
        assert_eq!(f.dgamma, 0.0);
        assert!(f.dnu.abs() < 1e-15);
    }

    #[test]
    fn homothetic_axis_is_invariant() {
        let (c, h) = setup();
        let f = vector_field(&RegularizedState::new(0.1, -0.3, 0.0, 0.0), &c, h).unwrap();
        assert_eq!(f.du, 0.0);
        assert_eq!(f.dgamma, 0.0);
    }

    #[test]
    fn collision_manifold_is_invariant() {
        let (c, h) = setup();
        let nu = -c.nu0 + 0.01;
        let g = gamma_from_energy(0.0, nu, 0.1, &c, h).unwrap();
        assert_eq!(vector_field(&RegularizedState::new(0.0, nu, 0.1, g), &c, h).unwrap().dr, 0.0);
    }

    #[test]
    fn gamma_examples() {
        let (c, h) = setup();
        let g = gamma_from_energy(0.1, 0.0, 0.0, &c, h).unwrap();
        assert!((g - 0.499_971_220_601_872_9).abs() < 1e-14);
        let s = RegularizedState::new(0.1, 0.0, 0.0, g);
        assert!(energy_residual(&s, &c, h).unwrap().abs() < 1e-15);
        assert!((gamma_from_energy(0.0, 0.0, 0.0, &c, h).unwrap() - c.nu0).abs() < 1e-15);
        assert!(gamma_from_energy(c.r_star * 1.2, 0.0, 0.0, &c, h).is_err());
        let gc = gamma_from_energy(0.1, -0.1, FRAC_PI_2, &c, h).unwrap();
        assert!(gc < 1e-15);
        let w = shape_velocity_from_energy(&RegularizedState::new(0.1, -0.1, FRAC_PI_2 - 1e-9, 1e-12), &c, h).unwrap();
        assert!(w > 0.1);
    }

    #[test]
    fn residual_even_in_nu() {
        let (c, h) = setup();
        let a = energy_residual(&RegularizedState::new(0.1, 0.2, 0.4, 0.3), &c, h).unwrap();
        let b = energy_residual(&RegularizedState::new(0.1, -0.2, 0.4, 0.3), &c, h).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn crosses_double_collision() {
        let (c, h) = setup();
        let g = gamma_from_energy(0.1, 0.0, 0.0, &c, h).unwrap();
        let s0 = RegularizedState::new(0.1, 0.0, 0.0, g);
        let cfg = IntegratorConfig { sigma_max: 30.0, ..Default::default() };
        let ev = [EventSpec::terminal(EventKind::U(FRAC_PI_2 + 0.2), Direction::Rising)];
        let tr = integrate(s0, 0.0, &c, h, &cfg, &ev).unwrap();
        assert_eq!(tr.termination, Termination::Event(0));
        let end = tr.last();
        assert!((end.state.u - FRAC_PI_2 - 0.2).abs() < 1e-12);
        assert!(end.t_phys.is_finite() && end.t_phys > 0.0);
        assert!(tr.max_energy_residual() < 1e-9, "{}", tr.max_energy_residual());
    }

    #[test]
    fn homothetic_run_decreases_r() {
        let (c, h) = setup();
        let r0 = 0.1;
        let nu = nu_from_energy(r0, 0.0, 0.0, &c, h).unwrap();
        let s0 = RegularizedState::new(r0, nu, 0.0, 0.0);
        let cfg = IntegratorConfig { sigma_max: 5.0, ..Default::default() };
        let tr = integrate(s0, 0.0, &c, h, &cfg, &[]).unwrap();
        assert_eq!(tr.termination, Termination::SigmaLimit);
        for w in tr.samples.windows(2) {
            assert!(w[1].state.r <= w[0].state.r);
            assert_eq!(w[1].state.u, 0.0);
            assert_eq!(w[1].state.gamma, 0.0);
        }
    }

    #[test]
    fn oracle_isosceles_stays_isosceles() {
        let (c, _) = setup();
        let run = oracle_flow(JacobiState::new(0.4, 0.0, 0.0, 0.0), &c, 0.05).unwrap();
        assert!(run.states.iter().all(|s| s.x2 == 0.0));
        assert!(run.max_energy_drift() < 1e-9);
    }

    #[test]
    fn oracle_guard_band() {
        let (c, _) = setup();
        assert!(matches!(oracle_flow(JacobiState::new(0.04, 0.0, 0.0, 0.0), &c, 1.0), Err(Error::GuardBand(_))));
    }

    #[test]
    fn event_parsing() {
        assert_eq!("u=1.5".parse::<EventKind>().unwrap(), EventKind::U(1.5));
        assert_eq!("nu = 0".parse::<EventKind>().unwrap(), EventKind::Nu(0.0));
        assert!("x=1".parse::<EventKind>().is_err());
    }
}
