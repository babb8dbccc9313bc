use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use schubart_core::claims::{verify_all, ClaimGrid, ClaimStatus};
use schubart_core::dynamics::{gamma_from_energy, integrate, Direction, EventKind, EventSpec, IntegratorConfig};
use schubart_core::export::{write_contours, write_exits, write_report, write_table, write_trajectory};
use schubart_core::homothetic::{classify_trichotomy, iso_u};
use schubart_core::potential::{zero_velocity_curve, GridSpec};
use schubart_core::shooting::{assemble_period, bracket_and_bisect, face_transitions, scan, scan_at, ShootConfig};
use schubart_core::wazewski::linearize_p;
use schubart_core::{EnergyLevel, MassContext, RegionLabel, RegularizedState};

#[derive(Parser)]
#[command(name = "schubart", version, about = "Schubart-like orbits of three bodies on a circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the regularized flow from one initial state.
    Simulate(SimulateArgs),
    /// Find the symmetric periodic orbit by shooting.
    Shoot(ShootArgs),
    /// Tabulate the exit map of the Wazewski set over initial radii.
    Wazewski(WazewskiArgs),
    /// Classify the isosceles (homothetic) motions.
    Homothetic(HomotheticArgs),
    /// Check the six inequalities behind the construction.
    Claims(ClaimsArgs),
    /// Extract zero-velocity curves in one configuration region.
    Zvc(ZvcArgs),
    /// Linearize at the triple-collision equilibrium.
    Linearize(LinearizeArgs),
}

/// Mass and energy, taken from flags, then `--config`, then defaults.
#[derive(Args, Clone)]
struct Common {
    /// Mass of the middle body (default 1/3).
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    /// Energy level (default -1).
    #[arg(long, allow_negative_numbers = true)]
    h: Option<f64>,
    /// JSON file with `m` and `h`.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
struct ConfigFile {
    m: Option<f64>,
    h: Option<f64>,
}

/// `a:b:n`, an inclusive grid of `n` points.
#[derive(Debug, Clone, Copy, Serialize)]
struct Range3 {
    a: f64,
    b: f64,
    n: usize,
}

impl Range3 {
    fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.a];
        }
        (0..self.n).map(|i| self.a + (self.b - self.a) * i as f64 / (self.n - 1) as f64).collect()
    }
}

fn parse_range(s: &str) -> std::result::Result<Range3, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("expected a:b:n, got '{s}'"));
    };
    let a: f64 = a.parse().map_err(|_| format!("bad start '{a}'"))?;
    let b: f64 = b.parse().map_err(|_| format!("bad end '{b}'"))?;
    let n: usize = n.parse().map_err(|_| format!("bad count '{n}'"))?;
    if n == 0 || !(a <= b) {
        return Err(format!("need n >= 1 and a <= b in '{s}'"));
    }
    Ok(Range3 { a, b, n })
}

fn parse_event(s: &str) -> std::result::Result<EventKind, String> {
    s.parse::<EventKind>().map_err(|e| e.to_string())
}

fn parse_region(s: &str) -> std::result::Result<RegionLabel, String> {
    s.parse::<RegionLabel>().map_err(|e| e.to_string())
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    #[arg(long)]
    r0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    u0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    nu0: f64,
    /// Explicit gamma; must satisfy the energy relation to 1e-9.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "gamma_from_energy")]
    gamma0: Option<f64>,
    /// Solve the energy relation for gamma >= 0 (the default without --gamma0).
    #[arg(long)]
    gamma_from_energy: bool,
    /// Terminal event such as `u=1.5707963267948966` or `nu=0`.
    #[arg(long, value_parser = parse_event)]
    until: Option<EventKind>,
    #[arg(long, default_value_t = 200.0)]
    sigma_max: f64,
    /// Relative tolerance of the integrator.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    no_projection: bool,
    #[arg(long, default_value = "traj.csv")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ShootArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    /// Scan points used to bracket the face change.
    #[arg(long, default_value_t = 40)]
    scan: usize,
    /// Target for |nu| at u = pi/2.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value = "orbit.csv")]
    out: PathBuf,
    #[arg(long, default_value = "report.json")]
    report: PathBuf,
}

#[derive(Args, Serialize)]
struct WazewskiArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    /// Initial radii `a:b:n`; defaults to `--scan` interior points of the Hill interval.
    #[arg(long, value_parser = parse_range)]
    scan_r0: Option<Range3>,
    #[arg(long, default_value_t = 40)]
    scan: usize,
    #[arg(long, default_value = "exits.csv")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct HomotheticArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    /// Masses `a:b:n` for the trichotomy table.
    #[arg(long, value_parser = parse_range)]
    scan_m: Option<Range3>,
    /// Optional potential-profile CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ClaimsArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    /// Grid points per axis.
    #[arg(long, default_value_t = 41)]
    grid: usize,
    /// Lower cutoff in u for the fifth claim.
    #[arg(long, default_value_t = 0.05)]
    u0: f64,
    #[arg(long, default_value = "claims.json")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ZvcArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    #[arg(long, default_value = "I", value_parser = parse_region)]
    region: RegionLabel,
    /// Grid nodes per axis.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value = "zvc.csv")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct LinearizeArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Config line embedded in every output file.
#[derive(Serialize)]
struct Header<'a, A> {
    command: &'a str,
    m: f64,
    h: f64,
    #[serde(flatten)]
    args: &'a A,
}

/// Failure with a short name for the diagnostic line.
#[derive(Debug)]
struct Failure {
    name: &'static str,
    message: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

fn usage(e: schubart_core::Error) -> Failure {
    Failure { name: e.name(), message: e.to_string() }
}

struct Resolved {
    ctx: MassContext,
    h: f64,
}

fn resolve(cmd: &Command) -> std::result::Result<Resolved, Failure> {
    let c = common(cmd);
    let file = match &c.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure { name: "Config", message: format!("cannot read {}: {e}", p.display()) })?;
            serde_json::from_str::<ConfigFile>(&text)
                .map_err(|e| Failure { name: "Config", message: format!("bad config {}: {e}", p.display()) })?
        }
        None => ConfigFile::default(),
    };
    let m = c.m.or(file.m).unwrap_or(1.0 / 3.0);
    let h = c.h.or(file.h).unwrap_or(-1.0);
    let ctx = MassContext::new(m).map_err(usage)?;
    match cmd {
        Command::Shoot(_) => EnergyLevel::shooting(h),
        Command::Wazewski(_) => EnergyLevel::bound(h),
        _ => EnergyLevel::new(h),
    }
    .map_err(usage)?;
    Ok(Resolved { ctx, h })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn simulate(r: &Resolved, a: &SimulateArgs) -> Result<()> {
    let h = EnergyLevel::new(r.h)?;
    let gamma = match a.gamma0 {
        Some(g) => g,
        None => gamma_from_energy(a.r0, a.nu0, a.u0, &r.ctx, h)?,
    };
    let mut cfg = IntegratorConfig { sigma_max: a.sigma_max, keep_dense: false, ..Default::default() };
    if let Some(t) = a.tol {
        cfg.rel_tol = t;
    }
    if a.no_projection {
        cfg = cfg.without_projection();
    }
    let events: Vec<EventSpec> = a.until.iter().map(|&k| EventSpec::terminal(k, Direction::Either)).collect();
    let tr = integrate(RegularizedState::new(a.r0, a.nu0, a.u0, gamma), 0.0, &r.ctx, h, &cfg, &events)?;
    let header = Header { command: "simulate", m: r.ctx.m, h: r.h, args: a };
    write_trajectory(create(&a.out)?, &header, &tr.samples, &r.ctx)?;
    let last = tr.last();
    let summary = serde_json::json!({
        "samples": tr.samples.len(),
        "termination": tr.termination,
        "sigma": last.sigma,
        "t_phys": last.t_phys,
        "state": last.state,
        "max_energy_residual": tr.max_energy_residual(),
    });
    println!("{summary}");
    Ok(())
}

#[derive(Serialize)]
struct ShootReport<'a> {
    r0: f64,
    gamma0: f64,
    r1: f64,
    gamma1: f64,
    nu_exit: f64,
    sigma_quarter: f64,
    t_quarter: f64,
    sigma_period: f64,
    t_period: f64,
    closure_error: f64,
    closure_state: RegularizedState,
    bisection_trace: &'a [schubart_core::shooting::BisectionStep],
}

fn shoot(r: &Resolved, a: &ShootArgs) -> Result<()> {
    let h = EnergyLevel::shooting(r.h)?;
    let cfg = ShootConfig { scan_points: a.scan, nu_tol: a.tol, ..Default::default() };
    let q = bracket_and_bisect(&r.ctx, h, &cfg)?;
    let orbit = assemble_period(&q, &r.ctx, h, &cfg)?;
    let header = Header { command: "shoot", m: r.ctx.m, h: r.h, args: a };
    write_trajectory(create(&a.out)?, &header, &orbit.samples, &r.ctx)?;
    let report = ShootReport {
        r0: q.r0,
        gamma0: q.gamma0,
        r1: q.r1,
        gamma1: q.gamma1,
        nu_exit: q.nu_exit,
        sigma_quarter: q.sigma1,
        t_quarter: q.t1,
        sigma_period: orbit.sigma_period,
        t_period: orbit.t_period,
        closure_error: orbit.closure_error,
        closure_state: orbit.closure_state,
        bisection_trace: &q.trace,
    };
    let mut w = create(&a.report)?;
    write_report(&mut w, &header, &report)?;
    w.flush()?;
    println!(
        "r0 = {:.12}, |nu| at exit = {:.2e}, period (physical) = {:.9}, closure error = {:.2e}",
        q.r0,
        q.nu_exit.abs(),
        orbit.t_period,
        orbit.closure_error
    );
    Ok(())
}

fn wazewski(r: &Resolved, a: &WazewskiArgs) -> Result<()> {
    let h = EnergyLevel::bound(r.h)?;
    let cfg = IntegratorConfig::default();
    let cells = match a.scan_r0 {
        Some(range) => scan_at(&r.ctx, h, &range.points(), &cfg),
        None => scan(&r.ctx, h, a.scan, &cfg)?,
    };
    let header = Header { command: "wazewski", m: r.ctx.m, h: r.h, args: a };
    write_exits(create(&a.out)?, &header, &cells)?;
    let count = |f: &dyn Fn(&schubart_core::shooting::ScanCell) -> bool| cells.iter().filter(|c| f(c)).count();
    use schubart_core::wazewski::ExitFace;
    let summary = serde_json::json!({
        "cells": cells.len(),
        "b1": count(&|c| c.face() == Some(ExitFace::B1)),
        "b2": count(&|c| c.face() == Some(ExitFace::B2)),
        "unclassified": count(&|c| c.face().is_none()),
        "transitions": face_transitions(&cells),
    });
    println!("{summary}");
    Ok(())
}

fn homothetic(r: &Resolved, a: &HomotheticArgs) -> Result<()> {
    let masses = a.scan_m.map_or_else(|| vec![r.ctx.m], |s| s.points());
    let header = Header { command: "homothetic", m: r.ctx.m, h: r.h, args: a };
    let mut rows = Vec::new();
    for &m in &masses {
        let t = classify_trichotomy(m, r.h)?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:?}"));
        rows.push(vec![
            format!("{m:?}"),
            format!("{:?}", t.regime),
            opt(t.x1_eq),
            opt(t.h0),
            format!("{:?}", t.outer_motion),
        ]);
    }
    let stdout = std::io::stdout();
    write_table(stdout.lock(), &header, &["m", "regime", "x1_eq", "h0", "outer_motion"], rows)?;
    if let Some(path) = &a.out {
        let n = 400;
        let mut prof = Vec::new();
        for &m in &masses {
            for k in 1..2 * n {
                if k == n {
                    continue; // x1 = pi is singular
                }
                let x1 = std::f64::consts::PI * k as f64 / n as f64;
                prof.push(vec![format!("{m:?}"), format!("{x1:?}"), format!("{:?}", iso_u(x1, m)?)]);
            }
        }
        write_table(create(path)?, &header, &["m", "x1", "u"], prof)?;
    }
    Ok(())
}

fn claims(r: &Resolved, a: &ClaimsArgs) -> Result<()> {
    let grid = ClaimGrid { n_r: a.grid, n_u: a.grid, u0: a.u0 };
    let report = verify_all(&r.ctx, &grid)?;
    let header = Header { command: "claims", m: r.ctx.m, h: r.h, args: a };
    let mut w = create(&a.out)?;
    write_report(&mut w, &header, &report)?;
    w.flush()?;
    for c in &report.claims {
        println!("claim {}: {:?} (margin {:.6e})", c.id, c.status, c.margin);
    }
    let failed: Vec<String> =
        report.claims.iter().filter(|c| c.status != ClaimStatus::Pass).map(|c| c.id.to_string()).collect();
    if !failed.is_empty() {
        return Err(Failure { name: "ClaimFailed", message: format!("claims {} did not pass", failed.join(", ")) }.into());
    }
    Ok(())
}

fn zvc(r: &Resolved, a: &ZvcArgs) -> Result<()> {
    let grid = GridSpec { nx: a.grid, ny: a.grid, tol: a.tol };
    let curves = zero_velocity_curve(r.h, a.region, grid, &r.ctx)?;
    let header = Header { command: "zvc", m: r.ctx.m, h: r.h, args: a };
    write_contours(create(&a.out)?, &header, &curves)?;
    let points: usize = curves.iter().map(|c| c.points.len()).sum();
    println!("{} polylines, {points} points", curves.len());
    Ok(())
}

fn linearize(r: &Resolved, a: &LinearizeArgs) -> Result<()> {
    let eq = linearize_p(&r.ctx, EnergyLevel::new(r.h)?)?;
    let header = Header { command: "linearize", m: r.ctx.m, h: r.h, args: a };
    match &a.report {
        Some(p) => {
            let mut w = create(p)?;
            write_report(&mut w, &header, &eq)?;
            w.flush()?;
        }
        None => write_report(std::io::stdout().lock(), &header, &eq)?,
    }
    Ok(())
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Simulate(a) => &a.common,
        Command::Shoot(a) => &a.common,
        Command::Wazewski(a) => &a.common,
        Command::Homothetic(a) => &a.common,
        Command::Claims(a) => &a.common,
        Command::Zvc(a) => &a.common,
        Command::Linearize(a) => &a.common,
    }
}

fn diagnose(e: &anyhow::Error) -> String {
    let name = e
        .chain()
        .find_map(|c| {
            c.downcast_ref::<schubart_core::Error>()
                .map(|x| x.name())
                .or_else(|| c.downcast_ref::<Failure>().map(|f| f.name))
        })
        .unwrap_or("Io");
    let text = format!("{e:#}").replace('\n', " ");
    format!("error[{name}]: {text}")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let resolved = match resolve(&cli.command) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("error[{}]: {}", f.name, f.message.replace('\n', " "));
            return ExitCode::from(2);
        }
    };
    let out = match &cli.command {
        Command::Simulate(a) => simulate(&resolved, a),
        Command::Shoot(a) => shoot(&resolved, a),
        Command::Wazewski(a) => wazewski(&resolved, a),
        Command::Homothetic(a) => homothetic(&resolved, a),
        Command::Claims(a) => claims(&resolved, a),
        Command::Zvc(a) => zvc(&resolved, a),
        Command::Linearize(a) => linearize(&resolved, a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", diagnose(&e));
            ExitCode::from(1)
        }
    }
}
