//! CSV and JSON emitters. Every file carries the run configuration: CSV files
//! start with a `# {json}` line, JSON reports hold it under `"config"`.

use std::io::Write;

use serde::Serialize;

use crate::coords::regularized_positions;
use crate::dynamics::Sample;
use crate::error::Result;
use crate::model::MassContext;
use crate::potential::ContourPolyline;
use crate::shooting::ScanCell;

pub const TRAJECTORY_HEADER: [&str; 13] =
    ["sigma", "t_phys", "r", "nu", "u", "gamma", "theta", "x1", "x2", "phi1", "phi2", "phi3", "energy_residual"];
pub const CONTOUR_HEADER: [&str; 4] = ["region", "polyline_id", "x1", "x2"];
pub const EXIT_HEADER: [&str; 7] = ["r0", "face", "exit_r", "exit_nu", "exit_u", "exit_gamma", "sigma"];

/// Single-line `# {...}` header holding `config` as compact JSON.
pub fn config_line<C: Serialize>(config: &C) -> Result<String> {
    Ok(format!("# {}\n", serde_json::to_string(config)?))
}

/// Writes the config line, then a CSV table. Floats use the shortest
/// round-trip representation, so output is byte-reproducible.
pub fn write_table<W: Write, C: Serialize>(
    mut w: W,
    config: &C,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    w.write_all(config_line(config)?.as_bytes())?;
    let mut cw = csv::Writer::from_writer(w);
    cw.write_record(header)?;
    for row in rows {
        cw.write_record(&row)?;
    }
    Ok(cw.flush()?)
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn trajectory_rows<'a>(samples: &'a [Sample], ctx: &'a MassContext) -> impl Iterator<Item = Vec<String>> + 'a {
    samples.iter().map(move |s| {
        let st = s.state;
        let theta = ctx.theta(st.u);
        let x1 = st.r * theta.cos() / ctx.mu1.sqrt();
        let x2 = st.r * theta.sin() / ctx.mu2.sqrt();
        let phi = regularized_positions(&st, ctx).phi;
        [s.sigma, s.t_phys, st.r, st.nu, st.u, st.gamma, theta, x1, x2, phi[0], phi[1], phi[2], s.energy_residual]
            .into_iter()
            .map(num)
            .collect()
    })
}

pub fn write_trajectory<W: Write, C: Serialize>(w: W, config: &C, samples: &[Sample], ctx: &MassContext) -> Result<()> {
    write_table(w, config, &TRAJECTORY_HEADER, trajectory_rows(samples, ctx))
}

pub fn write_contours<W: Write, C: Serialize>(w: W, config: &C, polylines: &[ContourPolyline]) -> Result<()> {
    let rows = polylines.iter().enumerate().flat_map(|(id, p)| {
        p.points.iter().map(move |&(x1, x2)| vec![p.region.to_string(), id.to_string(), num(x1), num(x2)])
    });
    write_table(w, config, &CONTOUR_HEADER, rows)
}

/// One row per scan cell; cells without an exit get an empty state and the
/// face `none` or `failed`.
pub fn write_exits<W: Write, C: Serialize>(w: W, config: &C, cells: &[ScanCell]) -> Result<()> {
    let rows = cells.iter().map(|c| match c {
        ScanCell::Exit(e) => {
            let s = e.exit_state;
            vec![num(e.r0), e.face.to_string(), num(s.r), num(s.nu), num(s.u), num(s.gamma), num(e.exit_sigma)]
        }
        ScanCell::NoExit { r0 } => vec![num(*r0), "none".into(), String::new(), String::new(), String::new(), String::new(), String::new()],
        ScanCell::Failed { r0, .. } => {
            vec![num(*r0), "failed".into(), String::new(), String::new(), String::new(), String::new(), String::new()]
        }
    });
    write_table(w, config, &EXIT_HEADER, rows)
}

#[derive(Serialize)]
struct Wrapped<'a, C, R> {
    config: &'a C,
    #[serde(flatten)]
    report: &'a R,
}

/// Pretty JSON with the config merged in as the `"config"` field. `report`
/// must serialize to a JSON object.
pub fn write_report<W: Write, C: Serialize, R: Serialize>(mut w: W, config: &C, report: &R) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &Wrapped { config, report })?;
    Ok(w.write_all(b"\n")?)
}
