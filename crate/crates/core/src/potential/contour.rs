//! Zero-velocity curves `U(x1, x2) = -h` by marching squares.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

use super::jacobi_potential;
use crate::coords::{classify_region, JacobiState, RegionLabel};
use crate::error::{Error, Result};
use crate::model::MassContext;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// Target for `|U + h|` at refined vertices.
    pub tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nx: 512, ny: 512, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourPolyline {
    pub region: RegionLabel,
    pub h: f64,
    pub points: Vec<(f64, f64)>,
}

impl ContourPolyline {
    pub fn max_level_error(&self, ctx: &MassContext) -> f64 {
        self.points
            .iter()
            .map(|&(x1, x2)| (jacobi_potential(x1, x2, ctx) + self.h).abs())
            .fold(0.0, f64::max)
    }
}

fn bounding_box(region: RegionLabel) -> Result<[f64; 4]> {
    Ok(match region {
        RegionLabel::I => [0.0, PI, -PI / 2.0, PI / 2.0],
        RegionLabel::II => [PI, 2.0 * PI, -PI / 2.0, PI / 2.0],
        RegionLabel::III => [PI, 2.0 * PI, 0.0, PI],
        RegionLabel::IV => [PI, 2.0 * PI, -PI, 0.0],
        RegionLabel::Boundary(_) => {
            return Err(Error::InvalidArgument("contours are extracted per open region".into()))
        }
    })
}

/// Extension of `U + h` past the sides of `region`: `U` tends to `+inf` at a
/// binary collision and to `-inf` at an antipodal mid-segment, so a node beyond
/// a side takes that limit. Nodes beyond sides with opposite limits (near the
/// collision-antipodal corners) are left undefined.
fn outside_limit(region: RegionLabel, x1: f64, x2: f64, ctx: &MassContext) -> f64 {
    let a = ctx.alpha1 * x1 - x2;
    let b = ctx.alpha2 * x1 + x2;
    let c = x1;
    let (inf, neg) = (f64::INFINITY, f64::NEG_INFINITY);
    // (value of the side function, true when the side bounds from above, limit)
    let sides: [(f64, f64, bool, f64); 3] = match region {
        RegionLabel::I => [(a, 0.0, false, inf), (b, 0.0, false, inf), (c, PI, true, neg)],
        RegionLabel::II => [(a, PI, true, neg), (b, PI, true, neg), (c, PI, false, neg)],
        RegionLabel::III => [(b, PI, false, neg), (a, 0.0, false, inf), (c, 2.0 * PI, true, inf)],
        RegionLabel::IV => [(a, PI, false, neg), (b, 0.0, false, inf), (c, 2.0 * PI, true, inf)],
        RegionLabel::Boundary(_) => return f64::NAN,
    };
    let tol = 1e-12;
    let mut limit = None;
    for (v, edge, upper, lim) in sides {
        let beyond = if upper { v >= edge - tol } else { v <= edge + tol };
        if beyond {
            match limit {
                None => limit = Some(lim),
                Some(l) if l == lim => {}
                Some(_) => return f64::NAN,
            }
        }
    }
    limit.unwrap_or(f64::NAN)
}

/// Edge identifier: `(i, j, dir)` with `dir = 0` for the edge from node
/// `(i, j)` to `(i + 1, j)` and `dir = 1` for `(i, j)` to `(i, j + 1)`.
type EdgeKey = (usize, usize, u8);

/// Extracts the level set `U = -h` inside one open region.
///
/// Returns an empty list when the level set misses the region.
pub fn zero_velocity_curve(
    h: f64,
    region: RegionLabel,
    grid: GridSpec,
    ctx: &MassContext,
) -> Result<Vec<ContourPolyline>> {
    if grid.nx < 2 || grid.ny < 2 || !(grid.tol > 0.0) {
        return Err(Error::InvalidArgument("grid needs at least 2x2 nodes and tol > 0".into()));
    }
    let [x0, x1m, y0, y1m] = bounding_box(region)?;
    let (nx, ny) = (grid.nx, grid.ny);
    let dx = (x1m - x0) / (nx - 1) as f64;
    let dy = (y1m - y0) / (ny - 1) as f64;
    let node = |i: usize, j: usize| (x0 + i as f64 * dx, y0 + j as f64 * dy);
    let g = |x: f64, y: f64| {
        let js = JacobiState::new(x, y, 0.0, 0.0);
        if matches!(classify_region(&js, ctx), Ok(l) if l == region) {
            jacobi_potential(x, y, ctx) + h
        } else {
            outside_limit(region, x, y, ctx)
        }
    };

    let mut vals = vec![f64::NAN; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let (x, y) = node(i, j);
            vals[j * nx + i] = g(x, y);
        }
    }
    let val = |i: usize, j: usize| vals[j * nx + i];

    let mut points: HashMap<EdgeKey, (f64, f64)> = HashMap::new();
    let mut crossing = |key: EdgeKey| -> (f64, f64) {
        *points.entry(key).or_insert_with(|| {
            let (i, j, d) = key;
            let (a, b) = if d == 0 { (node(i, j), node(i + 1, j)) } else { (node(i, j), node(i, j + 1)) };
            refine(&g, a, b, grid.tol)
        })
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let v = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            if v.iter().any(|x| x.is_nan()) {
                continue;
            }
            // corners 0..3 anticlockwise; edges: 0 bottom, 1 right, 2 top, 3 left
            let edges: [EdgeKey; 4] = [(i, j, 0), (i + 1, j, 1), (i, j + 1, 0), (i, j, 1)];
            let above: Vec<bool> = v.iter().map(|&x| x > 0.0).collect();
            let cut: Vec<usize> = (0..4).filter(|&e| above[e] != above[(e + 1) % 4]).collect();
            match cut.len() {
                2 => segments.push((edges[cut[0]], edges[cut[1]])),
                4 => {
                    let (x, y) = node(i, j);
                    let centre = g(x + 0.5 * dx, y + 0.5 * dy) > 0.0;
                    // Pair each edge with the neighbour that keeps the centre's
                    // side connected.
                    if centre == above[0] {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }

    let mut chains = chain(&segments);
    chains.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let out = chains
        .into_iter()
        .map(|keys| {
            let mut pts: Vec<(f64, f64)> = Vec::with_capacity(keys.len());
            for k in keys {
                let p = crossing(k);
                if pts.last() != Some(&p) {
                    pts.push(p);
                }
            }
            ContourPolyline { region, h, points: pts }
        })
        .filter(|c| !c.points.is_empty())
        .collect();
    Ok(out)
}

fn refine<G: Fn(f64, f64) -> f64>(g: &G, a: (f64, f64), b: (f64, f64), tol: f64) -> (f64, f64) {
    let at = |t: f64| (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
    let ga = g(a.0, a.1);
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut t = 0.5;
    for _ in 0..200 {
        t = 0.5 * (lo + hi);
        let (x, y) = at(t);
        let gt = g(x, y);
        if gt.abs() <= tol || hi - lo <= f64::EPSILON {
            break;
        }
        if (gt > 0.0) == (ga > 0.0) {
            lo = t;
        } else {
            hi = t;
        }
    }
    at(t)
}

/// Links segments sharing an edge into ordered polylines.
fn chain(segments: &[(EdgeKey, EdgeKey)]) -> Vec<Vec<EdgeKey>> {
    let mut adj: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    // Open chains start at edges touched by a single segment.
    let mut starts: Vec<EdgeKey> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| *k).collect();
    starts.sort_unstable();
    let mut all: Vec<EdgeKey> = adj.keys().copied().collect();
    all.sort_unstable();
    starts.extend(all);
    for start in starts {
        let Some(&first) = adj[&start].iter().find(|&&s| !used[s]) else { continue };
        let mut keys = vec![start];
        let mut cur = start;
        let mut seg = first;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == cur { b } else { a };
            keys.push(next);
            cur = next;
            match adj[&cur].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        out.push(keys);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_one_crosses_axis_at_hill_radius() {
        let c = MassContext::new(1.0 / 3.0).unwrap();
        let curves = zero_velocity_curve(-1.0, RegionLabel::I, GridSpec::default(), &c).unwrap();
        assert!(!curves.is_empty());
        for p in &curves {
            assert!(p.max_level_error(&c) <= 1e-8);
        }
        // crossing of x2 = 0 on the longest polyline
        let pts = &curves[0].points;
        let mut found = None;
        for w in pts.windows(2) {
            let ((xa, ya), (xb, yb)) = (w[0], w[1]);
            if ya == 0.0 {
                found = Some(xa);
            } else if ya * yb < 0.0 {
                found = Some(xa + (xb - xa) * ya / (ya - yb));
            }
        }
        let x = found.expect("curve crosses the axis");
        assert!((x - 0.534_162_768_136_086_5).abs() < 1e-4, "{x}");
    }

    #[test]
    fn boundary_region_is_rejected() {
        let c = MassContext::new(1.0 / 3.0).unwrap();
        let r = zero_velocity_curve(
            0.0,
            RegionLabel::Boundary(crate::coords::BoundaryKind::AntipodalMidSegment),
            GridSpec::default(),
            &c,
        );
        assert!(r.is_err());
    }

    #[test]
    fn chaining_links_consecutive_segments() {
        let s = vec![((0, 0, 0), (1, 0, 1)), ((1, 0, 1), (1, 1, 0)), ((5, 5, 0), (5, 5, 1))];
        let ch = chain(&s);
        assert_eq!(ch.len(), 2);
        assert_eq!(ch.iter().map(|c| c.len()).max(), Some(3));
    }

    #[test]
    fn curves_hugging_the_boundary_are_found() {
        let c = MassContext::new(1.0 / 3.0).unwrap();
        for h in [-100.0, 100.0] {
            let curves = zero_velocity_curve(h, RegionLabel::I, GridSpec::default(), &c).unwrap();
            assert!(!curves.is_empty(), "h = {h}");
            for p in &curves {
                assert!(p.max_level_error(&c) <= 1e-8, "h = {h}: {}", p.max_level_error(&c));
            }
        }
        // region II is bounded by mid-segments only, so U + h < 0 near all sides
        let curves = zero_velocity_curve(100.0, RegionLabel::II, GridSpec { nx: 128, ny: 128, tol: 1e-8 }, &c).unwrap();
        assert!(curves.iter().all(|p| p.max_level_error(&c) <= 1e-8));
    }
}
