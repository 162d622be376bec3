//! Physical velocity and streamfunction fields rebuilt from a profile.
//!
//! With `F = R f`, the streamfunction is `ψ = (ν x̃ / h) R f(ỹ/h)`, so
//! `u = ∂ψ/∂ỹ = (ν x̃ / h²) R f'` and `v = -∂ψ/∂x̃ = -(ν / h) R f`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Profile;
use crate::roots;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("ỹ = {y} lies outside the channel [-{h}, {h}]")]
    OutOfDomain { y: f64, h: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowGeometry {
    /// Channel semi-height.
    pub h: f64,
    /// Kinematic viscosity.
    pub nu: f64,
    /// Streamwise window `[x̃0, x̃1]`.
    pub x_range: (f64, f64),
}

impl Default for FlowGeometry {
    fn default() -> Self {
        Self {
            h: 1.0,
            nu: 1.0,
            x_range: (0.0, 4.0),
        }
    }
}

impl FlowGeometry {
    pub fn new(h: f64, nu: f64, x_range: (f64, f64)) -> Result<Self, FlowError> {
        let g = Self { h, nu, x_range };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(FlowError::InvalidGeometry(format!(
                "h = {} must be positive",
                self.h
            )));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(FlowError::InvalidGeometry(format!(
                "nu = {} must be positive",
                self.nu
            )));
        }
        let (x0, x1) = self.x_range;
        if !(x0 >= 0.0 && x1 > x0 && x1.is_finite()) {
            return Err(FlowError::InvalidGeometry(format!(
                "x range [{x0}, {x1}] must satisfy 0 <= x0 < x1"
            )));
        }
        Ok(())
    }

    /// `ν R / h`, the factor in front of `x̃ f` in the streamfunction.
    fn psi_scale(&self, reynolds: f64) -> f64 {
        self.nu * reynolds / self.h
    }
}

fn check_y(y: f64, geo: &FlowGeometry) -> Result<f64, FlowError> {
    if !(y.abs() <= geo.h) {
        return Err(FlowError::OutOfDomain { y, h: geo.h });
    }
    // keeps y/h inside [-1, 1] despite rounding
    Ok((y / geo.h).clamp(-1.0, 1.0))
}

/// Velocity `(u, v)` at a physical point.
pub fn velocity(x: f64, y: f64, p: &Profile, geo: &FlowGeometry) -> Result<(f64, f64), FlowError> {
    geo.validate()?;
    let s = check_y(y, geo)?;
    let v = p.eval(s);
    let r = p.reynolds();
    let u = geo.nu * x / (geo.h * geo.h) * r * v[1];
    let w = -geo.nu / geo.h * r * v[0];
    Ok((u, w))
}

pub fn stream_function(x: f64, y: f64, p: &Profile, geo: &FlowGeometry) -> Result<f64, FlowError> {
    geo.validate()?;
    let s = check_y(y, geo)?;
    Ok(geo.psi_scale(p.reynolds()) * x * p.eval(s)[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
    pub psi: f64,
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn check_grid(nx: usize, ny: usize) -> Result<(), FlowError> {
    if nx < 2 || ny < 2 {
        return Err(FlowError::InvalidGrid(format!(
            "need at least 2 x 2 points, got {nx} x {ny}"
        )));
    }
    Ok(())
}

/// Samples `nx × ny` points covering the window and the full channel,
/// row by row in `ỹ` (rows are computed in parallel).
pub fn sample_field(
    p: &Profile,
    geo: &FlowGeometry,
    nx: usize,
    ny: usize,
) -> Result<Vec<FieldSample>, FlowError> {
    geo.validate()?;
    check_grid(nx, ny)?;
    let xs = axis(geo.x_range.0, geo.x_range.1, nx);
    let ys = axis(-geo.h, geo.h, ny);
    let r = p.reynolds();
    let rows: Vec<Vec<FieldSample>> = ys
        .par_iter()
        .map(|&y| {
            let v = p.eval((y / geo.h).clamp(-1.0, 1.0));
            xs.iter()
                .map(|&x| FieldSample {
                    x,
                    y,
                    u: geo.nu * x / (geo.h * geo.h) * r * v[1],
                    v: -geo.nu / geo.h * r * v[0],
                    psi: geo.psi_scale(r) * x * v[0],
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Second-order difference of `g` at `x` with step `d`, one-sided where
/// `x` is within `d` of `lo` or `hi`.
fn diff<G>(g: G, x: f64, d: f64, lo: f64, hi: f64) -> Result<f64, FlowError>
where
    G: Fn(f64) -> Result<f64, FlowError>,
{
    if x - d < lo {
        Ok((-3.0 * g(x)? + 4.0 * g(x + d)? - g(x + 2.0 * d)?) / (2.0 * d))
    } else if x + d > hi {
        Ok((3.0 * g(x)? - 4.0 * g(x - d)? + g(x - 2.0 * d)?) / (2.0 * d))
    } else {
        Ok((g(x + d)? - g(x - d)?) / (2.0 * d))
    }
}

/// Largest discrete divergence `∂u/∂x̃ + ∂v/∂ỹ` over an `n × n` grid,
/// divided by `U/h` where `U` is the largest speed on the grid. Derivatives
/// are central differences of the sampled velocities.
pub fn divergence_check(p: &Profile, geo: &FlowGeometry, n: usize) -> Result<f64, FlowError> {
    geo.validate()?;
    check_grid(n, n)?;
    let xs = axis(geo.x_range.0, geo.x_range.1, n);
    let ys = axis(-geo.h, geo.h, n);
    let dx = 1e-4 * (geo.x_range.1 - geo.x_range.0);
    let dy = 1e-5 * geo.h;
    let vel = |x: f64, y: f64| velocity(x, y, p, geo);

    let rows: Result<Vec<(f64, f64)>, FlowError> = ys
        .par_iter()
        .map(|&y| {
            let mut div = 0.0_f64;
            let mut speed = 0.0_f64;
            for &x in &xs {
                let (u, v) = vel(x, y)?;
                let dudx = diff(|t| Ok(vel(t, y)?.0), x, dx, geo.x_range.0, f64::INFINITY)?;
                let dvdy = diff(|t| Ok(vel(x, t)?.1), y, dy, -geo.h, geo.h)?;
                div = div.max((dudx + dvdy).abs());
                speed = speed.max(u.hypot(v));
            }
            Ok((div, speed))
        })
        .collect();
    let (div, speed) = rows?
        .into_iter()
        .fold((0.0_f64, 0.0_f64), |(d, s), (dr, sr)| {
            (d.max(dr), s.max(sr))
        });
    if speed == 0.0 {
        return Ok(div);
    }
    Ok(div * geo.h / speed)
}

/// One streamline: an ordered list of `[x̃, ỹ]` points on `ψ = psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub psi: f64,
    pub points: Vec<[f64; 2]>,
}

/// `n` levels equispaced strictly inside the range of `ψ` over the window.
pub fn default_levels(p: &Profile, geo: &FlowGeometry, n: usize) -> Result<Vec<f64>, FlowError> {
    geo.validate()?;
    let c = geo.psi_scale(p.reynolds());
    let (fmin, fmax) = p
        .f()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let (x0, x1) = geo.x_range;
    let corners = [c * x0 * fmin, c * x0 * fmax, c * x1 * fmin, c * x1 * fmax];
    let lo = corners.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = corners.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((1..=n)
        .map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Edge {
    /// Between nodes `(i, j)` and `(i + 1, j)`.
    H(usize, usize),
    /// Between nodes `(i, j)` and `(i, j + 1)`.
    V(usize, usize),
}

struct Contour<'a> {
    p: &'a Profile,
    geo: &'a FlowGeometry,
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// `f` at each grid row.
    fy: Vec<f64>,
    c: f64,
}

impl Contour<'_> {
    fn psi(&self, i: usize, j: usize) -> f64 {
        self.c * self.xs[i] * self.fy[j]
    }

    /// Exact crossing of `level` on an edge. Along a row `ψ` is linear in
    /// `x̃`; along a column it is solved for with the profile interpolant.
    fn crossing(&self, e: Edge, level: f64) -> [f64; 2] {
        match e {
            Edge::H(i, j) => {
                let (xa, xb) = (self.xs[i], self.xs[i + 1]);
                let (pa, pb) = (self.psi(i, j), self.psi(i + 1, j));
                let x = if self.fy[j] != 0.0 {
                    level / (self.c * self.fy[j])
                } else {
                    xa + (xb - xa) * (level - pa) / (pb - pa)
                };
                [x.clamp(xa, xb), self.ys[j]]
            }
            Edge::V(i, j) => {
                let x = self.xs[i];
                let (ya, yb) = (self.ys[j], self.ys[j + 1]);
                let h = self.geo.h;
                let g = |y: f64| {
                    let v = self.p.eval((y / h).clamp(-1.0, 1.0));
                    (self.c * x * v[0] - level, self.c * x * v[1] / h)
                };
                let y = roots::safeguarded(g, ya, yb, 1e-15 * h).unwrap_or_else(|| {
                    let (pa, pb) = (self.psi(i, j), self.psi(i, j + 1));
                    ya + (yb - ya) * (level - pa) / (pb - pa)
                });
                [x, y]
            }
        }
    }

    fn segments(&self, level: f64) -> Vec<(Edge, Edge)> {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        let mut out = Vec::new();
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let corner = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let above = corner.map(|(a, b)| self.psi(a, b) >= level);
                // bottom, right, top, left
                let edges = [
                    Edge::H(i, j),
                    Edge::V(i + 1, j),
                    Edge::H(i, j + 1),
                    Edge::V(i, j),
                ];
                let cut: Vec<Edge> = (0..4)
                    .filter(|&k| above[k] != above[(k + 1) % 4])
                    .map(|k| edges[k])
                    .collect();
                match cut.len() {
                    2 => out.push((cut[0], cut[1])),
                    4 => {
                        // saddle: cut off the corners that disagree with the centre
                        let centre = corner.iter().map(|&(a, b)| self.psi(a, b)).sum::<f64>() / 4.0;
                        let centre_above = centre >= level;
                        // corner k touches edges k - 1 and k (mod 4)
                        for k in 0..4 {
                            if above[k] != centre_above {
                                out.push((edges[(k + 3) % 4], edges[k]));
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        out
    }

    fn polylines(&self, level: f64) -> Vec<Polyline> {
        let segs = self.segments(level);
        let mut touching: HashMap<Edge, Vec<usize>> = HashMap::new();
        for (k, (a, b)) in segs.iter().enumerate() {
            touching.entry(*a).or_default().push(k);
            touching.entry(*b).or_default().push(k);
        }
        let mut used = vec![false; segs.len()];
        let mut chains = Vec::new();

        let walk = |start: usize, from: Edge, used: &mut [bool]| {
            let mut edges = vec![from];
            let mut k = start;
            let mut at = from;
            loop {
                used[k] = true;
                let (a, b) = segs[k];
                let next = if a == at { b } else { a };
                edges.push(next);
                at = next;
                match touching[&at].iter().find(|&&s| !used[s]) {
                    Some(&s) => k = s,
                    None => break,
                }
            }
            edges
        };

        // open chains start at an edge with a single segment; sorting keeps
        // the output independent of hash order
        let mut ends: Vec<(Edge, usize)> = touching
            .iter()
            .filter(|(_, v)| v.len() == 1)
            .map(|(e, v)| (*e, v[0]))
            .collect();
        ends.sort_by_key(|&(e, k)| (k, e));
        for (e, k) in ends {
            if !used[k] {
                chains.push(walk(k, e, &mut used));
            }
        }
        for k in 0..segs.len() {
            if !used[k] {
                chains.push(walk(k, segs[k].0, &mut used));
            }
        }
        chains
            .into_iter()
            .map(|edges| Polyline {
                psi: level,
                points: edges.iter().map(|&e| self.crossing(e, level)).collect(),
            })
            .collect()
    }
}

/// Level sets of `ψ` traced by marching squares on an `nx × ny` grid, one
/// or more polylines per level. Crossing points are placed on the exact
/// streamfunction, so `ψ` is conserved along each polyline up to the
/// interpolant's accuracy.
pub fn streamlines(
    p: &Profile,
    geo: &FlowGeometry,
    levels: &[f64],
    nx: usize,
    ny: usize,
) -> Result<Vec<Polyline>, FlowError> {
    geo.validate()?;
    check_grid(nx, ny)?;
    let ys = axis(-geo.h, geo.h, ny);
    let fy = ys
        .iter()
        .map(|&y| p.eval((y / geo.h).clamp(-1.0, 1.0))[0])
        .collect();
    let grid = Contour {
        p,
        geo,
        xs: axis(geo.x_range.0, geo.x_range.1, nx),
        ys,
        fy,
        c: geo.psi_scale(p.reynolds()),
    };
    Ok(levels
        .par_iter()
        .flat_map_iter(|&l| grid.polylines(l))
        .collect())
}

/// Largest `|ψ(point) - level|` over all polylines, relative to the largest
/// `|ψ|` on the window.
pub fn psi_deviation(
    lines: &[Polyline],
    p: &Profile,
    geo: &FlowGeometry,
) -> Result<f64, FlowError> {
    let fmax = p.f().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let scale = geo.psi_scale(p.reynolds()) * geo.x_range.1 * fmax;
    let mut worst = 0.0_f64;
    for l in lines {
        for pt in &l.points {
            let psi = stream_function(pt[0], pt[1], p, geo)?;
            worst = worst.max((psi - l.psi).abs());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Intervals of `ỹ` where the cross-flow is reversed (`f < 0`, so `v > 0`
/// and fluid moves towards the injecting wall).
pub fn reversal_bands(p: &Profile, geo: &FlowGeometry) -> Vec<(f64, f64)> {
    let m = p.mesh();
    let f = p.f();
    let zero = |a: usize| {
        let g = |y: f64| {
            let v = p.eval(y);
            (v[0], v[1])
        };
        roots::safeguarded(g, m[a], m[a + 1], 1e-14).unwrap_or(m[a])
    };
    let mut bands = Vec::new();
    let mut open: Option<f64> = if f[0] < 0.0 { Some(-1.0) } else { None };
    for i in 0..m.len() - 1 {
        if f[i] >= 0.0 && f[i + 1] < 0.0 {
            open = Some(zero(i));
        } else if f[i] < 0.0 && f[i + 1] >= 0.0 {
            if let Some(s) = open.take() {
                bands.push((s, zero(i)));
            }
        }
    }
    if let Some(s) = open {
        bands.push((s, 1.0));
    }
    bands
        .into_iter()
        .map(|(a, b)| (a * geo.h, b * geo.h))
        .collect()
}
