//! Pseudo-arclength continuation in `R` and fold location.
//!
//! The arclength condition lives in the `(R, wσ)` plane with `σ = -f''(-1)`,
//! so it only touches the left boundary and the collocation Jacobian stays
//! banded. The profile itself is predicted by secant extrapolation.

use std::sync::Arc;

use rayon::prelude::*;

use super::classify::classify_profile;
use super::colloc::{self, CollocOptions};
use super::solve::{solve_branch, solve_bvp, BranchSolveOptions};
use super::system::Arclength;
use super::BvpError;
use crate::model::{BranchLabel, ProblemSpec, Profile};

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub ds_init: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub max_points: usize,
    /// Largest accepted max-norm change in `f` between neighbours.
    pub max_jump: f64,
    /// Weight of `σ` against `R` in the arclength.
    pub weight: f64,
    pub tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            ds_init: 0.5,
            ds_min: 1e-5,
            ds_max: 4.0,
            max_points: 4000,
            max_jump: 0.1,
            weight: 1.0,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub r: f64,
    pub skin_friction: f64,
    pub k: f64,
    pub label: BranchLabel,
    /// Arclength in the `(R, wσ)` plane.
    pub s: f64,
    pub profile: Option<Arc<Profile>>,
}

impl BranchPoint {
    pub fn from_profile(p: Profile, s: f64) -> Self {
        Self {
            r: p.reynolds(),
            skin_friction: p.skin_friction(),
            k: p.k(),
            label: p.label(),
            s,
            profile: Some(Arc::new(p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StopReason {
    RangeEnd,
    MaxPoints,
    StepFailure(String),
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    /// Indices at which `dR/ds` changes sign.
    pub folds: Vec<usize>,
    pub stop: StopReason,
}

impl Branch {
    pub fn from_points(points: Vec<BranchPoint>, stop: StopReason) -> Self {
        let folds = fold_indices(&points);
        Self {
            points,
            folds,
            stop,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_fold(&self, i: usize) -> bool {
        self.folds.contains(&i)
    }

    /// Distinct labels in order of appearance.
    pub fn labels(&self) -> Vec<BranchLabel> {
        let mut out: Vec<BranchLabel> = vec![];
        for p in &self.points {
            if !out.contains(&p.label) {
                out.push(p.label);
            }
        }
        out
    }

    /// Number of solutions on this branch at `r`, counted as crossings of
    /// the level `R = r`.
    pub fn solutions_at(&self, r: f64) -> usize {
        let rs: Vec<f64> = self.points.iter().map(|p| p.r).collect();
        if rs.len() == 1 {
            return usize::from(rs[0] == r);
        }
        let mut count = 0;
        for (i, w) in rs.windows(2).enumerate() {
            let (d0, d1) = (w[0] - r, w[1] - r);
            // each exact hit is counted once, from the segment it starts
            if d0 == 0.0 || (d0 * d1 < 0.0) || (d1 == 0.0 && i + 2 == rs.len()) {
                count += 1;
            }
        }
        count
    }
}

fn fold_indices(points: &[BranchPoint]) -> Vec<usize> {
    let mut out = vec![];
    for i in 1..points.len().saturating_sub(1) {
        let d0 = points[i].r - points[i - 1].r;
        let d1 = points[i + 1].r - points[i].r;
        if d0 * d1 < 0.0 {
            out.push(i);
        }
    }
    out
}

/// Total solutions over a set of branches at `r`.
pub fn count_solutions(branches: &[Branch], r: f64) -> usize {
    branches.iter().map(|b| b.solutions_at(r)).sum()
}

fn pack(p: &Profile) -> Vec<f64> {
    let mut y = Vec::with_capacity(5 * p.len());
    for i in 0..p.len() {
        y.extend([p.f()[i], p.fp()[i], p.fpp()[i], p.k(), p.reynolds()]);
    }
    y
}

fn unpack(a: f64, mesh: Vec<f64>, y: &[f64]) -> Result<Profile, BvpError> {
    let n = mesh.len();
    let col = |c: usize| (0..n).map(|i| y[5 * i + c]).collect::<Vec<_>>();
    let r = y[4];
    let spec = ProblemSpec::new(r, a)?;
    let p = Profile::from_ode(
        spec,
        mesh,
        col(0),
        col(1),
        col(2),
        y[3],
        BranchLabel::Unclassified,
    )?;
    let label = classify_profile(&p);
    Ok(p.with_label(label))
}

/// Continues `seed` through `R ∈ r_range`, initially moving in the direction
/// of `direction` (sign only). Stops at the range ends, at `max_points`, or
/// when the step collapses; the last case is recorded in `stop`.
pub fn continue_branch(
    seed: &Profile,
    r_range: (f64, f64),
    direction: f64,
    step: &StepControl,
) -> Result<Branch, BvpError> {
    let (rmin, rmax) = r_range;
    let r0 = seed.reynolds();
    if !(rmin <= r0 && r0 <= rmax) {
        return Err(BvpError::InvalidInput(format!(
            "seed R = {r0} outside [{rmin}, {rmax}]"
        )));
    }
    if direction == 0.0 || direction.is_nan() {
        return Err(BvpError::InvalidInput("direction must be non-zero".into()));
    }
    let a = seed.a();
    let w = step.weight;
    let opts = CollocOptions {
        tol: step.tol,
        ..Default::default()
    };

    let mut points = vec![BranchPoint::from_profile(seed.clone(), 0.0)];
    let mut current = seed.clone();
    let mut previous: Option<Profile> = None;
    let mut tangent = (direction.signum(), 0.0);
    let mut ds = step.ds_init;
    let mut ds_last = ds;
    let mut s = 0.0;

    let stop = loop {
        if points.len() >= step.max_points {
            break StopReason::MaxPoints;
        }
        if (r0 == rmax && points.len() == 1 && tangent.0 > 0.0)
            || (r0 == rmin && points.len() == 1 && tangent.0 < 0.0)
        {
            break StopReason::RangeEnd;
        }
        // shorter steps where the branch turns in R
        let ds_eff = ds.min(step.ds_max * tangent.0.abs().max(0.1));
        let mesh = current.mesh().to_vec();
        let mut y = pack(&current);
        if let Some(prev) = &previous {
            let prev = prev.resample(&mesh)?;
            let yp = pack(&prev);
            let c = ds_eff / ds_last;
            for (v, q) in y.iter_mut().zip(&yp) {
                *v += c * (*v - q);
            }
        } else {
            let r_pred = current.reynolds() + ds_eff * tangent.0;
            for i in 0..mesh.len() {
                y[5 * i + 4] = r_pred;
            }
        }
        let sys = Arclength {
            a,
            r_prev: current.reynolds(),
            sigma_prev: current.skin_friction(),
            t_r: tangent.0,
            t_sigma: tangent.1,
            weight: w,
            ds: ds_eff,
        };
        let attempt = colloc::solve(&sys, mesh, y, &opts)
            .map_err(BvpError::from)
            .and_then(|sol| {
                if sol.y[4] < 0.0 {
                    return Err(BvpError::InvalidInput("R < 0".into()));
                }
                Ok((unpack(a, sol.mesh.clone(), &sol.y)?, sol.newton_iterations))
            })
            .and_then(|(p, it)| {
                let jump = p.max_f_distance(&current);
                if jump > step.max_jump {
                    Err(BvpError::NoConvergence(format!(
                        "profile jumped by {jump:.3}"
                    )))
                } else {
                    Ok((p, it))
                }
            });
        let (next, iters) = match attempt {
            Ok(v) => v,
            Err(e) => {
                if next_outside(&current, tangent, ds_eff, rmin, rmax) {
                    // the failed step would have left the range anyway
                    if let Some(p) = clip(&current, rmin, rmax, tangent, step.tol) {
                        s += boundary_distance(&current, &p, w);
                        points.push(BranchPoint::from_profile(p, s));
                    }
                    break StopReason::RangeEnd;
                }
                ds *= 0.5;
                if ds < step.ds_min {
                    if points.len() == 1 {
                        return Err(e);
                    }
                    break StopReason::StepFailure(e.to_string());
                }
                continue;
            }
        };

        let (dr, dsig) = (
            next.reynolds() - current.reynolds(),
            w * (next.skin_friction() - current.skin_friction()),
        );
        let norm = dr.hypot(dsig);
        if !(norm > 0.0) {
            ds *= 0.5;
            continue;
        }
        let r_next = next.reynolds();
        if r_next > rmax || r_next < rmin {
            if let Some(p) = clip(&current, rmin, rmax, (dr / norm, dsig / norm), step.tol) {
                s += boundary_distance(&current, &p, w);
                points.push(BranchPoint::from_profile(p, s));
            }
            break StopReason::RangeEnd;
        }
        s += norm;
        tangent = (dr / norm, dsig / norm);
        points.push(BranchPoint::from_profile(next.clone(), s));
        previous = Some(current);
        current = next;
        ds_last = ds_eff;
        if iters <= 6 {
            ds = (ds * 1.5).min(step.ds_max);
        }
    };
    Ok(Branch::from_points(points, stop))
}

fn next_outside(p: &Profile, tangent: (f64, f64), ds: f64, rmin: f64, rmax: f64) -> bool {
    let r = p.reynolds() + ds * tangent.0;
    r > rmax || r < rmin
}

fn boundary_distance(p: &Profile, q: &Profile, w: f64) -> f64 {
    (q.reynolds() - p.reynolds()).hypot(w * (q.skin_friction() - p.skin_friction()))
}

/// Solution at the range end the tangent points to.
fn clip(p: &Profile, rmin: f64, rmax: f64, tangent: (f64, f64), tol: f64) -> Option<Profile> {
    let r_end = if tangent.0 > 0.0 { rmax } else { rmin };
    if r_end == p.reynolds() {
        return None;
    }
    let spec = ProblemSpec::new(r_end, p.a()).ok()?;
    let q = solve_bvp(spec, p, tol).ok()?;
    (q.max_f_distance(p) < 0.2).then_some(q)
}

/// Fold abscissa from a quadratic fit of `R(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldEstimate {
    pub r: f64,
    pub s: f64,
    /// Difference between the five-point fit and the three-point parabola.
    pub uncertainty: f64,
    /// Sample nearest the fold.
    pub index: usize,
}

fn vertex(pts: &[(f64, f64)], s_ref: f64) -> Option<(f64, f64)> {
    // least squares for R = c0 + c1 t + c2 t^2, t = s - s_ref
    let mut m = nalgebra::Matrix3::<f64>::zeros();
    let mut rhs = nalgebra::Vector3::<f64>::zeros();
    for &(s, r) in pts {
        let t = s - s_ref;
        let basis = [1.0, t, t * t];
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += basis[i] * basis[j];
            }
            rhs[i] += basis[i] * r;
        }
    }
    let c = m.lu().solve(&rhs)?;
    if c[2] == 0.0 {
        return None;
    }
    let t = -c[1] / (2.0 * c[2]);
    Some((c[0] + c[1] * t + c[2] * t * t, s_ref + t))
}

/// Locates the first fold of `branch`.
pub fn find_fold(branch: &Branch) -> Result<FoldEstimate, BvpError> {
    let &i = branch.folds.first().ok_or(BvpError::NoFold)?;
    let n = branch.len();
    let lo = i.saturating_sub(2).min(n.saturating_sub(5));
    let hi = (lo + 5).min(n);
    let pts: Vec<(f64, f64)> = branch.points[lo..hi].iter().map(|p| (p.s, p.r)).collect();
    let s_ref = branch.points[i].s;
    let (r5, s5) = vertex(&pts, s_ref).ok_or(BvpError::NoFold)?;
    let three: Vec<(f64, f64)> = branch.points[i - 1..=i + 1]
        .iter()
        .map(|p| (p.s, p.r))
        .collect();
    let uncertainty = vertex(&three, s_ref).map_or(f64::INFINITY, |(r3, _)| (r3 - r5).abs());
    Ok(FoldEstimate {
        r: r5,
        s: s5,
        uncertainty,
        index: i,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct DiscoverOptions {
    pub step: StepControl,
    pub solve: BranchSolveOptions,
}

impl Default for DiscoverOptions {
    fn default() -> Self {
        Self {
            step: StepControl::default(),
            solve: BranchSolveOptions {
                tol: 1e-8,
                ..Default::default()
            },
        }
    }
}

fn join(up: Branch, down: Branch) -> Vec<BranchPoint> {
    // up runs seed -> high R; reverse it and append down without the seed
    let mut pts: Vec<BranchPoint> = up.points.into_iter().rev().collect();
    pts.extend(down.points.into_iter().skip(1));
    let mut s = 0.0;
    for i in 0..pts.len() {
        if i > 0 {
            let (p, q) = (&pts[i - 1], &pts[i]);
            s += (q.r - p.r).hypot(q.skin_friction - p.skin_friction);
        }
        pts[i].s = s;
    }
    pts
}

/// Every branch reachable from the type I Stokes limit and from a type II
/// seed, restricted to `r_range`. The two continuations run in parallel.
pub fn discover_branches(
    a: f64,
    r_range: (f64, f64),
    opts: &DiscoverOptions,
) -> Result<Vec<Branch>, BvpError> {
    let (rmin, rmax) = r_range;
    if !(rmin >= 0.0 && rmax > rmin) {
        return Err(BvpError::InvalidInput(format!(
            "invalid R range [{rmin}, {rmax}]"
        )));
    }
    let step = StepControl {
        tol: opts.solve.tol,
        ..opts.step
    };
    let type_i = || -> Result<Branch, BvpError> {
        let seed = solve_branch(ProblemSpec::new(rmin, a)?, BranchLabel::TypeI, &opts.solve)?;
        continue_branch(&seed, (rmin, rmax), 1.0, &step)
    };
    let others = || -> Result<Option<Branch>, BvpError> {
        if a == 1.0 {
            return Ok(None);
        }
        let r_seed = opts.solve.seed_reynolds;
        let seed = match solve_branch(
            ProblemSpec::new(r_seed, a)?,
            BranchLabel::TypeII,
            &opts.solve,
        ) {
            Ok(p) => p,
            Err(BvpError::BranchNotFound(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let range = (rmin, rmax.max(r_seed));
        let (up, down) = rayon::join(
            || continue_branch(&seed, range, 1.0, &step),
            || continue_branch(&seed, range, -1.0, &step),
        );
        let (up, down) = (up?, down?);
        let stop = down.stop.clone();
        let pts: Vec<BranchPoint> = join(up, down)
            .into_iter()
            .filter(|p| p.r <= rmax && p.r >= rmin)
            .collect();
        Ok((!pts.is_empty()).then(|| Branch::from_points(pts, stop)))
    };
    let (first, second) = rayon::join(type_i, others);
    let mut out = vec![first?];
    if let Some(b) = second? {
        out.push(b);
    }
    Ok(out)
}

/// Solves several independent `(spec, label)` pairs in parallel.
pub fn solve_many(
    jobs: &[(ProblemSpec, BranchLabel)],
    opts: &BranchSolveOptions,
) -> Vec<Result<Profile, BvpError>> {
    jobs.par_iter()
        .map(|&(spec, label)| solve_branch(spec, label, opts))
        .collect()
}
