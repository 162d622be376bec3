//! Shooting on `(A, B)` for a prescribed `(a, R)`.
//!
//! With `g(0) = g0` the wall sits at `b = 2aR/g0` and must satisfy
//! `g'(b) = 0`, `g(b) = g0/a`. At moderate `R` the interior growth of
//! perturbations (roughly `exp(|g| ξ)` wherever `g < 0`) makes single
//! shooting hopeless, so the interval is split into segments whose starting
//! states are extra unknowns matched by continuity.

use nalgebra::{DMatrix, DVector};

use super::{classify_branch_from_trajectory, integrate_piece, interior_minimum, ShootError};
use super::{ShootingState, ShootingTrajectory};
use crate::bvp::guess::guess_profile;
use crate::model::{check_asymmetry, stokes_solution, BranchLabel, ProblemSpec, Profile};
use crate::terrill::terrill_inverse;

#[derive(Debug, Clone)]
pub struct ShootOptions {
    /// Local error tolerance of the integrator.
    pub tol: f64,
    /// Internal normalization `g(0)`; results do not depend on it.
    pub g0: f64,
    /// Number of shooting segments; `None` picks one from `R`.
    pub segments: Option<usize>,
    pub max_iter: usize,
    /// Optional starting profile at the target parameters. Without it the
    /// solver continues in `R` from its own seeds.
    pub guess: Option<Profile>,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            g0: 1.0,
            segments: None,
            max_iter: 50,
            guess: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShootSolution {
    /// `g''(0)` normalized to `g(0) = 1`.
    pub a_init: f64,
    /// `g'''(0)` normalized to `g(0) = 1`.
    pub b_init: f64,
    pub xi_star: f64,
    pub trajectory: ShootingTrajectory,
    pub profile: Profile,
}

fn auto_segments(r: f64) -> usize {
    if r <= 10.0 {
        1
    } else {
        1 + (r / 2.0).ceil() as usize
    }
}

struct MultiShoot {
    g0: f64,
    a: f64,
    nodes: Vec<f64>,
    tol: f64,
}

impl MultiShoot {
    fn m(&self) -> usize {
        self.nodes.len() - 1
    }

    fn k(&self, z: &[f64]) -> f64 {
        z[1] + self.g0 * z[0]
    }

    fn start(&self, z: &[f64], j: usize) -> [f64; 3] {
        if j == 0 {
            [self.g0, 0.0, z[0]]
        } else {
            let o = 2 + 3 * (j - 1);
            [z[o], z[o + 1], z[o + 2]]
        }
    }

    fn piece(&self, y0: [f64; 3], k: f64, j: usize) -> Result<Vec<ShootingState>, ShootError> {
        integrate_piece(y0, k, self.nodes[j], self.nodes[j + 1], self.tol)
    }

    fn end(&self, y0: [f64; 3], k: f64, j: usize) -> Result<[f64; 3], ShootError> {
        let s = self.piece(y0, k, j)?;
        let e = s.last().unwrap();
        Ok([e.g, e.gp, e.gpp])
    }

    fn ends(&self, z: &[f64]) -> Result<Vec<[f64; 3]>, ShootError> {
        let k = self.k(z);
        (0..self.m())
            .map(|j| self.end(self.start(z, j), k, j))
            .collect()
    }

    fn residual_from_ends(&self, z: &[f64], ends: &[[f64; 3]]) -> DVector<f64> {
        let m = self.m();
        let mut r = DVector::zeros(3 * m - 1);
        for j in 0..m - 1 {
            let s = self.start(z, j + 1);
            for c in 0..3 {
                r[3 * j + c] = ends[j][c] - s[c];
            }
        }
        let e = ends[m - 1];
        r[3 * (m - 1)] = e[1];
        r[3 * (m - 1) + 1] = e[0] - self.g0 / self.a;
        r
    }

    fn residual(&self, z: &[f64]) -> Result<DVector<f64>, ShootError> {
        let ends = self.ends(z)?;
        Ok(self.residual_from_ends(z, &ends))
    }

    fn jacobian(
        &self,
        z: &[f64],
        ends: &[[f64; 3]],
        r0: &DVector<f64>,
    ) -> Result<DMatrix<f64>, ShootError> {
        let n = z.len();
        let m = self.m();
        let mut jac = DMatrix::zeros(n, n);
        let step = |v: f64| 1e-7 * v.abs().max(1e-3);

        // A and B enter every segment through k
        for col in 0..2 {
            let mut zp = z.to_vec();
            let h = step(z[col]);
            zp[col] += h;
            let rp = self.residual(&zp)?;
            jac.set_column(col, &((rp - r0) / h));
        }
        // an interior starting state only moves its own segment and the
        // matching row of the previous one
        for j in 1..m {
            let k = self.k(z);
            for c in 0..3 {
                let col = 2 + 3 * (j - 1) + c;
                let mut zp = z.to_vec();
                let h = step(z[col]);
                zp[col] += h;
                let e = self.end(self.start(&zp, j), k, j)?;
                let mut ends_p = ends.to_vec();
                ends_p[j] = e;
                let rp = self.residual_from_ends(&zp, &ends_p);
                jac.set_column(col, &((rp - r0) / h));
            }
        }
        Ok(jac)
    }

    fn newton(&self, mut z: Vec<f64>, max_iter: usize) -> Result<Vec<f64>, ShootError> {
        let mut ends = self.ends(&z)?;
        let mut r = self.residual_from_ends(&z, &ends);
        let mut norm = r.amax();
        for _ in 0..max_iter {
            if norm < 1e-11 {
                return Ok(z);
            }
            let jac = self.jacobian(&z, &ends, &r)?;
            let dz = jac.lu().solve(&(-&r)).ok_or(ShootError::NoConvergence {
                iterations: 0,
                residual: norm,
            })?;
            let mut lambda = 1.0;
            loop {
                let trial: Vec<f64> = z
                    .iter()
                    .zip(dz.iter())
                    .map(|(a, d)| a + lambda * d)
                    .collect();
                let accepted = match self.ends(&trial) {
                    Ok(e) => {
                        let rt = self.residual_from_ends(&trial, &e);
                        let nt = rt.amax();
                        if nt.is_finite() && nt < (1.0 - 0.25 * lambda) * norm || nt < 1e-11 {
                            z = trial;
                            ends = e;
                            r = rt;
                            norm = nt;
                            true
                        } else {
                            false
                        }
                    }
                    Err(_) => false,
                };
                if accepted {
                    break;
                }
                lambda *= 0.5;
                if lambda < 1e-4 {
                    return Err(ShootError::NoConvergence {
                        iterations: max_iter,
                        residual: norm,
                    });
                }
            }
        }
        if norm < 1e-11 {
            Ok(z)
        } else {
            Err(ShootError::NoConvergence {
                iterations: max_iter,
                residual: norm,
            })
        }
    }

    fn trajectory(&self, z: &[f64]) -> Result<ShootingTrajectory, ShootError> {
        let k = self.k(z);
        let mut states: Vec<ShootingState> = Vec::new();
        for j in 0..self.m() {
            let piece = self.piece(self.start(z, j), k, j)?;
            let skip = usize::from(j > 0);
            states.extend(piece.into_iter().skip(skip));
        }
        Ok(ShootingTrajectory::from_samples(&states, k))
    }
}

/// Solves the shooting problem at `(a, R)` from a profile that supplies the
/// starting `(A, B)` and segment states.
fn shoot_from(
    a: f64,
    r: f64,
    seed: &Profile,
    opts: &ShootOptions,
) -> Result<ShootSolution, ShootError> {
    let g0 = opts.g0;
    let b = 2.0 * a * r / g0;
    let m = opts.segments.unwrap_or_else(|| auto_segments(r)).max(1);
    let nodes: Vec<f64> = (0..=m).map(|j| b * j as f64 / m as f64).collect();
    let c0 = 2.0 * r / b;
    let c1 = c0 * 2.0 / b;
    let c2 = c1 * 2.0 / b;
    let c3 = c2 * 2.0 / b;

    let mut z = Vec::with_capacity(3 * m - 1);
    z.push(c2 * seed.eval(-1.0)[2]);
    // the seed's K is more reliable than its nodal third derivative
    z.push(c3 * seed.k() - g0 * z[0]);
    for &xi in &nodes[1..m] {
        let v = seed.eval(2.0 * xi / b - 1.0);
        z.extend([c0 * v[0], c1 * v[1], c2 * v[2]]);
    }

    let ms = MultiShoot {
        g0,
        a,
        nodes,
        tol: opts.tol,
    };
    let z = ms.newton(z, opts.max_iter)?;
    let traj = ms.trajectory(&z)?;
    let (_, _, profile) = terrill_inverse(&traj, b)?;
    let lam = 1.0 / g0;
    Ok(ShootSolution {
        a_init: lam * lam * lam * z[0],
        b_init: lam * lam * lam * lam * z[1],
        xi_star: b,
        trajectory: traj,
        profile,
    })
}

/// Confirms that `b` is the wall root expected for the quadrant and returns
/// the label of the solution.
fn check_wall_root(sol: &ShootSolution) -> BranchLabel {
    let t = &sol.trajectory;
    let label = classify_branch_from_trajectory(t, sol.xi_star);
    let interior = t
        .roots()
        .iter()
        .filter(|r| r.xi < sol.xi_star * (1.0 - 1e-9))
        .count();
    let ok = match label {
        BranchLabel::TypeI => interior == 0,
        BranchLabel::TypeII | BranchLabel::TypeIII => {
            interior == 1 && interior_minimum(t, sol.xi_star).is_some()
        }
        BranchLabel::Unclassified => false,
    };
    if ok {
        label
    } else {
        BranchLabel::Unclassified
    }
}

fn finish(sol: ShootSolution, branch: BranchLabel) -> Result<ShootSolution, ShootError> {
    let label = check_wall_root(&sol);
    if label != branch {
        return Err(ShootError::NoAdmissibleRoot(format!(
            "iteration for {branch} converged to a {label} trajectory"
        )));
    }
    let ShootSolution {
        a_init,
        b_init,
        xi_star,
        trajectory,
        profile,
    } = sol;
    Ok(ShootSolution {
        a_init,
        b_init,
        xi_star,
        trajectory,
        profile: profile.with_label(label),
    })
}

fn seed_reynolds(branch: BranchLabel, r: f64) -> f64 {
    match branch {
        BranchLabel::TypeI => r.min(1.0),
        _ => r.max(100.0),
    }
}

/// Finds `(A, B)` reproducing `(a, R)` on the requested branch.
pub fn solve_for_target(
    a: f64,
    r: f64,
    branch: BranchLabel,
    opts: &ShootOptions,
) -> Result<ShootSolution, ShootError> {
    check_asymmetry(a)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(ShootError::InvalidInput(format!(
            "R = {r} must be positive"
        )));
    }
    if !(opts.g0 > 0.0) {
        return Err(ShootError::InvalidInput("g0 must be positive".into()));
    }
    if branch == BranchLabel::Unclassified {
        return Err(ShootError::InvalidInput(
            "a branch label is required".into(),
        ));
    }
    if a == 1.0 {
        if branch != BranchLabel::TypeI {
            return Err(ShootError::NoAdmissibleRoot(
                "only the uniform solution exists at a = 1".into(),
            ));
        }
        return uniform(r, opts.g0);
    }

    if let Some(g) = &opts.guess {
        let sol = shoot_from(a, r, g, opts)?;
        return finish(sol, branch);
    }

    let r_seed = seed_reynolds(branch, r);
    let spec = ProblemSpec::new(r_seed, a)?;
    let seed = match branch {
        BranchLabel::TypeI => {
            let s = stokes_solution(a, &crate::model::uniform_mesh(64))?;
            Profile::from_ode(
                spec,
                s.mesh().to_vec(),
                s.f().to_vec(),
                s.fp().to_vec(),
                s.fpp().to_vec(),
                s.k(),
                branch,
            )?
        }
        _ => guess_profile(spec, branch, None).map_err(|e| {
            ShootError::NoAdmissibleRoot(format!("no seed for {branch} at R = {r_seed}: {e}"))
        })?,
    };
    let mut sol = shoot_from(a, r_seed, &seed, opts)?;
    if check_wall_root(&sol) != branch {
        return finish(sol, branch);
    }
    let mut r_now = r_seed;
    let mut step = match branch {
        BranchLabel::TypeI => (r - r_now).min(2.0 * r_now),
        _ => r - r_now,
    };
    while (r - r_now).abs() > 1e-12 * r {
        let target = if (r - r_now).abs() <= step.abs() {
            r
        } else {
            r_now + step
        };
        match shoot_from(a, target, &sol.profile, opts) {
            Ok(next) if check_wall_root(&next) == branch => {
                sol = next;
                r_now = target;
                step = if step > 0.0 {
                    (step * 1.5).min(r_now)
                } else {
                    (step * 1.5).max(-0.5 * r_now)
                };
            }
            _ => {
                step *= 0.5;
                if step.abs() < 1e-3 * r_now.max(1.0) {
                    return if target < r_now && branch != BranchLabel::TypeI {
                        Err(ShootError::NoAdmissibleRoot(format!(
                            "{branch} solutions turn back near R = {r_now:.2} and do not reach R = {r}"
                        )))
                    } else {
                        Err(ShootError::NoConvergence {
                            iterations: opts.max_iter,
                            residual: f64::NAN,
                        })
                    };
                }
            }
        }
    }
    finish(sol, branch)
}

fn uniform(r: f64, g0: f64) -> Result<ShootSolution, ShootError> {
    let b = 2.0 * r / g0;
    let states: Vec<ShootingState> = (0..=16)
        .map(|i| ShootingState {
            xi: b * i as f64 / 16.0,
            g: g0,
            gp: 0.0,
            gpp: 0.0,
            gppp: 0.0,
        })
        .collect();
    let traj = ShootingTrajectory::from_samples(&states, 0.0);
    let (_, _, p) = terrill_inverse(&traj, b)?;
    Ok(ShootSolution {
        a_init: 0.0,
        b_init: 0.0,
        xi_star: b,
        trajectory: traj,
        profile: p.with_label(BranchLabel::TypeI),
    })
}
