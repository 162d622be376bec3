use super::classify::classify_profile;
use super::colloc::{self, CollocOptions};
use super::guess::guess_profile;
use super::system::Similarity;
use super::BvpError;
use crate::model::{graded_mesh, stokes_solution, uniform_mesh, BranchLabel, ProblemSpec, Profile};

/// Union of `guess` with a graded mesh whenever the guess is too coarse at
/// the suction wall for `R`.
fn working_mesh(guess: &[f64], reynolds: f64) -> Vec<f64> {
    if reynolds <= 0.0 || guess[1] + 1.0 <= 0.2 / reynolds {
        return guess.to_vec();
    }
    let mut m: Vec<f64> = guess
        .iter()
        .chain(graded_mesh(reynolds, 64).iter())
        .copied()
        .collect();
    m.sort_by(f64::total_cmp);
    m.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    m
}

/// Collocation solve at `spec` from `guess`, with `K` as an extra unknown.
/// The result carries the label from [`classify_profile`].
pub fn solve_bvp(spec: ProblemSpec, guess: &Profile, tol: f64) -> Result<Profile, BvpError> {
    if !(tol >= 1e-12) {
        return Err(BvpError::InvalidInput(format!(
            "tol = {tol:e} is below 1e-12"
        )));
    }
    let mesh = working_mesh(guess.mesh(), spec.reynolds);
    let mut y = Vec::with_capacity(4 * mesh.len());
    for &x in &mesh {
        let v = guess.eval(x);
        y.extend([v[0], v[1], v[2], guess.k()]);
    }
    let sys = Similarity {
        reynolds: spec.reynolds,
        a: spec.a,
    };
    let opts = CollocOptions {
        tol,
        ..Default::default()
    };
    let sol = colloc::solve(&sys, mesh, y, &opts)?;
    let k = sol.y[3];
    let p = Profile::from_ode(
        spec,
        sol.mesh.clone(),
        sol.column(0),
        sol.column(1),
        sol.column(2),
        k,
        BranchLabel::Unclassified,
    )?;
    let label = classify_profile(&p);
    Ok(p.with_label(label))
}

#[derive(Debug, Clone, Copy)]
pub struct BranchSolveOptions {
    pub tol: f64,
    /// `R` at which type II and III are seeded from their asymptotic forms.
    pub seed_reynolds: f64,
    /// Smallest relative step before natural continuation gives up.
    pub min_step: f64,
}

impl Default for BranchSolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            seed_reynolds: 100.0,
            min_step: 1e-3,
        }
    }
}

fn constant_profile(spec: ProblemSpec) -> Result<Profile, BvpError> {
    let mesh = uniform_mesh(32);
    let n = mesh.len();
    Ok(Profile::new(
        spec,
        mesh,
        vec![1.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        0.0,
        BranchLabel::TypeI,
    )?)
}

fn seeded(spec: ProblemSpec, label: BranchLabel, tol: f64) -> Result<Profile, BvpError> {
    let guess = if label == BranchLabel::TypeI && spec.reynolds <= 20.0 {
        let s = stokes_solution(spec.a, &graded_mesh(spec.reynolds, 64))?;
        Profile::from_ode(
            spec,
            s.mesh().to_vec(),
            s.f().to_vec(),
            s.fp().to_vec(),
            s.fpp().to_vec(),
            s.k(),
            label,
        )?
    } else {
        guess_profile(spec, label, None)?
    };
    let p = solve_bvp(spec, &guess, tol)?;
    if p.label() != label {
        return Err(BvpError::BranchNotFound(format!(
            "{label} seed at R = {} converged to {}",
            spec.reynolds,
            p.label()
        )));
    }
    Ok(p)
}

/// Natural continuation in `R` from `from` to `target`, keeping the label.
fn walk(from: Profile, target: f64, opts: &BranchSolveOptions) -> Result<Profile, BvpError> {
    let label = from.label();
    let a = from.a();
    let mut p = from;
    let mut r = p.reynolds();
    let mut step = (target - r).signum() * (0.1 * r.max(10.0)).min((target - r).abs());
    let mut last_err = None;
    while (target - r).abs() > 1e-12 * target.abs().max(1.0) {
        let next_r = if (target - r).abs() <= step.abs() {
            target
        } else {
            r + step
        };
        let spec = ProblemSpec::new(next_r, a)?;
        match solve_bvp(spec, &p, opts.tol) {
            Ok(q) if q.label() == label && q.max_f_distance(&p) < 0.2 => {
                p = q;
                r = next_r;
                step *= 1.5;
            }
            Ok(q) => {
                last_err = Some(format!("label changed to {} at R = {next_r:.4}", q.label()));
                step *= 0.5;
            }
            Err(e) => {
                last_err = Some(e.to_string());
                step *= 0.5;
            }
        }
        if step.abs() < opts.min_step * r.max(1.0) {
            let why = last_err.unwrap_or_default();
            return Err(BvpError::BranchNotFound(format!(
                "{label} branch at a = {a} cannot be continued past R = {r:.4} towards {target} ({why})"
            )));
        }
    }
    Ok(p)
}

/// Solves on a named branch at `spec`, seeding from the asymptotic forms and
/// continuing in `R` where a direct solve does not land on the branch.
pub fn solve_branch(
    spec: ProblemSpec,
    label: BranchLabel,
    opts: &BranchSolveOptions,
) -> Result<Profile, BvpError> {
    let (r, a) = (spec.reynolds, spec.a);
    if label == BranchLabel::Unclassified {
        return Err(BvpError::InvalidInput("a branch label is required".into()));
    }
    if a == 1.0 {
        return if label == BranchLabel::TypeI {
            constant_profile(spec)
        } else {
            Err(BvpError::BranchNotFound(format!(
                "only the uniform solution exists at a = 1, not {label}"
            )))
        };
    }
    match label {
        BranchLabel::TypeI => {
            if let Ok(p) = seeded(spec, label, opts.tol) {
                return Ok(p);
            }
            let start = seeded(ProblemSpec::new(r.min(1.0), a)?, label, opts.tol)?;
            walk(start, r, opts)
        }
        _ => {
            let r_seed = opts.seed_reynolds;
            if r >= r_seed {
                if let Ok(p) = seeded(spec, label, opts.tol) {
                    return Ok(p);
                }
            }
            let start = seeded(ProblemSpec::new(r_seed, a)?, label, opts.tol)?;
            walk(start, r, opts)
        }
    }
}
