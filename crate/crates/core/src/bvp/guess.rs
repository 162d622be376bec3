//! Starting profiles for each branch.

use std::f64::consts::PI;

use super::BvpError;
use crate::asymptotics::type_ii_deltas;
use crate::model::{graded_mesh, stokes_solution, BranchLabel, ProblemSpec, Profile};

/// Core wall value used to seed type III before `β` is known.
const BETA_SEED: f64 = 0.05;

fn build(
    spec: ProblemSpec,
    mesh: &[f64],
    label: BranchLabel,
    k: f64,
    eval: impl Fn(f64) -> [f64; 3],
) -> Result<Profile, BvpError> {
    let (mut f, mut fp, mut fpp) = (vec![], vec![], vec![]);
    for &y in mesh {
        let v = eval(y);
        f.push(v[0]);
        fp.push(v[1]);
        fpp.push(v[2]);
    }
    Ok(Profile::from_ode(
        spec,
        mesh.to_vec(),
        f,
        fp,
        fpp,
        k,
        label,
    )?)
}

fn type_i(spec: ProblemSpec, mesh: &[f64]) -> Result<Profile, BvpError> {
    let (r, a) = (spec.reynolds, spec.a);
    if r <= 20.0 || a >= 1.0 {
        let s = stokes_solution(a, mesh)?;
        return build(spec, mesh, BranchLabel::TypeI, s.k(), |y| {
            let v = s.eval(y);
            [v[0], v[1], v[2]]
        });
    }
    // cos(by - b) plus a wall layer that cancels its slope at y = -1
    let b = 0.5 * a.acos();
    let s = (2.0 * b).sin();
    let eps = 1.0 / r;
    let c = eps * b / a * s;
    build(spec, mesh, BranchLabel::TypeI, -b * b * r, |y| {
        let z = b * (y - 1.0);
        let e = (-a * (1.0 + y) / eps).exp();
        [
            z.cos() + c * e - 0.5 * c * (1.0 - y),
            -b * z.sin() - b * s * e + 0.5 * c,
            -b * b * z.cos() + a * b * s * e / eps,
        ]
    })
}

fn type_ii(spec: ProblemSpec, mesh: &[f64]) -> Result<Profile, BvpError> {
    let (r, a) = (spec.reynolds, spec.a);
    let p = type_ii_deltas(a, 1.0 / r)
        .map_err(|e| BvpError::BranchNotFound(format!("no type II seed: {e}")))?;
    let (y1, y2) = (p.y1(), p.y2());
    let (d1, d2) = (p.delta1, p.delta2);
    let w = PI / (y2 - y1);
    let lam = p.lambda;
    build(
        spec,
        mesh,
        BranchLabel::TypeII,
        -r * lam * lam * w * w,
        |y| {
            if y < y1 {
                let q = 0.5 * PI / d1;
                let t = q * (y1 - y);
                [a * t.sin(), -a * q * t.cos(), -a * q * q * t.sin()]
            } else if y <= y2 {
                let t = w * (y - y1);
                [lam * t.sin(), lam * w * t.cos(), -lam * w * w * t.sin()]
            } else {
                let q = 0.5 * PI / d2;
                let t = q * (y - y2);
                [t.sin(), q * t.cos(), -q * q * t.sin()]
            }
        },
    )
}

fn type_iii(spec: ProblemSpec, mesh: &[f64]) -> Result<Profile, BvpError> {
    let (r, a) = (spec.reynolds, spec.a);
    let beta = BETA_SEED.min(0.5 * a);
    let b = 0.5 * beta.acos();
    let c = 0.3 * r;
    let h0 = a - beta;
    build(spec, mesh, BranchLabel::TypeIII, -b * b * r, |y| {
        let z = b * (y - 1.0);
        let eta = c * (1.0 + y);
        let e = (-eta).exp();
        [
            z.cos() + h0 * (1.0 + eta) * e,
            -b * z.sin() - h0 * c * eta * e,
            -b * b * z.cos() + h0 * c * c * (eta - 1.0) * e,
        ]
    })
}

/// Analytic starting profile for `label` at `spec`, sampled on `mesh`
/// (a graded mesh when `None`). Type II needs `R` large enough for its
/// turning-point relations to have a root.
pub fn guess_profile(
    spec: ProblemSpec,
    label: BranchLabel,
    mesh: Option<&[f64]>,
) -> Result<Profile, BvpError> {
    let owned;
    let mesh = match mesh {
        Some(m) => m,
        None => {
            owned = graded_mesh(spec.reynolds, 200);
            &owned
        }
    };
    match label {
        BranchLabel::TypeI => type_i(spec, mesh),
        BranchLabel::TypeII => type_ii(spec, mesh),
        BranchLabel::TypeIII => type_iii(spec, mesh),
        BranchLabel::Unclassified => Err(BvpError::InvalidInput(
            "cannot seed an unclassified branch".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guesses_meet_wall_values() {
        for label in [
            BranchLabel::TypeI,
            BranchLabel::TypeII,
            BranchLabel::TypeIII,
        ] {
            let spec = ProblemSpec::new(100.0, 0.8).unwrap();
            let p = guess_profile(spec, label, None).unwrap();
            assert!((p.f()[0] - 0.8).abs() < 0.01, "{label}");
            assert!((p.f()[p.len() - 1] - 1.0).abs() < 0.01, "{label}");
        }
    }
}
