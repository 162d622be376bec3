use serde::{Deserialize, Serialize};

use super::BvpError;
use crate::model::{BranchLabel, Profile};
use crate::roots;

/// Residual level above which a profile is not treated as a solution.
const CONVERGED: f64 = 1e-6;

/// Interior zeros of a type II profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub y1: f64,
    pub y2: f64,
}

/// Mesh intervals `[i, i+1]` across which `f` changes sign.
pub fn sign_changes(p: &Profile) -> Vec<usize> {
    let f = p.f();
    let mut out = vec![];
    let mut last = 0;
    for i in 1..f.len() {
        if f[i] == 0.0 {
            continue;
        }
        if f[i].signum() != f[last].signum() {
            out.push(i - 1);
        }
        last = i;
    }
    out
}

/// TypeII when `f` has two interior sign changes, else TypeIII when `f' < 0`
/// somewhere, else TypeI. Profiles that miss the wall conditions or the ODE
/// are Unclassified.
pub fn classify_profile(p: &Profile) -> BranchLabel {
    if p.bc_residual() > CONVERGED || p.k_residual() > CONVERGED * (1.0 + p.k().abs()) {
        return BranchLabel::Unclassified;
    }
    let fp = p.fp();
    let scale = fp.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if sign_changes(p).len() == 2 {
        BranchLabel::TypeII
    } else if fp[1..fp.len() - 1]
        .iter()
        .any(|&v| v < -1e-10 * scale.max(1.0))
    {
        BranchLabel::TypeIII
    } else {
        BranchLabel::TypeI
    }
}

/// The two interior zeros of `f`, polished on the profile interpolant.
pub fn turning_points(p: &Profile) -> Result<TurningPoints, BvpError> {
    let cells = sign_changes(p);
    if cells.len() != 2 {
        return Err(BvpError::WrongBranch { zeros: cells.len() });
    }
    let mesh = p.mesh();
    let mut ys = [0.0; 2];
    for (slot, &i) in ys.iter_mut().zip(&cells) {
        // the bracket may open at a node where f vanishes exactly
        let lo = mesh[i];
        let mut hi = mesh[i + 1];
        let mut j = i + 1;
        while p.f()[j] == 0.0 && j + 1 < mesh.len() {
            j += 1;
            hi = mesh[j];
        }
        *slot = roots::safeguarded(
            |y| {
                let v = p.eval(y);
                (v[0], v[1])
            },
            lo,
            hi,
            1e-14,
        )
        .ok_or_else(|| {
            BvpError::NoConvergence(format!("zero of f in [{lo}, {hi}] not polished"))
        })?;
    }
    Ok(TurningPoints {
        y1: ys[0],
        y2: ys[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{stokes_solution, uniform_mesh, ProblemSpec};

    fn manufactured(f: impl Fn(f64) -> [f64; 3]) -> Profile {
        let mesh = uniform_mesh(200);
        let (mut a, mut b, mut c) = (vec![], vec![], vec![]);
        for &y in &mesh {
            let v = f(y);
            a.push(v[0]);
            b.push(v[1]);
            c.push(v[2]);
        }
        let n = mesh.len();
        Profile::new(
            ProblemSpec::new(10.0, 0.8).unwrap(),
            mesh,
            a,
            b,
            c,
            vec![0.0; n],
            0.0,
            BranchLabel::Unclassified,
        )
        .unwrap()
    }

    #[test]
    fn stokes_cubic_is_type_i() {
        let s = stokes_solution(0.8, &uniform_mesh(50)).unwrap();
        assert_eq!(classify_profile(&s), BranchLabel::TypeI);
        assert!(matches!(
            turning_points(&s),
            Err(BvpError::WrongBranch { zeros: 0 })
        ));
    }

    #[test]
    fn zeros_of_a_manufactured_profile() {
        // (y - 0.3)(y + 0.6): only the zero pattern matters here
        let p = manufactured(|y| [(y - 0.3) * (y + 0.6), 2.0 * y + 0.3, 2.0]);
        let t = turning_points(&p).unwrap();
        assert!((t.y1 + 0.6).abs() < 1e-12);
        assert!((t.y2 - 0.3).abs() < 1e-12);
    }

    #[test]
    fn residual_failure_is_unclassified() {
        let p = manufactured(|y| [y, 1.0, 0.0]);
        assert_eq!(classify_profile(&p), BranchLabel::Unclassified);
    }
}
