//! Rescaling between the channel profile `f(y)` and the initial-value
//! variable `g(ξ)`:
//!
//! ```text
//! f(y) = b g(ξ) / (2R),   ξ = b (y + 1) / 2
//! ```

use crate::model::{BranchLabel, ModelError, ProblemSpec, Profile};
use crate::shooter::{ShootingState, ShootingTrajectory};

/// Maps a profile onto `ξ ∈ [0, b]`. The nodes of the trajectory are the
/// images of the profile mesh.
pub fn terrill_forward(p: &Profile, b: f64) -> Result<ShootingTrajectory, ModelError> {
    let r = p.reynolds();
    if r <= 0.0 {
        return Err(ModelError::TransformUndefined);
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(ModelError::InvalidParameter(format!(
            "half-span scale b = {b} must be positive"
        )));
    }
    let c0 = 2.0 * r / b;
    let c1 = c0 * 2.0 / b;
    let c2 = c1 * 2.0 / b;
    let c3 = c2 * 2.0 / b;
    let states: Vec<ShootingState> = (0..p.len())
        .map(|i| ShootingState {
            xi: 0.5 * b * (p.mesh()[i] + 1.0),
            g: c0 * p.f()[i],
            gp: c1 * p.fp()[i],
            gpp: c2 * p.fpp()[i],
            gppp: c3 * p.fppp()[i],
        })
        .collect();
    Ok(ShootingTrajectory::from_samples(&states, c3 * p.k()))
}

/// Recovers `(R, a, profile)` from a trajectory whose wall sits at `ξ*`.
/// The returned profile is labelled `Unclassified`.
pub fn terrill_inverse(
    t: &ShootingTrajectory,
    xi_star: f64,
) -> Result<(f64, f64, Profile), ModelError> {
    let end = t.eval(xi_star);
    if !(end.g > 0.0) {
        return Err(ModelError::NonPositiveWallValue(end.g));
    }
    if !(xi_star > 0.0) || xi_star > t.xi_max() * (1.0 + 1e-12) {
        return Err(ModelError::InvalidParameter(format!(
            "root location {xi_star} outside the trajectory"
        )));
    }
    let b = xi_star;
    let r = 0.5 * b * end.g;
    let a = t.g0() / end.g;

    // samples strictly inside (0, ξ*) are reused verbatim, ξ* itself closes the mesh
    let snap = 1e-12 * b;
    let mut states: Vec<ShootingState> = t.states().take_while(|s| s.xi < b - snap).collect();
    let last = t.states().find(|s| (s.xi - b).abs() <= snap).unwrap_or(end);
    states.push(last);

    let c0 = b / (2.0 * r);
    let c1 = c0 * 0.5 * b;
    let c2 = c1 * 0.5 * b;
    let c3 = c2 * 0.5 * b;
    let n = states.len();
    let mut mesh = Vec::with_capacity(n);
    let (mut f, mut fp, mut fpp, mut fppp) = (vec![], vec![], vec![], vec![]);
    for s in &states {
        mesh.push(2.0 * s.xi / b - 1.0);
        f.push(c0 * s.g);
        fp.push(c1 * s.gp);
        fpp.push(c2 * s.gpp);
        fppp.push(c3 * s.gppp);
    }
    mesh[0] = -1.0;
    mesh[n - 1] = 1.0;
    let spec = ProblemSpec { reynolds: r, a };
    let p = Profile::new(
        spec,
        mesh,
        f,
        fp,
        fpp,
        fppp,
        c3 * t.k(),
        BranchLabel::Unclassified,
    )?;
    Ok((r, a, p))
}
