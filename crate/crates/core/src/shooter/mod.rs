//! Initial-value formulation of the channel problem.
//!
//! After rescaling, the profile solves `g''' + g g'' - g'^2 = k` with
//! `g(0) = g0`, `g'(0) = 0`, `g''(0) = A`, `g'''(0) = B`. A wall lies at any
//! zero `ξ*` of `g'` with `g(ξ*) > 0`, giving `R = ξ* g(ξ*) / 2` and
//! `a = g0 / g(ξ*)`.

pub(crate) mod rk;
mod scan;
mod solve;
mod trajectory;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{BranchLabel, ModelError};

pub use scan::{scan, ScanConfig, ScanRecord};
pub use solve::{solve_for_target, ShootOptions, ShootSolution};
pub use trajectory::{find_wall_roots, ShootingState, ShootingTrajectory, WallRoot};

/// Integration stops once `|g|` exceeds this.
pub const OVERFLOW_GUARD: f64 = 1e12;

#[derive(Debug, Error)]
pub enum ShootError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("|g| exceeded the overflow guard at xi = {xi}")]
    Blowup {
        xi: f64,
        partial: Box<ShootingTrajectory>,
    },
    #[error("step size underflow at xi = {xi}")]
    StepUnderflow { xi: f64 },
    #[error("step budget exhausted at xi = {xi} (stiff growth)")]
    StepLimit {
        xi: f64,
        partial: Box<ShootingTrajectory>,
    },
    #[error(
        "shooting iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("no admissible wall root: {0}")]
    NoAdmissibleRoot(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl ShootError {
    /// The part of the trajectory computed before a blowup or before the
    /// step budget ran out.
    pub fn partial(&self) -> Option<&ShootingTrajectory> {
        match self {
            ShootError::Blowup { partial, .. } | ShootError::StepLimit { partial, .. } => {
                Some(partial)
            }
            _ => None,
        }
    }
}

fn rhs(k: f64) -> impl Fn(&[f64; 3]) -> [f64; 3] {
    move |y: &[f64; 3]| [y[1], y[2], k - y[0] * y[2] + y[1] * y[1]]
}

fn samples_to_states(s: &rk::Samples) -> Vec<ShootingState> {
    s.x.iter()
        .zip(s.y.iter().zip(&s.dy))
        .map(|(&xi, (y, dy))| ShootingState {
            xi,
            g: y[0],
            gp: y[1],
            gpp: y[2],
            gppp: dy[2],
        })
        .collect()
}

/// Integrates one piece `[x0, x1]` from the state `(g, g', g'')`.
pub(crate) fn integrate_piece(
    y0: [f64; 3],
    k: f64,
    x0: f64,
    x1: f64,
    tol: f64,
) -> Result<Vec<ShootingState>, ShootError> {
    match rk::integrate(rhs(k), y0, x0, x1, tol, OVERFLOW_GUARD) {
        Ok(s) => Ok(samples_to_states(&s)),
        Err(rk::RkFailure::Overflow(s)) => {
            let states = samples_to_states(&s);
            let xi = states.last().map_or(x0, |s| s.xi);
            Err(ShootError::Blowup {
                xi,
                partial: Box::new(ShootingTrajectory::from_samples(&states, k)),
            })
        }
        Err(rk::RkFailure::StepLimit(s)) => {
            let states = samples_to_states(&s);
            Err(ShootError::StepLimit {
                xi: states.last().map_or(x0, |s| s.xi),
                partial: Box::new(ShootingTrajectory::from_samples(&states, k)),
            })
        }
        Err(rk::RkFailure::StepUnderflow(s)) => Err(ShootError::StepUnderflow {
            xi: *s.x.last().unwrap(),
        }),
    }
}

/// Integrates from `g(0) = g0, g'(0) = 0, g''(0) = A, g'''(0) = B` up to
/// `xi_max`. The constant is `k = B + g0 A`.
pub fn integrate_g(
    a_init: f64,
    b_init: f64,
    g0: f64,
    xi_max: f64,
    tol: f64,
) -> Result<ShootingTrajectory, ShootError> {
    if !(g0 > 0.0) {
        return Err(ShootError::InvalidInput(format!(
            "g0 = {g0} must be positive"
        )));
    }
    if !(tol > 0.0) || !(xi_max > 0.0) {
        return Err(ShootError::InvalidInput(
            "tolerance and horizon must be positive".into(),
        ));
    }
    let k = b_init + g0 * a_init;
    let states = integrate_piece([g0, 0.0, a_init], k, 0.0, xi_max, tol)?;
    Ok(ShootingTrajectory::from_samples(&states, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrant {
    /// `A > 0, B < 0`
    PosNeg,
    /// `A < 0, B < 0`
    NegNeg,
    /// `A > 0, B > 0`
    PosPos,
    /// `A < 0, B > 0`
    NegPos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantVerdict {
    pub quadrant: Quadrant,
    pub admissible: bool,
    pub expected_types: Vec<BranchLabel>,
}

/// Which solution types an initial curvature/jerk pair can produce.
pub fn classify_quadrant(a_init: f64, b_init: f64) -> Result<QuadrantVerdict, ShootError> {
    if a_init == 0.0 || b_init == 0.0 || !a_init.is_finite() || !b_init.is_finite() {
        return Err(ShootError::InvalidInput(format!(
            "A = {a_init} and B = {b_init} must be finite and nonzero"
        )));
    }
    let (quadrant, admissible, expected_types) = match (a_init > 0.0, b_init > 0.0) {
        (true, false) => (Quadrant::PosNeg, true, vec![BranchLabel::TypeI]),
        (false, false) => (Quadrant::NegNeg, false, vec![]),
        (true, true) => (Quadrant::PosPos, false, vec![]),
        (false, true) => (
            Quadrant::NegPos,
            true,
            vec![BranchLabel::TypeII, BranchLabel::TypeIII],
        ),
    };
    Ok(QuadrantVerdict {
        quadrant,
        admissible,
        expected_types,
    })
}

/// First interior stationary point of `g` on `(0, xi_star)`.
pub(crate) fn interior_minimum(t: &ShootingTrajectory, xi_star: f64) -> Option<WallRoot> {
    let guard = 1e-9 * xi_star.max(1.0);
    t.roots()
        .iter()
        .copied()
        .find(|r| r.xi > 0.0 && r.xi < xi_star - guard)
}

/// Labels the solution ending at the wall root `xi_star` from the sign
/// pattern of `(A, B)` and, for `A < 0 < B`, the sign of `g` at its
/// interior minimum.
pub fn classify_branch_from_trajectory(t: &ShootingTrajectory, xi_star: f64) -> BranchLabel {
    let Ok(v) = classify_quadrant(t.a_init(), t.b_init()) else {
        return BranchLabel::Unclassified;
    };
    match v.quadrant {
        Quadrant::PosNeg => BranchLabel::TypeI,
        Quadrant::NegPos => match interior_minimum(t, xi_star) {
            Some(r) if r.g < 0.0 => BranchLabel::TypeII,
            Some(_) => BranchLabel::TypeIII,
            None => BranchLabel::Unclassified,
        },
        _ => BranchLabel::Unclassified,
    }
}

/// The wall root that closes a solution of the given quadrant: the first
/// admissible root for `A > 0 > B`, the first admissible root beyond the
/// interior minimum for `A < 0 < B`.
pub fn wall_root(t: &ShootingTrajectory) -> Option<WallRoot> {
    let v = classify_quadrant(t.a_init(), t.b_init()).ok()?;
    match v.quadrant {
        Quadrant::PosNeg => t.admissible_roots().next().copied(),
        Quadrant::NegPos => {
            let gamma = t.roots().first()?;
            t.roots()
                .iter()
                .find(|r| r.xi > gamma.xi && r.admissible)
                .copied()
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_solution_is_degenerate() {
        let t = integrate_g(0.0, 0.0, 1.0, 10.0, 1e-10).unwrap();
        assert!(t.degenerate());
        assert!(t.roots().is_empty());
        assert!(t.states().all(|s| s.g == 1.0));
    }

    #[test]
    fn positive_quadrant_has_increasing_g() {
        let t = match integrate_g(1.0, 1.0, 1.0, 50.0, 1e-10) {
            Ok(t) => t,
            Err(e) => e.partial().unwrap().clone(),
        };
        assert!(t.states().skip(1).all(|s| s.gp > 0.0));
        assert_eq!(t.admissible_roots().count(), 0);
    }

    #[test]
    fn negative_quadrant_has_no_admissible_root() {
        let t = match integrate_g(-1.0, -1.0, 1.0, 50.0, 1e-10) {
            Ok(t) => t,
            Err(e) => e.partial().unwrap().clone(),
        };
        assert_eq!(t.admissible_roots().count(), 0);
    }

    #[test]
    fn quadrant_table() {
        assert!(!classify_quadrant(-1.0, -1.0).unwrap().admissible);
        let v = classify_quadrant(1.0, -1.0).unwrap();
        assert!(v.admissible);
        assert_eq!(v.expected_types, vec![BranchLabel::TypeI]);
        let v = classify_quadrant(-1.0, 1.0).unwrap();
        assert_eq!(
            v.expected_types,
            vec![BranchLabel::TypeII, BranchLabel::TypeIII]
        );
        assert!(!classify_quadrant(1.0, 1.0).unwrap().admissible);
        assert!(classify_quadrant(0.0, 1.0).is_err());
        assert!(classify_quadrant(1.0, 0.0).is_err());
    }

    #[test]
    fn k_is_constant_along_trajectory() {
        let t = integrate_g(0.3, -0.5, 1.0, 8.0, 1e-12).unwrap();
        assert!((t.k() - (-0.2)).abs() < 1e-15);
        assert!(t.k_residual() < 1e-12);
    }
}
