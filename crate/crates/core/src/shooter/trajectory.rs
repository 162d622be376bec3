use serde::{Deserialize, Serialize};

use crate::hermite;
use crate::roots;

/// One sample of the rescaled unknown `g(ξ)` and its derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingState {
    pub xi: f64,
    pub g: f64,
    pub gp: f64,
    pub gpp: f64,
    pub gppp: f64,
}

/// A zero of `g'` on the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallRoot {
    pub xi: f64,
    pub g: f64,
    pub admissible: bool,
}

/// Solution of `g''' + g g'' - g'^2 = k` with `g'(0) = 0`, stored at the
/// accepted integrator steps and evaluated between them by Hermite
/// interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingTrajectory {
    pub(crate) xi: Vec<f64>,
    pub(crate) g: Vec<f64>,
    pub(crate) gp: Vec<f64>,
    pub(crate) gpp: Vec<f64>,
    pub(crate) gppp: Vec<f64>,
    pub(crate) k: f64,
    pub(crate) roots: Vec<WallRoot>,
    pub(crate) degenerate: bool,
}

impl ShootingTrajectory {
    /// Builds a trajectory from arbitrary samples (used for manufactured data
    /// and for rescaled profiles). Roots are located immediately.
    pub fn from_samples(states: &[ShootingState], k: f64) -> Self {
        let mut t = ShootingTrajectory {
            xi: states.iter().map(|s| s.xi).collect(),
            g: states.iter().map(|s| s.g).collect(),
            gp: states.iter().map(|s| s.gp).collect(),
            gpp: states.iter().map(|s| s.gpp).collect(),
            gppp: states.iter().map(|s| s.gppp).collect(),
            k,
            roots: Vec::new(),
            degenerate: false,
        };
        t.degenerate = t.gp.iter().all(|&v| v == 0.0) && t.gpp.iter().all(|&v| v == 0.0);
        t.roots = find_wall_roots(&t);
        t
    }

    pub fn g0(&self) -> f64 {
        self.g[0]
    }
    /// `A = g''(0)`.
    pub fn a_init(&self) -> f64 {
        self.gpp[0]
    }
    /// `B = g'''(0)`.
    pub fn b_init(&self) -> f64 {
        self.gppp[0]
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn xi_max(&self) -> f64 {
        *self.xi.last().unwrap()
    }
    pub fn len(&self) -> usize {
        self.xi.len()
    }
    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
    pub fn degenerate(&self) -> bool {
        self.degenerate
    }
    pub fn roots(&self) -> &[WallRoot] {
        &self.roots
    }
    pub fn admissible_roots(&self) -> impl Iterator<Item = &WallRoot> {
        self.roots.iter().filter(|r| r.admissible)
    }

    pub fn state(&self, i: usize) -> ShootingState {
        ShootingState {
            xi: self.xi[i],
            g: self.g[i],
            gp: self.gp[i],
            gpp: self.gpp[i],
            gppp: self.gppp[i],
        }
    }

    pub fn states(&self) -> impl Iterator<Item = ShootingState> + '_ {
        (0..self.len()).map(|i| self.state(i))
    }

    /// Interpolated state at `xi`.
    pub fn eval(&self, xi: f64) -> ShootingState {
        let [g, gp, gpp, gppp] =
            hermite::eval4(&self.xi, [&self.g, &self.gp, &self.gpp, &self.gppp], xi);
        ShootingState {
            xi,
            g,
            gp,
            gpp,
            gppp,
        }
    }

    /// Largest deviation of `g''' + g g'' - g'^2` from `k` over the samples.
    pub fn k_residual(&self) -> f64 {
        self.states()
            .map(|s| (s.gppp + s.g * s.gpp - s.gp * s.gp - self.k).abs())
            .fold(0.0, f64::max)
    }

    /// The scaled trajectory `λ g(λ ξ)`, which solves the same equation with
    /// constant `λ^4 k`.
    pub fn rescaled(&self, lambda: f64) -> ShootingTrajectory {
        let l2 = lambda * lambda;
        let states: Vec<ShootingState> = self
            .states()
            .map(|s| ShootingState {
                xi: s.xi / lambda,
                g: lambda * s.g,
                gp: l2 * s.gp,
                gpp: l2 * lambda * s.gpp,
                gppp: l2 * l2 * s.gppp,
            })
            .collect();
        ShootingTrajectory::from_samples(&states, l2 * l2 * self.k)
    }
}

/// Every sign change of `g'` past `ξ = 0`, polished on the interpolant.
pub fn find_wall_roots(t: &ShootingTrajectory) -> Vec<WallRoot> {
    let mut out = Vec::new();
    if t.degenerate || t.len() < 2 {
        return out;
    }
    let scale = t.gp.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    for i in 1..t.len() {
        let x1 = t.xi[i];
        let d1 = t.gp[i];
        if d1 == 0.0 {
            out.push(WallRoot {
                xi: x1,
                g: t.g[i],
                admissible: t.g[i] > 0.0,
            });
            continue;
        }
        // g'(0) = 0 by construction, so the first step is probed at its midpoint
        let (lo, d0) = if i == 1 {
            let mid = 0.5 * (t.xi[0] + x1);
            (mid, t.eval(mid).gp)
        } else {
            (t.xi[i - 1], t.gp[i - 1])
        };
        if d0 * d1 >= 0.0 {
            continue;
        }
        let root = roots::safeguarded(
            |x| {
                let s = t.eval(x);
                (s.gp, s.gpp)
            },
            lo,
            x1,
            1e-15 * x1.abs().max(1.0),
        );
        if let Some(x) = root {
            let s = t.eval(x);
            if s.gp.abs() <= 1e-12 * scale {
                out.push(WallRoot {
                    xi: x,
                    g: s.g,
                    admissible: s.g > 0.0,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// g' = (ξ - 1.5)(ξ + 1), so g = ξ^3/3 - ξ^2/4 - 1.5ξ + 2.
    fn manufactured() -> ShootingTrajectory {
        let states: Vec<ShootingState> = (0..=30)
            .map(|i| {
                let x = 0.1 * i as f64;
                ShootingState {
                    xi: x,
                    g: x * x * x / 3.0 - 0.25 * x * x - 1.5 * x + 2.0,
                    gp: (x - 1.5) * (x + 1.0),
                    gpp: 2.0 * x - 0.5,
                    gppp: 2.0,
                }
            })
            .collect();
        ShootingTrajectory::from_samples(&states, 0.0)
    }

    #[test]
    fn manufactured_root_is_exact() {
        let t = manufactured();
        assert_eq!(t.roots().len(), 1);
        assert!((t.roots()[0].xi - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rescaling_maps_constant_trajectory() {
        let states: Vec<ShootingState> = (0..5)
            .map(|i| ShootingState {
                xi: i as f64,
                g: 3.0,
                gp: 0.0,
                gpp: 0.0,
                gppp: 0.0,
            })
            .collect();
        let t = ShootingTrajectory::from_samples(&states, 0.0);
        assert!(t.degenerate());
        let s = t.rescaled(2.0);
        assert_eq!(s.g0(), 6.0);
        assert_eq!(s.xi_max(), 2.0);
    }
}
