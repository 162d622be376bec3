use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify_branch_from_trajectory, integrate_g, wall_root, ShootingTrajectory};
use crate::model::BranchLabel;

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub n_a: usize,
    pub n_b: usize,
    pub g0: f64,
    pub xi_max: f64,
    pub tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            a_range: (-2.0, 2.0),
            b_range: (-2.0, 2.0),
            n_a: 20,
            n_b: 20,
            g0: 1.0,
            xi_max: 50.0,
            tol: 1e-10,
        }
    }
}

/// One grid point. Fields are `NaN` when no wall root was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub a_init: f64,
    pub b_init: f64,
    pub k: f64,
    pub xi_star: f64,
    pub g_at_root: f64,
    pub reynolds: f64,
    pub a: f64,
    pub label: BranchLabel,
    /// All zeros of `g'` found, admissible or not.
    pub roots: usize,
    pub admissible_roots: usize,
}

/// Grid values with the axis itself skipped, since `A = 0` or `B = 0` is
/// outside the classification.
fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..n)
        .map(|i| {
            // cell centres never land exactly on zero for symmetric ranges
            range.0 + (range.1 - range.0) * (i as f64 + 0.5) / n as f64
        })
        .filter(|v| *v != 0.0)
        .collect()
}

fn record(a_init: f64, b_init: f64, cfg: &ScanConfig) -> ScanRecord {
    let t: Option<ShootingTrajectory> =
        match integrate_g(a_init, b_init, cfg.g0, cfg.xi_max, cfg.tol) {
            Ok(t) => Some(t),
            Err(e) => e.partial().cloned(),
        };
    let k = b_init + cfg.g0 * a_init;
    let mut rec = ScanRecord {
        a_init,
        b_init,
        k,
        xi_star: f64::NAN,
        g_at_root: f64::NAN,
        reynolds: f64::NAN,
        a: f64::NAN,
        label: BranchLabel::Unclassified,
        roots: 0,
        admissible_roots: 0,
    };
    let Some(t) = t else { return rec };
    rec.roots = t.roots().len();
    rec.admissible_roots = t.admissible_roots().count();
    if let Some(root) = wall_root(&t) {
        rec.xi_star = root.xi;
        rec.g_at_root = root.g;
        rec.reynolds = 0.5 * root.xi * root.g;
        rec.a = t.g0() / root.g;
        rec.label = classify_branch_from_trajectory(&t, root.xi);
    }
    rec
}

/// Integrates every `(A, B)` on the grid in parallel.
pub fn scan(cfg: &ScanConfig) -> Vec<ScanRecord> {
    let av = axis(cfg.a_range, cfg.n_a);
    let bv = axis(cfg.b_range, cfg.n_b);
    let pairs: Vec<(f64, f64)> = av
        .iter()
        .flat_map(|&a| bv.iter().map(move |&b| (a, b)))
        .collect();
    pairs.par_iter().map(|&(a, b)| record(a, b, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_avoids_zero() {
        let v = axis((-2.0, 2.0), 20);
        assert_eq!(v.len(), 20);
        assert!(v.iter().all(|x| *x != 0.0));
    }
}
