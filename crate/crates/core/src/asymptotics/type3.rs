//! Reduced core, wall layer and composite for the type III branch.
//!
//! The core is `f0 = cos(by - b)` with `f0(-1) = β = cos 2b`. Near the
//! suction wall `f ≈ f0 + h0(η)`, `η = (1 + y)/ε`, where
//!
//! ```text
//! h0''' + (h0 + β) h0'' - h0'^2 = 0,   h0(0) = a - β, h0'(0) = 0, h0(L) = 0.
//! ```

use serde::{Deserialize, Serialize};

use super::AsymError;
use crate::bvp::colloc::{self, CollocOptions, FirstOrderSystem};
use crate::hermite;
use crate::model::{BranchLabel, Profile};
use crate::shooter::rk::{self, Samples};

pub fn type_iii_reduced(y: f64, beta: f64) -> Result<f64, AsymError> {
    if !(0.0..1.0).contains(&beta) {
        return Err(AsymError::InvalidParameter(format!(
            "β = {beta} outside [0, 1)"
        )));
    }
    let b = 0.5 * beta.acos();
    Ok((b * y - b).cos())
}

const DECAY_SLACK: f64 = 1e-6;

/// `h0` and its derivatives on `[0, L]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSolution {
    pub beta: f64,
    pub a: f64,
    pub eta: Vec<f64>,
    pub h: Vec<f64>,
    pub hp: Vec<f64>,
    pub hpp: Vec<f64>,
    pub hppp: Vec<f64>,
}

impl LayerSolution {
    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn length(&self) -> f64 {
        *self.eta.last().unwrap()
    }

    /// `h0(η)`, and whether `η` fell beyond the truncation (value zero).
    pub fn eval(&self, eta: f64) -> (f64, bool) {
        if eta > self.length() {
            return (0.0, true);
        }
        let v = hermite::eval4(
            &self.eta,
            [&self.h, &self.hp, &self.hpp, &self.hppp],
            eta.max(0.0),
        );
        (v[0], false)
    }

    /// Index of the first node from which `h0''` stays positive.
    pub fn convex_from(&self) -> Option<usize> {
        let n = self.hpp.len();
        let mut i = n;
        while i > 0 && self.hpp[i - 1] > 0.0 {
            i -= 1;
        }
        (i < n).then_some(i)
    }

    /// Monotone decay on `(0, L]` and eventual convexity. Slopes up to
    /// `DECAY_SLACK · h0(0)` are accepted as truncation error.
    pub fn check_invariants(&self) -> Result<(), AsymError> {
        if self.h.iter().all(|&v| v == 0.0) {
            return Ok(());
        }
        let slack = DECAY_SLACK * self.h[0].abs();
        if let Some(i) = (1..self.hp.len()).find(|&i| self.hp[i] >= slack) {
            return Err(AsymError::InvariantViolation(format!(
                "h0' = {:e} >= 0 at η = {} (wrong β?)",
                self.hp[i], self.eta[i]
            )));
        }
        if self.convex_from().is_none() {
            return Err(AsymError::InvariantViolation(
                "h0'' is not positive near the far end".into(),
            ));
        }
        Ok(())
    }
}

struct Layer {
    beta: f64,
    h0: f64,
}

impl FirstOrderSystem for Layer {
    fn dim(&self) -> usize {
        3
    }
    fn n_left(&self) -> usize {
        2
    }
    fn rhs(&self, _x: f64, y: &[f64], out: &mut [f64]) {
        out[0] = y[1];
        out[1] = y[2];
        out[2] = -(y[0] + self.beta) * y[2] + y[1] * y[1];
    }
    fn jac(&self, _x: f64, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[1] = 1.0;
        out[5] = 1.0;
        out[6] = -y[2];
        out[7] = 2.0 * y[1];
        out[8] = -(y[0] + self.beta);
    }
    fn bc_left(&self, ya: &[f64], out: &mut [f64]) {
        out[0] = ya[0] - self.h0;
        out[1] = ya[1];
    }
    fn bc_left_jac(&self, _ya: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[0] = 1.0;
        out[4] = 1.0;
    }
    fn bc_right(&self, yb: &[f64], out: &mut [f64]) {
        out[0] = yb[0];
    }
    fn bc_right_jac(&self, _yb: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[0] = 1.0;
    }
}

/// Default truncation `max(100, 2/ε)`.
pub fn default_layer_length(eps: Option<f64>) -> f64 {
    eps.map_or(100.0, |e| (2.0 / e).max(100.0))
}

fn layer_mesh(from: &[f64], length: f64) -> Vec<f64> {
    // geometric towards the wall, where the O(1) decay rate a lives
    let mut eta = from.to_vec();
    if eta.is_empty() {
        eta.push(0.0);
    }
    let mut h = if eta.len() > 1 {
        eta[eta.len() - 1] - eta[eta.len() - 2]
    } else {
        0.02
    };
    while eta.last().unwrap() + h < length {
        h = (h * 1.05).min(1.0);
        eta.push(eta.last().unwrap() + h);
    }
    eta.push(length);
    eta
}

fn check_layer_input(beta: f64, a: f64, length: f64) -> Result<(), AsymError> {
    if !(beta >= 0.0) {
        return Err(AsymError::InvalidParameter(format!(
            "β = {beta} < 0 admits no decaying layer"
        )));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(AsymError::InvalidParameter(format!(
            "a = {a} must lie in (0, 1]"
        )));
    }
    if !(a - beta >= 0.0) {
        return Err(AsymError::InvalidParameter(format!(
            "a - β = {} must be non-negative",
            a - beta
        )));
    }
    if !(length >= 50.0) {
        return Err(AsymError::InvalidParameter(format!(
            "layer length {length} must be at least 50"
        )));
    }
    Ok(())
}

/// `h0(L)` for `h0''(0) = s`, or `None` when `h0 + β` leaves `(0, ∞)`.
fn shoot_layer(beta: f64, a: f64, s: f64, length: f64) -> Option<Samples> {
    let rhs = |g: &[f64; 3]| [g[1], g[2], g[1] * g[1] - g[0] * g[2]];
    let out = rk::integrate(rhs, [a, 0.0, s], 0.0, length, 1e-10, 1e3).ok()?;
    out.y
        .iter()
        .all(|g| g[0] > 0.0)
        .then_some(out)
        .filter(|_| beta >= 0.0)
}

/// Starting values from the shooting root with the most negative `h0''(0)`.
fn shooting_guess(beta: f64, a: f64, eta: &[f64]) -> Option<Vec<f64>> {
    let length = *eta.last().unwrap();
    let miss = |s: f64| shoot_layer(beta, a, s, length).map(|o| o.y.last().unwrap()[0] - beta);
    // h0''(0) scales like a^3 under the symmetry G -> λG(λη)
    let scale = a * a * a;
    let grid: Vec<(f64, Option<f64>)> = (1..=200)
        .map(|k| (-scale * 0.005 * k as f64, None))
        .collect();
    let grid: Vec<(f64, Option<f64>)> = grid.into_iter().map(|(s, _)| (s, miss(s))).collect();
    let (mut lo, mut hi) = grid.windows(2).rev().find_map(|w| match (w[0].1, w[1].1) {
        (Some(m0), Some(m1)) if m0 * m1 <= 0.0 => Some((w[1].0, w[0].0)),
        _ => None,
    })?;
    let m_lo = miss(lo)?;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        match miss(mid) {
            Some(m) if m * m_lo > 0.0 => lo = mid,
            Some(_) => hi = mid,
            None => return None,
        }
    }
    let out = shoot_layer(beta, a, 0.5 * (lo + hi), length)?;
    let mut y = Vec::with_capacity(3 * eta.len());
    for &x in eta {
        let i = hermite::locate(&out.x, x);
        let h = out.x[i + 1] - out.x[i];
        let t = (x - out.x[i]) / h;
        let v = hermite::quintic(h, t, out.y[i], out.y[i + 1]);
        y.extend([v[0] - beta, v[1], v[2]]);
    }
    // the truncation condition h0(L) = 0 is met to bisection accuracy only
    let n = y.len();
    y[n - 3] = 0.0;
    Some(y)
}

fn analytic_guess(h0: f64, a: f64, eta: &[f64]) -> Vec<f64> {
    let l = *eta.last().unwrap();
    let c = a.max(0.2);
    let tail = h0 * (1.0 + c * l) * (-c * l).exp();
    let mut y = Vec::with_capacity(3 * eta.len());
    for &x in eta {
        let e = (-c * x).exp();
        y.extend([
            h0 * (1.0 + c * x) * e - tail * x / l,
            -h0 * c * c * x * e - tail / l,
            h0 * c * c * (c * x - 1.0) * e,
        ]);
    }
    y
}

/// The truncated wall-layer problem on `[0, L]` without the decay checks of
/// [`type_iii_layer`].
pub fn solve_layer(beta: f64, a: f64, length: f64) -> Result<LayerSolution, AsymError> {
    check_layer_input(beta, a, length)?;
    let h0 = a - beta;
    let sys = Layer { beta, h0 };
    let eta = layer_mesh(&[], length);
    if h0 == 0.0 {
        let z = vec![0.0; eta.len()];
        return Ok(LayerSolution {
            beta,
            a,
            eta,
            h: z.clone(),
            hp: z.clone(),
            hpp: z.clone(),
            hppp: z,
        });
    }
    let opts = CollocOptions {
        tol: 1e-10,
        ..Default::default()
    };
    let y = shooting_guess(beta, a, &eta).unwrap_or_else(|| analytic_guess(h0, a, &eta));
    let sol = colloc::solve(&sys, eta, y, &opts)
        .map_err(|e| AsymError::NoConvergence(format!("{e:?}")))?;
    let mut hppp = Vec::with_capacity(sol.mesh.len());
    let mut out = [0.0; 3];
    for i in 0..sol.mesh.len() {
        sys.rhs(sol.mesh[i], sol.node(i), &mut out);
        hppp.push(out[2]);
    }
    Ok(LayerSolution {
        beta,
        a,
        h: sol.column(0),
        hp: sol.column(1),
        hpp: sol.column(2),
        hppp,
        eta: sol.mesh,
    })
}

/// Solves the wall-layer problem on `[0, L]` and checks monotone decay and
/// eventual convexity.
pub fn type_iii_layer(beta: f64, a: f64, length: f64) -> Result<LayerSolution, AsymError> {
    let layer = solve_layer(beta, a, length)?;
    layer.check_invariants()?;
    Ok(layer)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    /// From `b = sqrt(-K/R)`, `β = cos 2b`.
    pub beta: f64,
    /// From a least-squares fit of `cos(by - b)` on `[-0.5, 1]`.
    pub beta_fit: f64,
    pub b: f64,
    /// The two estimates differ by more than [`BETA_FIT_WARNING`].
    pub fit_disagreement: bool,
}

pub const BETA_FIT_WARNING: f64 = 5e-3;

fn fit_misfit(p: &Profile, ys: &[f64], b: f64) -> f64 {
    ys.iter()
        .map(|&y| (p.eval(y)[0] - (b * y - b).cos()).powi(2))
        .sum()
}

/// Core wall value `β` of a high-Reynolds type III profile.
pub fn estimate_beta(p: &Profile) -> Result<BetaEstimate, AsymError> {
    if p.label() != BranchLabel::TypeIII {
        return Err(AsymError::InvalidParameter(format!(
            "profile is labelled {}, not TypeIII",
            p.label()
        )));
    }
    if !(p.reynolds() > 0.0) {
        return Err(AsymError::InvalidParameter("R must be positive".into()));
    }
    let k = p.k() / p.reynolds();
    if k >= 0.0 {
        return Err(AsymError::InvalidParameter(format!(
            "K/R = {k} must be negative"
        )));
    }
    let b = (-k).sqrt();
    let beta = (2.0 * b).cos();

    let ys: Vec<f64> = (0..=150).map(|i| -0.5 + 1.5 * i as f64 / 150.0).collect();
    // coarse scan then golden section on b
    let (mut lo, mut hi) = (1e-3, std::f64::consts::FRAC_PI_2 - 1e-3);
    let grid = 200;
    let best = (0..=grid)
        .map(|i| lo + (hi - lo) * i as f64 / grid as f64)
        .min_by(|x, y| fit_misfit(p, &ys, *x).total_cmp(&fit_misfit(p, &ys, *y)))
        .unwrap();
    let step = (hi - lo) / grid as f64;
    lo = (best - step).max(lo);
    hi = (best + step).min(hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (fit_misfit(p, &ys, x1), fit_misfit(p, &ys, x2));
    while hi - lo > 1e-13 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = fit_misfit(p, &ys, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = fit_misfit(p, &ys, x2);
        }
    }
    let beta_fit = (2.0 * 0.5 * (lo + hi)).cos();
    Ok(BetaEstimate {
        beta,
        beta_fit,
        b,
        fit_disagreement: (beta - beta_fit).abs() > BETA_FIT_WARNING,
    })
}

/// Composite value and whether the layer was evaluated past its truncation.
pub fn type_iii_composite(
    y: f64,
    a: f64,
    eps: f64,
    beta: f64,
    layer: &LayerSolution,
) -> Result<(f64, bool), AsymError> {
    if (layer.beta - beta).abs() > 1e-12 || (layer.a - a).abs() > 1e-12 {
        return Err(AsymError::InvalidParameter(
            "layer was solved for a different (a, β)".into(),
        ));
    }
    if !(eps > 0.0) {
        return Err(AsymError::InvalidParameter(format!(
            "ε = {eps} must be positive"
        )));
    }
    let core = type_iii_reduced(y, beta)?;
    let (h, outside) = layer.eval((1.0 + y) / eps);
    Ok((core + h, outside))
}
