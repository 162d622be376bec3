//! Turning-point relations of the type II expansion.
//!
//! With `y1 = -1 + Δ1`, `y2 = 1 - Δ2` the offsets satisfy
//!
//! ```text
//! (Δ1/ε) e^{aΔ1/ε} = a^7 (2 - Δ1 - Δ2)^8 / (2e π^9 ε^8),   Δ2/Δ1 = π/(2a)
//! ```
//!
//! and the core is `f ≈ Λ sin(π (y - y1)/(2 - Δ1 - Δ2))` with
//! `Λ = -a (2 - Δ1 - Δ2)/(π Δ1)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::AsymError;
use crate::roots;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticParamsII {
    pub a: f64,
    pub eps: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub lambda: f64,
}

impl AsymptoticParamsII {
    pub fn y1(&self) -> f64 {
        -1.0 + self.delta1
    }
    pub fn y2(&self) -> f64 {
        1.0 - self.delta2
    }

    /// Residual of the logarithmic form of the transcendental relation.
    pub fn log_residual(&self) -> f64 {
        log_form(self.a, self.eps, self.delta1)
    }
}

fn ratio(a: f64) -> f64 {
    PI / (2.0 * a)
}

/// `ln(Δ1/ε) + aΔ1/ε - ln RHS` with `Δ2 = πΔ1/(2a)` substituted.
fn log_form(a: f64, eps: f64, d1: f64) -> f64 {
    let span = 2.0 - d1 * (1.0 + ratio(a));
    (d1 / eps).ln() + a * d1 / eps - log_rhs(a, eps, span)
}

fn log_rhs(a: f64, eps: f64, span: f64) -> f64 {
    7.0 * a.ln() + 8.0 * span.ln() - 2f64.ln() - 1.0 - 9.0 * PI.ln() - 8.0 * eps.ln()
}

fn log_form_d(a: f64, eps: f64, d1: f64) -> f64 {
    let c = 1.0 + ratio(a);
    1.0 / d1 + a / eps + 8.0 * c / (2.0 - d1 * c)
}

/// Solves for `(Δ1, Δ2, Λ)` at `(a, ε)`.
pub fn type_ii_deltas(a: f64, eps: f64) -> Result<AsymptoticParamsII, AsymError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(AsymError::InvalidParameter(format!(
            "a = {a} must lie in (0, 1)"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(AsymError::InvalidParameter(format!(
            "ε = {eps} must lie in (0, 1)"
        )));
    }
    let c = 1.0 + ratio(a);
    let hi = 2.0 / c * (1.0 - 1e-14);
    let lo = 1e-12 * eps;

    // Lambert-type start: Δ1 ≈ (ε/a) ln(RHS ε / Δ1), twice
    let mut d = eps / a * (log_rhs(a, eps, 2.0) + eps.ln()).max(1.0);
    for _ in 0..2 {
        let span = (2.0 - d * c).max(1e-3);
        d = eps / a * (log_rhs(a, eps, span) + eps.ln() - d.ln()).max(1e-6);
    }

    let d1 = roots::safeguarded_from(
        |x| (log_form(a, eps, x), log_form_d(a, eps, x)),
        lo,
        hi,
        d,
        1e-16,
    )
    .ok_or_else(|| AsymError::NoRoot(format!("no bracketed root at a = {a}, ε = {eps}")))?;
    let d2 = ratio(a) * d1;
    if d1 >= 1.0 || d2 >= 1.0 {
        return Err(AsymError::NoRoot(format!(
            "turning points Δ1 = {d1:.4}, Δ2 = {d2:.4} at a = {a}, ε = {eps} leave (-1, 0) × (0, 1)"
        )));
    }
    let lambda = -a * (2.0 - d1 - d2) / (PI * d1);
    Ok(AsymptoticParamsII {
        a,
        eps,
        delta1: d1,
        delta2: d2,
        lambda,
    })
}

/// Core approximation between the turning points.
pub fn type_ii_core(y: f64, p: &AsymptoticParamsII) -> Result<f64, AsymError> {
    let (lo, hi) = (p.y1(), p.y2());
    let slack = 1e-14;
    if y < lo - slack || y > hi + slack {
        return Err(AsymError::Domain { y, lo, hi });
    }
    if y == lo || y == hi {
        return Ok(0.0);
    }
    Ok(p.lambda * (PI * (y - lo) / (2.0 - p.delta1 - p.delta2)).sin())
}
