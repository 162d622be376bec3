//! Composite first-order expansion of the type I branch,
//!
//! ```text
//! f = cos z + ε { (Q(z) + b) sin z + (λ/2b) z sin z + (b/2)(z tan²z - tan z)
//!               + (b/2) L(z) (z sin z + cos z) + (b/a) sin 2b e^{-aη} }
//! ```
//!
//! with `z = b(y - 1)`, `b = arccos(a)/2`, `η = (1 + y)/ε`,
//! `L(z) = ln(1 - sin z) - ln cos z` and
//! `Q(z) = b ∫_0^z φ sec φ (1 - sec²φ) dφ`. The constant `λ` is fixed by
//! `f(-1) = a` at first order.

use super::quad;
use super::AsymError;

/// Largest `ε` accepted by the expansion.
pub const MAX_EPS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeIParams {
    pub a: f64,
    pub eps: f64,
    pub b: f64,
    pub lambda: f64,
}

fn sec(x: f64) -> f64 {
    1.0 / x.cos()
}

/// `Q(z)` by adaptive quadrature.
pub fn q_integral(b: f64, z: f64) -> Result<f64, AsymError> {
    if z.abs() >= 0.5 * std::f64::consts::PI - 1e-6 {
        return Err(AsymError::Quadrature(format!(
            "sec φ is unbounded on [0, {z}]"
        )));
    }
    let v = quad::integrate(|p| p * sec(p) * (1.0 - sec(p) * sec(p)), 0.0, z, 1e-12)
        .map_err(|e| AsymError::Quadrature(format!("error estimate {:e}", e.error)))?;
    Ok(b * v)
}

fn log_term(z: f64) -> f64 {
    (1.0 - z.sin()).ln() - z.cos().ln()
}

fn log_term_d(z: f64) -> f64 {
    -z.cos() / (1.0 - z.sin()) + z.tan()
}

/// Everything in the first-order core term except the `λ` part.
fn core_rest(b: f64, q: f64, z: f64) -> f64 {
    let (s, c, t) = (z.sin(), z.cos(), z.tan());
    (q + b) * s + 0.5 * b * (z * t * t - t) + 0.5 * b * log_term(z) * (z * s + c)
}

fn core_rest_d(b: f64, q: f64, z: f64) -> f64 {
    let (s, c, t) = (z.sin(), z.cos(), z.tan());
    let sc2 = 1.0 / (c * c);
    let qd = b * z * sec(z) * (1.0 - sc2);
    qd * s
        + (q + b) * c
        + 0.5 * b * (t * t + 2.0 * z * t * sc2 - sc2)
        + 0.5 * b * (log_term_d(z) * (z * s + c) + log_term(z) * z * c)
}

impl TypeIParams {
    pub fn new(a: f64, eps: f64) -> Result<Self, AsymError> {
        if !(a > 0.0 && a < 1.0) {
            return Err(AsymError::InvalidParameter(format!(
                "a = {a} must lie in (0, 1)"
            )));
        }
        if !(eps > 0.0 && eps <= MAX_EPS) {
            return Err(AsymError::InvalidParameter(format!(
                "ε = {eps} outside (0, {MAX_EPS}]"
            )));
        }
        let b = 0.5 * a.acos();
        let zw = -2.0 * b;
        let q = q_integral(b, zw)?;
        // f1(-2b) + (b/a) sin 2b = 0, and the λ term at z = -2b is λ sin 2b
        let s = (2.0 * b).sin();
        let lambda = -(core_rest(b, q, zw) + b / a * s) / s;
        Ok(Self { a, eps, b, lambda })
    }

    /// `(f, f')` at `y`.
    pub fn eval(&self, y: f64) -> Result<(f64, f64), AsymError> {
        if !(-1.0..=1.0).contains(&y) {
            return Err(AsymError::InvalidParameter(format!(
                "y = {y} outside [-1, 1]"
            )));
        }
        let (a, b, eps, lam) = (self.a, self.b, self.eps, self.lambda);
        let z = b * (y - 1.0);
        let q = q_integral(b, z)?;
        let eta = (1.0 + y) / eps;
        let s2b = (2.0 * b).sin();
        let layer = (b / a) * s2b * (-a * eta).exp();

        let f1 = core_rest(b, q, z) + lam / (2.0 * b) * z * z.sin();
        let f1d = core_rest_d(b, q, z) + lam / (2.0 * b) * (z.sin() + z * z.cos());
        let f = z.cos() + eps * (f1 + layer);
        // d/dy = b d/dz on the core; the layer derivative is O(1)
        let fp = b * (-z.sin() + eps * f1d) - a * layer;
        Ok((f, fp))
    }
}

/// Composite type I value and slope at `y`.
pub fn type_i_eval(y: f64, a: f64, eps: f64) -> Result<(f64, f64), AsymError> {
    TypeIParams::new(a, eps)?.eval(y)
}

/// The closed form
///
/// ```text
/// λ = [2(b - ab - aQ(-2b)) s + ab t - 2ab²t² + ab(c + 2bs) L] / (2a(bs + c))
/// ```
///
/// with `s = sin 2b`, `c = cos 2b`, `t = tan 2b`, `L = ln(1+s) - ln c`. Used
/// together with a `λ/2b (z sin z + cos z) + λ/2b` correction it does not
/// reproduce `f(1) = 1`; kept so the two can be compared.
pub fn lambda_closed_form(a: f64) -> Result<f64, AsymError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(AsymError::InvalidParameter(format!(
            "a = {a} must lie in (0, 1)"
        )));
    }
    let b = 0.5 * a.acos();
    let q = q_integral(b, -2.0 * b)?;
    let (s, c, t) = ((2.0 * b).sin(), (2.0 * b).cos(), (2.0 * b).tan());
    let l = (1.0 + s).ln() - c.ln();
    let num = 2.0 * (b - a * b - a * q) * s + a * b * t - 2.0 * a * b * b * t * t
        + a * b * (c + 2.0 * b * s) * l;
    Ok(num / (2.0 * a * (b * s + c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_wall_conditions_hold() {
        for a in [0.3, 0.8] {
            for eps in [0.05, 0.01, 1e-3] {
                let (f, fp) = type_i_eval(1.0, a, eps).unwrap();
                // only the wall-layer tail e^{-2a/ε} survives at y = 1
                let tail = (-2.0 * a / eps).exp();
                assert!((f - 1.0).abs() < 1e-12 + 10.0 * eps * tail / a);
                assert!(fp.abs() < 1e-12 + 10.0 * tail);
            }
        }
    }

    #[test]
    fn lower_wall_value_is_exact_at_first_order() {
        let p = TypeIParams::new(0.8, 0.01).unwrap();
        let (f, fp) = p.eval(-1.0).unwrap();
        assert!((f - 0.8).abs() < 1e-12);
        // the slope mismatch is a higher-order effect
        assert!(fp.abs() < 0.01 * 0.5);
    }

    #[test]
    fn slope_matches_difference_quotient() {
        let p = TypeIParams::new(0.8, 0.01).unwrap();
        for y in [-0.97, -0.5, 0.3, 0.9] {
            let h = 1e-6;
            let fd = (p.eval(y + h).unwrap().0 - p.eval(y - h).unwrap().0) / (2.0 * h);
            assert!((fd - p.eval(y).unwrap().1).abs() < 1e-7, "y = {y}");
        }
    }

    #[test]
    fn q_is_even_and_negative() {
        let b = 0.3;
        assert!(q_integral(b, 0.4).unwrap() < 0.0);
        assert!((q_integral(b, 0.4).unwrap() - q_integral(b, -0.4).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(type_i_eval(0.0, 0.8, 0.06).is_err());
        assert!(type_i_eval(0.0, 1.0, 0.01).is_err());
        assert!(type_i_eval(1.5, 0.8, 0.01).is_err());
    }
}
