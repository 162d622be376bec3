//! Piecewise Hermite interpolation on node data carrying a value and its
//! first three derivatives.

/// Index `i` of the interval `[xs[i], xs[i+1]]` containing `x` (clamped).
pub fn locate(xs: &[f64], x: f64) -> usize {
    debug_assert!(xs.len() >= 2);
    let n = xs.len();
    let i = xs.partition_point(|&v| v <= x);
    i.saturating_sub(1).min(n - 2)
}

/// Quintic Hermite interpolant of `p` on `[x0, x0 + h]` from value, slope and
/// curvature at both ends. Returns `(p, p', p'')`.
pub fn quintic(h: f64, t: f64, p0: [f64; 3], p1: [f64; 3]) -> [f64; 3] {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;

    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h01 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h02 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h10 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h12 = 0.5 * (t3 - 2.0 * t4 + t5);

    let d00 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let d01 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d02 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    let d10 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
    let d11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d12 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);

    let s00 = -60.0 * t + 180.0 * t2 - 120.0 * t3;
    let s01 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
    let s02 = 0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3);
    let s10 = 60.0 * t - 180.0 * t2 + 120.0 * t3;
    let s11 = -24.0 * t + 84.0 * t2 - 60.0 * t3;
    let s12 = 0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3);

    let h2 = h * h;
    let v = p0[0] * h00
        + h * p0[1] * h01
        + h2 * p0[2] * h02
        + p1[0] * h10
        + h * p1[1] * h11
        + h2 * p1[2] * h12;
    let d = (p0[0] * d00 + p1[0] * d10) / h
        + p0[1] * d01
        + p1[1] * d11
        + h * (p0[2] * d02 + p1[2] * d12);
    let s = (p0[0] * s00 + p1[0] * s10) / h2
        + (p0[1] * s01 + p1[1] * s11) / h
        + p0[2] * s02
        + p1[2] * s12;
    [v, d, s]
}

/// Cubic Hermite interpolant from value and slope at both ends: `(p, p')`.
pub fn cubic(h: f64, t: f64, p0: [f64; 2], p1: [f64; 2]) -> [f64; 2] {
    let t2 = t * t;
    let t3 = t2 * t;
    let v = (2.0 * t3 - 3.0 * t2 + 1.0) * p0[0]
        + (t3 - 2.0 * t2 + t) * h * p0[1]
        + (-2.0 * t3 + 3.0 * t2) * p1[0]
        + (t3 - t2) * h * p1[1];
    let d = (6.0 * t2 - 6.0 * t) / h * (p0[0] - p1[0])
        + (3.0 * t2 - 4.0 * t + 1.0) * p0[1]
        + (3.0 * t2 - 2.0 * t) * p1[1];
    [v, d]
}

/// Evaluates `(u, u', u'', u''')` at `x` from nodal samples of all four
/// quantities. `u` and `u'` use quintic interpolants, `u''` a cubic one and
/// `u'''` is linear.
pub fn eval4(xs: &[f64], cols: [&[f64]; 4], x: f64) -> [f64; 4] {
    let i = locate(xs, x);
    let (x0, x1) = (xs[i], xs[i + 1]);
    let h = x1 - x0;
    let t = (x - x0) / h;
    let [u, u1, u2, u3] = cols;
    let q = quintic(h, t, [u[i], u1[i], u2[i]], [u[i + 1], u1[i + 1], u2[i + 1]]);
    let qd = quintic(
        h,
        t,
        [u1[i], u2[i], u3[i]],
        [u1[i + 1], u2[i + 1], u3[i + 1]],
    );
    let c = cubic(h, t, [u2[i], u3[i]], [u2[i + 1], u3[i + 1]]);
    let lin = u3[i] + t * (u3[i + 1] - u3[i]);
    [q[0], qd[0], c[0], lin]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quintic_reproduces_degree_five_polynomials() {
        let p = |x: f64| {
            [
                1.0 - 2.0 * x + 0.5 * x.powi(3) + 0.25 * x.powi(5),
                -2.0 + 1.5 * x * x + 1.25 * x.powi(4),
                3.0 * x + 5.0 * x.powi(3),
            ]
        };
        let (x0, x1) = (0.3, 1.1);
        let h = x1 - x0;
        for k in 0..=10 {
            let x = x0 + h * k as f64 / 10.0;
            let v = quintic(h, (x - x0) / h, p(x0), p(x1));
            let e = p(x);
            for j in 0..3 {
                assert!((v[j] - e[j]).abs() < 1e-12, "{j}: {} vs {}", v[j], e[j]);
            }
        }
    }

    #[test]
    fn locate_clamps_to_end_intervals() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(locate(&xs, -1.0), 0);
        assert_eq!(locate(&xs, 0.0), 0);
        assert_eq!(locate(&xs, 1.5), 1);
        assert_eq!(locate(&xs, 3.0), 2);
        assert_eq!(locate(&xs, 9.0), 2);
    }
}
