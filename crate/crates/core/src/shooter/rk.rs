//! Dormand–Prince 5(4) for the third-order system written as three
//! first-order equations. The system is autonomous so the nodes `c_i` are
//! never needed.

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub type State = [f64; 3];

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..3 {
            out[i] += h * c * k[i];
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Samples {
    pub x: Vec<f64>,
    pub y: Vec<State>,
    pub dy: Vec<State>,
}

#[derive(Debug)]
pub enum RkFailure {
    /// A component exceeded the guard; samples up to that point are kept.
    Overflow(Samples),
    StepUnderflow(Samples),
    /// More than [`MAX_STEPS`] accepted steps, typically because large `g`
    /// has made the problem stiff.
    StepLimit(Samples),
}

pub const MAX_STEPS: usize = 200_000;

/// Integrates `y' = rhs(y)` from `x0` to `x1` and keeps every accepted step.
pub fn integrate<F>(
    rhs: F,
    y0: State,
    x0: f64,
    x1: f64,
    tol: f64,
    guard: f64,
) -> Result<Samples, RkFailure>
where
    F: Fn(&State) -> State,
{
    let span = x1 - x0;
    let mut out = Samples {
        x: vec![x0],
        y: vec![y0],
        dy: vec![rhs(&y0)],
    };
    if span <= 0.0 {
        return Ok(out);
    }
    let mut x = x0;
    let mut y = y0;
    let mut k1 = out.dy[0];
    let mut h = (0.01 * span).min(0.05);
    let h_min = 1e-14 * span.max(1.0);

    while x < x1 {
        let last = x + h >= x1;
        if last {
            h = x1 - x;
        }
        let k2 = rhs(&axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(&axpy(
            &y,
            h,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        ));
        let k6 = rhs(&axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ));
        let y_new = axpy(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = rhs(&y_new);

        let mut err = 0.0;
        for i in 0..3 {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol + tol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / 3.0).sqrt();

        if !err.is_finite() {
            h *= 0.2;
        } else if err <= 1.0 {
            x = if last { x1 } else { x + h };
            y = y_new;
            k1 = k7;
            out.x.push(x);
            out.y.push(y);
            out.dy.push(k7);
            if y.iter().any(|v| !v.is_finite() || v.abs() > guard) {
                return Err(RkFailure::Overflow(out));
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
        if x < x1 && h < h_min {
            return Err(RkFailure::StepUnderflow(out));
        }
        if out.x.len() > MAX_STEPS {
            return Err(RkFailure::StepLimit(out));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_is_integrated_to_tolerance() {
        let s = integrate(
            |y| [y[1], y[2], y[0]],
            [1.0, 1.0, 1.0],
            0.0,
            3.0,
            1e-11,
            1e12,
        )
        .unwrap();
        let last = s.y.last().unwrap();
        assert!((last[0] - 3f64.exp()).abs() < 1e-8 * 3f64.exp());
        assert_eq!(*s.x.last().unwrap(), 3.0);
    }

    #[test]
    fn overflow_keeps_partial_samples() {
        match integrate(
            |y| [y[0] * y[0], 0.0, 0.0],
            [1.0, 0.0, 0.0],
            0.0,
            2.0,
            1e-8,
            1e6,
        ) {
            Err(RkFailure::Overflow(s)) => assert!(*s.x.last().unwrap() < 1.0),
            other => panic!("expected overflow, got {other:?}"),
        }
    }
}
