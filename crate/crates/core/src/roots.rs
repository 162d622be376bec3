/// Newton–bisection hybrid on a bracket `[a, b]` with `f(a) f(b) <= 0`.
/// `func` returns the value and derivative. Returns `None` when the bracket
/// does not straddle a sign change.
pub fn safeguarded<F>(func: F, a: f64, b: f64, xtol: f64) -> Option<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    safeguarded_from(func, a, b, 0.5 * (a + b), xtol)
}

/// As [`safeguarded`], starting the iteration from `x0` inside the bracket.
pub fn safeguarded_from<F>(func: F, a: f64, b: f64, x0: f64, xtol: f64) -> Option<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (fa, _) = func(a);
    let (fb, _) = func(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa * fb > 0.0 || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    let (mut lo, mut hi) = if fa < 0.0 { (a, b) } else { (b, a) };
    let mut x = if x0 > a.min(b) && x0 < a.max(b) {
        x0
    } else {
        0.5 * (a + b)
    };
    let mut dx_old = (b - a).abs();
    let mut dx = dx_old;
    let (mut f, mut df) = func(x);
    for _ in 0..200 {
        let newton_ok =
            ((x - hi) * df - f) * ((x - lo) * df - f) < 0.0 && 2.0 * f.abs() <= (dx_old * df).abs();
        dx_old = dx;
        if newton_ok {
            dx = f / df;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        if dx.abs() < xtol {
            return Some(x);
        }
        let (nf, ndf) = func(x);
        f = nf;
        df = ndf;
        if f == 0.0 {
            return Some(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = safeguarded(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 3.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(safeguarded(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12).is_none());
    }
}
