use super::colloc::FirstOrderSystem;

/// `(f, f', f'', K)` with `K' = 0` at fixed `R`.
pub struct Similarity {
    pub reynolds: f64,
    pub a: f64,
}

impl FirstOrderSystem for Similarity {
    fn dim(&self) -> usize {
        4
    }
    fn n_left(&self) -> usize {
        2
    }
    fn rhs(&self, _x: f64, y: &[f64], out: &mut [f64]) {
        out[0] = y[1];
        out[1] = y[2];
        out[2] = y[3] - self.reynolds * (y[0] * y[2] - y[1] * y[1]);
        out[3] = 0.0;
    }
    fn jac(&self, _x: f64, y: &[f64], out: &mut [f64]) {
        let r = self.reynolds;
        out.fill(0.0);
        out[1] = 1.0;
        out[4 + 2] = 1.0;
        out[8] = -r * y[2];
        out[9] = 2.0 * r * y[1];
        out[10] = -r * y[0];
        out[11] = 1.0;
    }
    fn bc_left(&self, ya: &[f64], out: &mut [f64]) {
        out[0] = ya[0] - self.a;
        out[1] = ya[1];
    }
    fn bc_left_jac(&self, _ya: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[0] = 1.0;
        out[4 + 1] = 1.0;
    }
    fn bc_right(&self, yb: &[f64], out: &mut [f64]) {
        out[0] = yb[0] - 1.0;
        out[1] = yb[1];
    }
    fn bc_right_jac(&self, _yb: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[0] = 1.0;
        out[4 + 1] = 1.0;
    }
}

/// `(f, f', f'', K, R)` with `R` free and fixed by the pseudo-arclength
/// condition
///
/// ```text
/// t_R (R - R_prev) + t_σ w (σ - σ_prev) = ds,   σ = -f''(-1)
/// ```
///
/// which only involves values at the left end, so the Jacobian stays banded.
pub struct Arclength {
    pub a: f64,
    pub r_prev: f64,
    pub sigma_prev: f64,
    pub t_r: f64,
    pub t_sigma: f64,
    pub weight: f64,
    pub ds: f64,
}

impl FirstOrderSystem for Arclength {
    fn dim(&self) -> usize {
        5
    }
    fn n_left(&self) -> usize {
        3
    }
    fn rhs(&self, _x: f64, y: &[f64], out: &mut [f64]) {
        out[0] = y[1];
        out[1] = y[2];
        out[2] = y[3] - y[4] * (y[0] * y[2] - y[1] * y[1]);
        out[3] = 0.0;
        out[4] = 0.0;
    }
    fn jac(&self, _x: f64, y: &[f64], out: &mut [f64]) {
        let r = y[4];
        out.fill(0.0);
        out[1] = 1.0;
        out[5 + 2] = 1.0;
        out[10] = -r * y[2];
        out[11] = 2.0 * r * y[1];
        out[12] = -r * y[0];
        out[13] = 1.0;
        out[14] = -(y[0] * y[2] - y[1] * y[1]);
    }
    fn bc_left(&self, ya: &[f64], out: &mut [f64]) {
        out[0] = ya[0] - self.a;
        out[1] = ya[1];
        let sigma = -ya[2];
        out[2] = self.t_r * (ya[4] - self.r_prev)
            + self.t_sigma * self.weight * (sigma - self.sigma_prev)
            - self.ds;
    }
    fn bc_left_jac(&self, _ya: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[0] = 1.0;
        out[5 + 1] = 1.0;
        out[10 + 2] = -self.t_sigma * self.weight;
        out[10 + 4] = self.t_r;
    }
    fn bc_right(&self, yb: &[f64], out: &mut [f64]) {
        out[0] = yb[0] - 1.0;
        out[1] = yb[1];
    }
    fn bc_right_jac(&self, _yb: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[0] = 1.0;
        out[5 + 1] = 1.0;
    }
}
