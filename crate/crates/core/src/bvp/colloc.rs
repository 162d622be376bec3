//! Three-stage Lobatto IIIA collocation (Simpson's rule with a cubic
//! midpoint predictor) for first-order systems with separated boundary
//! conditions, solved by damped Newton on a banded Jacobian, with residual
//! control of the mesh.

use super::banded::BandMatrix;
use crate::hermite;

pub trait FirstOrderSystem {
    /// Number of states.
    fn dim(&self) -> usize;
    /// Number of conditions imposed at the left end; the rest are imposed at
    /// the right end.
    fn n_left(&self) -> usize;
    fn rhs(&self, x: f64, y: &[f64], out: &mut [f64]);
    /// Row-major `d rhs_i / d y_j`.
    fn jac(&self, x: f64, y: &[f64], out: &mut [f64]);
    fn bc_left(&self, ya: &[f64], out: &mut [f64]);
    /// Row-major, `n_left × dim`.
    fn bc_left_jac(&self, ya: &[f64], out: &mut [f64]);
    fn bc_right(&self, yb: &[f64], out: &mut [f64]);
    fn bc_right_jac(&self, yb: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub struct CollocOptions {
    pub tol: f64,
    pub max_newton: usize,
    pub max_nodes: usize,
    pub max_refinements: usize,
}

impl Default for CollocOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_newton: 50,
            max_nodes: 200_000,
            max_refinements: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CollocError {
    NoConvergence { iterations: usize, correction: f64 },
    MeshExhausted { nodes: usize, max_error: f64 },
    Singular,
}

/// Nodal values `y[i * dim + c]` on `mesh`.
#[derive(Debug, Clone)]
pub struct Solution {
    pub mesh: Vec<f64>,
    pub y: Vec<f64>,
    pub dim: usize,
    pub newton_iterations: usize,
    pub max_error: f64,
}

impl Solution {
    pub fn node(&self, i: usize) -> &[f64] {
        &self.y[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.mesh.len())
            .map(|i| self.y[i * self.dim + c])
            .collect()
    }
}

fn rhs_all<S: FirstOrderSystem>(sys: &S, mesh: &[f64], y: &[f64]) -> Vec<f64> {
    let n = sys.dim();
    let mut f = vec![0.0; y.len()];
    for (i, &x) in mesh.iter().enumerate() {
        sys.rhs(x, &y[i * n..(i + 1) * n], &mut f[i * n..(i + 1) * n]);
    }
    f
}

fn midpoint(n: usize, h: f64, yi: &[f64], yj: &[f64], fi: &[f64], fj: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|c| 0.5 * (yi[c] + yj[c]) - h / 8.0 * (fj[c] - fi[c]))
        .collect()
}

fn residual<S: FirstOrderSystem>(sys: &S, mesh: &[f64], y: &[f64], f: &[f64]) -> Vec<f64> {
    let n = sys.dim();
    let nl = sys.n_left();
    let m = mesh.len();
    let mut r = vec![0.0; m * n];
    sys.bc_left(&y[..n], &mut r[..nl]);
    let mut fm = vec![0.0; n];
    for i in 0..m - 1 {
        let h = mesh[i + 1] - mesh[i];
        let (yi, yj) = (&y[i * n..(i + 1) * n], &y[(i + 1) * n..(i + 2) * n]);
        let (fi, fj) = (&f[i * n..(i + 1) * n], &f[(i + 1) * n..(i + 2) * n]);
        let ym = midpoint(n, h, yi, yj, fi, fj);
        sys.rhs(mesh[i] + 0.5 * h, &ym, &mut fm);
        let row = nl + i * n;
        for c in 0..n {
            r[row + c] = yj[c] - yi[c] - h / 6.0 * (fi[c] + 4.0 * fm[c] + fj[c]);
        }
    }
    sys.bc_right(&y[(m - 1) * n..], &mut r[nl + (m - 1) * n..]);
    r
}

fn jacobian<S: FirstOrderSystem>(sys: &S, mesh: &[f64], y: &[f64], f: &[f64]) -> BandMatrix {
    let n = sys.dim();
    let nl = sys.n_left();
    let nr = n - nl;
    let m = mesh.len();
    let kl = nl + n - 1;
    let ku = 2 * n - 1 - nl;
    let mut a = BandMatrix::zeros(m * n, kl, ku);

    let mut bl = vec![0.0; nl * n];
    sys.bc_left_jac(&y[..n], &mut bl);
    for r in 0..nl {
        for c in 0..n {
            a.set(r, c, bl[r * n + c]);
        }
    }

    let mut ji = vec![0.0; n * n];
    let mut jj = vec![0.0; n * n];
    let mut jm = vec![0.0; n * n];
    let mut fm = vec![0.0; n];
    sys.jac(mesh[0], &y[..n], &mut ji);
    for i in 0..m - 1 {
        let h = mesh[i + 1] - mesh[i];
        let (yi, yj) = (&y[i * n..(i + 1) * n], &y[(i + 1) * n..(i + 2) * n]);
        let (fi, fj) = (&f[i * n..(i + 1) * n], &f[(i + 1) * n..(i + 2) * n]);
        let ym = midpoint(n, h, yi, yj, fi, fj);
        sys.rhs(mesh[i] + 0.5 * h, &ym, &mut fm);
        sys.jac(mesh[i] + 0.5 * h, &ym, &mut jm);
        sys.jac(mesh[i + 1], yj, &mut jj);
        let row = nl + i * n;
        for r in 0..n {
            for c in 0..n {
                // d ym / d yi = I/2 + h/8 Ji,  d ym / d yj = I/2 - h/8 Jj
                let mut mi = 0.0;
                let mut mj = 0.0;
                for q in 0..n {
                    let di = if q == c { 0.5 } else { 0.0 } + h / 8.0 * ji[q * n + c];
                    let dj = if q == c { 0.5 } else { 0.0 } - h / 8.0 * jj[q * n + c];
                    mi += jm[r * n + q] * di;
                    mj += jm[r * n + q] * dj;
                }
                let eye = if r == c { 1.0 } else { 0.0 };
                let vi = -eye - h / 6.0 * (ji[r * n + c] + 4.0 * mi);
                let vj = eye - h / 6.0 * (jj[r * n + c] + 4.0 * mj);
                a.set(row + r, i * n + c, vi);
                a.set(row + r, (i + 1) * n + c, vj);
            }
        }
        std::mem::swap(&mut ji, &mut jj);
    }

    let mut br = vec![0.0; nr * n];
    sys.bc_right_jac(&y[(m - 1) * n..], &mut br);
    let row = nl + (m - 1) * n;
    for r in 0..nr {
        for c in 0..n {
            a.set(row + r, (m - 1) * n + c, br[r * n + c]);
        }
    }
    a
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Damped Newton on a fixed mesh. Convergence is declared when the full
/// correction is below `tol` relative to the solution.
pub fn newton<S: FirstOrderSystem>(
    sys: &S,
    mesh: &[f64],
    mut y: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize), CollocError> {
    let mut f = rhs_all(sys, mesh, &y);
    let mut r = residual(sys, mesh, &y, &f);
    let mut rnorm = max_abs(&r);
    let mut last = f64::INFINITY;
    for it in 0..max_iter {
        let lu = jacobian(sys, mesh, &y, &f)
            .factor()
            .map_err(|_| CollocError::Singular)?;
        let mut dy: Vec<f64> = r.iter().map(|v| -v).collect();
        lu.solve(&mut dy);
        let dnorm = dy
            .iter()
            .zip(&y)
            .fold(0.0_f64, |m, (d, v)| m.max(d.abs() / (1.0 + v.abs())));
        if !dnorm.is_finite() {
            return Err(CollocError::NoConvergence {
                iterations: it,
                correction: dnorm,
            });
        }
        // near convergence the residual sits at roundoff and damping only stalls
        if dnorm < 100.0 * tol {
            let y: Vec<f64> = y.iter().zip(&dy).map(|(a, d)| a + d).collect();
            return Ok((y, it + 1));
        }
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = y.iter().zip(&dy).map(|(a, d)| a + lambda * d).collect();
            let ft = rhs_all(sys, mesh, &trial);
            let rt = residual(sys, mesh, &trial, &ft);
            let nt = max_abs(&rt);
            if nt.is_finite()
                && (nt <= (1.0 - 0.1 * lambda) * rnorm || dnorm * lambda < tol || nt < 1e-14)
            {
                y = trial;
                f = ft;
                r = rt;
                rnorm = nt;
                break;
            }
            lambda *= 0.5;
            if lambda < 1.0 / 1024.0 {
                return Err(CollocError::NoConvergence {
                    iterations: it,
                    correction: dnorm,
                });
            }
        }
        last = dnorm * lambda;
        if lambda == 1.0 && dnorm < tol {
            return Ok((y, it + 1));
        }
    }
    Err(CollocError::NoConvergence {
        iterations: max_iter,
        correction: last,
    })
}

/// Scaled residual of the cubic interpolant at the two interior Lobatto
/// points of each interval, multiplied by the interval width.
pub fn interval_errors<S: FirstOrderSystem>(sys: &S, mesh: &[f64], y: &[f64]) -> Vec<f64> {
    let n = sys.dim();
    let f = rhs_all(sys, mesh, y);
    let off = 0.5 * (3.0_f64 / 7.0).sqrt();
    let mut out = Vec::with_capacity(mesh.len() - 1);
    let mut ys = vec![0.0; n];
    let mut dys = vec![0.0; n];
    let mut fs = vec![0.0; n];
    for i in 0..mesh.len() - 1 {
        let h = mesh[i + 1] - mesh[i];
        let mut e = 0.0_f64;
        for t in [0.5 - off, 0.5 + off] {
            for c in 0..n {
                let v = hermite::cubic(
                    h,
                    t,
                    [y[i * n + c], f[i * n + c]],
                    [y[(i + 1) * n + c], f[(i + 1) * n + c]],
                );
                ys[c] = v[0];
                dys[c] = v[1];
            }
            sys.rhs(mesh[i] + t * h, &ys, &mut fs);
            for c in 0..n {
                e = e.max((dys[c] - fs[c]).abs() / (1.0 + fs[c].abs()));
            }
        }
        out.push(h * e);
    }
    out
}

/// Interpolates a nodal solution onto a new mesh with the cubic Hermite
/// interpolant built from values and right-hand sides.
pub fn remesh<S: FirstOrderSystem>(sys: &S, mesh: &[f64], y: &[f64], new_mesh: &[f64]) -> Vec<f64> {
    let n = sys.dim();
    let f = rhs_all(sys, mesh, y);
    let mut out = Vec::with_capacity(new_mesh.len() * n);
    for &x in new_mesh {
        let i = hermite::locate(mesh, x);
        let h = mesh[i + 1] - mesh[i];
        let t = (x - mesh[i]) / h;
        for c in 0..n {
            out.push(
                hermite::cubic(
                    h,
                    t,
                    [y[i * n + c], f[i * n + c]],
                    [y[(i + 1) * n + c], f[(i + 1) * n + c]],
                )[0],
            );
        }
    }
    out
}

/// Solves on an adaptively refined mesh starting from `mesh`/`y`.
pub fn solve<S: FirstOrderSystem>(
    sys: &S,
    mesh: Vec<f64>,
    y: Vec<f64>,
    opts: &CollocOptions,
) -> Result<Solution, CollocError> {
    let mut mesh = mesh;
    let mut y = y;
    let newton_tol = (opts.tol * 1e-2).max(1e-13);
    let mut total_iters = 0;
    for _ in 0..opts.max_refinements {
        let (ys, iters) = newton(sys, &mesh, y, newton_tol, opts.max_newton)?;
        total_iters += iters;
        let errs = interval_errors(sys, &mesh, &ys);
        let max_error = errs.iter().cloned().fold(0.0, f64::max);
        if max_error <= opts.tol {
            return Ok(Solution {
                mesh,
                y: ys,
                dim: sys.dim(),
                newton_iterations: total_iters,
                max_error,
            });
        }
        let mut new_mesh = Vec::with_capacity(mesh.len() * 2);
        for i in 0..mesh.len() - 1 {
            new_mesh.push(mesh[i]);
            let h = mesh[i + 1] - mesh[i];
            if errs[i] > 100.0 * opts.tol {
                new_mesh.push(mesh[i] + h / 3.0);
                new_mesh.push(mesh[i] + 2.0 * h / 3.0);
            } else if errs[i] > opts.tol {
                new_mesh.push(mesh[i] + 0.5 * h);
            }
        }
        new_mesh.push(*mesh.last().unwrap());
        if new_mesh.len() > opts.max_nodes {
            return Err(CollocError::MeshExhausted {
                nodes: new_mesh.len(),
                max_error,
            });
        }
        y = remesh(sys, &mesh, &ys, &new_mesh);
        mesh = new_mesh;
    }
    let (ys, iters) = newton(sys, &mesh, y, newton_tol, opts.max_newton)?;
    let errs = interval_errors(sys, &mesh, &ys);
    let max_error = errs.iter().cloned().fold(0.0, f64::max);
    if max_error <= opts.tol {
        Ok(Solution {
            mesh,
            y: ys,
            dim: sys.dim(),
            newton_iterations: total_iters + iters,
            max_error,
        })
    } else {
        Err(CollocError::MeshExhausted {
            nodes: mesh.len(),
            max_error,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// y'' = -y on [0, π/2], y(0) = 0, y(π/2) = 1.
    struct Harmonic;

    impl FirstOrderSystem for Harmonic {
        fn dim(&self) -> usize {
            2
        }
        fn n_left(&self) -> usize {
            1
        }
        fn rhs(&self, _x: f64, y: &[f64], out: &mut [f64]) {
            out[0] = y[1];
            out[1] = -y[0];
        }
        fn jac(&self, _x: f64, _y: &[f64], out: &mut [f64]) {
            out.copy_from_slice(&[0.0, 1.0, -1.0, 0.0]);
        }
        fn bc_left(&self, ya: &[f64], out: &mut [f64]) {
            out[0] = ya[0];
        }
        fn bc_left_jac(&self, _ya: &[f64], out: &mut [f64]) {
            out.copy_from_slice(&[1.0, 0.0]);
        }
        fn bc_right(&self, yb: &[f64], out: &mut [f64]) {
            out[0] = yb[0] - 1.0;
        }
        fn bc_right_jac(&self, _yb: &[f64], out: &mut [f64]) {
            out.copy_from_slice(&[1.0, 0.0]);
        }
    }

    #[test]
    fn solves_linear_problem_to_tolerance() {
        let mesh: Vec<f64> = (0..=5)
            .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / 5.0)
            .collect();
        let y = vec![0.0; 12];
        let s = solve(
            &Harmonic,
            mesh,
            y,
            &CollocOptions {
                tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        for (i, &x) in s.mesh.iter().enumerate() {
            assert!((s.node(i)[0] - x.sin()).abs() < 1e-9);
            assert!((s.node(i)[1] - x.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn fourth_order_on_uniform_meshes() {
        let err = |m: usize| {
            let mesh: Vec<f64> = (0..=m)
                .map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / m as f64)
                .collect();
            let (y, _) = newton(&Harmonic, &mesh, vec![0.0; 2 * (m + 1)], 1e-14, 10).unwrap();
            (0..=m)
                .map(|i| (y[2 * i] - mesh[i].sin()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(10) / err(20);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
