//! Python bindings: solve a branch, trace branches, evaluate the
//! asymptotic forms and reconstruct the velocity field.

use porous_channel::asymptotics::{
    estimate_beta as estimate_beta_rs, solve_layer, type_i_eval, type_ii_deltas,
    type_iii_composite, LayerSolution,
};
use porous_channel::bvp::{
    count_solutions, discover_branches as discover_rs, find_fold, solve_branch, turning_points,
    Branch as BranchRs, BranchSolveOptions, DiscoverOptions,
};
use porous_channel::flowfield::{self, FlowGeometry};
use porous_channel::model::{BranchLabel, ProblemSpec, Profile as ProfileRs};
use porous_channel::shooter::{solve_for_target, ShootOptions};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl ToString) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn label(s: &str) -> PyResult<BranchLabel> {
    s.parse().map_err(value_err)
}

/// A solved profile `f(y)` on `[-1, 1]`.
#[pyclass(frozen, module = "porous_channel_py")]
#[derive(Clone)]
struct Profile {
    inner: ProfileRs,
}

#[pymethods]
impl Profile {
    #[getter(R)]
    fn reynolds(&self) -> f64 {
        self.inner.reynolds()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    #[getter(K)]
    fn k(&self) -> f64 {
        self.inner.k()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    #[getter]
    fn skin_friction(&self) -> f64 {
        self.inner.skin_friction()
    }

    #[getter]
    fn mesh(&self) -> Vec<f64> {
        self.inner.mesh().to_vec()
    }

    #[getter]
    fn f(&self) -> Vec<f64> {
        self.inner.f().to_vec()
    }

    #[getter]
    fn fp(&self) -> Vec<f64> {
        self.inner.fp().to_vec()
    }

    #[getter]
    fn fpp(&self) -> Vec<f64> {
        self.inner.fpp().to_vec()
    }

    /// `(f, f', f'', f''')` at `y`.
    fn eval(&self, y: f64) -> PyResult<(f64, f64, f64, f64)> {
        if !(-1.0..=1.0).contains(&y) {
            return Err(value_err(format!("y = {y} lies outside [-1, 1]")));
        }
        let v = self.inner.eval(y);
        Ok((v[0], v[1], v[2], v[3]))
    }

    /// Largest deviation of `f''' + R(f f'' - f'^2)` from `K`.
    fn k_residual(&self) -> f64 {
        self.inner.k_residual()
    }

    /// The two zeros of `f` on a type II profile.
    fn turning_points(&self) -> PyResult<(f64, f64)> {
        let t = turning_points(&self.inner).map_err(value_err)?;
        Ok((t.y1, t.y2))
    }

    fn max_f_distance(&self, other: &Profile) -> f64 {
        self.inner.max_f_distance(&other.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Profile(R={}, a={}, label={}, K={:.6})",
            self.inner.reynolds(),
            self.inner.a(),
            self.inner.label(),
            self.inner.k()
        )
    }
}

/// Solves one branch at `(a, R)` by collocation.
#[pyfunction]
#[pyo3(signature = (a, R, branch = "I", tol = 1e-10))]
#[allow(non_snake_case)]
fn solve(a: f64, R: f64, branch: &str, tol: f64) -> PyResult<Profile> {
    let spec = ProblemSpec::new(R, a).map_err(value_err)?;
    let opts = BranchSolveOptions {
        tol,
        ..Default::default()
    };
    let inner = solve_branch(spec, label(branch)?, &opts).map_err(runtime_err)?;
    Ok(Profile { inner })
}

/// Solves one branch at `(a, R)` by multiple shooting on the transformed
/// initial-value problem.
#[pyfunction]
#[pyo3(signature = (a, R, branch = "I"))]
#[allow(non_snake_case)]
fn shoot(a: f64, R: f64, branch: &str) -> PyResult<Profile> {
    let s = solve_for_target(a, R, label(branch)?, &ShootOptions::default()).map_err(runtime_err)?;
    Ok(Profile { inner: s.profile })
}

/// One continuation branch of `(R, f''(-1))` points.
#[pyclass(frozen, module = "porous_channel_py")]
struct Branch {
    inner: BranchRs,
}

#[pymethods]
impl Branch {
    #[getter(R)]
    fn reynolds(&self) -> Vec<f64> {
        self.inner.points.iter().map(|p| p.r).collect()
    }

    #[getter]
    fn skin_friction(&self) -> Vec<f64> {
        self.inner.points.iter().map(|p| p.skin_friction).collect()
    }

    #[getter(K)]
    fn k(&self) -> Vec<f64> {
        self.inner.points.iter().map(|p| p.k).collect()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner
            .points
            .iter()
            .map(|p| p.label.to_string())
            .collect()
    }

    /// `(R, uncertainty)` of the turning point in `R`, if the branch has one.
    fn fold(&self) -> Option<(f64, f64)> {
        find_fold(&self.inner).ok().map(|f| (f.r, f.uncertainty))
    }

    #[pyo3(signature = (R))]
    #[allow(non_snake_case)]
    fn solutions_at(&self, R: f64) -> usize {
        self.inner.solutions_at(R)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Every branch reachable by continuation over `[Rmin, Rmax]`.
#[pyfunction]
#[pyo3(signature = (a, Rmin = 0.0, Rmax = 130.0))]
#[allow(non_snake_case)]
fn discover_branches(py: Python<'_>, a: f64, Rmin: f64, Rmax: f64) -> PyResult<Vec<Branch>> {
    let branches = py
        .allow_threads(|| discover_rs(a, (Rmin, Rmax), &DiscoverOptions::default()))
        .map_err(runtime_err)?;
    Ok(branches.into_iter().map(|inner| Branch { inner }).collect())
}

/// Total number of solutions over `branches` at `R`.
#[pyfunction]
#[allow(non_snake_case)]
fn solution_count(branches: Vec<PyRef<'_, Branch>>, R: f64) -> usize {
    let b: Vec<BranchRs> = branches.iter().map(|b| b.inner.clone()).collect();
    count_solutions(&b, R)
}

/// Type I composite `(f, f')` at `y`.
#[pyfunction]
fn type_i(y: f64, a: f64, eps: f64) -> PyResult<(f64, f64)> {
    type_i_eval(y, a, eps).map_err(value_err)
}

/// Type II turning points `(y1, y2)` from the asymptotic relations.
#[pyfunction]
fn type_ii_turning_points(a: f64, eps: f64) -> PyResult<(f64, f64)> {
    let d = type_ii_deltas(a, eps).map_err(value_err)?;
    Ok((d.y1(), d.y2()))
}

/// Core value `β` of a type III profile.
#[pyfunction]
fn estimate_beta(p: &Profile) -> PyResult<f64> {
    Ok(estimate_beta_rs(&p.inner).map_err(value_err)?.beta)
}

/// Wall-layer function `h0` on `[0, L]`.
#[pyclass(frozen, module = "porous_channel_py")]
struct Layer {
    inner: LayerSolution,
}

#[pymethods]
impl Layer {
    #[new]
    #[pyo3(signature = (beta, a, length = 100.0))]
    fn new(beta: f64, a: f64, length: f64) -> PyResult<Self> {
        let inner = solve_layer(beta, a, length).map_err(runtime_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn eta(&self) -> Vec<f64> {
        self.inner.eta.clone()
    }

    #[getter]
    fn h(&self) -> Vec<f64> {
        self.inner.h.clone()
    }

    fn eval(&self, eta: f64) -> f64 {
        self.inner.eval(eta).0
    }

    /// Monotone decay and eventual convexity.
    fn check_invariants(&self) -> PyResult<()> {
        self.inner.check_invariants().map_err(value_err)
    }

    /// Composite type III `f(y)` using this layer.
    fn composite(&self, y: f64, eps: f64) -> PyResult<f64> {
        let l = &self.inner;
        Ok(type_iii_composite(y, l.a, eps, l.beta, l)
            .map_err(value_err)?
            .0)
    }
}

/// Velocity `(u, v)` at `(x, y)` in a channel of half-width `h`.
#[pyfunction]
#[pyo3(signature = (p, x, y, h = 1.0, nu = 1.0))]
fn velocity(p: &Profile, x: f64, y: f64, h: f64, nu: f64) -> PyResult<(f64, f64)> {
    let geo = FlowGeometry::new(h, nu, (0.0, 4.0 * h)).map_err(value_err)?;
    flowfield::velocity(x, y, &p.inner, &geo).map_err(value_err)
}

/// Relative discrete divergence of the reconstructed field.
#[pyfunction]
#[pyo3(signature = (p, n = 21))]
fn divergence(p: &Profile, n: usize) -> PyResult<f64> {
    flowfield::divergence_check(&p.inner, &FlowGeometry::default(), n).map_err(value_err)
}

#[pymodule]
fn porous_channel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Profile>()?;
    m.add_class::<Branch>()?;
    m.add_class::<Layer>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(shoot, m)?)?;
    m.add_function(wrap_pyfunction!(discover_branches, m)?)?;
    m.add_function(wrap_pyfunction!(solution_count, m)?)?;
    m.add_function(wrap_pyfunction!(type_i, m)?)?;
    m.add_function(wrap_pyfunction!(type_ii_turning_points, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_beta, m)?)?;
    m.add_function(wrap_pyfunction!(velocity, m)?)?;
    m.add_function(wrap_pyfunction!(divergence, m)?)?;
    Ok(())
}
