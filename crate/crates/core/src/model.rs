//! Problem definition and the discretized similarity profile.
//!
//! The transverse similarity function `f(y)` on `y ∈ [-1, 1]` satisfies
//!
//! ```text
//! f''' + R (f f'' - f'^2) = K,   f(-1) = a, f'(-1) = 0, f(1) = 1, f'(1) = 0
//! ```
//!
//! with `K` an unknown constant fixed together with `f`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hermite;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("asymmetry parameter a = {0} is outside (0, 1]")]
    InvalidAsymmetry(f64),
    #[error("Reynolds number R = {0} must be finite and non-negative")]
    InvalidReynolds(f64),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("column length {got} does not match mesh length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("rescaling is undefined for R = 0")]
    TransformUndefined,
    #[error("trajectory value g(xi*) = {0} is not positive")]
    NonPositiveWallValue(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Cross-flow Reynolds number and wall asymmetry `a = v1 / v2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub reynolds: f64,
    pub a: f64,
}

impl ProblemSpec {
    /// `a = 1` is accepted so the constant solution can be exercised.
    pub fn new(reynolds: f64, a: f64) -> Result<Self, ModelError> {
        if !(reynolds.is_finite() && reynolds >= 0.0) {
            return Err(ModelError::InvalidReynolds(reynolds));
        }
        check_asymmetry(a)?;
        Ok(Self { reynolds, a })
    }
}

pub(crate) fn check_asymmetry(a: f64) -> Result<(), ModelError> {
    if a.is_finite() && a > 0.0 && a <= 1.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidAsymmetry(a))
    }
}

/// Solution family a profile belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchLabel {
    TypeI,
    TypeII,
    TypeIII,
    Unclassified,
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BranchLabel::TypeI => "TypeI",
            BranchLabel::TypeII => "TypeII",
            BranchLabel::TypeIII => "TypeIII",
            BranchLabel::Unclassified => "Unclassified",
        };
        f.write_str(s)
    }
}

impl FromStr for BranchLabel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "I" | "TypeI" | "typeI" | "1" => Ok(BranchLabel::TypeI),
            "II" | "TypeII" | "typeII" | "2" => Ok(BranchLabel::TypeII),
            "III" | "TypeIII" | "typeIII" | "3" => Ok(BranchLabel::TypeIII),
            "Unclassified" => Ok(BranchLabel::Unclassified),
            other => Err(ModelError::InvalidParameter(format!(
                "unknown branch label '{other}'"
            ))),
        }
    }
}

/// Governing equation solved for `f'''`.
pub fn rhs_similarity(_y: f64, f: f64, fp: f64, fpp: f64, reynolds: f64, k: f64) -> f64 {
    k - reynolds * (f * fpp - fp * fp)
}

/// A discretized similarity solution on a strictly increasing mesh over
/// `[-1, 1]`. The stored third derivative is canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    spec: ProblemSpec,
    mesh: Vec<f64>,
    f: Vec<f64>,
    fp: Vec<f64>,
    fpp: Vec<f64>,
    fppp: Vec<f64>,
    k: f64,
    label: BranchLabel,
}

impl Profile {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        spec: ProblemSpec,
        mesh: Vec<f64>,
        f: Vec<f64>,
        fp: Vec<f64>,
        fpp: Vec<f64>,
        fppp: Vec<f64>,
        k: f64,
        label: BranchLabel,
    ) -> Result<Self, ModelError> {
        validate_mesh(&mesh)?;
        for col in [&f, &fp, &fpp, &fppp] {
            if col.len() != mesh.len() {
                return Err(ModelError::LengthMismatch {
                    expected: mesh.len(),
                    got: col.len(),
                });
            }
        }
        Ok(Self {
            spec,
            mesh,
            f,
            fp,
            fpp,
            fppp,
            k,
            label,
        })
    }

    /// Builds a profile whose third derivative is taken from the ODE.
    pub fn from_ode(
        spec: ProblemSpec,
        mesh: Vec<f64>,
        f: Vec<f64>,
        fp: Vec<f64>,
        fpp: Vec<f64>,
        k: f64,
        label: BranchLabel,
    ) -> Result<Self, ModelError> {
        if f.len() != mesh.len() || fp.len() != mesh.len() || fpp.len() != mesh.len() {
            return Err(ModelError::LengthMismatch {
                expected: mesh.len(),
                got: f.len(),
            });
        }
        let fppp = mesh
            .iter()
            .enumerate()
            .map(|(i, &y)| rhs_similarity(y, f[i], fp[i], fpp[i], spec.reynolds, k))
            .collect();
        Self::new(spec, mesh, f, fp, fpp, fppp, k, label)
    }

    pub fn spec(&self) -> ProblemSpec {
        self.spec
    }
    pub fn reynolds(&self) -> f64 {
        self.spec.reynolds
    }
    pub fn a(&self) -> f64 {
        self.spec.a
    }
    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }
    pub fn f(&self) -> &[f64] {
        &self.f
    }
    pub fn fp(&self) -> &[f64] {
        &self.fp
    }
    pub fn fpp(&self) -> &[f64] {
        &self.fpp
    }
    pub fn fppp(&self) -> &[f64] {
        &self.fppp
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn label(&self) -> BranchLabel {
        self.label
    }
    pub fn len(&self) -> usize {
        self.mesh.len()
    }
    pub fn is_empty(&self) -> bool {
        self.mesh.is_empty()
    }

    pub fn with_label(mut self, label: BranchLabel) -> Self {
        self.label = label;
        self
    }

    /// Lower-wall skin friction `-f''(-1)`.
    pub fn skin_friction(&self) -> f64 {
        -self.fpp[0]
    }

    /// `(f, f', f'', f''')` at `y`, interpolated between nodes.
    pub fn eval(&self, y: f64) -> [f64; 4] {
        hermite::eval4(&self.mesh, [&self.f, &self.fp, &self.fpp, &self.fppp], y)
    }

    /// Largest nodal deviation of `f''' + R(f f'' - f'^2)` from `K`.
    pub fn k_residual(&self) -> f64 {
        let r = self.spec.reynolds;
        (0..self.len())
            .map(|i| {
                let ki = self.fppp[i] + r * (self.f[i] * self.fpp[i] - self.fp[i] * self.fp[i]);
                (ki - self.k).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest violation of the four wall conditions.
    pub fn bc_residual(&self) -> f64 {
        let n = self.len() - 1;
        [
            self.f[0] - self.spec.a,
            self.fp[0],
            self.f[n] - 1.0,
            self.fp[n],
        ]
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Resamples onto `mesh` using the profile interpolant.
    pub fn resample(&self, mesh: &[f64]) -> Result<Profile, ModelError> {
        let mut cols = [vec![], vec![], vec![], vec![]];
        for &y in mesh {
            let v = self.eval(y);
            for (c, x) in cols.iter_mut().zip(v) {
                c.push(x);
            }
        }
        let [f, fp, fpp, fppp] = cols;
        Profile::new(
            self.spec,
            mesh.to_vec(),
            f,
            fp,
            fpp,
            fppp,
            self.k,
            self.label,
        )
    }

    /// Max-norm distance between the `f` columns of two profiles evaluated on
    /// the union of both meshes.
    pub fn max_f_distance(&self, other: &Profile) -> f64 {
        self.mesh
            .iter()
            .chain(other.mesh.iter())
            .map(|&y| (self.eval(y)[0] - other.eval(y)[0]).abs())
            .fold(0.0, f64::max)
    }
}

fn validate_mesh(mesh: &[f64]) -> Result<(), ModelError> {
    if mesh.len() < 2 {
        return Err(ModelError::InvalidMesh("needs at least two nodes".into()));
    }
    if mesh[0] != -1.0 || mesh[mesh.len() - 1] != 1.0 {
        return Err(ModelError::InvalidMesh(
            "endpoints must be exactly -1 and 1".into(),
        ));
    }
    if mesh.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ModelError::InvalidMesh(
            "nodes must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `n` equal intervals on `[-1, 1]`.
pub fn uniform_mesh(n: usize) -> Vec<f64> {
    let n = n.max(1);
    let mut m: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
    m[0] = -1.0;
    m[n] = 1.0;
    m
}

/// Mesh clustered geometrically towards the suction wall `y = -1`, with the
/// first cell no wider than `0.2 / R`.
pub fn graded_mesh(reynolds: f64, coarse: usize) -> Vec<f64> {
    let coarse = coarse.max(8);
    let h_max = 2.0 / coarse as f64;
    let h0 = if reynolds > 0.0 {
        (0.2 / reynolds).min(h_max) * 0.5
    } else {
        h_max
    };
    let mut mesh = vec![-1.0];
    let mut h = h0;
    let mut y = -1.0;
    while y + h < 1.0 - 0.5 * h_max {
        y += h;
        mesh.push(y);
        h = (h * 1.08).min(h_max);
    }
    mesh.push(1.0);
    mesh
}

/// Closed-form zero-Reynolds solution sampled on `mesh`.
pub fn stokes_solution(a: f64, mesh: &[f64]) -> Result<Profile, ModelError> {
    check_asymmetry(a)?;
    let c = 1.0 - a;
    let mut f = Vec::with_capacity(mesh.len());
    let mut fp = Vec::with_capacity(mesh.len());
    let mut fpp = Vec::with_capacity(mesh.len());
    let mut fppp = Vec::with_capacity(mesh.len());
    for &y in mesh {
        f.push(0.5 * (1.0 + a) + 0.75 * c * y - 0.25 * c * y * y * y);
        fp.push(0.75 * c - 0.75 * c * y * y);
        fpp.push(-1.5 * c * y);
        fppp.push(-1.5 * c);
    }
    Profile::new(
        ProblemSpec::new(0.0, a)?,
        mesh.to_vec(),
        f,
        fp,
        fpp,
        fppp,
        -1.5 * c,
        BranchLabel::TypeI,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_examples() {
        assert_eq!(rhs_similarity(0.0, 1.0, 0.0, 0.0, 40.0, 0.0), 0.0);
        assert_eq!(rhs_similarity(0.3, 0.9, 0.15, 0.0, 0.0, -0.3), -0.3);
    }

    #[test]
    fn stokes_cases() {
        let mesh = uniform_mesh(40);
        let p = stokes_solution(1.0, &mesh).unwrap();
        assert!(p.f().iter().all(|&v| v == 1.0));
        assert_eq!(p.k(), 0.0);

        let p = stokes_solution(0.8, &mesh).unwrap();
        let mid = p.eval(0.0);
        assert!((mid[0] - 0.9).abs() < 1e-15);
        assert!((mid[1] - 0.15).abs() < 1e-15);
        assert!((p.k() + 0.3).abs() < 1e-15);
        assert!(p.bc_residual() < 1e-15);
        assert!(p.k_residual() == 0.0);

        let p = stokes_solution(0.5, &mesh).unwrap();
        assert!((p.eval(0.0)[0] - 0.75).abs() < 1e-15);
        assert!((p.k() + 0.75).abs() < 1e-15);
    }

    #[test]
    fn stokes_rejects_bad_asymmetry() {
        let mesh = uniform_mesh(4);
        assert!(stokes_solution(0.0, &mesh).is_err());
        assert!(stokes_solution(1.2, &mesh).is_err());
        assert!(stokes_solution(-0.1, &mesh).is_err());
    }

    #[test]
    fn mesh_validation() {
        let spec = ProblemSpec::new(1.0, 0.5).unwrap();
        let bad = vec![-1.0, 0.5, 0.2, 1.0];
        let z = vec![0.0; 4];
        assert!(Profile::new(
            spec,
            bad,
            z.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
            0.0,
            BranchLabel::TypeI
        )
        .is_err());
        let short = vec![-1.0, 0.9];
        assert!(Profile::new(
            spec,
            short,
            z.clone(),
            z.clone(),
            z.clone(),
            z,
            0.0,
            BranchLabel::TypeI
        )
        .is_err());
    }

    #[test]
    fn graded_mesh_resolves_suction_wall() {
        for r in [1.0, 100.0, 1500.0] {
            let m = graded_mesh(r, 100);
            assert_eq!(m[0], -1.0);
            assert_eq!(*m.last().unwrap(), 1.0);
            assert!(m[1] - m[0] <= 0.2 / r);
            assert!(m.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn label_parsing() {
        assert_eq!("II".parse::<BranchLabel>().unwrap(), BranchLabel::TypeII);
        assert_eq!(
            "TypeIII".parse::<BranchLabel>().unwrap(),
            BranchLabel::TypeIII
        );
        assert!("IV".parse::<BranchLabel>().is_err());
    }
}
