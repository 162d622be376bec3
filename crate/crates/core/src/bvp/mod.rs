//! Direct collocation solver for the similarity problem, continuation in
//! `R`, fold location and profile classification.

pub mod banded;
mod classify;
pub mod colloc;
mod continuation;
pub mod guess;
mod solve;
pub mod system;

use thiserror::Error;

use crate::model::ModelError;

pub use classify::{classify_profile, sign_changes, turning_points, TurningPoints};
pub use continuation::{
    continue_branch, count_solutions, discover_branches, find_fold, solve_many, Branch,
    BranchPoint, DiscoverOptions, FoldEstimate, StepControl, StopReason,
};
pub use guess::guess_profile;
pub use solve::{solve_branch, solve_bvp, BranchSolveOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BvpError {
    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("mesh refinement exhausted at {nodes} nodes (error {max_error:e})")]
    MeshExhausted { nodes: usize, max_error: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("R is monotone along the branch; no fold")]
    NoFold,
    #[error("expected two interior zeros of f, found {zeros}")]
    WrongBranch { zeros: usize },
    #[error("branch not found: {0}")]
    BranchNotFound(String),
}

impl From<colloc::CollocError> for BvpError {
    fn from(e: colloc::CollocError) -> Self {
        match e {
            colloc::CollocError::NoConvergence {
                iterations,
                correction,
            } => BvpError::NoConvergence(format!(
                "{iterations} iterations, last correction {correction:e}"
            )),
            colloc::CollocError::Singular => BvpError::NoConvergence("singular Jacobian".into()),
            colloc::CollocError::MeshExhausted { nodes, max_error } => {
                BvpError::MeshExhausted { nodes, max_error }
            }
        }
    }
}
