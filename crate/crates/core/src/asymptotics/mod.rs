//! Large-`R` approximations of the three branches.

pub mod quad;
mod type1;
mod type2;
mod type3;

use thiserror::Error;

pub use type1::{lambda_closed_form, q_integral, type_i_eval, TypeIParams, MAX_EPS};
pub use type2::{type_ii_core, type_ii_deltas, AsymptoticParamsII};
pub use type3::{
    default_layer_length, estimate_beta, solve_layer, type_iii_composite, type_iii_layer,
    type_iii_reduced, BetaEstimate, LayerSolution, BETA_FIT_WARNING,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("y = {y} outside the core interval [{lo}, {hi}]")]
    Domain { y: f64, lo: f64, hi: f64 },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("layer solve did not converge: {0}")]
    NoConvergence(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}
