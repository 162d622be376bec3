//! Similarity solutions of laminar flow in a channel with one injecting and
//! one sucking porous wall:
//!
//! ```text
//! f''' + R (f f'' - f'^2) = K,   f(-1) = a, f'(-1) = 0, f(1) = 1, f'(1) = 0.
//! ```
//!
//! [`bvp`] solves and continues the problem by collocation, [`shooter`] is an
//! independent oracle built on the Terrill rescaling, [`asymptotics`] holds
//! the large-`R` approximations and [`flowfield`] rebuilds velocities and
//! streamlines.

pub mod asymptotics;
pub mod bvp;
pub mod cli;
pub mod flowfield;
pub mod hermite;
pub mod io;
pub mod model;
pub mod roots;
pub mod shooter;
pub mod terrill;

pub use model::{rhs_similarity, stokes_solution, BranchLabel, ModelError, ProblemSpec, Profile};
