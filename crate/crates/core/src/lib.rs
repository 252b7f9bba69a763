//! Numerical toolkit for mixed-type nonlinear functional integral equations
//! `x = Ax + Bx` on the half-line in `L¹`, with `B = N_g T` and
//! `A = N_f U Q`.
//!
//! The crate discretizes integrable functions, applies the operators,
//! computes the contraction constant and invariant-ball radius that drive
//! the existence argument, checks the structural hypotheses by sampling,
//! estimates measures of weak noncompactness on finite ensembles, and runs
//! fixed-point iterations with residual certification.

// `!(x > 0.0)` is how NaN is rejected along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod cli;
pub mod error;
pub mod l1;
pub mod operators;
pub mod solver;
pub mod wkmeasure;

pub use error::{Error, Result};
pub use l1::{Grid, GridFunction, MeasurableSubset, TimeFunction};
pub use operators::ProblemSpec;
