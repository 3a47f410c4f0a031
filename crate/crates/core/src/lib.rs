//! Numerical laboratory for Jain-type positive linear operators of
//! Baskakov-weighted integral type.
//!
//! * [`basis`]: Jain and Baskakov weights, series truncation, Beta moments.
//! * [`operators`]: point evaluation of `G_n^mu`, `K_n^{mu,r}`,
//!   `K_{n,c}^{mu,r}` and the Stancu form.
//! * [`moments`]: closed-form and numeric moments, sandwich constants and
//!   tail masses.
//! * [`bvrate`]: the bounded-variation test corpus and the rate-bound
//!   experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bvrate;
pub mod error;
pub mod moments;
pub mod operators;
pub mod poly;
pub mod quadrature;
pub mod special;

pub use basis::{Accuracy, BaskakovArgs, JainWeightArgs};
pub use error::{Error, Result};
pub use operators::{Family, Integrand, OperatorSpec};
