//! Integrals of motion, polynomial Poisson algebras and trajectory checks for
//! classical superintegrable systems built from one-dimensional ladder
//! operators.
//!
//! The crate is `no_std` with `alloc`. File formats, configuration and the
//! command-line front end live in the `superladder` crate.
#![no_std]
// `!(x <= tol)` is deliberate: NaN must fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod integrals;
pub mod jet;
pub mod ladders;
pub mod linalg;
pub mod ode;
pub mod phase_space;
pub mod polynomial;
pub mod sampling;
pub mod systems;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use phase_space::{poisson_bracket, Gradient, Observable, PhasePoint};
pub use systems::{AxisParams, Sign, SystemSpec};
