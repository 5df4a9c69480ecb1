//! Self-similar shrinking profiles of the equivariant harmonic-map and
//! Yang–Mills heat flows.
//!
//! The profile equations are singular at the origin and have a decaying
//! tail at infinity. [`shooter`] connects the two by shooting in the origin
//! parameter `a`; [`diagnostics`] evaluates the auxiliary function
//! `h = y^3 v'`, the weighted energy and the equator Morse index.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod models;
pub mod ode;
mod quadrature;
mod series;
pub mod shooter;

pub use error::{Error, Result};
