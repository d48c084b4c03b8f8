//! Optimal vaccination for a spatial SIR epidemic whose time derivative is the
//! Atangana-Baleanu-Caputo fractional operator.
//!
//! The layers build on each other:
//! [`special`] (Gamma, Mittag-Leffler) → [`fractional`] (discrete ABC operators)
//! → [`spatial`] and [`model`] → [`forward`] and [`adjoint`] solvers →
//! [`optimizer`] (cost, projection, forward-backward sweep) →
//! [`scenario`], [`output`] and [`cli`].

// oracle constants keep every digit they were generated with
#![allow(clippy::excessive_precision)]

pub mod adjoint;
pub mod cli;
pub mod error;
pub mod forward;
pub mod fractional;
pub mod model;
pub mod optimizer;
pub mod output;
mod quad;
pub mod scenario;
pub mod spatial;
pub mod special;

pub use error::{Error, Result};
