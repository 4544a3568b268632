//! Melnikov functions of trigonometrically perturbed pendulum systems near
//! the center `h = 0`.
//!
//! The crate is organised as a pipeline:
//!
//! * [`exact`]: rational arithmetic over `{π, √2, 1}` and truncated
//!   half-power series with exact coefficients;
//! * [`quadrature`]: floating-point evaluation of the orbit integrals, used
//!   as an independent oracle;
//! * [`melnikov`]: perturbation data, symmetry reduction, the reduction
//!   identities and the canonical form;
//! * [`zeros`]: zero bounds backed by exact rank checks, plus explicit
//!   realisation of the sharp bounds;
//! * [`sim`]: direct simulation of the perturbed pendulum and its return
//!   map;
//! * [`cli`]: the `melkit` command line front end.

pub mod cli;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod melnikov;
pub mod quadrature;
pub mod sim;
pub mod zeros;

pub use error::{Error, Result};

/// Version tag carried by every JSON document the crate emits.
pub const SCHEMA_VERSION: u32 = 1;
