//! Supersymmetric phase-equivalent partners of deep two-body potentials.
//!
//! The crate builds the half-line sech^2 superdeep well, solves its radial
//! bound states, removes deeply bound (Pauli-forbidden) states with the
//! two-step supersymmetric transformation, and compares deep and shallow
//! descriptions on radii, s-wave phase shifts and zero-range transfer
//! strengths.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bound;
pub mod error;
pub mod fitting;
pub mod grid;
pub mod io;
mod numerov;
pub mod observables;
pub mod pipeline;
pub mod poschl_teller;
pub mod potential;
pub mod susy;

pub use bound::{BoundState, RegularSolution};
pub use error::{Error, Result};
pub use grid::{ChannelConstants, RadialGrid};
pub use potential::{Potential, TabulatedPotential};
