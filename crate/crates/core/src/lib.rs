//! Interlace constructions, balanced column reservoirs, bracket families and
//! an exact solver for deterministic communication complexity.
//!
//! Everything here is a pure function of its inputs. File formats, timing
//! and the command line live in the `interlace-lab` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bracket;
pub mod canonical;
pub mod density;
mod error;
pub mod gf2m;
mod grid;
pub mod harness;
pub mod interlace;
pub mod label;
pub mod matrix;
pub mod naive;
pub mod rank;
pub mod reduction;
pub mod reservoir;
pub mod small_bias;
pub mod solver;
pub mod subgame;

pub use error::{Error, Result};
pub use label::Label;
pub use matrix::BooleanMatrix;

/// Exact non-negative rational used for densities, accuracies and quotas.
pub type Fraction = num_rational::Ratio<u64>;
