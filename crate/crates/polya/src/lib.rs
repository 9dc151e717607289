//! Exact enumeration and uniform random sampling of unlabeled structures.
//!
//! The crate is organised bottom-up:
//!
//! - [`zindex`]: truncated cycle index series with exact rational coefficients,
//!   plethysm, pointed plethysm and the pointing operator.
//! - [`grammar`]: a small specification language for recursive and
//!   cycle-pointed recursive species, with sort and well-foundedness checks.
//! - [`enumerate`]: coefficient solver for validated grammars plus closed-form
//!   counters for plane trees, d-regular plane trees and 2-connected maps.
//! - [`oracle`]: floating point evaluation of generating functions at `x, x^2, ...`
//!   and singularity analysis.
//! - [`sampler`]: Polya-Boltzmann samplers driven by a grammar and an oracle table.
//! - [`families`]: built-in grammars, 2-connected block series and canonical forms.
//!
//! Everything here is `no_std` with `alloc`; file IO and the command line live in
//! the companion `polya-cli` crate.

#![no_std]

extern crate alloc;

mod error;

pub mod enumerate;
pub mod families;
pub mod grammar;
pub mod oracle;
pub mod sampler;
pub mod zindex;

pub use error::{Error, Result};
