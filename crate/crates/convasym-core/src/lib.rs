//! Core library for `convasym`: exact k-fold convolutions of combinatorial
//! sequences (Catalan numbers, central binomial coefficients and their powers),
//! their saddle-point asymptotics, the associated large-deviation rate
//! functions, and samplers for the path ensembles whose zero-set statistics
//! those convolutions count.
//!
//! The crate is `no_std` + `alloc`; float transcendentals go through [`libm`]
//! so results are bit-identical across platforms. Exact work uses big integers
//! and rationals, never floats.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod asymptotics;
pub mod ensembles;
pub mod genfun;
pub mod ratefn;
pub mod sequences;
pub mod specfn;

pub use error::{Error, Result};
