//! Exact computational kernels for complete exponential sums with sparse
//! polynomials over residue rings, the recursive saving constants attached to
//! their bounds, the power generator of pseudorandom numbers, and the
//! multidimensional discrepancy of the point sets it produces.
//!
//! Everything in this crate is deterministic and allocation-only (`no_std`
//! plus `alloc`); IO, file formats, and thread-pool drivers live in the
//! companion `spex` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod bounds;
pub mod counting;
pub mod discrepancy;
pub mod expsum;
pub mod poly;
pub mod powgen;
pub mod rng;

mod error;

pub use error::{Error, Result};

pub use num_bigint::BigInt;
pub use num_complex::Complex64;
pub use num_rational::BigRational;
