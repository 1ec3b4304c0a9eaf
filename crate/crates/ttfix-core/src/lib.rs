//! Core algorithms for computing a free basis of the fixed subgroup of a
//! free-group automorphism from a relative train track representative.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod algebraic;
pub mod bcc;
pub mod cancel;
pub mod core_builder;
pub mod corpus;
pub mod df;
pub mod error;
pub mod filtration;
pub mod graph;
pub mod map;
pub mod orbit;
pub mod poly;
pub mod rtt;
pub mod solver;
pub mod stallings;
pub mod track;
pub mod word;

pub use error::{Error, Result};
