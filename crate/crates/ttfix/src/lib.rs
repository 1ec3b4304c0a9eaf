//! File formats and the command-line front end for computing fixed
//! subgroups of free-group automorphisms.
//!
//! * [`automorphism`] — the plain-text `gen -> word` format;
//! * [`track_file`] — JSON train-track files (load, validate, save);
//! * [`cli`] — the mode dispatcher behind the `ttfix` binary.

pub mod automorphism;
pub mod cli;
pub mod track_file;

pub use ttfix_core as core;
