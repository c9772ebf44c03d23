//! Exact Szemerédi–Trotter constructions over nice bases of number fields.
//!
//! The pipeline: a [`numberfield::NiceBasis`] presents the ring, [`gap`]
//! enumerates the boxes `A_m(Λ)`, [`geometry`] supplies exact lines and the
//! brute-force incidence oracle, [`construction`] builds the translate
//! family of rich lines, and [`harness`] runs configured experiments.

pub mod error;
pub mod gap;
pub mod geometry;
pub mod numberfield;
pub mod construction;
pub mod harness;

pub use error::{Error, Result};
