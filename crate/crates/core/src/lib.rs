//! peano-lab: a simulation laboratory for the Brownian / lattice encoding of
//! random surfaces by correlated two-dimensional walks.
//!
//! The crate generates correlated paths `Z = (L, R)` ([`corrpath`]), extracts
//! their quadrant-cone combinatorics — cone times, maximal cone intervals,
//! simultaneous-infima sets, ancestor-free sets ([`conescan`]) — decomposes
//! path futures into beads and chordal boundary-length processes ([`beads`]),
//! glues the two discrete trees into a planar map and checks sphericity
//! ([`mating`]), and estimates the scaling exponents of all of the above
//! against their closed forms ([`exponents`]).
//!
//! All samplers are seeded and chunk-deterministic: a fixed seed produces
//! bitwise-identical output regardless of worker count.

pub mod beads;
pub mod conescan;
pub mod corrpath;
pub mod error;
pub mod exponents;
pub mod mating;

pub use error::{Error, Result};
