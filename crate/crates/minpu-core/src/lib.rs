//! Solvers for the minimum-p-union and densest-k-subhypergraph problems on
//! unit-square instances: points on the plane are hypergraph vertices, and
//! each open axis-aligned unit square contributes the hyperedge of points it
//! contains.
//!
//! The crate is `no_std` (with `alloc`); all geometry is exact rational
//! arithmetic, so results are reproducible bit for bit. File formats, the
//! CLI, and anything that needs an operating system live in the companion
//! `minpu-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assembly;
pub mod blockdp;
pub mod coord;
pub mod error;
pub mod geom;
pub mod oracle;
pub mod reduction;
pub mod rng;

pub use coord::Coord;
pub use error::Error;
pub use geom::{GenericityReport, GridPoint, Instance, Point, UnitSquare};
