//! Poisson-Boolean model with heavy-tailed convex grains.
//!
//! Grains are convex bodies whose diameters have regularly varying tails. The crate
//! samples the marked point process, builds the intersection graph and measures
//! chemical distances, and evaluates the scaling exponents that govern them.

pub mod error;
pub mod geometry;
pub mod grains;
pub mod graph;
pub mod oracles;
pub mod process;
pub mod theory;

pub use error::{Error, Result};
