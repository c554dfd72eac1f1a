//! Harmonic and superharmonic majorants on the unit disk.
//!
//! The crate covers hyperbolic geometry on the disk and the upper
//! half-plane, the dyadic packing model and its dominating measures, Poisson
//! integrals and logarithmic potentials, log-Lipschitz envelopes, iterated
//! hyperbolic sup-means, and the half-plane counterexample constructions.

pub mod averaging;
pub mod dyadic;
pub mod envelope;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod grid;
pub mod kernels;
pub mod reduction;

pub use error::{MajorantError, Result};
pub use geometry::{Domain, Point};
