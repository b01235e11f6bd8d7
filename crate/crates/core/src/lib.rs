//! Simulation laboratory for the error thresholds of toric and surface codes
//! undergoing a transversal CNOT.
//!
//! Two independent routes to the same thresholds live side by side:
//!
//! * **Statistical mechanics.** Decoding the two code blocks maps onto a 2D
//!   random Ashkin-Teller model ([`at2d`]) whose quenched bond disorder is
//!   correlated between the control and target species ([`noise`]). The
//!   order-disorder transitions of the two spin species are located by
//!   Metropolis Monte Carlo and a finite-size-scaling collapse ([`fss`]).
//!   With syndrome errors the problem becomes a 3D random plaquette gauge
//!   theory with a plane defect at the gate time ([`gauge3d`]).
//! * **Circuit sampling.** Persistent bit-flip noise is sampled on rotated
//!   surface codes, spacetime detectors are formed across the gate and a
//!   most-likely-error decoder that honours the correlated weights is run
//!   shot by shot ([`decoder`]).
//!
//! Geometry lives in [`lattice`], seed handling in [`rng`], file schemas and
//! configuration in [`io`], and the batch front-end in [`cli`].

pub mod at2d;
pub mod cli;
pub mod decoder;
pub mod error;
pub mod fss;
pub mod gauge3d;
pub mod io;
pub mod lattice;
pub mod noise;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
