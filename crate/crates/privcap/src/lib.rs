//! Numerical toolkit for private-capacity values and upper bounds of
//! finite-dimensional quantum channels.
//!
//! The crate is organized bottom-up:
//!
//! - [`channel`]: channels in Kraus form, isometric extensions, complementary
//!   channels, Choi matrices, and named channel families.
//! - [`info`]: entropic quantities in bits: von Neumann entropy, coherent
//!   information, Holevo quantities, and private information of processed
//!   classical-quantum ensembles.
//! - [`capacity`]: closed-form single-letter capacity formulas for the named
//!   families plus a multi-restart numerical maximizer and threshold finder.
//! - [`certify`]: machine-checkable degradability / antidegradability
//!   certificates found by alternating projections.
//! - [`bound`]: channel decompositions, their capacity costs, lower convex
//!   envelopes, and the assembled upper-bound curves.
//! - [`schema`]: strict JSON schemas for channels, ensembles, certificates
//!   and decompositions.
//!
//! Grid sweeps and restart fans run through [`exec::par_map`], which uses
//! rayon under the default `parallel` feature and a sequential loop without
//! it.

pub mod bound;
pub mod capacity;
pub mod certify;
pub mod channel;
pub mod error;
pub mod exec;
pub mod info;
pub mod linalg;
pub mod schema;

pub use error::{Error, Result};
