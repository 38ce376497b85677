//! Fast color-space transforms built on minimax approximations.
//!
//! The crate provides exact RGB to CIELAB, HSI and SCT transforms, drop-in
//! fast paths that replace `cbrt`, `arctan`, `arcsin` and `arccos` with
//! minimax polynomials or rationals, a Remez exchange engine that regenerates
//! those approximants, 3D lookup-table interpolation baselines, and an
//! evaluation harness over the full 24-bit RGB cube.

pub mod error;
pub mod exact;
pub mod fast;
pub mod harness;
pub mod lut;
pub mod poly;
pub mod registry;
pub mod remez;
pub mod space;

pub use error::{Error, Result};
pub use space::Space;
