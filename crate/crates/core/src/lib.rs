//! Differential geometry of curves on parametrized surfaces, centred on
//! curves whose position vector stays in the tangent plane of the surface.
//!
//! The crate evaluates analytic patches with exact Taylor jets
//! ([`jet`], [`expr`]), computes fundamental forms and Christoffel symbols
//! ([`geometry`]), samples curves at unit speed with their Frenet frames
//! ([`frame`]), decomposes the position vector in the tangent basis and traces
//! tangent-position curves ([`tangent`]), and compares coordinate-matched
//! isometric surfaces ([`isometry`]).

pub mod builtin;
pub mod error;
pub mod expr;
pub mod frame;
pub mod geometry;
pub mod isometry;
pub mod jet;
pub mod tangent;

pub use error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
