//! Sum-of-squares multipliers and strict separators on real projective
//! curves, with the Hilbert-function invariants and degree bounds that
//! govern them.

pub mod algebra;
pub mod bounds;
pub mod certify;
pub mod curves;
pub mod harnack;
pub mod io;
pub mod polygon;
pub mod sdp;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
