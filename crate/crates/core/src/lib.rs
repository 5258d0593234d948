//! Matrix pencils over ℚ: Kronecker structure, minimal ranks, orbit
//! classification for small sizes, and the two-block tensor decompositions
//! that minimal ranks describe.

pub mod btd;
pub mod classify;
pub mod error;
pub mod exact;
pub mod kcf;
pub mod minrank;
pub mod pencil;
pub mod polyrank;
pub mod sample;

pub use error::{Error, Result};
