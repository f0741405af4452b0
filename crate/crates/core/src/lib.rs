//! Worst-case bit-flip error correction over randomly coded networks.
//!
//! The crate models a network that performs random linear network coding
//! over GF(2^m), abstracts it as the binary channel `Y = T X + T̂ Z`, and
//! builds greedy (Gilbert-Varshamov style) codebooks in the transform
//! metric induced by the impulse-response matrix `T̂`. The [`bounds`]
//! module evaluates the matching Hamming-type and GV-type rate bounds.

pub mod bitmatrix;
pub mod combin;
pub mod error;
pub mod gf2m;
pub mod network;
pub mod metric;
pub mod channel;
pub mod codes;
pub mod bounds;
pub mod cli;

pub use bitmatrix::BitMatrix;
pub use error::{Error, Result};
pub use gf2m::{Field, FieldElem, FieldMatrix};
