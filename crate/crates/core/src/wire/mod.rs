//! Canonical serialization.

pub mod codec;
pub mod objects;

pub use objects::{decode, decode_params, encode, encode_params, peek_header, Kind, WireObject};
