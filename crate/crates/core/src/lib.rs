pub mod als;
pub mod error;
pub mod gadgets;
pub mod lattice;
pub mod params;
pub mod prims;
pub mod scheme;
pub mod trapdoor;
pub mod wire;

pub use error::{Error, Result};
