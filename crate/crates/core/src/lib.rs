pub mod arith;
pub mod bessel;
pub mod bounds;
pub mod config;
pub mod error;
pub mod lattice;
pub mod lift;
pub mod maass;
pub mod output;
pub mod petersson;
pub mod quad;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
