//! Visibility of lattice points along random and periodic walks.

pub mod constants;
pub mod error;
pub mod lattice;
pub mod numtheory;
pub mod poly;
pub mod rational_walks;
pub mod simulator;
pub mod verification;

pub use error::{Error, Result};
