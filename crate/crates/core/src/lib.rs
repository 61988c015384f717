pub mod cli;
pub mod cochain;
pub mod cohomology;
pub mod collation;
pub mod cover;
pub mod error;
pub mod figures;
pub mod forms;
pub mod geometry;
pub mod integrate;
pub mod nerve;
pub mod quadrature;
pub mod sampling;
pub mod snf;
pub mod worldline;

pub use error::{Error, Result};
