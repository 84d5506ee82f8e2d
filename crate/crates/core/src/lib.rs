//! Occupancy-grid mapping from ring-sonar traces.
//!
//! Three mappers share one geometry layer: a log-odds probabilistic grid, a
//! pair of fuzzy grids aggregated with the algebraic sum, and an antonym
//! mapper that keeps occupied and empty evidence apart, quantifies it, and
//! removes contradictions. A seeded simulator, file formats and the
//! evaluation metrics complete the pipeline.

pub mod antonym;
pub mod config;
pub mod error;
pub mod eval;
pub mod fuzzy;
pub mod geometry;
pub mod io;
pub mod pipeline;
pub mod prob;
pub mod sensor;
pub mod sim;

pub use error::{Error, Result};
