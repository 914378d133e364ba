//! Layered depth ("peeled") map encoding of clothed human meshes, residual
//! fusion with an underlying body model, training objectives, evaluation
//! metrics and dataset preparation.

pub mod cli;
pub mod codec;
pub mod dataset;
pub mod error;
pub mod fusion;
pub mod geometry;
pub mod io;
pub mod kdtree;
pub mod metrics;
pub mod objectives;
pub mod shapes;

pub use error::{Error, Result};
