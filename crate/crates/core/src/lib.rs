pub mod encoder;
pub mod error;
pub mod graph;
mod measure;
pub mod model;
pub mod motif;
mod par;
pub mod synth;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use measure::Measure;
