pub mod cli;
pub mod error;
pub mod experiments;
pub mod measure;
pub mod points;
pub mod rng;
pub mod roots;
pub mod special;
pub mod stats;
pub mod tail;

pub use error::{Error, Result};
