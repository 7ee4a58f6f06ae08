pub mod augment;
pub mod cli;
pub mod corruption;
pub mod data;
pub mod error;
pub mod eval;
pub mod image;
pub mod robustness;
pub mod seed;

pub use error::{Error, Result};
pub use image::RgbImage;

/// Crate version, shared with the Python bindings.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
