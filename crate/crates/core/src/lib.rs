pub mod cli;
pub mod conditioning;
pub mod error;
pub mod numbers;
pub mod pairing;
pub mod seed;

pub use error::{Error, Result};
pub mod landscape;
pub mod moments;
pub mod orientation;
