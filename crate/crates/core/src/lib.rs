pub mod cli;
pub mod error;
pub mod exactmath;
pub mod heun;
pub mod orthoseq;
pub mod qes;
pub mod verify;

pub use error::{Error, Result};
