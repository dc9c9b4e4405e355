pub mod data;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod legendre;
pub mod points;
pub mod rls;

pub use error::{Error, Result};
