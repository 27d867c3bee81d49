pub mod cli;
pub mod config;
pub mod density;
pub mod error;
pub mod expr;
pub mod measures;
pub mod models;
pub mod quadrature;
pub mod sde;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
