pub mod bodies;
pub mod buspetty;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod fracderiv;
pub mod par;
pub mod sections;
pub mod specfun;

pub use error::{Error, Result};
