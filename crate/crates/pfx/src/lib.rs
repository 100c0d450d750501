//! Numerical toolkit for symmetric partial-fraction identities and the
//! gamma-ratio series they generate.

pub mod error;
pub mod scalar;
pub mod sum;
pub mod cli;
pub mod oracle;
pub mod series;
pub mod sym;
pub mod tail;

pub mod finite;
pub use error::{Error, Result};
pub use scalar::C;
